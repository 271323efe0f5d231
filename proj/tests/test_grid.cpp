#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "translab/grid.hpp"

using namespace translab;

TEST_CASE("rect domain: 5x5 node classification") {
    auto d = GridDomain::rect(-1, 1, -1, 1, 5, 5);
    CHECK(d->count(NodeClass::Interior) == 9);
    CHECK(d->count(NodeClass::Boundary) == 16);
    CHECK(d->count(NodeClass::Exterior) == 0);
}

TEST_CASE("degenerate extents and bad annulus are rejected") {
    CHECK_THROWS_AS(GridDomain::rect(1, 1, 0, 1, 5, 5), std::invalid_argument);
    CHECK_THROWS_AS(GridDomain::rect(0, 1, 0, 1, 2, 5), std::invalid_argument);
    CHECK_THROWS_AS(GridDomain::annulus(0.8, 0.5, 33), std::invalid_argument);
    CHECK_THROWS_AS(GridDomain::disk(-1.0, 9), std::invalid_argument);
}

TEST_CASE("disk mask is symmetric under x<->-x and y<->-y when centered") {
    for (int n : {5, 17, 33}) {
        auto d = GridDomain::disk(1.0, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                CHECK(d->at(i, j) == d->at(n - 1 - i, j));
                CHECK(d->at(i, j) == d->at(i, n - 1 - j));
            }
    }
}

TEST_CASE("slab: every node has 4 axis neighbors via wraparound") {
    auto d = GridDomain::slab(-1.5708, 1.5708, 9, 0.0, 6, 0.2);
    for (int j = 0; j < d->ny; ++j)
        for (int i = 1; i < d->nx - 1; ++i) {
            int cnt = 0;
            const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) cnt += d->at(i + di[k], j + dj[k]) != NodeClass::Exterior;
            CHECK(cnt == 4);
        }
    CHECK(d->at(3, -1) == d->at(3, 5));
    CHECK(d->at(3, 6) == d->at(3, 0));
}

TEST_CASE("mask invariant holds for random constructor inputs") {
    std::mt19937_64 rng(20240817);
    for (int trial = 0; trial < 40; ++trial) {
        double w = 0.3 + 3.0 * static_cast<double>(rng() % 1000) / 1000.0;
        int n = 3 + static_cast<int>(rng() % 40);
        int m = 3 + static_cast<int>(rng() % 40);
        DomainPtr d;
        switch (rng() % 4) {
            case 0: d = GridDomain::rect(-w, w, -1, 1, n, m); break;
            case 1: d = GridDomain::slab(-w, w, n, 0.0, m, 2 * w / n); break;
            case 2: d = GridDomain::disk(w, n); break;
            default: d = GridDomain::annulus(0.2 * w, w, std::max(n, 9)); break;
        }
        CHECK_NOTHROW(d->validate());
    }
}

TEST_CASE("refine halves spacings; refine twice gives h/4 exactly") {
    auto d = GridDomain::rect(0, 1, 0, 2, 5, 9);
    auto d2 = d->refine()->refine();
    CHECK(d2->hx == d->hx / 4);
    CHECK(d2->hy == d->hy / 4);
    CHECK(d2->nx == 17);

    auto disk = GridDomain::disk(1.0, 9);
    auto fine = disk->refine();
    CHECK(fine->hx == disk->hx / 2);
    for (int j = 0; j < disk->ny; ++j)
        for (int i = 0; i < disk->nx; ++i)
            if (disk->at(i, j) == NodeClass::Interior)
                CHECK(fine->at(2 * i, 2 * j) == NodeClass::Interior);

    auto slab = GridDomain::slab(-1, 1, 5, 0.0, 4, 0.25);
    auto sf = slab->refine();
    CHECK(sf->periodic_y);
    CHECK(sf->ny == 8);
    CHECK(sf->hy == 0.125);  // period preserved
}

TEST_CASE("norms: sup over non-exterior, weighted l2 over interior") {
    auto d = GridDomain::rect(0, 1, 0, 1, 5, 5);
    ScalarField c2(d, 2.0);
    CHECK(norms(c2).sup == 2.0);
    ScalarField z(d);
    CHECK(norms(z).sup == 0.0);
    CHECK(norms(z).weighted_l2 == 0.0);

    // f = x against a direct summation oracle
    auto d2 = GridDomain::rect(0, 1, 0, 1, 9, 9);
    ScalarField fx(d2);
    for (int j = 0; j < 9; ++j)
        for (int i = 0; i < 9; ++i) fx(i, j) = d2->x(i);
    double oracle = 0;
    for (int j = 1; j < 8; ++j)
        for (int i = 1; i < 8; ++i) oracle += d2->x(i) * d2->x(i) * d2->hx * d2->hy;
    CHECK(norms(fx).weighted_l2 == doctest::Approx(std::sqrt(oracle)).epsilon(1e-14));
}

TEST_CASE("field io roundtrip is bit-exact") {
    auto d = GridDomain::rect(-1.2, 1.2, 0, 0.5, 17, 9);
    ScalarField f(d);
    std::mt19937_64 rng(7);
    for (int n = 0; n < d->size(); ++n)
        f.at_idx(n) = std::ldexp(static_cast<double>(rng()), -64) - 0.5;
    std::string path = (std::filesystem::temp_directory_path() / "tl_roundtrip.txt").string();
    save_field(f, path);
    ScalarField g = load_field(path);
    REQUIRE(g.dom().nx == d->nx);
    for (int n = 0; n < d->size(); ++n) CHECK(g.at_idx(n) == f.at_idx(n));
    CHECK(g.dom().hx == d->hx);
    std::filesystem::remove(path);
}

TEST_CASE("field io rejects malformed input") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path();

    auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream os(dir / name);
        os << body;
        return (dir / name).string();
    };

    SUBCASE("NaN value") {
        std::string p = write("tl_bad_nan.txt",
                              "# translator-field v1 nx=3 ny=3 hx=0.5 hy=0.5 shape=RECT\n"
                              "0 0 1 nan\n");
        CHECK_THROWS_WITH_AS(load_field(p), doctest::Contains("non-finite"), std::runtime_error);
        fs::remove(p);
    }
    SUBCASE("wrong node count") {
        std::string p = write("tl_bad_count.txt",
                              "# translator-field v1 nx=3 ny=3 hx=0.5 hy=0.5 shape=RECT\n"
                              "0 0 1 0.0\n0 1 1 0.0\n");
        CHECK_THROWS_WITH_AS(load_field(p), doctest::Contains("node count"), std::runtime_error);
        fs::remove(p);
    }
    SUBCASE("malformed line carries its number") {
        std::string p = write("tl_bad_line.txt",
                              "# translator-field v1 nx=3 ny=3 hx=0.5 hy=0.5 shape=RECT\n"
                              "0 0 1 0.0\nthis is not a node line\n");
        CHECK_THROWS_WITH_AS(load_field(p), doctest::Contains(":3:"), std::runtime_error);
        fs::remove(p);
    }
    SUBCASE("bad header") {
        std::string p = write("tl_bad_header.txt", "# something else\n");
        CHECK_THROWS_WITH_AS(load_field(p), doctest::Contains("header"), std::runtime_error);
        fs::remove(p);
    }
}

TEST_CASE("interior core mask keeps a clear collar") {
    auto d = GridDomain::rect(0, 1, 0, 1, 9, 9);
    auto m = interior_core_mask(*d, 2);
    CHECK(m[d->idx(4, 4)] == 1);
    CHECK(m[d->idx(1, 4)] == 0);
    CHECK(m[d->idx(2, 2)] == 0);
    CHECK(m[d->idx(3, 3)] == 1);
}
