#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "translab/exact.hpp"
#include "translab/geometry.hpp"
#include "translab/grid.hpp"
#include "translab/metric.hpp"

using namespace translab;

TEST_CASE("conformal sectional curvatures match the closed-form values") {
    // K_12 = -e^{-x3}/4, K_i3 = 0, computed from the metric alone
    CHECK(conformal_sectional_curvature(0.0, {0.4, -0.7, 0.0}, 0, 1) ==
          doctest::Approx(-0.25).epsilon(1e-6));
    CHECK(std::abs(conformal_sectional_curvature(0.0, {0.4, -0.7, 0.3}, 0, 2)) <= 1e-6);
    CHECK(std::abs(conformal_sectional_curvature(0.0, {-1.0, 0.2, -0.5}, 1, 2)) <= 1e-6);
    CHECK(conformal_sectional_curvature(0.0, {0.1, 0.5, std::log(4.0)}, 0, 1) ==
          doctest::Approx(-0.0625).epsilon(1e-5));
    CHECK_THROWS_AS(conformal_sectional_curvature(0.0, {0, 0, 0}, 1, 1), std::invalid_argument);
}

TEST_CASE("sectional curvature depends only on x3") {
    double ref = conformal_sectional_curvature(0.0, {0.0, 0.0, 0.37}, 0, 1);
    for (int k = 1; k <= 10; ++k) {
        double v = conformal_sectional_curvature(0.0, {0.31 * k, -0.17 * k, 0.37}, 0, 1);
        CHECK(std::abs(v - ref) <= 1e-8);
    }
}

TEST_CASE("flat-plane lattice distances") {
    auto d = GridDomain::rect(-1, 1, -1, 1, 65, 65);
    GraphGeometry g = compute_geometry(ScalarField(d, 0.0));
    CHECK(intrinsic_distance(g, 32, 32, 33, 32) == doctest::Approx(d->hx).epsilon(1e-14));
    // octile overhead over long diagonals stays below 8.3%
    double dd = intrinsic_distance(g, 4, 4, 60, 34);
    double ex = std::hypot(56 * d->hx, 30 * d->hy);
    CHECK(dd / ex <= 1.083);
    CHECK(dd >= ex);
}

TEST_CASE("grim reaper arclength against the closed form") {
    auto d = GridDomain::rect(-1.2, 1.2, 0, 0.6, 129, 33);
    ScalarField u = sample(*grim_reaper(1.0), d);
    GraphGeometry g = compute_geometry(u);
    int p = static_cast<int>(std::lround((0.0 - d->x0) / d->hx));
    int q = static_cast<int>(std::lround((1.0 - d->x0) / d->hx));
    double dg = intrinsic_distance(g, p, 16, q, 16);
    double arc = std::log(1.0 / std::cos(1.0) + std::tan(1.0));  // int sec
    CHECK(std::abs(dg / arc - 1.0) <= 0.09);
}

TEST_CASE("distance symmetry and triangle inequality on sampled triples") {
    auto d = GridDomain::rect(-1.1, 1.1, 0, 0.6, 45, 13);
    ScalarField u = sample(*grim_reaper(1.0), d);
    GraphGeometry g = compute_geometry(u);
    SurfaceDistance metric(g, false);
    std::mt19937_64 rng(99);
    for (int t = 0; t < 50; ++t) {
        int a[2], b[2], c[2];
        for (auto* p : {a, b, c}) {
            p[0] = 1 + static_cast<int>(rng() % 43);
            p[1] = 1 + static_cast<int>(rng() % 11);
        }
        auto da = metric.from(a[0], a[1]);
        auto db = metric.from(b[0], b[1]);
        double ab = da[d->idx(b[0], b[1])];
        double ba = db[d->idx(a[0], a[1])];
        // reversed paths sum edges in opposite order: rounding only
        CHECK(std::abs(ab - ba) <= 1e-13 * (1 + ab));
        double ac = da[d->idx(c[0], c[1])];
        double bc = db[d->idx(c[0], c[1])];
        CHECK(ab <= ac + bc + 1e-13 * (1 + ab));
    }
}

TEST_CASE("conformal distance: unit weight, scaling, and the sandwich") {
    auto d = GridDomain::rect(-1.1, 1.1, 0, 0.6, 89, 25);

    SUBCASE("constant graphs give d~ = d exactly") {
        GraphGeometry g = compute_geometry(ScalarField(d, 1.7));
        CHECK(conformal_distance(g, 10, 5, 60, 20) ==
              doctest::Approx(intrinsic_distance(g, 10, 5, 60, 20)).epsilon(1e-14));
    }

    SUBCASE("raising u by c scales d~ by e^{c/2} for an external base point") {
        ScalarField u = sample(*grim_reaper(1.0), d);
        GraphGeometry g = compute_geometry(u);
        ScalarField u2 = u;
        for (int n = 0; n < d->size(); ++n) u2.at_idx(n) += 0.8;
        GraphGeometry g2 = compute_geometry(u2);
        double p3 = u(20, 10);  // held fixed externally
        double d1 = SurfaceDistance(g, true, p3).between(20, 10, 70, 15);
        double d2 = SurfaceDistance(g2, true, p3).between(20, 10, 70, 15);
        CHECK(d2 == doctest::Approx(std::exp(0.4) * d1).epsilon(1e-12));
    }

    SUBCASE("the distance sandwich holds for translator and non-translator fields") {
        std::mt19937_64 rng(42);
        for (int which = 0; which < 2; ++which) {
            ScalarField u(d);
            if (which == 0) {
                u = sample(*grim_reaper(1.0), d);
            } else {
                for (int j = 0; j < d->ny; ++j)
                    for (int i = 0; i < d->nx; ++i)
                        u(i, j) = 0.4 * std::sin(2 * d->x(i)) * std::cos(3 * d->y(j));
            }
            GraphGeometry g = compute_geometry(u);
            int checked = 0;
            while (checked < 100) {
                int pi = 1 + static_cast<int>(rng() % 87);
                int pj = 1 + static_cast<int>(rng() % 23);
                int qi = 1 + static_cast<int>(rng() % 87);
                int qj = 1 + static_cast<int>(rng() % 23);
                if (!d->is_interior(pi, pj) || !d->is_interior(qi, qj)) continue;
                SurfaceDistance de(g, false);
                double dd = de.between(pi, pj, qi, qj);
                if (!(dd > 0 && dd <= 1.0)) continue;
                double p3 = u(pi, pj);
                double dt = SurfaceDistance(g, true, p3).between(pi, pj, qi, qj);
                CHECK(dt >= std::exp(-0.5) * dd * 0.98);
                CHECK(dt <= std::exp(0.5) * dd * 1.02);
                ++checked;
            }
        }
    }
}

TEST_CASE("distance on a disconnected mask raises an error") {
    // two interior blobs separated by exterior, loaded from a crafted file
    namespace fs = std::filesystem;
    std::string p = (fs::temp_directory_path() / "tl_disconnected.txt").string();
    {
        std::ofstream os(p);
        os << "# translator-field v1 nx=7 ny=3 hx=0.5 hy=0.5 shape=RECT\n";
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 7; ++i) {
                int cls = 2;
                if (j == 1 && (i == 1 || i == 5)) cls = 0;      // two interior islands
                else if (i <= 2 && std::abs(i - 1) <= 1) cls = 1;  // ring around island 1
                else if (i >= 4 && std::abs(i - 5) <= 1) cls = 1;  // ring around island 2
                os << i << " " << j << " " << cls << " 0.0\n";
            }
    }
    ScalarField f = load_field(p);
    GraphGeometry g = compute_geometry(f);
    CHECK_THROWS_WITH_AS(intrinsic_distance(g, 1, 1, 5, 1), doctest::Contains("disconnected"),
                         std::runtime_error);
    fs::remove(p);
}

TEST_CASE("curvature scan: flat zeros, refinement stability, escape error") {
    SUBCASE("flat plane: all products vanish") {
        auto d = GridDomain::rect(-1, 1, -1, 1, 33, 33);
        GraphGeometry g = compute_geometry(ScalarField(d, 0.0));
        CurvatureScan s = curvature_scan(g, 16, 16, 0.5, {0.1, 0.3, 0.5});
        CHECK(s.C_emp == 0.0);
        for (auto& r : s.rows) CHECK(r.product == 0.0);
    }
    SUBCASE("grim reaper: C_emp stable within 15% under refinement") {
        auto scan = [](DomainPtr d, int pi, int pj) {
            GraphGeometry g = compute_geometry(sample(*grim_reaper(1.0), d));
            return curvature_scan(g, pi, pj, 1.0, {0.2, 0.4, 0.6, 0.8, 1.0}).C_emp;
        };
        auto d = GridDomain::rect(-1.35, 1.35, -1.2, 1.2, 55, 49);
        double c1 = scan(d, 27, 24);
        double c2 = scan(d->refine(), 54, 48);
        CHECK(std::abs(c1 - c2) / c2 <= 0.15);
    }
    SUBCASE("bowl: same stability at the axis") {
        auto scan = [](DomainPtr d, int c) {
            GraphGeometry g = compute_geometry(sample(*bowl({1.0, 6.0, 1e-10}), d));
            return curvature_scan(g, c, c, 1.0, {0.25, 0.5, 0.75, 1.0}).C_emp;
        };
        auto d = GridDomain::disk(1.6, 49);
        double c1 = scan(d, 24);
        double c2 = scan(d->refine(), 48);
        CHECK(std::abs(c1 - c2) / c2 <= 0.15);
    }
    SUBCASE("a ball leaving the domain is an error naming the first node") {
        auto d = GridDomain::rect(-1, 1, -1, 1, 33, 33);
        GraphGeometry g = compute_geometry(ScalarField(d, 0.0));
        CHECK_THROWS_WITH_AS(curvature_scan(g, 16, 16, 3.0, {0.5}),
                             doctest::Contains("leaves the domain"), std::runtime_error);
    }
}

TEST_CASE("graph radius bound") {
    auto d = GridDomain::rect(-1.35, 1.35, -1.2, 1.2, 55, 49);
    SUBCASE("flat plane returns the domain cap") {
        GraphGeometry g = compute_geometry(ScalarField(d, 0.0));
        CHECK(graph_radius_bound(g, 27, 24, 0.5) == doctest::Approx(1.2).epsilon(0.05));
    }
    SUBCASE("grim reaper at the origin gives rho ~ theta") {
        GraphGeometry g = compute_geometry(sample(*grim_reaper(1.0), d));
        double rho = graph_radius_bound(g, 27, 24, 0.5);
        CHECK(rho == doctest::Approx(0.5).epsilon(0.10));
    }
    SUBCASE("positive at every interior base point of a translator") {
        GraphGeometry g = compute_geometry(sample(*grim_reaper(1.0), d));
        std::mt19937_64 rng(5);
        for (int t = 0; t < 12; ++t) {
            int pi = 1 + static_cast<int>(rng() % 53);
            int pj = 1 + static_cast<int>(rng() % 47);
            if (!d->is_interior(pi, pj)) continue;
            CHECK(graph_radius_bound(g, pi, pj, 0.5) > 0);
        }
    }
}
