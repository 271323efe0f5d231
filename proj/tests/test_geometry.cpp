#include <cmath>
#include <random>

#include "doctest.h"
#include "translab/exact.hpp"
#include "translab/geometry.hpp"
#include "translab/grid.hpp"
#include "translab/variational.hpp"

using namespace translab;

namespace {
constexpr double kPi = 3.14159265358979323846;

ScalarField smooth_test_field(DomainPtr d, int which = 0) {
    ScalarField u(d);
    for (int j = 0; j < d->ny; ++j)
        for (int i = 0; i < d->nx; ++i) {
            if (d->cls[d->idx(i, j)] == NodeClass::Exterior) continue;
            double x = d->x(i), y = d->y(j);
            u(i, j) = which == 0 ? 0.3 * std::sin(1.3 * x) * std::cos(0.7 * y) + 0.1 * x * y
                                 : 0.25 * std::exp(0.4 * x - 0.3 * y) + 0.2 * std::sin(x + y);
        }
    return u;
}
}  // namespace

TEST_CASE("flat and affine graphs") {
    auto d = GridDomain::rect(0, 1, 0, 1, 9, 9);
    GraphGeometry flat = compute_geometry(ScalarField(d, 0.0));
    int n = d->idx(4, 4);
    CHECK(flat.W[n] == 1.0);
    CHECK(flat.nu_z[n] == 1.0);
    CHECK(flat.H_var[n] == 0.0);
    CHECK(flat.normA2[n] == 0.0);

    ScalarField ux(d);
    for (int j = 0; j < 9; ++j)
        for (int i = 0; i < 9; ++i) ux(i, j) = d->x(i);
    GraphGeometry tilted = compute_geometry(ux);
    CHECK(tilted.W[n] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(tilted.tilt[n] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::abs(tilted.H_var[n]) < 1e-10);
    CHECK(std::abs(tilted.normA2[n]) < 1e-10);
}

TEST_CASE("grim reaper bundle matches closed forms at x = 0 and pi/4") {
    // lattice aligned so that 0 and pi/4 are nodes
    auto d = GridDomain::rect(-3 * kPi / 8, 3 * kPi / 8, 0, 12 * kPi / 128, 97, 13);
    ScalarField u = sample(*grim_reaper(1.0), d);
    GraphGeometry g = compute_geometry(u);
    double h2 = d->hx * d->hx;
    struct Pt {
        int i;
        double x;
    } pts[2] = {{48, 0.0}, {80, kPi / 4}};
    for (auto [i, x] : pts) {
        int n = d->idx(i, 6);
        CHECK(d->x(i) == doctest::Approx(x).epsilon(1e-12));
        CHECK(g.tilt[n] == doctest::Approx(std::cos(x)).epsilon(50 * h2));
        CHECK(g.normA2[n] == doctest::Approx(std::cos(x) * std::cos(x)).epsilon(50 * h2));
        CHECK(g.H_var[n] == doctest::Approx(-std::cos(x)).epsilon(50 * h2));
    }
}

TEST_CASE("pointwise invariants: unit normal, metric inverse, Cauchy-Schwarz") {
    auto d = GridDomain::rect(-1, 1, -1, 1, 33, 33);
    GraphGeometry g = compute_geometry(smooth_test_field(d, 1));
    for (int n = 0; n < d->size(); ++n) {
        if (d->cls[n] == NodeClass::Exterior) continue;
        double nn = g.nu_x[n] * g.nu_x[n] + g.nu_y[n] * g.nu_y[n] + g.nu_z[n] * g.nu_z[n];
        CHECK(std::abs(nn - 1.0) <= 1e-14);
        CHECK(g.W[n] >= 1.0);
        CHECK(g.tilt[n] * g.W[n] == doctest::Approx(1.0).epsilon(1e-14));
        // g * g^{-1} = identity
        double i11 = g.g11[n] * g.gi11[n] + g.g12[n] * g.gi12[n];
        double i12 = g.g11[n] * g.gi12[n] + g.g12[n] * g.gi22[n];
        double i22 = g.g12[n] * g.gi12[n] + g.g22[n] * g.gi22[n];
        CHECK(std::abs(i11 - 1) <= 1e-12);
        CHECK(std::abs(i12) <= 1e-12);
        CHECK(std::abs(i22 - 1) <= 1e-12);
        CHECK(g.normA2[n] + 1e-12 * (1 + g.H_var[n] * g.H_var[n]) >=
              g.H_var[n] * g.H_var[n] / 2);
    }
}

TEST_CASE("the two mean-curvature code paths agree at order h^2") {
    auto run = [](DomainPtr d) {
        ScalarField u = smooth_test_field(d);
        GraphGeometry g = compute_geometry(u);
        ScalarField div = flux_divergence(u);
        ScalarField gap(d);
        for (int n = 0; n < d->size(); ++n)
            if (d->cls[n] == NodeClass::Interior)
                gap.at_idx(n) = g.H_var[n] + div.at_idx(n);
        return sup_interior(gap, 1);
    };
    auto d = GridDomain::rect(-1, 1, -1, 1, 33, 33);
    double e1 = run(d);
    double e2 = run(d->refine());
    double h = d->hx;
    CHECK(e1 <= 10 * h * h);
    CHECK(e1 / e2 >= 2.5);
}

TEST_CASE("x<->y transposition leaves W, H, |A|^2 transposed-equal exactly") {
    auto d = GridDomain::rect(-1, 0.5, -0.7, 1.3, 17, 25);
    auto dt = GridDomain::rect(-0.7, 1.3, -1, 0.5, 25, 17);
    ScalarField u = smooth_test_field(d, 1);
    ScalarField ut(dt);
    for (int j = 0; j < d->ny; ++j)
        for (int i = 0; i < d->nx; ++i) ut(j, i) = u(i, j);
    GraphGeometry g = compute_geometry(u);
    GraphGeometry gt = compute_geometry(ut);
    for (int j = 0; j < d->ny; ++j)
        for (int i = 0; i < d->nx; ++i) {
            if (!d->is_interior(i, j)) continue;
            int n = d->idx(i, j), m = dt->idx(j, i);
            CHECK(g.W[n] == gt.W[m]);
            CHECK(g.H_var[n] == gt.H_var[m]);
            CHECK(g.normA2[n] == gt.normA2[m]);
        }
}

TEST_CASE("single-variable graphs have |A|^2 = H^2") {
    auto d = GridDomain::rect(-1.2, 1.2, 0, 0.5, 65, 9);
    ScalarField u = sample(*grim_reaper(1.0), d);
    GraphGeometry g = compute_geometry(u);
    for (int n = 0; n < d->size(); ++n)
        if (d->cls[n] == NodeClass::Interior)
            CHECK(g.normA2[n] ==
                  doctest::Approx(g.H_var[n] * g.H_var[n]).epsilon(1e-12));
}

TEST_CASE("translator residual: trivial and convergence-order cases") {
    auto d = GridDomain::rect(0, 1, 0, 1, 9, 9);
    ScalarField R0 = translator_residual(ScalarField(d, 0.0), 1.0);
    for (int j = 1; j < 8; ++j)
        for (int i = 1; i < 8; ++i) CHECK(R0(i, j) == doctest::Approx(-1.0).epsilon(1e-13));

    auto dg = GridDomain::rect(-1.2, 1.2, 0, 0.5, 81, 17);
    ScalarField u = sample(*grim_reaper(1.0), dg);
    double r1 = norms(translator_residual(u, 1.0)).sup;
    ScalarField uf = sample(*grim_reaper(1.0), dg->refine());
    double r2 = norms(translator_residual(uf, 1.0)).sup;
    CHECK(r1 / r2 >= 3.2);
    CHECK(r1 / r2 <= 4.8);
}

TEST_CASE("weighted area element") {
    auto d = GridDomain::rect(-1, 1, 0, 1, 17, 9);
    GraphGeometry flat = compute_geometry(ScalarField(d, 0.0));
    ScalarField w0 = weighted_area_element(flat, 1.0);
    CHECK(w0(8, 4) == 1.0);
    GraphGeometry cst = compute_geometry(ScalarField(d, std::log(3.0)));
    CHECK(weighted_area_element(cst, 1.0)(8, 4) == doctest::Approx(3.0).epsilon(1e-14));

    ScalarField ug = sample(*grim_reaper(1.0), d);
    GraphGeometry gg = compute_geometry(ug);
    // at x=0: e^0 * sec(0) = 1
    CHECK(weighted_area_element(gg, 1.0)(8, 4) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("variational residual matches flux form at second order") {
    auto d = GridDomain::rect(-1.1, 1.1, -0.4, 0.9, 33, 21);
    ScalarField u = smooth_test_field(d);
    WeightedAreaModel model(d, 1.0);
    ScalarField rv = model.residual(u);
    ScalarField rf = translator_residual(u, 1.0);
    ScalarField gap(d);
    for (int n = 0; n < d->size(); ++n)
        if (d->cls[n] == NodeClass::Interior) gap.at_idx(n) = rv.at_idx(n) - rf.at_idx(n);
    double e1 = sup_interior(gap, 1);
    CHECK(e1 <= 20 * d->hx * d->hx);
}

TEST_CASE("geometry is bitwise independent of the thread partition") {
    auto d = GridDomain::rect(-1.3, 1.3, -0.9, 0.9, 301, 257);
    ScalarField u = smooth_test_field(d);
    setenv("TRANSLATOR_LAB_THREADS", "1", 1);
    GraphGeometry g1 = compute_geometry(u);
    setenv("TRANSLATOR_LAB_THREADS", "5", 1);
    GraphGeometry g5 = compute_geometry(u);
    unsetenv("TRANSLATOR_LAB_THREADS");
    CHECK(g1.W == g5.W);
    CHECK(g1.H_var == g5.H_var);
    CHECK(g1.normA2 == g5.normA2);
}
