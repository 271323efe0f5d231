#include <cmath>

#include "doctest.h"
#include "translab/exact.hpp"
#include "translab/geometry.hpp"
#include "translab/grid.hpp"

using namespace translab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("grim reaper closed-form values and rejection") {
    auto g = grim_reaper(1.0);
    CHECK(g->eval(0.0, 3.7) == 0.0);
    CHECK(g->eval(kPi / 4, 0.0) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
    CHECK(*g->slab_half_width() == doctest::Approx(kPi / 2));
    CHECK_THROWS_AS(g->eval(kPi / 2, 0.0), std::domain_error);
    CHECK_THROWS_AS(g->eval(-2.0, 0.0), std::domain_error);
}

TEST_CASE("grim reaper tilt is asymptotically vertical at the wall") {
    auto g = grim_reaper(1.0);
    for (double eps : {0.3, 0.1, 0.03, 0.01, 0.003}) {
        double t = *g->tilt(kPi / 2 - eps, 0.0);
        CHECK(t == doctest::Approx(std::sin(eps)).epsilon(1e-12));
        CHECK(t <= eps);
    }
}

TEST_CASE("tilted grim reaper reduces to grim reaper at b=0 and has du/dy = b") {
    auto g = grim_reaper(1.0);
    auto t0 = tilted_grim_reaper(0.0, 1.0);
    for (double x : {-1.4, -0.5, 0.0, 0.9})
        CHECK(t0->eval(x, 2.0) == doctest::Approx(g->eval(x, 0.0)).epsilon(1e-14));

    auto t = tilted_grim_reaper(2.0, 1.0);
    CHECK(t->eval(1.0, 5.0) - t->eval(1.0, 4.0) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(*t->slab_half_width() == doctest::Approx(std::sqrt(5.0) * kPi / 2));
    CHECK_THROWS_AS(t->eval(3.6, 0.0), std::domain_error);
}

TEST_CASE("tilted grim reaper residual vanishes at second order") {
    auto t = tilted_grim_reaper(1.0, 1.0);
    auto d = GridDomain::rect(-1.8, 1.8, 0, 0.5, 129, 17);
    ScalarField u = sample(*t, d);
    double r = norms(translator_residual(u, 1.0)).sup;
    double h = std::max(d->hx, d->hy);
    CHECK(r <= 10 * h * h);
}

TEST_CASE("bowl profile: axis curvature, monotonicity, residual") {
    BowlOptions opt;
    opt.C = 1.0;
    opt.r_max = 6.0;
    opt.tol = 1e-10;
    auto b = bowl(opt);

    // series at the axis: v''(0) = C/2, via v(d)/d^2 -> C/4
    double dlt = 1e-4;
    CHECK(2 * b->eval(dlt, 0.0) / (dlt * dlt) ==
          doctest::Approx(opt.C / 2).epsilon(1e-6));

    // strictly increasing in r
    double prev = 0;
    for (double r = 0.05; r <= 6.0; r += 0.05) {
        double v = b->eval(r, 0.0);
        CHECK(v > prev);
        prev = v;
    }

    // sampled residual at the integrator tolerance
    auto d = GridDomain::disk(2.0, 97);
    ScalarField u = sample(*b, d);
    double r = sup_interior(translator_residual(u, 1.0), 1);
    double h = d->hx;
    CHECK(r <= std::max(20 * h * h, 10 * opt.tol));

    CHECK_THROWS_AS(b->eval(6.5, 0.0), std::domain_error);
}

TEST_CASE("vertical translation invariance of the residual is exact") {
    // quantize the samples so that adding the shift is exact in floating
    // point; the residual then reproduces bit for bit
    auto g = grim_reaper(1.0);
    auto d = GridDomain::rect(-1.2, 1.2, 0, 0.5, 33, 9);
    ScalarField u = sample(*g, d);
    const double q = std::ldexp(1.0, -20);
    for (int n = 0; n < d->size(); ++n) u.at_idx(n) = std::round(u.at_idx(n) / q) * q;
    ScalarField u_shift = u;
    for (int n = 0; n < d->size(); ++n) u_shift.at_idx(n) += 2.375;
    ScalarField r1 = translator_residual(u, 1.0);
    ScalarField r2 = translator_residual(u_shift, 1.0);
    for (int n = 0; n < d->size(); ++n) CHECK(r1.at_idx(n) == r2.at_idx(n));
}

TEST_CASE("scaling u and C together is not a symmetry") {
    // doubling the bowl height does not give a speed-2 translator
    auto b = bowl({1.0, 6.0, 1e-10});
    auto d = GridDomain::disk(1.5, 65);
    ScalarField u = sample(*b, d);
    ScalarField u2 = u;
    for (int n = 0; n < d->size(); ++n) u2.at_idx(n) *= 2.0;
    double r = sup_interior(translator_residual(u2, 2.0), 1);
    CHECK(r > 0.05);  // an order-one defect, not discretization error
}

TEST_CASE("slab solutions sit between two vertical planes; bowl is entire") {
    auto g = grim_reaper(1.0);
    double hw = *g->slab_half_width();
    for (double eps : {0.05, 0.1, 0.2})
        CHECK(*g->tilt(hw - eps, 0.0) <= 1.5 * eps);
    auto b = bowl({1.0, 8.0, 1e-8});
    for (double r : {0.1, 1.0, 3.0, 7.9}) CHECK(std::isfinite(b->eval(r, 0.0)));
    CHECK(!b->slab_half_width().has_value());
}
