#include "translab/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "translab/exact.hpp"
#include "translab/experiments.hpp"
#include "translab/geometry.hpp"
#include "translab/grid.hpp"
#include "translab/metric.hpp"
#include "translab/solver.hpp"
#include "translab/stability.hpp"
#include "translab/variational.hpp"

namespace translab {

SelftestResult run_selftest() {
    SelftestResult out;
    auto check = [&](const std::string& name, const std::function<bool()>& f) {
        bool ok = false;
        std::string err;
        try {
            ok = f();
        } catch (const std::exception& e) {
            err = e.what();
        }
        out.lines.push_back(std::string(ok ? "ok   " : "FAIL ") + name +
                            (err.empty() ? "" : " (" + err + ")"));
        (ok ? out.passed : out.failed)++;
    };

    check("grid: rect 5x5 has 9 interior, 16 boundary", [] {
        auto d = GridDomain::rect(-1, 1, -1, 1, 5, 5);
        return d->count(NodeClass::Interior) == 9 && d->count(NodeClass::Boundary) == 16;
    });
    check("grid: disk mask symmetric under x -> -x", [] {
        auto d = GridDomain::disk(1.0, 5);
        for (int j = 0; j < 5; ++j)
            for (int i = 0; i < 5; ++i)
                if (d->at(i, j) != d->at(4 - i, j)) return false;
        return true;
    });
    check("grid: slab nodes have 4 neighbors via wraparound", [] {
        auto d = GridDomain::slab(-1.5, 1.5, 7, 0.0, 4, 0.25);
        for (int j = 0; j < d->ny; ++j)
            for (int i = 1; i < d->nx - 1; ++i) {
                int cnt = 0;
                const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k)
                    cnt += d->at(i + di[k], j + dj[k]) != NodeClass::Exterior;
                if (cnt != 4) return false;
            }
        return true;
    });
    check("grid: refine doubles resolution 5 -> 9", [] {
        auto d = GridDomain::rect(0, 1, 0, 1, 5, 5)->refine();
        return d->nx == 9 && d->ny == 9 && std::abs(d->hx - 0.125) < 1e-15;
    });
    check("grid: sup norm of constant 2 is 2; zero field is (0,0)", [] {
        auto d = GridDomain::rect(0, 1, 0, 1, 5, 5);
        ScalarField c2(d, 2.0), z(d);
        auto n2 = norms(c2), nz = norms(z);
        return n2.sup == 2.0 && nz.sup == 0.0 && nz.weighted_l2 == 0.0;
    });
    check("geometry: flat plane has W=1, nu=e3, H=0, |A|^2=0", [] {
        auto d = GridDomain::rect(0, 1, 0, 1, 9, 9);
        GraphGeometry g = compute_geometry(ScalarField(d, 0.0));
        int n = d->idx(4, 4);
        return g.W[n] == 1.0 && g.nu_z[n] == 1.0 && g.H_var[n] == 0.0 && g.normA2[n] == 0.0;
    });
    check("geometry: tilted plane u=x has W=sqrt(2), H ~ 0", [] {
        auto d = GridDomain::rect(0, 1, 0, 1, 9, 9);
        ScalarField u(d);
        for (int j = 0; j < 9; ++j)
            for (int i = 0; i < 9; ++i) u(i, j) = d->x(i);
        GraphGeometry g = compute_geometry(u);
        int n = d->idx(4, 4);
        return std::abs(g.W[n] - std::sqrt(2.0)) < 1e-13 && std::abs(g.H_var[n]) < 1e-10 &&
               std::abs(g.tilt[n] - 1 / std::sqrt(2.0)) < 1e-13;
    });
    check("geometry: residual of u=0 with C=1 is -1", [] {
        auto d = GridDomain::rect(0, 1, 0, 1, 9, 9);
        ScalarField R = translator_residual(ScalarField(d, 0.0), 1.0);
        for (int j = 1; j < 8; ++j)
            for (int i = 1; i < 8; ++i)
                if (std::abs(R(i, j) + 1.0) > 1e-12) return false;
        return true;
    });
    check("exact: grim reaper u(0)=0, u(pi/4)=ln(2)/2", [] {
        auto g = grim_reaper(1.0);
        return std::abs(g->eval(0, 0)) < 1e-15 &&
               std::abs(g->eval(3.14159265358979323846 / 4, 0.3) - 0.5 * std::log(2.0)) < 1e-14;
    });
    check("exact: tilted grim reaper with b=0 reduces to grim reaper", [] {
        auto g = grim_reaper(1.0);
        auto t = tilted_grim_reaper(0.0, 1.0);
        for (double x : {-1.2, -0.3, 0.0, 0.7, 1.4})
            if (std::abs(g->eval(x, 0.0) - t->eval(x, 0.0)) > 1e-12) return false;
        return true;
    });
    check("exact: du/dy of tilted grim reaper equals b", [] {
        auto t = tilted_grim_reaper(1.0, 1.0);
        double d1 = t->eval(0.5, 2.0) - t->eval(0.5, 1.0);
        double d2 = t->eval(-1.0, 0.25) - t->eval(-1.0, -0.75);
        return std::abs(d1 - 1.0) < 1e-12 && std::abs(d2 - 1.0) < 1e-12;
    });
    check("exact: grim reaper rejects |x| >= pi/2", [] {
        auto g = grim_reaper(1.0);
        try {
            g->eval(1.6, 0.0);
            return false;
        } catch (const std::domain_error&) {
            return true;
        }
    });
    check("solver: identity system returns rhs", [] {
        CsrBuilder b(3);
        for (int i = 0; i < 3; ++i) b.reserve_entry(i, i);
        CsrMatrix A = b.finalize();
        for (int i = 0; i < 3; ++i) csr_add(A, i, i, 1.0);
        auto x = linear_solve(A, {1.0, -2.0, 3.0}, 1e-14);
        return std::abs(x[0] - 1) < 1e-12 && std::abs(x[1] + 2) < 1e-12 &&
               std::abs(x[2] - 3) < 1e-12;
    });
    check("solver: C=0 with zero boundary stays zero", [] {
        auto d = GridDomain::disk(1.0, 17);
        SolverConfig cfg;
        cfg.C = 0.0;
        SolveReport r = newton_solve(d, ScalarField(d, 0.0), cfg);
        return r.converged && norms(r.u).sup < 1e-12;
    });
    check("stability: weighted area of u=0 over the unit square is 1", [] {
        auto d = GridDomain::rect(0, 1, 0, 1, 9, 9);
        GraphGeometry g = compute_geometry(ScalarField(d, 0.0));
        return std::abs(weighted_area(g, 1.0) - 1.0) < 1e-13;
    });
    check("stability: weighted area of u=ln 2 over the unit square is 2", [] {
        auto d = GridDomain::rect(0, 1, 0, 1, 9, 9);
        GraphGeometry g = compute_geometry(ScalarField(d, std::log(2.0)));
        return std::abs(weighted_area(g, 1.0) - 2.0) < 1e-12;
    });
    check("stability: flat plane Q(phi) < 0 for nonzero phi", [] {
        auto d = GridDomain::rect(0, 1, 0, 1, 17, 17);
        GraphGeometry g = compute_geometry(ScalarField(d, 0.0));
        StabilityOperator L(g, 1.0);
        VariationField phi = make_bump(d, 2, 0.5, 0.5, 0.3, 0.3);
        return L.quadratic_form(phi) < 0;
    });
    check("stability: <e2,nu> vanishes identically on the grim reaper", [] {
        auto d = GridDomain::rect(-1.2, 1.2, 0, 0.5, 33, 9);
        ScalarField u = sample(*grim_reaper(1.0), d);
        GraphGeometry g = compute_geometry(u);
        StabilityOperator L(g, 1.0);
        return L.kernel_residual(1, 2) == 0.0;
    });
    check("metric: axis-aligned flat distance equals h", [] {
        auto d = GridDomain::rect(0, 1, 0, 1, 9, 9);
        GraphGeometry g = compute_geometry(ScalarField(d, 0.0));
        double dd = intrinsic_distance(g, 4, 4, 5, 4);
        return std::abs(dd - d->hx) < 1e-15;
    });
    check("metric: conformal distance equals Euclidean for constant u", [] {
        auto d = GridDomain::rect(0, 1, 0, 1, 9, 9);
        GraphGeometry g = compute_geometry(ScalarField(d, 0.7));
        double de = intrinsic_distance(g, 2, 2, 6, 5);
        double dc = conformal_distance(g, 2, 2, 6, 5);
        return std::abs(de - dc) < 1e-14;
    });
    check("metric: flat plane curvature scan products are 0", [] {
        auto d = GridDomain::rect(-1, 1, -1, 1, 33, 33);
        GraphGeometry g = compute_geometry(ScalarField(d, 0.0));
        CurvatureScan s = curvature_scan(g, 16, 16, 0.5, {0.1, 0.25, 0.5});
        return s.C_emp == 0.0;
    });
    check("experiments: flat plane asymptote check is flagged not-applicable", [] {
        ExperimentReport r = asymptote_check("{\"kind\": \"flat\"}");
        return !r.applicable && r.verdict;
    });
    return out;
}

}  // namespace translab
