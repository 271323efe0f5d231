#include "translab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "translab/variational.hpp"

namespace translab {

namespace {

double boundary_anchor(const GridDomain& d, const ScalarField& b) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] == NodeClass::Boundary) {
            lo = std::min(lo, b.at_idx(n));
            hi = std::max(hi, b.at_idx(n));
        }
    if (!std::isfinite(lo)) throw std::invalid_argument("no boundary nodes with finite data");
    return (lo + hi) / 2;
}

double interior_sup(const GridDomain& d, const ScalarField& f) {
    double s = 0;
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] == NodeClass::Interior) s = std::max(s, std::abs(f.at_idx(n)));
    return s;
}

}  // namespace

ScalarField laplace_extension(DomainPtr dom, const ScalarField& boundary_data) {
    const GridDomain& d = *dom;
    boundary_data.check_finite();
    WeightedAreaModel model(dom, 0.0);
    std::vector<int> unknown_of;
    std::vector<int> node_of = model.interior_unknowns(unknown_of);
    const int m = static_cast<int>(node_of.size());
    if (m == 0) throw std::invalid_argument("domain has no interior nodes");

    // 5-point -Laplace, SPD; boundary contributions on the right-hand side.
    CsrBuilder builder(m);
    auto neighbors = [&](int i, int j, auto&& f) {
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) f(i + di[k], j + dj[k], k < 2 ? d.hx : d.hy);
    };
    for (int k = 0; k < m; ++k) {
        int n = node_of[k];
        int i = n % d.nx, j = n / d.nx;
        builder.reserve_entry(k, k);
        neighbors(i, j, [&](int ii, int jj, double) {
            if (d.at(ii, jj) == NodeClass::Interior)
                builder.reserve_entry(k, unknown_of[d.wrapped_idx(ii, jj)]);
        });
    }
    CsrMatrix A = builder.finalize();
    std::vector<double> rhs(m, 0.0);
    for (int k = 0; k < m; ++k) {
        int n = node_of[k];
        int i = n % d.nx, j = n / d.nx;
        neighbors(i, j, [&](int ii, int jj, double h) {
            double w = 1.0 / (h * h);
            NodeClass c = d.at(ii, jj);
            if (c == NodeClass::Exterior) return;
            csr_add(A, k, k, w);
            if (c == NodeClass::Interior)
                csr_add(A, k, unknown_of[d.wrapped_idx(ii, jj)], -w);
            else
                rhs[k] += w * boundary_data.at_idx(d.wrapped_idx(ii, jj));
        });
    }
    KrylovResult res = cg_solve(A, rhs, 1e-13, 20 * m + 1000);
    if (!res.converged)
        throw std::runtime_error("laplace_extension: CG failed (rel residual " +
                                 std::to_string(res.rel_residual) + ")");
    ScalarField u(dom);
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] == NodeClass::Boundary) u.at_idx(n) = boundary_data.at_idx(n);
    for (int k = 0; k < m; ++k) u.at_idx(node_of[k]) = res.x[k];
    return u;
}

std::vector<double> linear_solve(const CsrMatrix& A, const std::vector<double>& rhs, double tol,
                                 int max_iter) {
    KrylovResult res = bicgstab_solve(A, rhs, tol, max_iter);
    if (!res.converged)
        throw std::runtime_error("linear_solve: stagnation after " +
                                 std::to_string(res.iterations) + " iterations, achieved relative residual " +
                                 std::to_string(res.rel_residual) +
                                 (res.note.empty() ? "" : " (" + res.note + ")"));
    return res.x;
}

namespace {

SolveReport newton_core(DomainPtr dom, const ScalarField& boundary_data, const SolverConfig& cfg,
                        ScalarField u /* initial iterate, anchored frame */, double anchor) {
    const GridDomain& d = *dom;
    WeightedAreaModel model(dom, cfg.C);
    std::vector<int> unknown_of;
    std::vector<int> node_of = model.interior_unknowns(unknown_of);
    const int m = static_cast<int>(node_of.size());

    SolveReport rep;
    rep.u = u;
    ScalarField R = model.residual(u);
    double rn = interior_sup(d, R);
    rep.residual_history.push_back(rn);

    for (int it = 0; it < cfg.max_newton && rn > cfg.newton_tol; ++it) {
        CsrMatrix J = model.newton_matrix(u, unknown_of, node_of);
        std::vector<double> rhs(m);
        for (int k = 0; k < m; ++k) rhs[k] = -R.at_idx(node_of[k]);
        KrylovResult lin = bicgstab_solve(J, rhs, cfg.linear_tol, cfg.max_linear_iter);
        if (!lin.converged)
            throw std::runtime_error("newton_solve: linear solve breakdown at iteration " +
                                     std::to_string(it + 1) + " (relative residual " +
                                     std::to_string(lin.rel_residual) + ")");
        double alpha = 1.0;
        bool accepted = false;
        while (alpha >= cfg.damping_min) {
            ScalarField trial = u;
            for (int k = 0; k < m; ++k) trial.at_idx(node_of[k]) += alpha * lin.x[k];
            ScalarField Rt = model.residual(trial);
            double rt = interior_sup(d, Rt);
            if (rt < rn) {
                u = std::move(trial);
                R = std::move(Rt);
                rn = rt;
                accepted = true;
                break;
            }
            alpha /= 2;
            ++rep.damping_events;
        }
        rep.iterations = it + 1;
        if (!accepted) {
            rep.diagnostics = "damping floor reached without residual decrease";
            break;
        }
        rep.residual_history.push_back(rn);
    }

    rep.converged = rn <= cfg.newton_tol;
    if (!rep.converged && rep.diagnostics.empty())
        rep.diagnostics = "residual above tolerance after max_newton iterations";

    // Return to the unanchored frame; boundary values verbatim.
    for (int n = 0; n < d.size(); ++n) {
        if (d.cls[n] == NodeClass::Interior)
            u.at_idx(n) += anchor;
        else if (d.cls[n] == NodeClass::Boundary)
            u.at_idx(n) = boundary_data.at_idx(n);
    }
    rep.u = std::move(u);
    return rep;
}

}  // namespace

SolveReport newton_solve(DomainPtr dom, const ScalarField& boundary_data, const SolverConfig& cfg,
                         const ScalarField* warm_start) {
    const GridDomain& d = *dom;
    if (!(cfg.newton_tol > 0) || !(cfg.linear_tol > 0))
        throw std::invalid_argument("solver config: tolerances must be positive");
    if (cfg.max_newton < 1) throw std::invalid_argument("solver config: max_newton >= 1");

    // Anchored frame: the equation is autonomous in u, so solving with
    // centered data and shifting back makes vertical-shift equivariance exact
    // to roundoff and keeps e^{Cu} well scaled.
    const double anchor = boundary_anchor(d, boundary_data);
    ScalarField banch(dom);
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] == NodeClass::Boundary) banch.at_idx(n) = boundary_data.at_idx(n) - anchor;

    ScalarField u0(dom);
    if (warm_start) {
        u0 = *warm_start;
        for (int n = 0; n < d.size(); ++n) {
            if (d.cls[n] == NodeClass::Interior)
                u0.at_idx(n) -= anchor;
            else if (d.cls[n] == NodeClass::Boundary)
                u0.at_idx(n) = banch.at_idx(n);
        }
    } else {
        u0 = laplace_extension(dom, banch);
    }
    SolveReport rep = newton_core(dom, boundary_data, cfg, u0, anchor);
    if (rep.converged || !cfg.continuation) return rep;

    // Parabolic continuation fallback, then one more Newton pass.
    SolverConfig ccfg = cfg;
    ccfg.continuation = false;
    bool flagged = false;
    ScalarField warm = parabolic_continuation(dom, banch, ccfg, &flagged);
    SolveReport rep2 = newton_core(dom, boundary_data, cfg, warm, anchor);
    rep2.continuation_used = true;
    rep2.damping_events += rep.damping_events;
    if (!rep2.converged && rep.residual_history.back() < rep2.residual_history.back())
        return rep;  // keep the better iterate
    return rep2;
}

namespace {

EvolveResult evolve_impl(const ScalarField& u0, double C, double T, double dt_safety,
                         long step_cap, bool lab_frame) {
    const GridDomain& d = u0.dom();
    WeightedAreaModel model(u0.domain_ptr(), C);
    ScalarField u = u0;
    EvolveResult out;
    out.u = u0;
    double t = 0;
    std::vector<double> W(d.size(), 1.0);
    while (t < T) {
        if (out.steps >= step_cap) {
            out.hit_step_cap = true;
            break;
        }
        // node gradient factors (centered; boundary values participate)
        double supW2 = 1.0;
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                int n = d.idx(i, j);
                if (d.cls[n] != NodeClass::Interior) continue;
                double p = (u(i + 1, j) - u(i - 1, j)) / (2 * d.hx);
                double q = (u(i, j + 1) - u(i, j - 1)) / (2 * d.hy);
                double w2 = 1 + p * p + q * q;
                W[n] = std::sqrt(w2);
                supW2 = std::max(supW2, w2);
            }
        double hmin = std::min(d.hx, d.hy);
        double dt = dt_safety * hmin * hmin / (4 * supW2);
        dt = std::min(dt, T - t);
        ScalarField R = model.residual(u);
        for (int n = 0; n < d.size(); ++n) {
            if (d.cls[n] == NodeClass::Interior)
                u.at_idx(n) += dt * (W[n] * R.at_idx(n) + (lab_frame ? C : 0.0));
            else if (lab_frame && d.cls[n] == NodeClass::Boundary)
                u.at_idx(n) += dt * C;
        }
        t += dt;
        ++out.steps;
    }
    out.elapsed = t;
    out.final_residual_sup = model.residual_sup(u);
    out.u = std::move(u);
    return out;
}

}  // namespace

EvolveResult evolve_moving_frame(const ScalarField& u0, double C, double T, double dt_safety,
                                 long step_cap) {
    return evolve_impl(u0, C, T, dt_safety, step_cap, false);
}

EvolveResult evolve_lab_frame(const ScalarField& u0, double C, double T, double dt_safety,
                              long step_cap) {
    return evolve_impl(u0, C, T, dt_safety, step_cap, true);
}

ScalarField parabolic_continuation(DomainPtr dom, const ScalarField& boundary_data,
                                   const SolverConfig& cfg, bool* flagged) {
    const GridDomain& d = *dom;
    WeightedAreaModel model(dom, cfg.C);
    ScalarField u = laplace_extension(dom, boundary_data);
    const double target = cfg.newton_tol / 10;
    const long cap = cfg.max_continuation_steps;
    long steps = 0;
    double last_check = model.residual_sup(u);
    std::vector<double> W(d.size(), 1.0);
    bool capped = false;
    while (true) {
        double supW2 = 1.0;
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                int n = d.idx(i, j);
                if (d.cls[n] != NodeClass::Interior) continue;
                double p = (u(i + 1, j) - u(i - 1, j)) / (2 * d.hx);
                double q = (u(i, j + 1) - u(i, j - 1)) / (2 * d.hy);
                double w2 = 1 + p * p + q * q;
                W[n] = std::sqrt(w2);
                supW2 = std::max(supW2, w2);
            }
        double hmin = std::min(d.hx, d.hy);
        double dt = cfg.evolve_dt_safety * hmin * hmin / (4 * supW2);
        ScalarField R = model.residual(u);
        double rn = 0;
        for (int n = 0; n < d.size(); ++n)
            if (d.cls[n] == NodeClass::Interior) {
                rn = std::max(rn, std::abs(R.at_idx(n)));
            }
        if (rn <= target) break;
        if (steps >= cap) {
            capped = true;
            break;
        }
        if (steps > 0 && steps % 2000 == 0) {
            if (rn > 0.999 * last_check) break;  // stalled
            last_check = rn;
        }
        for (int n = 0; n < d.size(); ++n)
            if (d.cls[n] == NodeClass::Interior) u.at_idx(n) += dt * W[n] * R.at_idx(n);
        ++steps;
    }
    if (flagged) *flagged = capped;
    return u;
}

}  // namespace translab
