#pragma once

#include <string>
#include <vector>

#include "translab/grid.hpp"
#include "translab/sparse.hpp"

namespace translab {

struct SolverConfig {
    double C = 1.0;
    double newton_tol = 1e-10;   // sup norm of the residual
    int max_newton = 30;
    double linear_tol = 1e-12;   // relative
    int max_linear_iter = 50000;
    bool continuation = true;    // parabolic fallback when Newton stalls
    double evolve_dt_safety = 0.2;
    double damping_min = 1.0 / 1024.0;  // 2^-10 backtracking floor
    long max_continuation_steps = 30000;
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_history;  // sup norms, one per accepted iterate
    ScalarField u;
    int damping_events = 0;
    bool continuation_used = false;
    std::string diagnostics;
};

// Discrete Laplace extension of Dirichlet data (the Newton warm start).
ScalarField laplace_extension(DomainPtr dom, const ScalarField& boundary_data);

// Damped Newton for the translator Dirichlet problem. Boundary values are
// taken from `boundary_data` at BOUNDARY nodes and attained exactly.
// Non-convergence is reported, not thrown; linear-solver breakdown throws.
// warm_start, when given, replaces the Laplace-extension initial iterate.
SolveReport newton_solve(DomainPtr dom, const ScalarField& boundary_data,
                         const SolverConfig& cfg = {}, const ScalarField* warm_start = nullptr);

struct EvolveResult {
    ScalarField u;
    long steps = 0;
    double elapsed = 0;
    double final_residual_sup = 0;
    bool hit_step_cap = false;
};

// Explicit graph mean curvature flow in the moving frame, u_t = W R(u):
// discrete translators are exact fixed points.
EvolveResult evolve_moving_frame(const ScalarField& u0, double C, double T, double dt_safety = 0.2,
                                 long step_cap = 2000000);

// Lab frame, u_t = W div(grad u/W) at interior nodes while the Dirichlet data
// rises with speed C (boundary nodes advance by C dt each step).
EvolveResult evolve_lab_frame(const ScalarField& u0, double C, double T, double dt_safety = 0.2,
                              long step_cap = 2000000);

// Runs the moving-frame flow from the Laplace extension until the residual
// stalls or reaches newton_tol/10; used as a Newton warm start.
ScalarField parabolic_continuation(DomainPtr dom, const ScalarField& boundary_data,
                                   const SolverConfig& cfg, bool* flagged = nullptr);

// Preconditioned BiCGSTAB; throws on stagnation with the achieved residual
// in the message rather than returning a half-converged vector.
std::vector<double> linear_solve(const CsrMatrix& A, const std::vector<double>& rhs, double tol,
                                 int max_iter = 50000);

}  // namespace translab
