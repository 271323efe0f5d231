#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "translab/geometry.hpp"
#include "translab/grid.hpp"
#include "translab/sparse.hpp"

namespace translab {

/// Compactly supported variation: zero on a collar of the given width inside
/// the boundary (and on BOUNDARY nodes themselves).
struct VariationField {
    ScalarField eta;
    std::vector<std::uint8_t> support;  // 1 where eta may be nonzero
    int collar = 2;

    void validate() const;  // zero outside support, finite values
};

// Smooth product bump (1-t^2)^3 centered at (cx,cy) with half-widths rx, ry,
// clipped to the collar support.
VariationField make_bump(DomainPtr dom, int collar, double cx, double cy, double rx, double ry);

// Collar-supported pseudo-random field (deterministic in the seed).
VariationField make_random_variation(DomainPtr dom, int collar, std::uint64_t seed);

struct EigenEstimate {
    double value = 0;
    double rayleigh_residual = 0;
    int iterations = 0;
};

/// Weighted stability operator L eta = Delta_Sigma eta + |A|^2 eta +
/// <e3, grad eta>, realized as the translator-residual Jacobian conjugated to
/// normal variations: L eta = J(W eta). Self-adjoint for <a,b>_w =
/// sum a b e^{Cu} W hx hy by construction, with L(1/W) = 0 exactly.
class StabilityOperator {
public:
    StabilityOperator(const GraphGeometry& geom, double C);

    const GridDomain& dom() const { return *dom_; }
    double speed() const { return C_; }
    const std::vector<double>& weights() const { return omega_; }

    // L eta at INTERIOR nodes; eta must be defined on non-EXTERIOR nodes.
    ScalarField apply(const ScalarField& eta) const;

    // Q(phi) = <phi, L phi>_w through the assembled operator.
    double quadratic_form(const VariationField& phi) const;

    // Same value through cell-level summation by parts (independent path):
    // Q = C sum psi^2 dF - sum_cells sum_gauss Hessian-density(psi), psi = W phi.
    double quadratic_form_sbp(const VariationField& phi) const;

    // Edge quadrature of int xi^2 |grad eta|^2 e^{x3} dmu built from the core
    // matrix: -(1/2) sum_{n!=m} K_nm (W xi)_n (W xi)_m (eta_n - eta_m)^2.
    double weighted_dirichlet_energy(const VariationField& eta, const std::vector<double>& xi) const;

    // sup over the interior core (collar width) of |L <v, nu>|.
    double kernel_residual(int axis, int collar = 2) const;

    const std::vector<double>& gradient_factor() const { return W_; }
    const std::vector<double>& tilt() const { return tilt_; }

    // Largest eigenvalue of L restricted to collar-supported fields, by
    // restarted Lanczos iteration with Rayleigh-residual stopping and a
    // deterministic seeded start (max_iter caps operator applications).
    // potential_shift adds c*Id (counterexample hook: a flat plane with the
    // |A|^2 term replaced by +4).
    EigenEstimate top_eigenvalue(double tol, std::uint64_t seed, int collar = 2,
                                 double potential_shift = 0.0, int max_iter = 20000) const;

    const CsrMatrix& core() const { return core_; }

private:
    // owns copies of the geometric data it consumes, so callers may hand it a
    // temporary GraphGeometry
    DomainPtr dom_;
    double C_;
    ScalarField u_;
    CsrMatrix core_;              // symmetric zero-row-sum K
    std::vector<double> W_, tilt_, omega_;
    std::vector<double> nu_[3];
};

// Coordinate-form route (1/(W e^{Cu})) d_i(W e^{Cu} g^{ij} d_j eta) + |A|^2 eta
// with face-averaged coefficients; an independent discretization used as a
// consistency oracle against StabilityOperator::apply.
ScalarField apply_L_coordinate(const GraphGeometry& geom, double C, const ScalarField& eta);

// F over the region: trapezoid quadrature of e^{Cu} W (region endpoints get
// half weights so constants integrate exactly on RECT/SLAB).
double weighted_area(const GraphGeometry& geom, double C = 1.0);

// dF under the normal variation eta: -sum eta R(u) e^{Cu} W hx hy.
double first_variation(const GraphGeometry& geom, double C, const VariationField& eta);

// F evaluated on the triangulated perturbed surface x + s eta nu.
double perturbed_area(const GraphGeometry& geom, double C, const VariationField& eta, double s);

struct StabilityReport {
    std::vector<std::pair<std::string, double>> Q_values;
    std::array<double, 3> kernel_residuals{};  // e1, e2, e3
    double top_eigenvalue = 0;
    double top_eigen_residual = 0;
    double identity_gap = 0;  // relative
    double residual_sup = 0;
    double first_variation_bump = 0;
    bool translator = false;
    std::string to_json() const;
};

struct StabilityOptions {
    double C = 1.0;
    int collar = 2;
    double eig_tol = 1e-6;
    std::uint64_t seed = 42;
};

StabilityReport analyze_stability(const ScalarField& u, const StabilityOptions& opt);

}  // namespace translab
