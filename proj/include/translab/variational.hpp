#pragma once

#include <vector>

#include "translab/grid.hpp"
#include "translab/sparse.hpp"

namespace translab {

/// Discrete weighted-area functional F(u) = sum_q w_q e^{C u} sqrt(1+|grad u|^2)
/// over bilinear cells with 2x2 Gauss quadrature. The translator residual is
/// its (rescaled) gradient, the Newton matrix its Hessian, and the stability
/// operator its Hessian conjugated to normal variations, so the whole chain
/// shares one variational structure:
///   R(u)    = -e^{-Cu} dF/du / (hx hy)  ->  div(grad u / W) - C/W
///   J       = dR/du                      (exactly; 9-point stencil)
///   L eta   = J(W eta)                   (self-adjoint in <a,b>_w, L(1/W)=0)
class WeightedAreaModel {
public:
    WeightedAreaModel(DomainPtr dom, double C);

    const GridDomain& dom() const { return *dom_; }
    double speed() const { return C_; }

    double energy(const ScalarField& u) const;

    // dF/du_n over all nodes (EXTERIOR entries zero).
    std::vector<double> gradient(const ScalarField& u) const;

    // Residual field R(u) at INTERIOR nodes (zero elsewhere).
    ScalarField residual(const ScalarField& u) const;
    double residual_sup(const ScalarField& u) const;

    // Hessian of F over all nodes (rows/cols of EXTERIOR nodes empty).
    CsrMatrix hessian(const ScalarField& u) const;

    // Newton system: J restricted to INTERIOR unknowns, J_nm = dR_n/du_m.
    // unknown_of maps node index -> unknown index (-1 for non-unknowns).
    CsrMatrix newton_matrix(const ScalarField& u, const std::vector<int>& unknown_of,
                            const std::vector<int>& node_of) const;

    // Apply the full Jacobian dR/du to an arbitrary nodal vector (all nodes,
    // boundary entries of w included). Result defined at INTERIOR nodes.
    std::vector<double> jacobian_apply(const ScalarField& u, const std::vector<double>& w) const;

    // Symmetric zero-row-sum core K of the stability operator:
    //   <a, L b>_w = -(W a)^T K (W b),  L(eta) = -(W_n / omega_n) [K (W eta)]_n.
    // Off-diagonal entries are Hessian entries; each diagonal is the negated
    // row sum, which enforces K 1 = 0 exactly in floating point.
    CsrMatrix stability_core(const ScalarField& u) const;

    std::vector<int> interior_unknowns(std::vector<int>& unknown_of) const;

private:
    DomainPtr dom_;
    double C_;

    template <typename PerCell>
    void for_cells(PerCell&& f) const;
};

}  // namespace translab
