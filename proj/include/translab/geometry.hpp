#pragma once

#include <string>
#include <vector>

#include "translab/grid.hpp"

namespace translab {

/// Pointwise geometric bundle of the graph of u: gradient factor W, upward
/// unit normal, induced metric and its inverse, second fundamental form
/// a_ij = -u_ij/W, variational mean curvature H = g^{ij} a_ij, |A|^2 and tilt.
/// Values live at every non-EXTERIOR node (centered stencils at interior
/// nodes, second-order one-sided at boundary nodes).
struct GraphGeometry {
    DomainPtr dom;
    ScalarField u;
    std::vector<double> ux, uy;
    std::vector<double> W, tilt, area_weight;
    std::vector<double> nu_x, nu_y, nu_z;
    std::vector<double> g11, g12, g22;
    std::vector<double> gi11, gi12, gi22;
    std::vector<double> a11, a12, a22;
    std::vector<double> H_var, normA2;

    const GridDomain& domain() const { return *dom; }
};

GraphGeometry compute_geometry(const ScalarField& u);

// Conservative face-flux divergence div(grad u / W) at interior nodes,
// independent of the variational residual path (used as a cross-check).
ScalarField flux_divergence(const ScalarField& u);

// Residual of the translator equation div(grad u/W) - C/W, assembled from the
// weighted-area energy gradient (see WeightedAreaModel).
ScalarField translator_residual(const ScalarField& u, double C);

// Integrand of the weighted area functional in graph coordinates: e^{C u} W.
ScalarField weighted_area_element(const GraphGeometry& geom, double C = 1.0);

// CSV dump: i,j,x,y,u,W,tilt,H_var,normA2
void geometry_csv(const GraphGeometry& geom, const std::string& path);

}  // namespace translab
