#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "translab/geometry.hpp"
#include "translab/grid.hpp"

namespace translab {

/// Conformal metric g = e^{x3 - p3} * (Euclidean) on R^3, in which translators
/// are minimal surfaces. p3 shifts the weight so g(p) = Id.
struct ConformalMetric {
    double p3 = 0;
    std::array<std::array<double, 3>, 3> operator()(const std::array<double, 3>& x) const;
};

using MetricFn = std::function<std::array<std::array<double, 3>, 3>(const std::array<double, 3>&)>;

// Sectional curvature of the coordinate plane (i,j) at a point, computed from
// the metric alone: finite-difference Christoffel symbols -> Riemann tensor ->
// sectional curvature. Fourth-order stencils with step 1e-3.
double sectional_curvature(const MetricFn& g, const std::array<double, 3>& point, int i, int j);

double conformal_sectional_curvature(double p3, const std::array<double, 3>& point, int i, int j);

/// Shortest-path metric on the 8-neighbor lattice graph with lifted chord
/// lengths; conformal variant scales each edge by e^{(x3(mid)-p3)/2}.
class SurfaceDistance {
public:
    SurfaceDistance(const GraphGeometry& geom, bool conformal, double p3 = 0);

    // Dijkstra distances from node p to every non-EXTERIOR node
    // (deterministic tie-breaking by node index; unreachable = +inf).
    std::vector<double> from(int pi, int pj) const;
    double between(int pi, int pj, int qi, int qj) const;

private:
    const GraphGeometry* geom_;
    bool conformal_;
    double p3_;
    double edge_length(int n, int i, int j, int ii, int jj) const;
};

double intrinsic_distance(const GraphGeometry& geom, int pi, int pj, int qi, int qj);
double conformal_distance(const GraphGeometry& geom, int pi, int pj, int qi, int qj);

struct ScanRow {
    double sigma;
    double sup_A2;
    double product;  // sup|A|^2 * sigma^2
};

struct CurvatureScan {
    std::vector<ScanRow> rows;
    double C_emp = 0;  // max over sigma of the product
    std::string csv() const;
};

// For each sigma: sup of |A|^2 over the intrinsic ball B_{r0-sigma}(p) scaled
// by sigma^2. Errors if B_{r0}(p) touches the domain boundary.
CurvatureScan curvature_scan(const GraphGeometry& geom, int pi, int pj, double r0,
                             const std::vector<double>& sigmas);

// Largest rho with sup_{B_rho(p)} |A| * rho <= theta (bisection; capped by the
// largest ball contained in the domain).
double graph_radius_bound(const GraphGeometry& geom, int pi, int pj, double theta = 0.5);

}  // namespace translab
