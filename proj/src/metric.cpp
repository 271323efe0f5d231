#include "translab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace translab {

std::array<std::array<double, 3>, 3> ConformalMetric::operator()(
    const std::array<double, 3>& x) const {
    double w = std::exp(x[2] - p3);
    return {{{w, 0, 0}, {0, w, 0}, {0, 0, w}}};
}

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 invert3(const Mat3& m) {
    double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                 m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                 m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if (det == 0) throw std::runtime_error("metric not invertible");
    Mat3 inv;
    inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
    inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
    inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
    return inv;
}

// 4th-order central difference of a metric component along axis k.
template <typename F>
double d4(F&& f, const std::array<double, 3>& x, int k, double h) {
    auto at = [&](double t) {
        std::array<double, 3> y = x;
        y[k] += t;
        return f(y);
    };
    return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

using Gamma = std::array<std::array<std::array<double, 3>, 3>, 3>;  // [k][i][j]

Gamma christoffel(const MetricFn& g, const std::array<double, 3>& x, double h) {
    Mat3 gm = g(x);
    Mat3 gi = invert3(gm);
    // dg[k][i][j] = d_k g_ij
    double dg[3][3][3];
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                double v = d4([&](const std::array<double, 3>& y) { return g(y)[i][j]; }, x, k, h);
                dg[k][i][j] = v;
                dg[k][j][i] = v;
            }
    Gamma G{};
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int l = 0; l < 3; ++l)
                    s += gi[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                G[k][i][j] = 0.5 * s;
            }
    return G;
}

}  // namespace

double sectional_curvature(const MetricFn& g, const std::array<double, 3>& point, int i, int j) {
    if (i == j || i < 0 || j < 0 || i > 2 || j > 2)
        throw std::invalid_argument("sectional_curvature: plane must be a pair of distinct axes");
    const double h = 1e-3;
    Gamma G0 = christoffel(g, point, h);
    // dG[a][k][i][j] = d_a Gamma^k_ij by 4th-order differences of Christoffels
    auto Gcomp = [&](const std::array<double, 3>& y, int k, int a, int b) {
        return christoffel(g, y, h)[k][a][b];
    };
    auto dG = [&](int a, int k, int p, int q) {
        auto f = [&](const std::array<double, 3>& y) { return Gcomp(y, k, p, q); };
        return d4(f, point, a, h);
    };
    // R(d_i, d_j) d_j = (d_i G^l_jj - d_j G^l_ij + G^l_im G^m_jj - G^l_jm G^m_ij) d_l
    double Rl[3];
    for (int l = 0; l < 3; ++l) {
        double v = dG(i, l, j, j) - dG(j, l, i, j);
        for (int m = 0; m < 3; ++m) v += G0[l][i][m] * G0[m][j][j] - G0[l][j][m] * G0[m][i][j];
        Rl[l] = v;
    }
    Mat3 gm = g(point);
    double num = 0;
    for (int l = 0; l < 3; ++l) num += gm[i][l] * Rl[l];
    double den = gm[i][i] * gm[j][j] - gm[i][j] * gm[i][j];
    return num / den;
}

double conformal_sectional_curvature(double p3, const std::array<double, 3>& point, int i, int j) {
    ConformalMetric cm{p3};
    return sectional_curvature([cm](const std::array<double, 3>& x) { return cm(x); }, point, i, j);
}

SurfaceDistance::SurfaceDistance(const GraphGeometry& geom, bool conformal, double p3)
    : geom_(&geom), conformal_(conformal), p3_(p3) {}

double SurfaceDistance::edge_length(int n, int i, int j, int ii, int jj) const {
    const GridDomain& d = geom_->domain();
    int m = d.wrapped_idx(ii, jj);
    double dx = (ii - i) * d.hx;
    double dy = (jj - j) * d.hy;
    double du = geom_->u.at_idx(m) - geom_->u.at_idx(n);
    double len = std::sqrt(dx * dx + dy * dy + du * du);
    if (conformal_) {
        double mid = (geom_->u.at_idx(m) + geom_->u.at_idx(n)) / 2;
        len *= std::exp((mid - p3_) / 2);
    }
    return len;
}

std::vector<double> SurfaceDistance::from(int pi, int pj) const {
    const GridDomain& d = geom_->domain();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(d.size(), inf);
    if (d.at(pi, pj) == NodeClass::Exterior)
        throw std::invalid_argument("distance source node is EXTERIOR");
    using Item = std::pair<double, int>;  // (dist, node) — index breaks ties
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    int src = d.wrapped_idx(pi, pj);
    dist[src] = 0;
    pq.push({0.0, src});
    while (!pq.empty()) {
        auto [dd, n] = pq.top();
        pq.pop();
        if (dd > dist[n]) continue;
        int i = n % d.nx, j = n / d.nx;
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                if (di == 0 && dj == 0) continue;
                int ii = i + di, jj = j + dj;
                if (d.at(ii, jj) == NodeClass::Exterior) continue;
                int m = d.wrapped_idx(ii, jj);
                double nd = dd + edge_length(n, i, j, ii, jj);
                if (nd < dist[m]) {
                    dist[m] = nd;
                    pq.push({nd, m});
                }
            }
    }
    return dist;
}

double SurfaceDistance::between(int pi, int pj, int qi, int qj) const {
    const GridDomain& d = geom_->domain();
    if (d.at(qi, qj) == NodeClass::Exterior)
        throw std::invalid_argument("distance target node is EXTERIOR");
    double v = from(pi, pj)[d.wrapped_idx(qi, qj)];
    if (!std::isfinite(v)) throw std::runtime_error("distance: nodes are disconnected in the mask");
    return v;
}

double intrinsic_distance(const GraphGeometry& geom, int pi, int pj, int qi, int qj) {
    return SurfaceDistance(geom, false).between(pi, pj, qi, qj);
}

double conformal_distance(const GraphGeometry& geom, int pi, int pj, int qi, int qj) {
    double p3 = geom.u.at_idx(geom.domain().wrapped_idx(pi, pj));
    return SurfaceDistance(geom, true, p3).between(pi, pj, qi, qj);
}

std::string CurvatureScan::csv() const {
    std::ostringstream os;
    os << "sigma,sup_A2,product\n";
    char buf[128];
    for (auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.sigma, r.sup_A2, r.product);
        os << buf;
    }
    return os.str();
}

CurvatureScan curvature_scan(const GraphGeometry& geom, int pi, int pj, double r0,
                             const std::vector<double>& sigmas) {
    const GridDomain& d = geom.domain();
    std::vector<double> dist = SurfaceDistance(geom, false).from(pi, pj);
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] == NodeClass::Boundary && dist[n] < r0) {
            int i = n % d.nx, j = n / d.nx;
            throw std::runtime_error("curvature_scan: intrinsic ball of radius " +
                                     std::to_string(r0) + " leaves the domain at node (" +
                                     std::to_string(i) + "," + std::to_string(j) + ")");
        }
    CurvatureScan out;
    for (double s : sigmas) {
        if (!(s > 0 && s <= r0))
            throw std::invalid_argument("curvature_scan: sigma must lie in (0, r0]");
        double rad = r0 - s;
        double supA2 = 0;
        for (int n = 0; n < d.size(); ++n)
            if (d.cls[n] == NodeClass::Interior && dist[n] <= rad)
                supA2 = std::max(supA2, geom.normA2[n]);
        out.rows.push_back({s, supA2, supA2 * s * s});
        out.C_emp = std::max(out.C_emp, supA2 * s * s);
    }
    return out;
}

double graph_radius_bound(const GraphGeometry& geom, int pi, int pj, double theta) {
    const GridDomain& d = geom.domain();
    if (d.at(pi, pj) != NodeClass::Interior)
        throw std::invalid_argument("graph_radius_bound: p must be an interior node");
    std::vector<double> dist = SurfaceDistance(geom, false).from(pi, pj);
    double rho_cap = std::numeric_limits<double>::infinity();
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] == NodeClass::Boundary) rho_cap = std::min(rho_cap, dist[n]);
    auto supA_in = [&](double rho) {
        double s = 0;
        for (int n = 0; n < d.size(); ++n)
            if (d.cls[n] == NodeClass::Interior && dist[n] <= rho)
                s = std::max(s, std::sqrt(geom.normA2[n]));
        return s;
    };
    if (supA_in(rho_cap) * rho_cap <= theta) return rho_cap;
    double lo = 0, hi = rho_cap;
    for (int it = 0; it < 60; ++it) {
        double mid = (lo + hi) / 2;
        if (supA_in(mid) * mid <= theta)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace translab
