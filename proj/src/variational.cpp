#include "translab/variational.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace translab {

namespace {

// 2x2 Gauss points on the unit square.
constexpr double kGaussA = 0.21132486540518711775;  // (1 - 1/sqrt(3))/2
constexpr double kGaussB = 0.78867513459481288225;

struct GaussPoint {
    double xi, eta;
};
constexpr std::array<GaussPoint, 4> kGauss = {
    GaussPoint{kGaussA, kGaussA}, GaussPoint{kGaussB, kGaussA}, GaussPoint{kGaussA, kGaussB},
    GaussPoint{kGaussB, kGaussB}};

struct CellBasis {
    // shape values and gradients at the 4 Gauss points, local corner order
    // 00, 10, 01, 11
    double N[4][4];
    double Nx[4][4];
    double Ny[4][4];
};

CellBasis make_basis(double hx, double hy) {
    CellBasis b;
    for (int q = 0; q < 4; ++q) {
        double xi = kGauss[q].xi, eta = kGauss[q].eta;
        b.N[q][0] = (1 - xi) * (1 - eta);
        b.N[q][1] = xi * (1 - eta);
        b.N[q][2] = (1 - xi) * eta;
        b.N[q][3] = xi * eta;
        b.Nx[q][0] = -(1 - eta) / hx;
        b.Nx[q][1] = (1 - eta) / hx;
        b.Nx[q][2] = -eta / hx;
        b.Nx[q][3] = eta / hx;
        b.Ny[q][0] = -(1 - xi) / hy;
        b.Ny[q][1] = -xi / hy;
        b.Ny[q][2] = (1 - xi) / hy;
        b.Ny[q][3] = xi / hy;
    }
    return b;
}

}  // namespace

WeightedAreaModel::WeightedAreaModel(DomainPtr dom, double C) : dom_(std::move(dom)), C_(C) {}

// Visits every cell whose 4 corners are all non-EXTERIOR. f(corner_nodes).
template <typename PerCell>
void WeightedAreaModel::for_cells(PerCell&& f) const {
    const GridDomain& d = *dom_;
    const int cj_end = d.periodic_y ? d.ny : d.ny - 1;
    for (int cj = 0; cj < cj_end; ++cj) {
        for (int ci = 0; ci < d.nx - 1; ++ci) {
            int jn = d.periodic_y ? (cj + 1) % d.ny : cj + 1;
            int n00 = d.idx(ci, cj), n10 = d.idx(ci + 1, cj);
            int n01 = d.idx(ci, jn), n11 = d.idx(ci + 1, jn);
            if (d.cls[n00] == NodeClass::Exterior || d.cls[n10] == NodeClass::Exterior ||
                d.cls[n01] == NodeClass::Exterior || d.cls[n11] == NodeClass::Exterior)
                continue;
            const int nodes[4] = {n00, n10, n01, n11};
            f(nodes);
        }
    }
}

double WeightedAreaModel::energy(const ScalarField& u) const {
    const GridDomain& d = *dom_;
    const CellBasis B = make_basis(d.hx, d.hy);
    const double wq = d.hx * d.hy / 4;
    const auto& uv = u.values();
    double F = 0;
    for_cells([&](const int* nodes) {
        for (int q = 0; q < 4; ++q) {
            double uq = 0, p = 0, r = 0;
            for (int a = 0; a < 4; ++a) {
                uq += B.N[q][a] * uv[nodes[a]];
                p += B.Nx[q][a] * uv[nodes[a]];
                r += B.Ny[q][a] * uv[nodes[a]];
            }
            double W = std::sqrt(1 + (p * p + r * r));
            F += wq * std::exp(C_ * uq) * W;
        }
    });
    return F;
}

std::vector<double> WeightedAreaModel::gradient(const ScalarField& u) const {
    const GridDomain& d = *dom_;
    const CellBasis B = make_basis(d.hx, d.hy);
    const double wq = d.hx * d.hy / 4;
    const auto& uv = u.values();
    std::vector<double> g(d.size(), 0.0);
    for_cells([&](const int* nodes) {
        for (int q = 0; q < 4; ++q) {
            double uq = 0, p = 0, r = 0;
            for (int a = 0; a < 4; ++a) {
                uq += B.N[q][a] * uv[nodes[a]];
                p += B.Nx[q][a] * uv[nodes[a]];
                r += B.Ny[q][a] * uv[nodes[a]];
            }
            double W = std::sqrt(1 + (p * p + r * r));
            double ew = wq * std::exp(C_ * uq);
            for (int a = 0; a < 4; ++a)
                g[nodes[a]] += ew * (C_ * B.N[q][a] * W + (p * B.Nx[q][a] + r * B.Ny[q][a]) / W);
        }
    });
    return g;
}

ScalarField WeightedAreaModel::residual(const ScalarField& u) const {
    const GridDomain& d = *dom_;
    std::vector<double> g = gradient(u);
    ScalarField R(dom_);
    const double inv_area = 1.0 / (d.hx * d.hy);
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] == NodeClass::Interior)
            R.at_idx(n) = -std::exp(-C_ * u.at_idx(n)) * g[n] * inv_area;
    return R;
}

double WeightedAreaModel::residual_sup(const ScalarField& u) const {
    ScalarField R = residual(u);
    const GridDomain& d = *dom_;
    double s = 0;
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] == NodeClass::Interior) s = std::max(s, std::abs(R.at_idx(n)));
    return s;
}

namespace {

// Local Hessian contribution of one Gauss point, symmetric by construction.
inline void gp_hessian(double C, double wq, double uq, double p, double r, const double* N,
                       const double* Nx, const double* Ny, double out[4][4]) {
    double W = std::sqrt(1 + (p * p + r * r));
    double ew = wq * std::exp(C * uq);
    double invW = 1.0 / W;
    double invW3 = invW * invW * invW;
    double s[4];
    for (int a = 0; a < 4; ++a) s[a] = p * Nx[a] + r * Ny[a];
    for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) {
            double v = C * C * N[a] * N[b] * W + C * invW * (N[a] * s[b] + N[b] * s[a]) +
                       (Nx[a] * Nx[b] + Ny[a] * Ny[b]) * invW - s[a] * s[b] * invW3;
            out[a][b] = ew * v;
            out[b][a] = out[a][b];
        }
}

}  // namespace

CsrMatrix WeightedAreaModel::hessian(const ScalarField& u) const {
    const GridDomain& d = *dom_;
    const CellBasis B = make_basis(d.hx, d.hy);
    const double wq = d.hx * d.hy / 4;
    const auto& uv = u.values();

    CsrBuilder builder(d.size());
    for_cells([&](const int* nodes) {
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) builder.reserve_entry(nodes[a], nodes[b]);
    });
    CsrMatrix H = builder.finalize();

    for_cells([&](const int* nodes) {
        for (int q = 0; q < 4; ++q) {
            double uq = 0, p = 0, r = 0;
            for (int a = 0; a < 4; ++a) {
                uq += B.N[q][a] * uv[nodes[a]];
                p += B.Nx[q][a] * uv[nodes[a]];
                r += B.Ny[q][a] * uv[nodes[a]];
            }
            double loc[4][4];
            gp_hessian(C_, wq, uq, p, r, B.N[q], B.Nx[q], B.Ny[q], loc);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) csr_add(H, nodes[a], nodes[b], loc[a][b]);
        }
    });
    return H;
}

std::vector<int> WeightedAreaModel::interior_unknowns(std::vector<int>& unknown_of) const {
    const GridDomain& d = *dom_;
    unknown_of.assign(d.size(), -1);
    std::vector<int> node_of;
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] == NodeClass::Interior) {
            unknown_of[n] = static_cast<int>(node_of.size());
            node_of.push_back(n);
        }
    return node_of;
}

CsrMatrix WeightedAreaModel::newton_matrix(const ScalarField& u, const std::vector<int>& unknown_of,
                                           const std::vector<int>& node_of) const {
    const GridDomain& d = *dom_;
    CsrMatrix H = hessian(u);
    std::vector<double> g = gradient(u);
    const double inv_area = 1.0 / (d.hx * d.hy);

    CsrBuilder builder(static_cast<int>(node_of.size()));
    for (size_t k = 0; k < node_of.size(); ++k) {
        int n = node_of[k];
        for (int it = H.rowptr[n]; it < H.rowptr[n + 1]; ++it) {
            int m = H.colind[it];
            if (unknown_of[m] >= 0) builder.reserve_entry(static_cast<int>(k), unknown_of[m]);
        }
        builder.reserve_entry(static_cast<int>(k), static_cast<int>(k));
    }
    CsrMatrix J = builder.finalize();
    for (size_t k = 0; k < node_of.size(); ++k) {
        int n = node_of[k];
        double pref = std::exp(-C_ * u.at_idx(n)) * inv_area;
        for (int it = H.rowptr[n]; it < H.rowptr[n + 1]; ++it) {
            int m = H.colind[it];
            if (unknown_of[m] >= 0)
                csr_add(J, static_cast<int>(k), unknown_of[m], -pref * H.vals[it]);
        }
        csr_add(J, static_cast<int>(k), static_cast<int>(k), pref * C_ * g[n]);
    }
    return J;
}

std::vector<double> WeightedAreaModel::jacobian_apply(const ScalarField& u,
                                                      const std::vector<double>& w) const {
    const GridDomain& d = *dom_;
    CsrMatrix H = hessian(u);
    std::vector<double> g = gradient(u);
    std::vector<double> Hw(d.size(), 0.0);
    H.mul(w, Hw);
    std::vector<double> out(d.size(), 0.0);
    const double inv_area = 1.0 / (d.hx * d.hy);
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] == NodeClass::Interior)
            out[n] = std::exp(-C_ * u.at_idx(n)) * (C_ * w[n] * g[n] - Hw[n]) * inv_area;
    return out;
}

CsrMatrix WeightedAreaModel::stability_core(const ScalarField& u) const {
    CsrMatrix K = hessian(u);
    // Each diagonal becomes the negated off-diagonal row sum: K 1 = 0 holds
    // bitwise, which realizes the exact discrete kernel L(1/W) = 0.
    for (int r = 0; r < K.n; ++r) {
        double s = 0;
        int diag = -1;
        for (int k = K.rowptr[r]; k < K.rowptr[r + 1]; ++k) {
            if (K.colind[k] == r)
                diag = k;
            else
                s += K.vals[k];
        }
        if (diag >= 0) K.vals[diag] = -s;
    }
    return K;
}

}  // namespace translab
