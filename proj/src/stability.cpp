#include "translab/stability.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "translab/variational.hpp"

namespace translab {

void VariationField::validate() const {
    const GridDomain& d = eta.dom();
    for (int n = 0; n < d.size(); ++n) {
        if (!std::isfinite(eta.at_idx(n)))
            throw std::runtime_error("variation field: non-finite value");
        if (!support[n] && eta.at_idx(n) != 0.0)
            throw std::runtime_error("variation field: nonzero value outside the collar support");
    }
}

static double bump1(double t) {
    double s = 1 - t * t;
    return s > 0 ? s * s * s : 0.0;
}

VariationField make_bump(DomainPtr dom, int collar, double cx, double cy, double rx, double ry) {
    VariationField v;
    v.collar = collar;
    v.support = interior_core_mask(*dom, collar);
    v.eta = ScalarField(dom);
    for (int j = 0; j < dom->ny; ++j)
        for (int i = 0; i < dom->nx; ++i) {
            int n = dom->idx(i, j);
            if (!v.support[n]) continue;
            v.eta.at_idx(n) = bump1((dom->x(i) - cx) / rx) * bump1((dom->y(j) - cy) / ry);
        }
    v.validate();
    return v;
}

VariationField make_random_variation(DomainPtr dom, int collar, std::uint64_t seed) {
    VariationField v;
    v.collar = collar;
    v.support = interior_core_mask(*dom, collar);
    v.eta = ScalarField(dom);
    std::uint64_t s = seed ? seed : 0x9e3779b97f4a7c15ull;
    auto next = [&s]() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return static_cast<double>(s >> 11) / 9007199254740992.0;  // [0,1)
    };
    for (int n = 0; n < dom->size(); ++n)
        if (v.support[n]) v.eta.at_idx(n) = 2 * next() - 1;
    v.validate();
    return v;
}

StabilityOperator::StabilityOperator(const GraphGeometry& geom, double C)
    : dom_(geom.dom), C_(C), u_(geom.u), W_(geom.W), tilt_(geom.tilt) {
    nu_[0] = geom.nu_x;
    nu_[1] = geom.nu_y;
    nu_[2] = geom.nu_z;
    WeightedAreaModel model(dom_, C_);
    core_ = model.stability_core(u_);
    const GridDomain& d = *dom_;
    omega_.assign(d.size(), 0.0);
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] != NodeClass::Exterior)
            omega_[n] = std::exp(C_ * u_.at_idx(n)) * W_[n] * d.hx * d.hy;
}

ScalarField StabilityOperator::apply(const ScalarField& eta) const {
    const GridDomain& d = *dom_;
    std::vector<double> psi(d.size(), 0.0);
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] != NodeClass::Exterior) psi[n] = W_[n] * eta.at_idx(n);
    std::vector<double> Kpsi;
    core_.mul(psi, Kpsi);
    ScalarField out(dom_);
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] == NodeClass::Interior)
            out.at_idx(n) = -W_[n] * Kpsi[n] / omega_[n];
    return out;
}

double StabilityOperator::quadratic_form(const VariationField& phi) const {
    phi.validate();
    ScalarField Lphi = apply(phi.eta);
    const GridDomain& d = *dom_;
    double q = 0;
    for (int n = 0; n < d.size(); ++n)
        if (phi.support[n]) q += phi.eta.at_idx(n) * Lphi.at_idx(n) * omega_[n];
    return q;
}

double StabilityOperator::quadratic_form_sbp(const VariationField& phi) const {
    phi.validate();
    const GridDomain& d = *dom_;
    WeightedAreaModel model(dom_, C_);
    const auto& uv = u_.values();
    std::vector<double> psi(d.size(), 0.0);
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] != NodeClass::Exterior) psi[n] = W_[n] * phi.eta.at_idx(n);

    std::vector<double> g = model.gradient(u_);
    double q = 0;
    for (int n = 0; n < d.size(); ++n) q += C_ * psi[n] * psi[n] * g[n];

    // subtract the Hessian quadratic form, accumulated per Gauss point
    const double ga = 0.21132486540518711775, gb = 0.78867513459481288225;
    const double xis[4] = {ga, gb, ga, gb};
    const double etas[4] = {ga, ga, gb, gb};
    const double wq = d.hx * d.hy / 4;
    const int cj_end = d.periodic_y ? d.ny : d.ny - 1;
    for (int cj = 0; cj < cj_end; ++cj)
        for (int ci = 0; ci < d.nx - 1; ++ci) {
            int jn = d.periodic_y ? (cj + 1) % d.ny : cj + 1;
            int nodes[4] = {d.idx(ci, cj), d.idx(ci + 1, cj), d.idx(ci, jn), d.idx(ci + 1, jn)};
            bool ok = true;
            for (int nn : nodes) ok = ok && d.cls[nn] != NodeClass::Exterior;
            if (!ok) continue;
            bool touched = false;
            for (int nn : nodes) touched = touched || psi[nn] != 0.0;
            if (!touched) continue;
            for (int qp = 0; qp < 4; ++qp) {
                double xi = xis[qp], et = etas[qp];
                double N[4] = {(1 - xi) * (1 - et), xi * (1 - et), (1 - xi) * et, xi * et};
                double Nx[4] = {-(1 - et) / d.hx, (1 - et) / d.hx, -et / d.hx, et / d.hx};
                double Ny[4] = {-(1 - xi) / d.hy, -xi / d.hy, (1 - xi) / d.hy, xi / d.hy};
                double uq = 0, p = 0, r = 0, v = 0, px = 0, py = 0;
                for (int a = 0; a < 4; ++a) {
                    uq += N[a] * uv[nodes[a]];
                    p += Nx[a] * uv[nodes[a]];
                    r += Ny[a] * uv[nodes[a]];
                    v += N[a] * psi[nodes[a]];
                    px += Nx[a] * psi[nodes[a]];
                    py += Ny[a] * psi[nodes[a]];
                }
                double W = std::sqrt(1 + (p * p + r * r));
                double ew = wq * std::exp(C_ * uq);
                double su = p * px + r * py;
                double dens = C_ * C_ * v * v * W + 2 * C_ * v * su / W +
                              (px * px + py * py) / W - su * su / (W * W * W);
                q -= ew * dens;
            }
        }
    return q;
}

double StabilityOperator::weighted_dirichlet_energy(const VariationField& eta,
                                                    const std::vector<double>& xi) const {
    const GridDomain& d = *dom_;
    std::vector<double> xt(d.size(), 0.0);
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] != NodeClass::Exterior) xt[n] = W_[n] * xi[n];
    double acc = 0;
    for (int n = 0; n < core_.n; ++n)
        for (int k = core_.rowptr[n]; k < core_.rowptr[n + 1]; ++k) {
            int m = core_.colind[k];
            if (m <= n) continue;  // each unordered pair once
            double de = eta.eta.at_idx(n) - eta.eta.at_idx(m);
            if (de == 0) continue;
            acc += -core_.vals[k] * xt[n] * xt[m] * de * de;
        }
    return acc;
}

double StabilityOperator::kernel_residual(int axis, int collar) const {
    const GridDomain& d = *dom_;
    ScalarField eta(dom_);
    for (int n = 0; n < d.size(); ++n) {
        if (d.cls[n] == NodeClass::Exterior) continue;
        eta.at_idx(n) = nu_[axis][n];
    }
    ScalarField L = apply(eta);
    auto mask = interior_core_mask(d, collar);
    double s = 0;
    for (int n = 0; n < d.size(); ++n)
        if (mask[n]) s = std::max(s, std::abs(L.at_idx(n)));
    return s;
}

EigenEstimate StabilityOperator::top_eigenvalue(double tol, std::uint64_t seed, int collar,
                                                double potential_shift, int max_iter) const {
    const GridDomain& d = *dom_;
    auto mask = interior_core_mask(d, collar);
    std::vector<int> node_of;
    std::vector<int> compact(d.size(), -1);
    for (int n = 0; n < d.size(); ++n)
        if (mask[n]) {
            compact[n] = static_cast<int>(node_of.size());
            node_of.push_back(n);
        }
    const int m = static_cast<int>(node_of.size());
    if (m == 0) throw std::invalid_argument("top_eigenvalue: empty collar-supported region");

    // A = -D^{-1/2} W K W D^{-1/2} + shift, restricted to the support
    CsrBuilder builder(m);
    for (int a = 0; a < m; ++a) {
        int n = node_of[a];
        builder.reserve_entry(a, a);
        for (int k = core_.rowptr[n]; k < core_.rowptr[n + 1]; ++k)
            if (compact[core_.colind[k]] >= 0) builder.reserve_entry(a, compact[core_.colind[k]]);
    }
    CsrMatrix A = builder.finalize();
    for (int a = 0; a < m; ++a) {
        int n = node_of[a];
        double sa = W_[n] / std::sqrt(omega_[n]);
        for (int k = core_.rowptr[n]; k < core_.rowptr[n + 1]; ++k) {
            int mm = core_.colind[k];
            int b = compact[mm];
            if (b < 0) continue;
            double sb = W_[mm] / std::sqrt(omega_[mm]);
            csr_add(A, a, b, -sa * core_.vals[k] * sb);
        }
        if (potential_shift != 0) csr_add(A, a, a, potential_shift);
    }

    // Restarted Lanczos on A with full reorthogonalization. Plain power
    // iteration from the Gershgorin shift needs ~1e5 iterations at these
    // resolutions (sign-mixed rows push the bound far above the spectrum);
    // the Krylov form reaches the same largest eigenvalue in a few hundred
    // products and is certified the same way, via the Rayleigh residual.
    std::vector<double> x(m);
    std::uint64_t s = seed ? seed : 1;
    for (int a = 0; a < m; ++a) {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        x[a] = static_cast<double>(s >> 11) / 9007199254740992.0 - 0.5;
    }
    auto normalize = [](std::vector<double>& v) {
        double nn = 0;
        for (double t : v) nn += t * t;
        nn = std::sqrt(nn);
        if (nn > 0)
            for (double& t : v) t /= nn;
        return nn;
    };
    normalize(x);

    const int krylov = std::min(m, 250);
    EigenEstimate est;
    int applies = 0;
    std::vector<double> Ax(m);
    auto certify = [&](std::vector<double>& y) {
        normalize(y);
        A.mul(y, Ax);
        double rho = 0;
        for (int a = 0; a < m; ++a) rho += y[a] * Ax[a];
        double rn = 0;
        for (int a = 0; a < m; ++a) {
            double t = Ax[a] - rho * y[a];
            rn += t * t;
        }
        est.value = rho;
        est.rayleigh_residual = std::sqrt(rn);
        est.iterations = applies;
    };

    while (applies < max_iter) {
        std::vector<std::vector<double>> V;
        std::vector<double> alpha, beta;
        V.push_back(x);
        bool invariant = false;
        double scale = 1e-300;
        for (int j = 0; j < krylov && applies < max_iter; ++j) {
            std::vector<double> w(m);
            A.mul(V[j], w);
            ++applies;
            double aj = 0;
            for (int a = 0; a < m; ++a) aj += w[a] * V[j][a];
            alpha.push_back(aj);
            scale = std::max(scale, std::abs(aj));
            // full reorthogonalization, two passes (single-pass Gram-Schmidt
            // degrades when the projection removes most of w)
            for (int pass = 0; pass < 2; ++pass)
                for (size_t l = 0; l < V.size(); ++l) {
                    double c = 0;
                    for (int a = 0; a < m; ++a) c += w[a] * V[l][a];
                    for (int a = 0; a < m; ++a) w[a] -= c * V[l][a];
                }
            double bj = normalize(w);
            if (bj <= 1e-12 * scale) {  // Krylov space exhausted
                invariant = true;
                break;
            }
            scale = std::max(scale, bj);
            beta.push_back(bj);
            V.push_back(std::move(w));
        }
        const int k = static_cast<int>(alpha.size());
        if (k == 0) break;
        // top eigenpair of the tridiagonal T via dense Jacobi rotations
        std::vector<std::vector<double>> T(k, std::vector<double>(k, 0.0));
        std::vector<std::vector<double>> Q(k, std::vector<double>(k, 0.0));
        for (int i2 = 0; i2 < k; ++i2) {
            T[i2][i2] = alpha[i2];
            Q[i2][i2] = 1.0;
            if (i2 + 1 < k) T[i2][i2 + 1] = T[i2 + 1][i2] = beta[i2];
        }
        for (int sweep = 0; sweep < 60; ++sweep) {
            double off = 0;
            for (int p = 0; p < k; ++p)
                for (int q = p + 1; q < k; ++q) off += T[p][q] * T[p][q];
            if (off < 1e-28) break;
            for (int p = 0; p < k; ++p)
                for (int q = p + 1; q < k; ++q) {
                    if (std::abs(T[p][q]) < 1e-300) continue;
                    double theta = (T[q][q] - T[p][p]) / (2 * T[p][q]);
                    double t = (theta >= 0 ? 1.0 : -1.0) /
                               (std::abs(theta) + std::sqrt(theta * theta + 1));
                    double c = 1 / std::sqrt(t * t + 1), sn = t * c;
                    for (int r = 0; r < k; ++r) {
                        double tp = T[r][p], tq = T[r][q];
                        T[r][p] = c * tp - sn * tq;
                        T[r][q] = sn * tp + c * tq;
                    }
                    for (int r = 0; r < k; ++r) {
                        double tp = T[p][r], tq = T[q][r];
                        T[p][r] = c * tp - sn * tq;
                        T[q][r] = sn * tp + c * tq;
                        double qp = Q[r][p], qq = Q[r][q];
                        Q[r][p] = c * qp - sn * qq;
                        Q[r][q] = sn * qp + c * qq;
                    }
                }
        }
        int top = 0;
        for (int i2 = 1; i2 < k; ++i2)
            if (T[i2][i2] > T[top][top]) top = i2;
        std::vector<double> y(m, 0.0);
        for (int l = 0; l < k; ++l)
            for (int a = 0; a < m; ++a) y[a] += Q[l][top] * V[l][a];
        certify(y);
        if (std::getenv("TL_EIG_DEBUG"))
            std::fprintf(stderr, "eig applies %d rho %.10f rn %.3e\n", applies, est.value,
                         est.rayleigh_residual);
        if (est.rayleigh_residual <= tol * std::max(1.0, std::abs(est.value))) return est;
        if (invariant)
            throw std::runtime_error(
                "top_eigenvalue: Krylov space exhausted before certification; last Rayleigh "
                "quotient " +
                std::to_string(est.value));
        x = y;  // thick-restart seed
    }
    throw std::runtime_error("top_eigenvalue: no convergence in " + std::to_string(max_iter) +
                             " operator applications; last Rayleigh quotient " +
                             std::to_string(est.value));
}

ScalarField apply_L_coordinate(const GraphGeometry& geom, double C, const ScalarField& eta) {
    const GridDomain& d = geom.domain();
    ScalarField out(geom.dom);
    auto wgt = [&](int i, int j) {
        int n = d.wrapped_idx(i, j);
        return std::exp(C * geom.u.at_idx(n)) * geom.W[n];
    };
    auto ok = [&](int i, int j) { return d.at(i, j) != NodeClass::Exterior; };
    auto ety = [&](int i, int j) {  // centered d(eta)/dy with one-sided fallback
        if (ok(i, j + 1) && ok(i, j - 1)) return (eta(i, j + 1) - eta(i, j - 1)) / (2 * d.hy);
        if (ok(i, j + 1)) return (eta(i, j + 1) - eta(i, j)) / d.hy;
        if (ok(i, j - 1)) return (eta(i, j) - eta(i, j - 1)) / d.hy;
        return 0.0;
    };
    auto etx = [&](int i, int j) {
        if (ok(i + 1, j) && ok(i - 1, j)) return (eta(i + 1, j) - eta(i - 1, j)) / (2 * d.hx);
        if (ok(i + 1, j)) return (eta(i + 1, j) - eta(i, j)) / d.hx;
        if (ok(i - 1, j)) return (eta(i, j) - eta(i - 1, j)) / d.hx;
        return 0.0;
    };
    auto gi = [&](int i, int j, int which) {
        int n = d.wrapped_idx(i, j);
        return which == 0 ? geom.gi11[n] : which == 1 ? geom.gi12[n] : geom.gi22[n];
    };
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            int n = d.idx(i, j);
            if (d.cls[n] != NodeClass::Interior) continue;
            auto fx = [&](int ii) {  // flux through x-face (ii+1/2, j)
                double w = (wgt(ii, j) + wgt(ii + 1, j)) / 2;
                double c11 = (gi(ii, j, 0) + gi(ii + 1, j, 0)) / 2;
                double c12 = (gi(ii, j, 1) + gi(ii + 1, j, 1)) / 2;
                double dxe = (eta(ii + 1, j) - eta(ii, j)) / d.hx;
                double dye = (ety(ii, j) + ety(ii + 1, j)) / 2;
                return w * (c11 * dxe + c12 * dye);
            };
            auto fy = [&](int jj) {
                double w = (wgt(i, jj) + wgt(i, jj + 1)) / 2;
                double c12 = (gi(i, jj, 1) + gi(i, jj + 1, 1)) / 2;
                double c22 = (gi(i, jj, 2) + gi(i, jj + 1, 2)) / 2;
                double dye = (eta(i, jj + 1) - eta(i, jj)) / d.hy;
                double dxe = (etx(i, jj) + etx(i, jj + 1)) / 2;
                return w * (c12 * dxe + c22 * dye);
            };
            double div = (fx(i) - fx(i - 1)) / d.hx + (fy(j) - fy(j - 1)) / d.hy;
            out.at_idx(n) = div / wgt(i, j) + geom.normA2[n] * eta.at_idx(n);
        }
    return out;
}

namespace {

// Trapezoid weights along contiguous non-EXTERIOR spans of a row/column.
std::vector<double> quad_weights(const GridDomain& d) {
    std::vector<double> wx(d.size(), 0.0), wy(d.size(), 0.0);
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            int n = d.idx(i, j);
            if (d.cls[n] == NodeClass::Exterior) continue;
            bool left = d.at(i - 1, j) != NodeClass::Exterior;
            bool right = d.at(i + 1, j) != NodeClass::Exterior;
            wx[n] = d.hx * ((left && right) ? 1.0 : 0.5);
            if (d.periodic_y) {
                wy[n] = d.hy;
            } else {
                bool down = d.at(i, j - 1) != NodeClass::Exterior;
                bool up = d.at(i, j + 1) != NodeClass::Exterior;
                wy[n] = d.hy * ((down && up) ? 1.0 : 0.5);
            }
        }
    std::vector<double> w(d.size(), 0.0);
    for (int n = 0; n < d.size(); ++n) w[n] = wx[n] * wy[n];
    return w;
}

}  // namespace

double weighted_area(const GraphGeometry& geom, double C) {
    const GridDomain& d = geom.domain();
    auto w = quad_weights(d);
    double F = 0;
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] != NodeClass::Exterior)
            F += std::exp(C * geom.u.at_idx(n)) * geom.W[n] * w[n];
    return F;
}

double first_variation(const GraphGeometry& geom, double C, const VariationField& eta) {
    eta.validate();
    const GridDomain& d = geom.domain();
    // dF[W eta] exactly: the bracket (H + C tilt) realized as -R with R the
    // energy-gradient residual, so converged translators integrate to zero
    // at the solver tolerance.
    ScalarField R = WeightedAreaModel(geom.dom, C).residual(geom.u);
    double acc = 0;
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] == NodeClass::Interior)
            acc += -eta.eta.at_idx(n) * R.at_idx(n) * std::exp(C * geom.u.at_idx(n)) * geom.W[n] *
                   d.hx * d.hy;
    return acc;
}

double perturbed_area(const GraphGeometry& geom, double C, const VariationField& eta, double s) {
    eta.validate();
    const GridDomain& d = geom.domain();
    double supA = 0, supEta = 0;
    for (int n = 0; n < d.size(); ++n) {
        if (d.cls[n] == NodeClass::Interior) supA = std::max(supA, std::sqrt(geom.normA2[n]));
        supEta = std::max(supEta, std::abs(eta.eta.at_idx(n)));
    }
    if (std::abs(s) * supEta * supA > 0.1)
        throw std::invalid_argument("perturbed_area: |s| ||eta|| sup|A| exceeds 0.1");

    auto px = [&](int i, int j) {
        int n = d.wrapped_idx(i, j);
        return d.x(i) + s * eta.eta.at_idx(n) * geom.nu_x[n];
    };
    auto py = [&](int i, int j) {
        int n = d.wrapped_idx(i, j);
        return d.y(j) + s * eta.eta.at_idx(n) * geom.nu_y[n];
    };
    auto pz = [&](int i, int j) {
        int n = d.wrapped_idx(i, j);
        return geom.u.at_idx(n) + s * eta.eta.at_idx(n) * geom.nu_z[n];
    };

    double F = 0;
    const int cj_end = d.periodic_y ? d.ny : d.ny - 1;
    for (int cj = 0; cj < cj_end; ++cj)
        for (int ci = 0; ci < d.nx - 1; ++ci) {
            int jn = d.periodic_y ? (cj + 1) % d.ny : cj + 1;
            if (d.at(ci, cj) == NodeClass::Exterior || d.at(ci + 1, cj) == NodeClass::Exterior ||
                d.at(ci, jn) == NodeClass::Exterior || d.at(ci + 1, jn) == NodeClass::Exterior)
                continue;
            double X[4][3] = {{px(ci, cj), py(ci, cj), pz(ci, cj)},
                              {px(ci + 1, cj), py(ci + 1, cj), pz(ci + 1, cj)},
                              {px(ci, jn), py(ci, jn), pz(ci, jn)},
                              {px(ci + 1, jn), py(ci + 1, jn), pz(ci + 1, jn)}};
            // y-coordinate of the upper row in the periodic wrap case
            if (d.periodic_y && jn == 0) {
                X[2][1] = d.y0 + d.ny * d.hy + s * eta.eta.at_idx(d.idx(ci, 0)) * geom.nu_y[d.idx(ci, 0)];
                X[3][1] = d.y0 + d.ny * d.hy +
                          s * eta.eta.at_idx(d.idx(ci + 1, 0)) * geom.nu_y[d.idx(ci + 1, 0)];
            }
            const int tris[2][3] = {{0, 1, 3}, {0, 3, 2}};
            for (auto& t : tris) {
                double e1[3], e2[3];
                for (int k = 0; k < 3; ++k) {
                    e1[k] = X[t[1]][k] - X[t[0]][k];
                    e2[k] = X[t[2]][k] - X[t[0]][k];
                }
                double cx = e1[1] * e2[2] - e1[2] * e2[1];
                double cy = e1[2] * e2[0] - e1[0] * e2[2];
                double cz = e1[0] * e2[1] - e1[1] * e2[0];
                double area = 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
                if (area < 1e-16)
                    throw std::runtime_error("perturbed_area: degenerate triangle");
                double zc = (X[t[0]][2] + X[t[1]][2] + X[t[2]][2]) / 3;
                F += area * std::exp(C * zc);
            }
        }
    return F;
}

std::string StabilityReport::to_json() const {
    nlohmann::ordered_json j;
    j["Q_values"] = nlohmann::ordered_json::array();
    for (auto& [label, value] : Q_values)
        j["Q_values"].push_back({{"label", label}, {"Q", value}});
    j["kernel_residuals"] = {kernel_residuals[0], kernel_residuals[1], kernel_residuals[2]};
    j["top_eigenvalue"] = top_eigenvalue;
    j["top_eigen_residual"] = top_eigen_residual;
    j["identity_gap"] = identity_gap;
    j["residual_sup"] = residual_sup;
    j["first_variation_bump"] = first_variation_bump;
    j["translator"] = translator;
    return j.dump(2);
}

StabilityReport analyze_stability(const ScalarField& u, const StabilityOptions& opt) {
    const GridDomain& d = u.dom();
    GraphGeometry geom = compute_geometry(u);
    StabilityOperator L(geom, opt.C);

    double cx = d.x0 + (d.nx - 1) * d.hx / 2;
    double cy = d.y0 + (d.ny - 1) * d.hy / 2;
    double rx = (d.nx - 1) * d.hx * 0.35, ry = (d.ny - 1) * d.hy * 0.35;
    VariationField bump = make_bump(u.domain_ptr(), opt.collar, cx, cy, rx, ry);
    VariationField rnd = make_random_variation(u.domain_ptr(), opt.collar, opt.seed);

    StabilityReport rep;
    rep.Q_values.emplace_back("bump", L.quadratic_form(bump));
    rep.Q_values.emplace_back("bump_sbp", L.quadratic_form_sbp(bump));
    rep.Q_values.emplace_back("random", L.quadratic_form(rnd));

    VariationField phi = bump;
    for (int n = 0; n < d.size(); ++n)
        if (phi.support[n]) phi.eta.at_idx(n) = bump.eta.at_idx(n) * geom.tilt[n];
    double Qid = L.quadratic_form(phi);
    rep.Q_values.emplace_back("bump_times_tilt", Qid);
    double Idir = L.weighted_dirichlet_energy(bump, geom.tilt);
    rep.identity_gap = std::abs(Qid + Idir) / std::max(std::abs(Idir), 1e-300);

    for (int axis = 0; axis < 3; ++axis)
        rep.kernel_residuals[axis] = L.kernel_residual(axis, opt.collar);

    EigenEstimate eig = L.top_eigenvalue(opt.eig_tol, opt.seed, opt.collar);
    rep.top_eigenvalue = eig.value;
    rep.top_eigen_residual = eig.rayleigh_residual;

    rep.residual_sup = WeightedAreaModel(u.domain_ptr(), opt.C).residual_sup(u);
    rep.first_variation_bump = first_variation(geom, opt.C, bump);
    double bump_l1 = 0;
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] == NodeClass::Interior)
            bump_l1 += std::abs(bump.eta.at_idx(n)) * d.hx * d.hy;
    rep.translator = rep.residual_sup <= 1e-6 &&
                     std::abs(rep.first_variation_bump) <= 1e-6 * std::max(bump_l1, 1e-12);
    return rep;
}

}  // namespace translab
