#include "translab/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "translab/parallel.hpp"
#include "translab/variational.hpp"

namespace translab {

namespace {

// One-dimensional first/second derivative along a lattice line with centered
// stencils where available and second-order one-sided fallbacks at boundary
// nodes. sample(k) returns u at offset k; avail(k) tells whether that node is
// usable.
struct LineStencil {
    double d1 = 0, d2 = 0;
};

template <typename Sample, typename Avail>
LineStencil line_derivs(double h, Sample&& s, Avail&& avail) {
    LineStencil out;
    bool cen = avail(-1) && avail(1);
    if (cen) {
        out.d1 = (s(1) - s(-1)) / (2 * h);
        out.d2 = (s(1) - 2 * s(0) + s(-1)) / (h * h);
        return out;
    }
    if (avail(1) && avail(2)) {
        out.d1 = (-3 * s(0) + 4 * s(1) - s(2)) / (2 * h);
        out.d2 = avail(3) ? (2 * s(0) - 5 * s(1) + 4 * s(2) - s(3)) / (h * h)
                          : (s(0) - 2 * s(1) + s(2)) / (h * h);
        return out;
    }
    if (avail(-1) && avail(-2)) {
        out.d1 = (3 * s(0) - 4 * s(-1) + s(-2)) / (2 * h);
        out.d2 = avail(-3) ? (2 * s(0) - 5 * s(-1) + 4 * s(-2) - s(-3)) / (h * h)
                           : (s(0) - 2 * s(-1) + s(-2)) / (h * h);
        return out;
    }
    if (avail(1)) {
        out.d1 = (s(1) - s(0)) / h;
    } else if (avail(-1)) {
        out.d1 = (s(0) - s(-1)) / h;
    }
    return out;
}

}  // namespace

GraphGeometry compute_geometry(const ScalarField& u) {
    u.check_finite();
    GraphGeometry g;
    g.dom = u.domain_ptr();
    g.u = u;
    const GridDomain& d = *g.dom;
    const int N = d.size();
    for (auto* v : {&g.ux, &g.uy, &g.W, &g.tilt, &g.area_weight, &g.nu_x, &g.nu_y, &g.nu_z,
                    &g.g11, &g.g12, &g.g22, &g.gi11, &g.gi12, &g.gi22, &g.a11, &g.a12, &g.a22,
                    &g.H_var, &g.normA2})
        v->assign(N, 0.0);

    // node-local, disjoint writes: safe to split over rows
    parallel_for(d.ny, [&](int j) {
        for (int i = 0; i < d.nx; ++i) {
            const int n = d.idx(i, j);
            if (d.cls[n] == NodeClass::Exterior) continue;

            auto ax = [&](int k) { return d.at(i + k, j) != NodeClass::Exterior; };
            auto sx = [&](int k) { return u(i + k, j); };
            auto ay = [&](int k) { return d.at(i, j + k) != NodeClass::Exterior; };
            auto sy = [&](int k) { return u(i, j + k); };
            LineStencil dx = line_derivs(d.hx, sx, ax);
            LineStencil dy = line_derivs(d.hy, sy, ay);

            // Mixed derivative grouped so that the x<->y transpose evaluates
            // the identical floating-point expression.
            double uxy;
            if (ax(1) && ax(-1) && ay(1) && ay(-1) && d.at(i + 1, j + 1) != NodeClass::Exterior &&
                d.at(i - 1, j - 1) != NodeClass::Exterior &&
                d.at(i + 1, j - 1) != NodeClass::Exterior &&
                d.at(i - 1, j + 1) != NodeClass::Exterior) {
                uxy = ((u(i + 1, j + 1) + u(i - 1, j - 1)) - (u(i + 1, j - 1) + u(i - 1, j + 1))) /
                      (4 * d.hx * d.hy);
            } else {
                // one-sided nested difference of d1x in y (boundary collar only)
                auto d1x_at = [&](int jj) {
                    auto axx = [&](int k) { return d.at(i + k, jj) != NodeClass::Exterior; };
                    auto sxx = [&](int k) { return u(i + k, jj); };
                    return line_derivs(d.hx, sxx, axx).d1;
                };
                if (ay(1) && ay(-1))
                    uxy = (d1x_at(j + 1) - d1x_at(j - 1)) / (2 * d.hy);
                else if (ay(1))
                    uxy = (d1x_at(j + 1) - d1x_at(j)) / d.hy;
                else if (ay(-1))
                    uxy = (d1x_at(j) - d1x_at(j - 1)) / d.hy;
                else
                    uxy = 0;
            }

            const double p = dx.d1, q = dy.d1;
            const double W2 = 1 + (p * p + q * q);
            const double W = std::sqrt(W2);
            g.ux[n] = p;
            g.uy[n] = q;
            g.W[n] = W;
            g.area_weight[n] = W;
            g.tilt[n] = 1.0 / W;
            g.nu_x[n] = -p / W;
            g.nu_y[n] = -q / W;
            g.nu_z[n] = 1.0 / W;
            g.g11[n] = 1 + p * p;
            g.g12[n] = p * q;
            g.g22[n] = 1 + q * q;
            g.gi11[n] = 1 - p * p / W2;
            g.gi12[n] = -p * q / W2;
            g.gi22[n] = 1 - q * q / W2;
            g.a11[n] = -dx.d2 / W;
            g.a12[n] = -uxy / W;
            g.a22[n] = -dy.d2 / W;
            // trace and |A|^2 via transpose-symmetric groupings:
            //   H = tr(g^{-1} a),  |A|^2 = tr((g^{-1}a)^2) = H^2 - 2 det(g^{-1}) det(a)
            g.H_var[n] = (g.gi11[n] * g.a11[n] + g.gi22[n] * g.a22[n]) + 2 * g.gi12[n] * g.a12[n];
            double det_gi = g.gi11[n] * g.gi22[n] - g.gi12[n] * g.gi12[n];
            double det_a = g.a11[n] * g.a22[n] - g.a12[n] * g.a12[n];
            g.normA2[n] = g.H_var[n] * g.H_var[n] - 2 * (det_gi * det_a);
        }
    });
    return g;
}

ScalarField flux_divergence(const ScalarField& u) {
    const GridDomain& d = u.dom();
    ScalarField out(u.domain_ptr());

    auto usable = [&](int i, int j) { return d.at(i, j) != NodeClass::Exterior; };

    // transverse derivative at an x-face between (i,j) and (i+1,j)
    auto uy_xface = [&](int i, int j) {
        double acc = 0;
        int cnt = 0;
        for (int ii : {i, i + 1}) {
            if (usable(ii, j + 1) && usable(ii, j - 1)) {
                acc += (u(ii, j + 1) - u(ii, j - 1)) / (2 * d.hy);
                ++cnt;
            } else if (usable(ii, j + 1)) {
                acc += (u(ii, j + 1) - u(ii, j)) / d.hy;
                ++cnt;
            } else if (usable(ii, j - 1)) {
                acc += (u(ii, j) - u(ii, j - 1)) / d.hy;
                ++cnt;
            }
        }
        return cnt ? acc / cnt : 0.0;
    };
    auto ux_yface = [&](int i, int j) {
        double acc = 0;
        int cnt = 0;
        for (int jj : {j, j + 1}) {
            if (usable(i + 1, jj) && usable(i - 1, jj)) {
                acc += (u(i + 1, jj) - u(i - 1, jj)) / (2 * d.hx);
                ++cnt;
            } else if (usable(i + 1, jj)) {
                acc += (u(i + 1, jj) - u(i, jj)) / d.hx;
                ++cnt;
            } else if (usable(i - 1, jj)) {
                acc += (u(i, jj) - u(i - 1, jj)) / d.hx;
                ++cnt;
            }
        }
        return cnt ? acc / cnt : 0.0;
    };

    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            if (!d.is_interior(i, j)) continue;
            auto xflux = [&](int ii) {  // face between (ii,j) and (ii+1,j)
                double du = (u(ii + 1, j) - u(ii, j)) / d.hx;
                double dv = uy_xface(ii, j);
                return du / std::sqrt(1 + du * du + dv * dv);
            };
            auto yflux = [&](int jj) {
                double dv = (u(i, jj + 1) - u(i, jj)) / d.hy;
                double du = ux_yface(i, jj);
                return dv / std::sqrt(1 + du * du + dv * dv);
            };
            out(i, j) = (xflux(i) - xflux(i - 1)) / d.hx + (yflux(j) - yflux(j - 1)) / d.hy;
        }
    return out;
}

ScalarField translator_residual(const ScalarField& u, double C) {
    const GridDomain& d = u.dom();
    ScalarField R = flux_divergence(u);
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            if (!d.is_interior(i, j)) continue;
            double p = (u(i + 1, j) - u(i - 1, j)) / (2 * d.hx);
            double q = (u(i, j + 1) - u(i, j - 1)) / (2 * d.hy);
            R(i, j) -= C / std::sqrt(1 + (p * p + q * q));
        }
    return R;
}

ScalarField weighted_area_element(const GraphGeometry& geom, double C) {
    const GridDomain& d = geom.domain();
    ScalarField out(geom.dom);
    for (int n = 0; n < d.size(); ++n)
        if (d.cls[n] != NodeClass::Exterior)
            out.at_idx(n) = std::exp(C * geom.u.at_idx(n)) * geom.W[n];
    return out;
}

void geometry_csv(const GraphGeometry& geom, const std::string& path) {
    const GridDomain& d = geom.domain();
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw std::runtime_error("cannot open '" + tmp + "' for writing");
        os << "i,j,x,y,u,W,tilt,H_var,normA2\n";
        char buf[512];
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                int n = d.idx(i, j);
                if (d.cls[n] == NodeClass::Exterior) continue;
                std::snprintf(buf, sizeof buf,
                              "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", i, j, d.x(i),
                              d.y(j), geom.u.at_idx(n), geom.W[n], geom.tilt[n], geom.H_var[n],
                              geom.normA2[n]);
                os << buf;
            }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace translab
