#include "translab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace translab {

void CsrMatrix::mul(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n, 0.0);
    for (int r = 0; r < n; ++r) {
        double s = 0;
        for (int k = rowptr[r]; k < rowptr[r + 1]; ++k) s += vals[k] * x[colind[k]];
        y[r] = s;
    }
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(n, 0.0);
    for (int r = 0; r < n; ++r)
        for (int k = rowptr[r]; k < rowptr[r + 1]; ++k)
            if (colind[k] == r) d[r] = vals[k];
    return d;
}

double CsrMatrix::entry(int r, int c) const {
    for (int k = rowptr[r]; k < rowptr[r + 1]; ++k)
        if (colind[k] == c) return vals[k];
    return 0.0;
}

bool CsrMatrix::is_symmetric(double tol) const {
    double scale = 0;
    for (double v : vals) scale = std::max(scale, std::abs(v));
    for (int r = 0; r < n; ++r)
        for (int k = rowptr[r]; k < rowptr[r + 1]; ++k) {
            int c = colind[k];
            if (c < r) continue;
            if (std::abs(vals[k] - entry(c, r)) > tol * std::max(1.0, scale)) return false;
        }
    return true;
}

CsrMatrix CsrBuilder::finalize() {
    CsrMatrix A;
    A.n = n;
    A.rowptr.assign(n + 1, 0);
    for (int r = 0; r < n; ++r) {
        auto& c = cols[r];
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        A.rowptr[r + 1] = A.rowptr[r] + static_cast<int>(c.size());
    }
    A.colind.reserve(A.rowptr[n]);
    for (int r = 0; r < n; ++r)
        for (int c : cols[r]) A.colind.push_back(c);
    A.vals.assign(A.rowptr[n], 0.0);
    return A;
}

void csr_add(CsrMatrix& A, int r, int c, double v) {
    int lo = A.rowptr[r], hi = A.rowptr[r + 1];
    auto it = std::lower_bound(A.colind.begin() + lo, A.colind.begin() + hi, c);
    if (it == A.colind.begin() + hi || *it != c)
        throw std::logic_error("csr_add: entry outside sparsity pattern");
    A.vals[it - A.colind.begin()] += v;
}

static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

static double nrm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

KrylovResult cg_solve(const CsrMatrix& A, const std::vector<double>& b, double rel_tol,
                      int max_iter) {
    KrylovResult out;
    const int n = A.n;
    out.x.assign(n, 0.0);
    std::vector<double> r = b, z(n), p(n), Ap(n);
    std::vector<double> M = A.diagonal();
    for (auto& m : M) m = (m != 0) ? 1.0 / m : 1.0;
    double bnorm = nrm2(b);
    if (bnorm == 0) {
        out.converged = true;
        return out;
    }
    for (int k = 0; k < n; ++k) z[k] = M[k] * r[k];
    p = z;
    double rz = dot(r, z);
    for (int it = 0; it < max_iter; ++it) {
        A.mul(p, Ap);
        double pAp = dot(p, Ap);
        if (pAp == 0) {
            out.note = "cg breakdown: pAp = 0";
            out.rel_residual = nrm2(r) / bnorm;
            out.iterations = it;
            return out;
        }
        double alpha = rz / pAp;
        for (int k = 0; k < n; ++k) out.x[k] += alpha * p[k];
        for (int k = 0; k < n; ++k) r[k] -= alpha * Ap[k];
        double rn = nrm2(r);
        out.iterations = it + 1;
        out.rel_residual = rn / bnorm;
        if (out.rel_residual <= rel_tol) {
            out.converged = true;
            return out;
        }
        for (int k = 0; k < n; ++k) z[k] = M[k] * r[k];
        double rz_new = dot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (int k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    out.note = "cg: iteration cap reached";
    return out;
}

Ilu0 Ilu0::build(const CsrMatrix& A) {
    Ilu0 f;
    f.lu = A;
    f.diag.assign(A.n, -1);
    for (int r = 0; r < A.n; ++r)
        for (int k = A.rowptr[r]; k < A.rowptr[r + 1]; ++k)
            if (A.colind[k] == r) f.diag[r] = k;
    for (int r = 0; r < A.n; ++r)
        if (f.diag[r] < 0) throw std::runtime_error("ilu0: missing diagonal entry");
    CsrMatrix& lu = f.lu;
    for (int i = 1; i < lu.n; ++i) {
        for (int kk = lu.rowptr[i]; kk < lu.rowptr[i + 1]; ++kk) {
            int k = lu.colind[kk];
            if (k >= i) break;
            double piv = lu.vals[f.diag[k]];
            if (piv == 0) piv = 1e-300;
            double lik = lu.vals[kk] / piv;
            lu.vals[kk] = lik;
            // row_i -= lik * row_k restricted to the pattern, columns > k
            int pi = kk + 1;
            for (int pk = f.diag[k] + 1; pk < lu.rowptr[k + 1]; ++pk) {
                int col = lu.colind[pk];
                while (pi < lu.rowptr[i + 1] && lu.colind[pi] < col) ++pi;
                if (pi < lu.rowptr[i + 1] && lu.colind[pi] == col)
                    lu.vals[pi] -= lik * lu.vals[pk];
            }
        }
    }
    return f;
}

void Ilu0::apply(const std::vector<double>& r, std::vector<double>& z) const {
    const int n = lu.n;
    z = r;
    for (int i = 0; i < n; ++i) {
        double s = z[i];
        for (int k = lu.rowptr[i]; k < lu.rowptr[i + 1] && lu.colind[k] < i; ++k)
            s -= lu.vals[k] * z[lu.colind[k]];
        z[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = z[i];
        for (int k = diag[i] + 1; k < lu.rowptr[i + 1]; ++k) s -= lu.vals[k] * z[lu.colind[k]];
        double piv = lu.vals[diag[i]];
        z[i] = s / (piv != 0 ? piv : 1e-300);
    }
}

KrylovResult bicgstab_solve(const CsrMatrix& A, const std::vector<double>& b, double rel_tol,
                            int max_iter, bool use_ilu) {
    KrylovResult out;
    const int n = A.n;
    out.x.assign(n, 0.0);
    Ilu0 ilu;
    std::vector<double> M;
    if (use_ilu) {
        ilu = Ilu0::build(A);
    } else {
        M = A.diagonal();
        for (auto& m : M) m = (m != 0) ? 1.0 / m : 1.0;
    }
    bool precond_ok = true;
    auto precond = [&](const std::vector<double>& r, std::vector<double>& z) {
        if (use_ilu) {
            ilu.apply(r, z);
        } else {
            z.resize(n);
            for (int k = 0; k < n; ++k) z[k] = M[k] * r[k];
        }
        for (double v : z)
            if (!std::isfinite(v)) precond_ok = false;
    };
    std::vector<double> r = b;
    double bnorm = nrm2(b);
    if (bnorm == 0) {
        out.converged = true;
        return out;
    }
    std::vector<double> r0 = r, p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n);
    double rho_old = 1, alpha = 1, omega = 1;
    double best = nrm2(r) / bnorm;
    for (int it = 0; it < max_iter; ++it) {
        double rho = dot(r0, r);
        if (rho == 0) {
            out.note = "bicgstab breakdown: rho = 0";
            out.rel_residual = best;
            out.iterations = it;
            return out;
        }
        if (it == 0) {
            p = r;
        } else {
            double beta = (rho / rho_old) * (alpha / omega);
            for (int k = 0; k < n; ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
        }
        precond(p, phat);
        if (!precond_ok) {
            out.note = "bicgstab breakdown: preconditioner produced non-finite values";
            out.rel_residual = best;
            out.iterations = it;
            return out;
        }
        A.mul(phat, v);
        double r0v = dot(r0, v);
        if (r0v == 0) {
            out.note = "bicgstab breakdown: r0.v = 0";
            out.rel_residual = best;
            out.iterations = it;
            return out;
        }
        alpha = rho / r0v;
        for (int k = 0; k < n; ++k) s[k] = r[k] - alpha * v[k];
        double snorm = nrm2(s) / bnorm;
        if (snorm <= rel_tol) {
            for (int k = 0; k < n; ++k) out.x[k] += alpha * phat[k];
            out.converged = true;
            out.rel_residual = snorm;
            out.iterations = it + 1;
            return out;
        }
        precond(s, shat);
        if (!precond_ok) {
            out.note = "bicgstab breakdown: preconditioner produced non-finite values";
            out.rel_residual = best;
            out.iterations = it;
            return out;
        }
        A.mul(shat, t);
        double tt = dot(t, t);
        if (tt == 0) {
            out.note = "bicgstab breakdown: t = 0";
            out.rel_residual = best;
            out.iterations = it;
            return out;
        }
        omega = dot(t, s) / tt;
        for (int k = 0; k < n; ++k) out.x[k] += alpha * phat[k] + omega * shat[k];
        for (int k = 0; k < n; ++k) r[k] = s[k] - omega * t[k];
        double rn = nrm2(r) / bnorm;
        best = std::min(best, rn);
        out.iterations = it + 1;
        out.rel_residual = rn;
        if (rn <= rel_tol) {
            out.converged = true;
            return out;
        }
        if (omega == 0) {
            out.note = "bicgstab breakdown: omega = 0";
            return out;
        }
        rho_old = rho;
    }
    out.note = "bicgstab: iteration cap reached";
    out.rel_residual = best;
    return out;
}

}  // namespace translab
