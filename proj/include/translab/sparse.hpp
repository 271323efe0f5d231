#pragma once

#include <string>
#include <vector>

namespace translab {

/// Compressed sparse row matrix with deterministic sequential kernels.
struct CsrMatrix {
    int n = 0;
    std::vector<int> rowptr;  // n+1
    std::vector<int> colind;
    std::vector<double> vals;

    void mul(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> diagonal() const;
    double entry(int r, int c) const;
    bool is_symmetric(double tol) const;
};

/// Builder that fixes the sparsity pattern up front (sorted columns per row).
struct CsrBuilder {
    explicit CsrBuilder(int n) : n(n), cols(n) {}
    int n;
    std::vector<std::vector<int>> cols;
    void reserve_entry(int r, int c) { cols[r].push_back(c); }
    CsrMatrix finalize();  // unique+sorted columns, zero values
};

// Adds into an existing entry; the entry must exist in the pattern.
void csr_add(CsrMatrix& A, int r, int c, double v);

struct KrylovResult {
    std::vector<double> x;
    bool converged = false;
    double rel_residual = 0;
    int iterations = 0;
    std::string note;
};

// Jacobi-preconditioned conjugate gradients; A must be SPD.
KrylovResult cg_solve(const CsrMatrix& A, const std::vector<double>& b, double rel_tol,
                      int max_iter);

/// Zero-fill incomplete LU factorization on the matrix pattern; unit lower
/// triangle implicit, upper triangle includes the diagonal.
struct Ilu0 {
    CsrMatrix lu;
    std::vector<int> diag;
    static Ilu0 build(const CsrMatrix& A);
    void apply(const std::vector<double>& r, std::vector<double>& z) const;
};

// BiCGSTAB for nonsymmetric systems, ILU(0)-preconditioned by default
// (diagonal preconditioning when use_ilu is false). Deterministic: fixed
// summation order, no randomness.
KrylovResult bicgstab_solve(const CsrMatrix& A, const std::vector<double>& b, double rel_tol,
                            int max_iter, bool use_ilu = true);

}  // namespace translab
