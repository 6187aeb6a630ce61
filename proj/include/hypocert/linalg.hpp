#pragma once

#include <vector>

namespace hypo {

// Dense symmetric matrix, row-major n x n.
struct SymMatrix {
  int n = 0;
  std::vector<double> a;

  explicit SymMatrix(int n_ = 0) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> jacobi_eigenvalues(SymMatrix m, double tol = 1e-15, int max_sweeps = 100);

// Inverse of a symmetric positive definite matrix; throws if singular.
SymMatrix spd_inverse(const SymMatrix& m);

// Number of eigenvalues below x of the symmetric tridiagonal matrix with
// diagonal `diag` and off-diagonal `off` (size n - 1).
int sturm_count(const std::vector<double>& diag, const std::vector<double>& off, double x);

// k-th smallest eigenvalue (k = 0 is the smallest) by Sturm bisection.
double tridiagonal_eigenvalue(const std::vector<double>& diag, const std::vector<double>& off, int k,
                              double rel_tol = 1e-13);

}  // namespace hypo
