#pragma once

#include <cstddef>
#include <vector>

namespace rootlap {

/// Dense row-major matrix. Everything in the toolkit stays at or below the
/// 4096-dimension dense cap, so this is the only storage scheme.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
  double* row(int i) { return a.data() + static_cast<std::size_t>(i) * cols; }
  const double* row(int i) const { return a.data() + static_cast<std::size_t>(i) * cols; }
};

// Low-level data-parallel kernels used by the eigensolver and the spectral
// evolution operators. The default entry points run the OpenMP variants; the
// twins under kernels::serial are the reference implementations kept for the
// tests and for the bench_kernels comparison. Loops use static scheduling so
// a fixed thread count reproduces results bit-for-bit, and every kernel
// except sym_matvec_lower is reduction-free and therefore bitwise identical
// to its serial twin at any thread count.
namespace kernels {

/// y = A x using the leading m rows/cols of a dense matrix.
void matvec(const Matrix& A, int m, const double* x, double* y);

/// p = A v where only the lower triangle of the leading m-by-m block of A is
/// valid (Householder working storage).
void sym_matvec_lower(const Matrix& A, int m, const double* v, double* p);

/// Rank-2 update A -= u qT + q uT on the lower triangle of the leading block.
void rank2_update_lower(Matrix& A, int m, const double* u, const double* q);

/// Apply the Householder reflector I - u uT / h (h = uTu supplied as 1/h) to
/// the leading m entries of each of the first nrows rows of ZT. Rows of ZT
/// hold eigenvectors, so this is the tridiagonalization back-transform.
void apply_reflector_rows(Matrix& ZT, int nrows, const double* u, int m, double invh);

/// Plane rotation of two length-n arrays (a pair of eigenvector rows):
/// a' = c a - s b, b' = s a + c b.
void rotate_pair(double* a, double* b, int n, double c, double s);

/// K += c * phi phiT (full storage): spectral-sum kernel assembly.
void outer_accumulate(Matrix& K, double c, const double* phi);

/// C = A B, plain dense product.
void matmul(const Matrix& A, const Matrix& B, Matrix& C);

/// Dot products and axpy stay serial on purpose: they are cheap at the sizes
/// involved and keeping reductions serial makes results independent of the
/// thread count.
double dot(const double* x, const double* y, int n);
void axpy(int n, double alpha, const double* x, double* y);

namespace serial {
void matvec(const Matrix& A, int m, const double* x, double* y);
void sym_matvec_lower(const Matrix& A, int m, const double* v, double* p);
void rank2_update_lower(Matrix& A, int m, const double* u, const double* q);
void apply_reflector_rows(Matrix& ZT, int nrows, const double* u, int m, double invh);
void rotate_pair(double* a, double* b, int n, double c, double s);
void outer_accumulate(Matrix& K, double c, const double* phi);
void matmul(const Matrix& A, const Matrix& B, Matrix& C);
}  // namespace serial

}  // namespace kernels
}  // namespace rootlap
