#include "rootlap/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rootlap {
namespace kernels {

namespace {

// Below this dimension the OpenMP fork/join overhead costs more than the
// loop body; the parallel entry points fall through to serial order.
constexpr int kParallelThreshold = 192;

void matvec_impl(const Matrix& A, int m, const double* x, double* y, bool par) {
#pragma omp parallel for schedule(static) if (par && m >= kParallelThreshold)
  for (int i = 0; i < m; ++i) {
    const double* ai = A.row(i);
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += ai[j] * x[j];
    y[i] = s;
  }
}

void sym_matvec_lower_impl(const Matrix& A, int m, const double* v, double* p, bool par) {
  // Pass 1: diagonal and strict lower triangle, row-parallel.
#pragma omp parallel for schedule(static) if (par && m >= kParallelThreshold)
  for (int i = 0; i < m; ++i) {
    const double* ai = A.row(i);
    double s = 0.0;
    for (int j = 0; j <= i; ++j) s += ai[j] * v[j];
    p[i] = s;
  }
  // Pass 2: the implicit strict upper triangle, p[j] += A(i,j) v[i] for j < i.
  // Scatter pattern: each thread accumulates into a private vector, merged in
  // thread order (single-thread runs reproduce the serial order exactly).
#ifdef _OPENMP
  if (par && m >= kParallelThreshold && omp_get_max_threads() > 1) {
    int nt = omp_get_max_threads();
    std::vector<std::vector<double>> part(nt);
#pragma omp parallel num_threads(nt)
    {
      int t = omp_get_thread_num();
      part[t].assign(m, 0.0);
      double* pt = part[t].data();
#pragma omp for schedule(static)
      for (int i = 1; i < m; ++i) {
        const double* ai = A.row(i);
        double vi = v[i];
        for (int j = 0; j < i; ++j) pt[j] += ai[j] * vi;
      }
    }
    for (int t = 0; t < nt; ++t)
      for (int j = 0; j < m; ++j) p[j] += part[t][j];
    return;
  }
#endif
  for (int i = 1; i < m; ++i) {
    const double* ai = A.row(i);
    double vi = v[i];
    for (int j = 0; j < i; ++j) p[j] += ai[j] * vi;
  }
}

void rank2_update_lower_impl(Matrix& A, int m, const double* u, const double* q, bool par) {
#pragma omp parallel for schedule(static) if (par && m >= kParallelThreshold)
  for (int i = 0; i < m; ++i) {
    double* ai = A.row(i);
    double ui = u[i], qi = q[i];
    for (int j = 0; j <= i; ++j) ai[j] -= ui * q[j] + qi * u[j];
  }
}

void apply_reflector_rows_impl(Matrix& ZT, int nrows, const double* u, int m, double invh, bool par) {
#pragma omp parallel for schedule(static) if (par && nrows >= 2 && m >= kParallelThreshold)
  for (int r = 0; r < nrows; ++r) {
    double* z = ZT.row(r);
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += u[k] * z[k];
    s *= invh;
    for (int k = 0; k < m; ++k) z[k] -= s * u[k];
  }
}

void rotate_pair_impl(double* a, double* b, int n, double c, double s, bool par) {
#pragma omp parallel for schedule(static) if (par && n >= kParallelThreshold * 4)
  for (int i = 0; i < n; ++i) {
    double x = a[i], y = b[i];
    a[i] = c * x - s * y;
    b[i] = s * x + c * y;
  }
}

void outer_accumulate_impl(Matrix& K, double c, const double* phi, bool par) {
  int n = K.rows;
#pragma omp parallel for schedule(static) if (par && n >= kParallelThreshold)
  for (int i = 0; i < n; ++i) {
    double* ki = K.row(i);
    double ci = c * phi[i];
    for (int j = 0; j < n; ++j) ki[j] += ci * phi[j];
  }
}

void matmul_impl(const Matrix& A, const Matrix& B, Matrix& C, bool par) {
  int n = A.rows, k = A.cols, m = B.cols;
  C = Matrix(n, m);
#pragma omp parallel for schedule(static) if (par && n >= kParallelThreshold / 4)
  for (int i = 0; i < n; ++i) {
    const double* ai = A.row(i);
    double* ci = C.row(i);
    for (int l = 0; l < k; ++l) {
      double al = ai[l];
      if (al == 0.0) continue;
      const double* bl = B.row(l);
      for (int j = 0; j < m; ++j) ci[j] += al * bl[j];
    }
  }
}

}  // namespace

void matvec(const Matrix& A, int m, const double* x, double* y) { matvec_impl(A, m, x, y, true); }
void sym_matvec_lower(const Matrix& A, int m, const double* v, double* p) { sym_matvec_lower_impl(A, m, v, p, true); }
void rank2_update_lower(Matrix& A, int m, const double* u, const double* q) { rank2_update_lower_impl(A, m, u, q, true); }
void apply_reflector_rows(Matrix& ZT, int nrows, const double* u, int m, double invh) {
  apply_reflector_rows_impl(ZT, nrows, u, m, invh, true);
}
void rotate_pair(double* a, double* b, int n, double c, double s) { rotate_pair_impl(a, b, n, c, s, true); }
void outer_accumulate(Matrix& K, double c, const double* phi) { outer_accumulate_impl(K, c, phi, true); }
void matmul(const Matrix& A, const Matrix& B, Matrix& C) { matmul_impl(A, B, C, true); }

double dot(const double* x, const double* y, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(int n, double alpha, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

namespace serial {
void matvec(const Matrix& A, int m, const double* x, double* y) { matvec_impl(A, m, x, y, false); }
void sym_matvec_lower(const Matrix& A, int m, const double* v, double* p) { sym_matvec_lower_impl(A, m, v, p, false); }
void rank2_update_lower(Matrix& A, int m, const double* u, const double* q) { rank2_update_lower_impl(A, m, u, q, false); }
void apply_reflector_rows(Matrix& ZT, int nrows, const double* u, int m, double invh) {
  apply_reflector_rows_impl(ZT, nrows, u, m, invh, false);
}
void rotate_pair(double* a, double* b, int n, double c, double s) { rotate_pair_impl(a, b, n, c, s, false); }
void outer_accumulate(Matrix& K, double c, const double* phi) { outer_accumulate_impl(K, c, phi, false); }
void matmul(const Matrix& A, const Matrix& B, Matrix& C) { matmul_impl(A, B, C, false); }
}  // namespace serial

}  // namespace kernels
}  // namespace rootlap
