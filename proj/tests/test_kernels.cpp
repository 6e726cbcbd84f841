#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rootlap/kernels.hpp"

using rootlap::Matrix;
namespace k = rootlap::kernels;

namespace {

Matrix random_matrix(int r, int c, std::uint64_t seed) {
  oracle::Rng rng(seed);
  Matrix m(r, c);
  for (auto& x : m.a) x = rng.uniform();
  return m;
}

std::vector<double> random_vec(int n, std::uint64_t seed) {
  oracle::Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform();
  return v;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  return oracle::max_abs_diff(a, b);
}

}  // namespace

TEST_CASE("matvec matches serial reference bitwise") {
  for (int n : {1, 7, 64, 257}) {
    Matrix A = random_matrix(n, n, 11 + n);
    auto x = random_vec(n, 23 + n);
    std::vector<double> y1(n), y2(n);
    k::matvec(A, n, x.data(), y1.data());
    k::serial::matvec(A, n, x.data(), y2.data());
    CHECK(max_diff(y1, y2) == 0.0);
  }
}

TEST_CASE("matvec on a leading block ignores the rest") {
  Matrix A = random_matrix(10, 10, 5);
  auto x = random_vec(10, 6);
  std::vector<double> y(6), want(6, 0.0);
  k::matvec(A, 6, x.data(), y.data());
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) want[i] += A(i, j) * x[j];
  CHECK(max_diff(y, want) <= 1e-14);
}

TEST_CASE("sym_matvec_lower agrees with a dense symmetric product") {
  for (int n : {2, 9, 120}) {
    // Build a symmetric matrix, then poison the upper triangle: the kernel
    // must only read the lower one.
    Matrix A = random_matrix(n, n, 31 + n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) A(i, j) = 1e300;
    auto v = random_vec(n, 41 + n);
    std::vector<double> p1(n), p2(n), want(n, 0.0);
    k::sym_matvec_lower(A, n, v.data(), p1.data());
    k::serial::sym_matvec_lower(A, n, v.data(), p2.data());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double aij = (j <= i) ? A(i, j) : A(j, i);
        want[i] += aij * v[j];
      }
    CHECK(max_diff(p1, want) <= 1e-12 * n);
    CHECK(max_diff(p2, want) <= 1e-12 * n);
  }
}

TEST_CASE("rank2_update_lower matches serial reference bitwise") {
  for (int n : {3, 33, 150}) {
    Matrix A1 = random_matrix(n, n, 7 + n);
    Matrix A2 = A1;
    auto u = random_vec(n, 8 + n);
    auto q = random_vec(n, 9 + n);
    k::rank2_update_lower(A1, n, u.data(), q.data());
    k::serial::rank2_update_lower(A2, n, u.data(), q.data());
    CHECK(max_diff(A1.a, A2.a) == 0.0);
    // Spot-check the formula on the lower triangle.
    Matrix B = random_matrix(n, n, 7 + n);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j)
        worst = std::max(worst, std::abs(A1(i, j) - (B(i, j) - u[i] * q[j] - q[i] * u[j])));
    CHECK(worst <= 1e-13);
  }
}

TEST_CASE("apply_reflector_rows matches serial reference bitwise") {
  int n = 90, nrows = 17, m = 60;
  Matrix Z1 = random_matrix(nrows, n, 3);
  Matrix Z2 = Z1;
  auto u = random_vec(n, 4);
  // invh = 2 / u.u makes I - u u^T invh a genuine reflector (involution).
  double invh = 2.0 / k::dot(u.data(), u.data(), m);
  k::apply_reflector_rows(Z1, nrows, u.data(), m, invh);
  k::serial::apply_reflector_rows(Z2, nrows, u.data(), m, invh);
  CHECK(max_diff(Z1.a, Z2.a) == 0.0);

  // Reflectors are involutions: applying twice restores the rows.
  Matrix Z3 = Z1;
  k::apply_reflector_rows(Z3, nrows, u.data(), m, invh);
  Matrix orig = random_matrix(nrows, n, 3);
  double worst = 0.0;
  for (std::size_t i = 0; i < Z3.a.size(); ++i)
    worst = std::max(worst, std::abs(Z3.a[i] - orig.a[i]));
  CHECK(worst <= 1e-13);
}

TEST_CASE("rotate_pair is an orthogonal map and matches serial") {
  int n = 101;
  auto a1 = random_vec(n, 13), b1 = random_vec(n, 14);
  auto a2 = a1, b2 = b1;
  double c = std::cos(0.7), s = std::sin(0.7);
  k::rotate_pair(a1.data(), b1.data(), n, c, s);
  k::serial::rotate_pair(a2.data(), b2.data(), n, c, s);
  CHECK(max_diff(a1, a2) == 0.0);
  CHECK(max_diff(b1, b2) == 0.0);
  // Norm preservation.
  auto a0 = random_vec(n, 13), b0 = random_vec(n, 14);
  double before = k::dot(a0.data(), a0.data(), n) + k::dot(b0.data(), b0.data(), n);
  double after = k::dot(a1.data(), a1.data(), n) + k::dot(b1.data(), b1.data(), n);
  CHECK(std::abs(before - after) <= 1e-12 * before);
}

TEST_CASE("outer_accumulate matches serial reference bitwise") {
  int n = 64;
  Matrix K1 = random_matrix(n, n, 55);
  Matrix K2 = K1;
  auto phi = random_vec(n, 56);
  k::outer_accumulate(K1, 0.37, phi.data());
  k::serial::outer_accumulate(K2, 0.37, phi.data());
  CHECK(max_diff(K1.a, K2.a) == 0.0);
  Matrix K0 = random_matrix(n, n, 55);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      worst = std::max(worst, std::abs(K1(i, j) - (K0(i, j) + 0.37 * phi[i] * phi[j])));
  CHECK(worst <= 1e-13);
}

TEST_CASE("matmul matches serial reference bitwise and the naive product") {
  int m = 20, kdim = 35, n = 28;
  Matrix A = random_matrix(m, kdim, 71);
  Matrix B = random_matrix(kdim, n, 72);
  Matrix C1(m, n), C2(m, n);
  k::matmul(A, B, C1);
  k::serial::matmul(A, B, C2);
  CHECK(max_diff(C1.a, C2.a) == 0.0);
  double worst = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int l = 0; l < kdim; ++l) s += A(i, l) * B(l, j);
      worst = std::max(worst, std::abs(C1(i, j) - s));
    }
  CHECK(worst <= 1e-12 * kdim);
}

TEST_CASE("dot and axpy basics") {
  auto x = random_vec(40, 81), y = random_vec(40, 82);
  double s = 0.0;
  for (int i = 0; i < 40; ++i) s += x[i] * y[i];
  CHECK(std::abs(k::dot(x.data(), y.data(), 40) - s) <= 1e-13);
  auto y2 = y;
  k::axpy(40, 2.5, x.data(), y2.data());
  double worst = 0.0;
  for (int i = 0; i < 40; ++i) worst = std::max(worst, std::abs(y2[i] - (y[i] + 2.5 * x[i])));
  CHECK(worst <= 1e-15);
}
