#include "rootlap/eigensolve.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rootlap {

namespace {

using kernels::apply_reflector_rows;
using kernels::dot;
using kernels::matvec;
using kernels::rank2_update_lower;
using kernels::rotate_pair;
using kernels::sym_matvec_lower;

// ---------------------------------------------------------------------------
// Householder reduction to tridiagonal form, reflectors kept for the
// back-transform. Works on the lower triangle of B; after the call row i
// (columns 0..i-1) holds the scaled reflector u of step i and invh[i] = 1/h
// with h = u'u - u_l g (0 when the step was skipped).
void tridiagonalize(Matrix& B, std::vector<double>& d, std::vector<double>& e,
                    std::vector<double>& invh) {
  int n = B.rows;
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  invh.assign(n, 0.0);
  std::vector<double> p(n), q(n);
  for (int i = n - 1; i >= 1; --i) {
    d[i] = B(i, i);  // untouched from here on: later steps act on the leading block
    int l = i - 1;
    double* bi = B.row(i);
    if (l > 0) {
      double scale = 0.0;
      for (int k = 0; k <= l; ++k) scale += std::abs(bi[k]);
      if (scale == 0.0) {
        e[i] = bi[l];
        continue;
      }
      double h = 0.0;
      for (int k = 0; k <= l; ++k) {
        bi[k] /= scale;
        h += bi[k] * bi[k];
      }
      double f = bi[l];
      double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
      e[i] = scale * g;
      h -= f * g;
      bi[l] = f - g;
      invh[i] = 1.0 / h;
      int m = l + 1;
      sym_matvec_lower(B, m, bi, p.data());
      for (int j = 0; j < m; ++j) p[j] *= invh[i];
      double kk = 0.5 * dot(p.data(), bi, m) * invh[i];
      for (int j = 0; j < m; ++j) q[j] = p[j] - kk * bi[j];
      rank2_update_lower(B, m, bi, q.data());
    } else {
      e[i] = bi[0];
    }
  }
  d[0] = B(0, 0);
  e[0] = 0.0;
}

// ---------------------------------------------------------------------------
// Implicit-shift QL on a tridiagonal (d, e) with e[i] = T(i, i+1) and
// e[n-1] = 0. When ZT is given, its rows are rotated along (column
// operations on the untransposed eigenvector matrix).
void ql_implicit(std::vector<double>& d, std::vector<double>& e, Matrix* ZT) {
  int n = static_cast<int>(d.size());
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= DBL_EPSILON * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) throw std::runtime_error("eigendecompose: QL iteration failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i], b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (ZT) rotate_pair(ZT->row(i), ZT->row(i + 1), ZT->cols, c, s);
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

// ---------------------------------------------------------------------------
// Tridiagonal solve (T - sigma I) x = y with partial pivoting; factors are
// rebuilt per call (O(n), negligible next to everything else).
struct TriShiftSolver {
  int n;
  std::vector<double> low, d0, d1, d2;
  std::vector<char> swapped;

  TriShiftSolver(const std::vector<double>& dt, const std::vector<double>& et, double sigma, double tiny)
      : n(static_cast<int>(dt.size())), low(n, 0.0), d0(n), d1(n, 0.0), d2(n, 0.0), swapped(n, 0) {
    for (int i = 0; i < n; ++i) d0[i] = dt[i] - sigma;
    for (int i = 0; i + 1 < n; ++i) d1[i] = et[i + 1];
    for (int i = 0; i + 1 < n; ++i) {
      double sub = et[i + 1];
      if (std::abs(d0[i]) >= std::abs(sub)) {
        if (d0[i] == 0.0) d0[i] = tiny;
        double mlt = sub / d0[i];
        low[i] = mlt;
        d0[i + 1] -= mlt * d1[i];
        // d2[i] stays 0, d1[i+1] already holds the superdiagonal
      } else {
        double mlt = d0[i] / sub;
        low[i] = mlt;
        swapped[i] = 1;
        double old_d1 = d1[i];
        d0[i] = sub;
        d1[i] = d0[i + 1];
        d2[i] = i + 2 < n ? et[i + 2] : 0.0;
        d0[i + 1] = old_d1 - mlt * d1[i];
        d1[i + 1] = -mlt * d2[i];
      }
    }
    if (d0[n - 1] == 0.0) d0[n - 1] = tiny;
  }

  void solve(std::vector<double>& y) const {
    for (int i = 0; i + 1 < n; ++i) {
      if (swapped[i]) std::swap(y[i], y[i + 1]);
      y[i + 1] -= low[i] * y[i];
    }
    y[n - 1] /= d0[n - 1];
    if (n >= 2) y[n - 2] = (y[n - 2] - d1[n - 2] * y[n - 1]) / d0[n - 2];
    for (int i = n - 3; i >= 0; --i) y[i] = (y[i] - d1[i] * y[i + 1] - d2[i] * y[i + 2]) / d0[i];
  }
};

double tri_norm(const std::vector<double>& d, const std::vector<double>& e) {
  int n = static_cast<int>(d.size());
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = std::abs(d[i]);
    if (i > 0) s += std::abs(e[i]);
    if (i + 1 < n) s += std::abs(e[i + 1]);
    t = std::max(t, s);
  }
  return t;
}

// Deterministic start vector for inverse iteration (splitmix-style).
void fill_start(std::vector<double>& x, int k, int attempt) {
  std::uint64_t s = 0x9E3779B97F4A7C15ull ^ (static_cast<std::uint64_t>(k + 1) * 0x100000001B3ull) ^
                    (static_cast<std::uint64_t>(attempt) << 32);
  for (auto& xi : x) {
    s += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z = z ^ (z >> 31);
    xi = static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
  }
}

double nrm2(const std::vector<double>& x) { return std::sqrt(dot(x.data(), x.data(), static_cast<int>(x.size()))); }

// Inverse iteration for the `count` smallest eigenvalues of (dt, et), with
// re-orthogonalization across near-degenerate groups (dstein-style). Vectors
// are returned as the first `count` rows of VT, Euclidean-orthonormal.
void inverse_iteration(const std::vector<double>& dt, const std::vector<double>& et,
                       const std::vector<double>& lam, int count, Matrix& VT) {
  int n = static_cast<int>(dt.size());
  double tnorm = tri_norm(dt, et);
  double ortol = 1e-3 * std::max(tnorm, 1e-300);
  double sep = 10.0 * DBL_EPSILON * std::max(tnorm, 1.0);
  double tiny = DBL_EPSILON * std::max(tnorm, 1.0) * 1e-2 + DBL_MIN;

  std::vector<double> x(n), y(n);
  int group_start = 0;
  double prev_sigma = 0.0;
  for (int k = 0; k < count; ++k) {
    if (k > 0 && lam[k] - lam[k - 1] > ortol) group_start = k;
    double sigma = lam[k];
    if (k > group_start && sigma - prev_sigma < sep) sigma = prev_sigma + sep;
    prev_sigma = sigma;

    bool done = false;
    for (int attempt = 0; attempt < 3 && !done; ++attempt) {
      fill_start(x, k, attempt);
      double nx = nrm2(x);
      for (auto& xi : x) xi /= nx;
      TriShiftSolver lu(dt, et, sigma, tiny);
      for (int it = 0; it < 5; ++it) {
        y = x;
        lu.solve(y);
        // orthogonalize within the group before normalizing
        for (int g = group_start; g < k; ++g) {
          double c = dot(y.data(), VT.row(g), n);
          kernels::axpy(n, -c, VT.row(g), y.data());
        }
        double ny = nrm2(y);
        if (!(ny > 0.0) || !std::isfinite(ny)) break;
        for (auto& yi : y) yi /= ny;
        x = y;
        if (it == 4) done = true;
      }
    }
    if (!done) throw std::runtime_error("eigendecompose: inverse iteration failed to converge");
    double* row = VT.row(k);
    for (int i = 0; i < n; ++i) row[i] = x[i];
  }
}

}  // namespace

Field SpectralDecomposition::mode(int k) const {
  if (k < 0 || k >= count()) throw std::invalid_argument("mode: index out of range (k)");
  return Field(dom, std::vector<double>(phi(k), phi(k) + n()));
}

SpectralDecomposition eigendecompose(const OperatorHandle& op, int count) {
  if (!op) throw std::invalid_argument("eigendecompose: null operator handle");
  int n = op->n();
  if (count < 1 || count > n)
    throw std::invalid_argument("eigendecompose: mode count must lie in [1, active nodes] (modes)");

  const auto& w = op->w();
  std::vector<double> sw(n);
  for (int i = 0; i < n; ++i) {
    if (!(w[i] > 0.0)) throw std::domain_error("eigendecompose: quadrature weights must be positive");
    sw[i] = std::sqrt(w[i]);
  }

  // Symmetrize: B = W^{1/2} A W^{-1/2}; verify the operator really is
  // self-adjoint in the weighted inner product before averaging round-off.
  Matrix B(n, n);
  double maxabs = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      B(i, j) = sw[i] * op->A(i, j) / sw[j];
      maxabs = std::max(maxabs, std::abs(B(i, j)));
    }
  double asym = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) asym = std::max(asym, std::abs(B(i, j) - B(j, i)));
  if (asym > 1e-10 * std::max(maxabs, 1e-300))
    throw std::domain_error("eigendecompose: operator is not self-adjoint in the weighted inner product");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      double v = 0.5 * (B(i, j) + B(j, i));
      B(i, j) = B(j, i) = v;
    }

  bool tridiag = true;
  for (int i = 0; i < n && tridiag; ++i)
    for (int j = 0; j < i - 1; ++j)
      if (B(i, j) != 0.0) {
        tridiag = false;
        break;
      }

  std::vector<double> d, e, invh;
  if (tridiag) {
    d.resize(n);
    e.assign(n, 0.0);
    invh.assign(n, 0.0);
    for (int i = 0; i < n; ++i) d[i] = B(i, i);
    for (int i = 1; i < n; ++i) e[i] = B(i, i - 1);
  } else {
    tridiagonalize(B, d, e, invh);
  }

  SpectralDecomposition dec;
  dec.dom = op->dom;
  dec.op = op;
  dec.op_norm = op->norm_inf;

  Matrix VT;           // rows: eigenvectors in the symmetrized coordinates
  std::vector<double> lam;

  if (count == n) {
    // Full spectrum: accumulate the orthogonal transform through QL.
    VT = Matrix(n, n);
    for (int i = 0; i < n; ++i) VT(i, i) = 1.0;
    for (int i = 1; i < n; ++i)
      if (invh[i] != 0.0) apply_reflector_rows(VT, n, B.row(i), i, invh[i]);
    std::vector<double> dd = d, ee(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) ee[i] = e[i + 1];
    ql_implicit(dd, ee, &VT);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dd[a] < dd[b]; });
    Matrix sorted(n, n);
    lam.resize(n);
    for (int k = 0; k < n; ++k) {
      lam[k] = dd[order[k]];
      const double* src = VT.row(order[k]);
      std::copy(src, src + n, sorted.row(k));
    }
    VT = std::move(sorted);
  } else {
    // Partial spectrum: eigenvalues from QL without vectors, then inverse
    // iteration on the tridiagonal and a reflector back-transform.
    std::vector<double> dd = d, ee(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) ee[i] = e[i + 1];
    ql_implicit(dd, ee, nullptr);
    std::sort(dd.begin(), dd.end());
    lam.assign(dd.begin(), dd.begin() + count);
    VT = Matrix(count, n);
    inverse_iteration(d, e, lam, count, VT);
    for (int i = 1; i < n; ++i)
      if (invh[i] != 0.0) apply_reflector_rows(VT, count, B.row(i), i, invh[i]);
  }

  // Back to the weighted metric: phi = z / sqrt(w), which keeps phi'Wphi = I.
  int cnt = static_cast<int>(lam.size());
  dec.phi_t = Matrix(cnt, n);
  for (int k = 0; k < cnt; ++k) {
    const double* z = VT.row(k);
    double* phi = dec.phi_t.row(k);
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
      phi[i] = z[i] / sw[i];
      ss += w[i] * phi[i] * phi[i];
    }
    double inv = 1.0 / std::sqrt(ss);
    for (int i = 0; i < n; ++i) phi[i] *= inv;
    // deterministic sign: largest-magnitude entry positive, first index wins
    double mx = 0.0;
    for (int i = 0; i < n; ++i) mx = std::max(mx, std::abs(phi[i]));
    for (int i = 0; i < n; ++i)
      if (std::abs(phi[i]) >= (1.0 - 1e-12) * mx) {
        if (phi[i] < 0.0)
          for (int j = 0; j < n; ++j) phi[j] = -phi[j];
        break;
      }
  }

  // Clamp negative round-off, form radicals, check residuals.
  dec.lambda.resize(cnt);
  dec.radical.resize(cnt);
  dec.residual.resize(cnt);
  double clamp_floor = -1e-10 * std::max(op->norm_inf, 1e-300);
  double zero_tol = 1e-12 * std::max(op->norm_inf, 1e-300);
  std::vector<double> tmp(n);
  for (int k = 0; k < cnt; ++k) {
    double l = lam[k];
    if (l < 0.0) {
      if (l < clamp_floor)
        throw std::domain_error("eigendecompose: negative eigenvalue beyond round-off; operator is not PSD");
      l = 0.0;
    } else if (l <= zero_tol) {
      // Kernel modes (constant on circles and Neumann domains) come back as
      // round-off noise; flush them so the radical is exactly zero too.
      l = 0.0;
    }
    dec.lambda[k] = l;
    dec.radical[k] = std::sqrt(l);
    const double* phi = dec.phi_t.row(k);
    matvec(op->A, n, phi, tmp.data());
    double rs = 0.0, ps = 0.0;
    for (int i = 0; i < n; ++i) {
      double ri = tmp[i] - l * phi[i];
      rs += ri * ri;
      ps += phi[i] * phi[i];
    }
    dec.residual[k] = std::sqrt(rs) / (std::max(op->norm_inf, 1e-300) * std::sqrt(ps));
  }

  // Multiplicity groups among the computed modes.
  for (int k = 0; k < cnt; ++k) {
    if (k == 0 || dec.lambda[k] - dec.lambda[k - 1] > 1e-6 * std::max(dec.lambda[k], 1.0))
      dec.clusters.push_back({k});
    else
      dec.clusters.back().push_back(k);
  }
  return dec;
}

std::vector<double> expand(const SpectralDecomposition& dec, const Field& f) {
  if (f.dom.get() != dec.dom.get()) throw std::invalid_argument("expand: field/decomposition domain mismatch");
  int n = dec.n(), cnt = dec.count();
  const auto& w = dec.dom->w;
  std::vector<double> wf(n);
  for (int i = 0; i < n; ++i) wf[i] = w[i] * f.v[i];
  std::vector<double> alpha(cnt);
  for (int k = 0; k < cnt; ++k) alpha[k] = dot(dec.phi(k), wf.data(), n);
  return alpha;
}

namespace detail {

std::vector<double> symmetric_eigenvalues(Matrix b) {
  if (b.rows != b.cols || b.rows < 1)
    throw std::invalid_argument("symmetric_eigenvalues: matrix must be square and nonempty");
  int n = b.rows;
  std::vector<double> d, e, invh;
  tridiagonalize(b, d, e, invh);
  std::vector<double> ee(n, 0.0);
  for (int i = 0; i + 1 < n; ++i) ee[i] = e[i + 1];
  ql_implicit(d, ee, nullptr);
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace detail

Field synthesize(const SpectralDecomposition& dec, const std::vector<double>& alpha) {
  if (static_cast<int>(alpha.size()) > dec.count())
    throw std::invalid_argument("synthesize: more coefficients than computed modes (alpha)");
  int n = dec.n();
  std::vector<double> out(n, 0.0);
  for (int k = 0; k < static_cast<int>(alpha.size()); ++k)
    kernels::axpy(n, alpha[k], dec.phi(k), out.data());
  return Field(dec.dom, std::move(out));
}

}  // namespace rootlap
