#pragma once

#include "rootlap/discretize.hpp"

namespace rootlap {

/// First `count()` eigenpairs of a discrete operator, ascending, orthonormal
/// in the weighted inner product. radical holds sqrt(lambda); residual holds
/// ||A phi - lambda phi||_2 / (||A||_inf ||phi||_2) per mode; clusters groups
/// computed modes whose eigenvalues agree within 1e-6 * max(lambda, 1) — for
/// such groups only the spanned subspace is basis-independent.
struct SpectralDecomposition {
  DomainHandle dom;
  OperatorHandle op;
  std::vector<double> lambda;
  std::vector<double> radical;
  std::vector<double> residual;
  Matrix phi_t;  // count x n, row k = eigenvector phi_k on active nodes
  std::vector<std::vector<int>> clusters;
  double op_norm = 0.0;

  int count() const { return static_cast<int>(lambda.size()); }
  int n() const { return phi_t.cols; }
  const double* phi(int k) const { return phi_t.row(k); }
  /// Eigenvector k as a Field.
  Field mode(int k) const;
};

/// Solve the weighted eigenproblem A phi = lambda phi, phi' W phi = I, for
/// the `count` smallest eigenvalues. The operator is symmetrized by the
/// W^{1/2} similarity, Householder-tridiagonalized (skipped when the
/// symmetrized matrix is already tridiagonal), and the spectrum extracted by
/// implicit-shift QL; eigenvectors come from the QL rotations when the full
/// spectrum is wanted and from inverse iteration with cluster
/// re-orthogonalization otherwise. Deterministic for fixed input. Negative
/// round-off eigenvalues are clamped to zero after checking they are above
/// -1e-10 ||A||.
SpectralDecomposition eigendecompose(const OperatorHandle& op, int count);

/// Expansion coefficients alpha_k = (phi_k, f) in the weighted inner product.
std::vector<double> expand(const SpectralDecomposition& dec, const Field& f);

/// Modal sum f = sum alpha_k phi_k over the computed modes.
Field synthesize(const SpectralDecomposition& dec, const std::vector<double>& alpha);

namespace detail {
/// Eigenvalues (ascending) of a dense symmetric matrix; consumes its input.
/// Shared by the projected eigenproblems of the variational module.
std::vector<double> symmetric_eigenvalues(Matrix b);
}  // namespace detail

}  // namespace rootlap
