#pragma once

#include "rootlap/geometry.hpp"
#include "rootlap/kernels.hpp"

namespace rootlap {

struct SpectralDecomposition;

/// Second-order finite-difference realization of A = -div grad on the active
/// nodes of a domain, together with the quadrature weights that make it
/// self-adjoint: W A is symmetric and f' (W A) f = sum over lattice edges of
/// the squared difference quotient, so A is positive semidefinite in the
/// weighted inner product.
struct DiscreteOperator {
  DomainHandle dom;
  Matrix A;
  double norm_inf = 0.0;  // max absolute row sum, used to scale residual checks

  int n() const { return A.rows; }
  const std::vector<double>& w() const { return dom->w; }
};

using OperatorHandle = std::shared_ptr<const DiscreteOperator>;

/// Assemble the weighted FD Laplacian. Domains above the 4096-node dense cap
/// are rejected; every workflow in this toolkit stays at or under the cap.
OperatorHandle assemble_laplacian(const DomainHandle& dom);

/// (f, h) = sum w_i f_i h_i — the discrete Riemannian L2 pairing.
double inner_product(const Field& f, const Field& h);

/// D[f, h] = f' (W A) h, the discrete Dirichlet form (Grad f, Grad h).
double dirichlet_energy(const DiscreteOperator& op, const Field& f, const Field& h);

/// Residuals of the four integral identities the operator is supposed to
/// satisfy, each with the scale it should be compared against:
///   r1: |(h, Af) - D[h, f]|                  (first Green formula)
///   r2: |(h, sqrtA f) - (sqrtA h, f)|        (radical symmetry)
///   r3: |sum w . div(f grad h)|              (divergence theorem; meaningful
///       when f and h vanish near the boundary or the domain is closed)
///   r4: |(h, Af) - (f, Ah)|                  (operator symmetry)
struct GreenReport {
  double r1 = 0, r2 = 0, r3 = 0, r4 = 0;
  double scale1 = 0, scale2 = 0, scale3 = 0, scale4 = 0;
  bool ok(double tol) const {
    return r1 <= tol * scale1 && r2 <= tol * scale2 && r3 <= tol * scale3 && r4 <= tol * scale4;
  }
};

GreenReport check_green_identities(const Field& f, const Field& h, const SpectralDecomposition& dec);

}  // namespace rootlap
