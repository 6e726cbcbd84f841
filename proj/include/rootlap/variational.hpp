#pragma once

#include <vector>

#include "rootlap/discretize.hpp"
#include "rootlap/eigensolve.hpp"

namespace rootlap {

/// Interface condition imposed on the cut set of a partition.
enum class CutKind { dirichlet_cut, neumann_cut };

/// Axis-aligned, node-conforming partition of an interval or rectangle.
/// Pieces reuse the parent grid spacing exactly, so the bracketing
/// inequalities below hold to round-off, not merely to O(h^2): a
/// dirichlet-cut removes the cut nodes (pieces are principal submatrices of
/// the parent operator) and a neumann-cut duplicates them with half weights
/// (the parent space embeds isometrically in the union).
struct Partition {
  DomainHandle dom;
  std::vector<double> cuts;  // interior cut coordinates along `axis`
  int axis = 0;              // 0: cuts at x = c, 1: cuts at y = c (2D only)
  CutKind kind = CutKind::dirichlet_cut;
  std::vector<DomainHandle> pieces;
};

Partition make_partition(const DomainHandle& dom, const std::vector<double>& cuts, int axis, CutKind kind);

/// D[f,f] / (f,f); never below the first eigenvalue of the operator.
double rayleigh_quotient(const Field& f, const DiscreteOperator& op);

/// Exact max-min value: the smallest Rayleigh quotient over fields
/// W-orthogonal to all constraints, found by eigendecomposing the operator
/// projected onto the orthogonal complement. Never exceeds lambda_{k} for
/// k-1 constraints.
double minmax_estimate(const SpectralDecomposition& dec, const std::vector<Field>& constraints);

/// Parent eigenvalues lambda_k next to the merged piece spectra (nu_k for
/// dirichlet cuts, mu_k for neumann cuts) and per-index flags for the
/// bracketing inequality lambda_k <= nu_k resp. mu_k <= lambda_k.
struct BracketReport {
  std::vector<double> lambda;
  std::vector<double> bound;
  std::vector<bool> holds;
};

BracketReport dirichlet_bracket(const Partition& part, int kmax);
BracketReport neumann_bracket(const Partition& part, int kmax);

/// First eigenvalue of the all-Dirichlet operator on `sub` (the discrete
/// realization of the infimum of the Rayleigh quotient over compactly
/// supported fields).
double fundamental_tone(const DomainHandle& sub);

/// Tone of a disjoint union: the minimum over the component tones.
double fundamental_tone_union(const std::vector<DomainHandle>& pieces);

}  // namespace rootlap
