#pragma once

#include <string>
#include <vector>

#include "rootlap/eigensolve.hpp"

namespace rootlap {

/// Sign-uniform connected components of a field (1D adjacency, 2D
/// 4-adjacency). Nodes with |f_i| <= zero_tol * max|f| carry label -1 and
/// belong to no component; labels are numbered in order of first appearance
/// by active index, so the partition is deterministic.
struct NodalPartition {
  Field field;
  std::vector<int> labels;
  int count = 0;
  std::vector<int> signs;  // per component, +1 or -1
};

NodalPartition nodal_domains(const Field& f, double zero_tol);

struct CourantRow {
  int k = 0;      // 1-based mode index
  int count = 0;  // nodal domain count n_k
  bool ok = false;  // n_k <= k
};

/// Nodal-domain counts of the first kmax modes against the bound n_k <= k.
std::vector<CourantRow> courant_check(const SpectralDecomposition& dec, int kmax);

struct NodalToneReport {
  double tone = 0.0;
  double lambda_k = 0.0;
  double rel_err = 0.0;
};

/// Restricts mode k (1-based) to its largest nodal domain, imposes Dirichlet
/// data on that domain's full boundary, and compares the resulting
/// fundamental tone against lambda_k.
NodalToneReport nodal_tone_check(const SpectralDecomposition& dec, int k);

struct PleijelReport {
  std::vector<double> ratios;  // n_k / k over the window
  double max_ratio = 0.0;
  bool hypothesis_ok = false;  // true only in 2D; the 1D isoperimetric
                               // hypothesis fails with equality
  std::string note;
};

/// Ratio table n_k/k over the 1-based inclusive window [k_lo, k_hi].
PleijelReport pleijel_ratio(const SpectralDecomposition& dec, int k_lo, int k_hi);

}  // namespace rootlap
