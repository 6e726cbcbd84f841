#include "rootlap/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rootlap/variational.hpp"

namespace rootlap {

namespace {

int uf_find(std::vector<int>& uf, int a) {
  while (uf[a] != a) {
    uf[a] = uf[uf[a]];
    a = uf[a];
  }
  return a;
}

void uf_union(std::vector<int>& uf, int a, int b) {
  a = uf_find(uf, a);
  b = uf_find(uf, b);
  if (a != b) uf[std::max(a, b)] = std::min(a, b);
}

int sign_of(double v) { return v > 0.0 ? 1 : -1; }

// 1-based position of the largest component (ties to the smallest label).
int largest_component(const NodalPartition& part) {
  std::vector<int> size(part.count, 0);
  for (int l : part.labels)
    if (l >= 0) ++size[l];
  return static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());
}

}  // namespace

NodalPartition nodal_domains(const Field& f, double zero_tol) {
  if (!f.dom) throw std::invalid_argument("nodal_domains: field has no domain (f)");
  if (zero_tol < 0.0) throw std::invalid_argument("nodal_domains: zero tolerance must be nonnegative (zero_tol)");
  const Domain& d = *f.dom;
  int n = d.n_active;
  double mx = 0.0;
  for (double v : f.v) mx = std::max(mx, std::abs(v));
  if (mx == 0.0) throw std::invalid_argument("nodal_domains: field is identically zero (f)");
  double thr = zero_tol * mx;

  std::vector<char> zero(n);
  for (int i = 0; i < n; ++i) zero[i] = std::abs(f.v[i]) <= thr;

  std::vector<int> uf(n);
  for (int i = 0; i < n; ++i) uf[i] = i;
  auto link = [&](int a, int b) {
    if (a < 0 || b < 0 || zero[a] || zero[b]) return;
    if (sign_of(f.v[a]) == sign_of(f.v[b])) uf_union(uf, a, b);
  };
  if (d.dim == 1) {
    for (int i = 0; i + 1 < n; ++i) link(i, i + 1);
    if (d.ax.periodic && n > 2) link(n - 1, 0);
  } else {
    for (int a = 0; a < n; ++a) {
      int ix = d.ix_of(a), jy = d.jy_of(a);
      if (ix + 1 < d.ax.n) link(a, d.active_at(ix + 1, jy));
      if (jy + 1 < d.ay.n) link(a, d.active_at(ix, jy + 1));
    }
  }

  NodalPartition part;
  part.field = f;
  part.labels.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (zero[i]) continue;
    int r = uf_find(uf, i);
    if (part.labels[r] < 0) {
      part.labels[r] = part.count++;
      part.signs.push_back(sign_of(f.v[r]));
    }
    part.labels[i] = part.labels[r];
  }
  return part;
}

std::vector<CourantRow> courant_check(const SpectralDecomposition& dec, int kmax) {
  if (kmax < 1 || kmax > dec.count())
    throw std::invalid_argument("courant_check: kmax must lie within the computed modes (kmax)");
  std::vector<CourantRow> rows(kmax);
  for (int k = 1; k <= kmax; ++k) {
    NodalPartition part = nodal_domains(dec.mode(k - 1), 1e-8);
    rows[k - 1] = {k, part.count, part.count <= k};
  }
  return rows;
}

NodalToneReport nodal_tone_check(const SpectralDecomposition& dec, int k) {
  if (k < 1 || k > dec.count())
    throw std::invalid_argument("nodal_tone_check: k must lie within the computed modes (k)");
  const Domain& d = *dec.dom;
  NodalPartition part = nodal_domains(dec.mode(k - 1), 1e-8);
  int pick = largest_component(part);

  DomainHandle sub;
  if (d.dim == 1) {
    std::vector<int> nodes;
    for (int i = 0; i < d.n_active; ++i)
      if (part.labels[i] == pick) nodes.push_back(i);
    // On a circle the run may wrap; rotate so it becomes contiguous.
    int run_lo = nodes.front(), run_len = static_cast<int>(nodes.size());
    if (d.ax.periodic && run_len < d.n_active) {
      std::vector<char> in(d.n_active, 0);
      for (int i : nodes) in[i] = 1;
      int start = -1;
      for (int i = 0; i < d.n_active; ++i)
        if (in[i] && !in[(i + d.n_active - 1) % d.n_active]) start = i;
      if (start < 0) throw std::invalid_argument("nodal_tone_check: nodal domain is not an arc (k)");
      run_lo = start;
    } else {
      for (std::size_t s = 1; s < nodes.size(); ++s)
        if (nodes[s] != nodes[s - 1] + 1)
          throw std::invalid_argument("nodal_tone_check: nodal domain is not contiguous (k)");
    }
    if (run_len < 3)
      throw std::invalid_argument("nodal_tone_check: largest nodal domain is unresolvable on this grid (k)");
    DomainSpec ps;
    ps.kind = "interval";
    ps.lengths = {d.ax.h * (run_len + 1)};
    ps.grid = {run_len};
    ps.bc = {"dirichlet", "dirichlet"};
    if (d.metric) {
      int a_ci = d.ax.closed_offset + run_lo - 1;
      int b_ci = a_ci + run_len + 1;
      if (d.ax.periodic || a_ci < 0 || b_ci >= d.ax.closed_n)
        throw std::invalid_argument(
            "nodal_tone_check: metric nodal domain reaches the boundary; Dirichlet realization undefined (k)");
      const MetricWeight& mw = *d.metric;
      ps.metric = "sampled";
      ps.metric_g.assign(mw.g.begin() + a_ci, mw.g.begin() + b_ci + 1);
      if (!mw.dg.empty()) ps.metric_dg.assign(mw.dg.begin() + a_ci, mw.dg.begin() + b_ci + 1);
    }
    sub = build_domain(ps);
  } else {
    if (d.kind == DomainKind::rectangle &&
        !(d.ax.left == Bc::dirichlet && d.ax.right == Bc::dirichlet && d.ay.left == Bc::dirichlet &&
          d.ay.right == Bc::dirichlet))
      throw std::invalid_argument(
          "nodal_tone_check: 2D tone check needs an all-Dirichlet parent so the masked grid matches (k)");
    DomainSpec ps;
    ps.kind = "masked-grid";
    ps.lengths = {d.ax.length, d.ay.length};
    ps.grid = {d.ax.n, d.ay.n};
    ps.mask.assign(d.ay.n, std::vector<int>(d.ax.n, 0));
    int kept = 0;
    for (int a = 0; a < d.n_active; ++a)
      if (part.labels[a] == pick) {
        ps.mask[d.jy_of(a)][d.ix_of(a)] = 1;
        ++kept;
      }
    if (kept < 3)
      throw std::invalid_argument("nodal_tone_check: largest nodal domain is unresolvable on this grid (k)");
    sub = build_domain(ps);
  }

  NodalToneReport rep;
  rep.tone = fundamental_tone(sub);
  rep.lambda_k = dec.lambda[k - 1];
  rep.rel_err = std::abs(rep.tone - rep.lambda_k) / std::max(std::abs(rep.lambda_k), 1e-300);
  return rep;
}

PleijelReport pleijel_ratio(const SpectralDecomposition& dec, int k_lo, int k_hi) {
  if (k_lo < 1 || k_hi > dec.count() || k_lo > k_hi)
    throw std::invalid_argument("pleijel_ratio: window out of range (k_lo, k_hi)");
  PleijelReport rep;
  for (int k = k_lo; k <= k_hi; ++k) {
    NodalPartition part = nodal_domains(dec.mode(k - 1), 1e-8);
    rep.ratios.push_back(static_cast<double>(part.count) / k);
  }
  rep.max_ratio = *std::max_element(rep.ratios.begin(), rep.ratios.end());
  rep.hypothesis_ok = dec.dom->dim == 2;
  if (!rep.hypothesis_ok)
    rep.note = "1D domain: the isoperimetric hypothesis holds only with equality; ratios reported without assertion";
  return rep;
}

}  // namespace rootlap
