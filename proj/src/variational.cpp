#include "rootlap/variational.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rootlap {

namespace {

const char* bc_name(Bc b) {
  switch (b) {
    case Bc::dirichlet: return "dirichlet";
    case Bc::neumann: return "neumann";
    case Bc::periodic: return "periodic";
  }
  return "dirichlet";
}

// Sub-domain on the parent's active index range [lo, hi] along `axis`. The
// cut node sits just outside the range for a dirichlet side (it becomes the
// piece's excluded boundary vertex) and at the range end for a neumann side
// (it stays active with a half-cell weight). Either way the piece length is
// a whole number of parent cells, so the spacing is preserved.
DomainHandle build_piece(const Domain& parent, int axis, int lo, int hi, Bc cut_side) {
  const AxisLayout& al = axis == 0 ? parent.ax : parent.ay;
  int np = hi - lo + 1;
  if (np < 1) throw std::invalid_argument("make_partition: a piece has no active nodes (cuts)");

  Bc bl = lo == 0 ? al.left : cut_side;
  Bc br = hi == al.n - 1 ? al.right : cut_side;
  int a_ci = lo == 0 ? 0 : al.closed_offset + lo - (cut_side == Bc::dirichlet ? 1 : 0);
  int b_ci = hi == al.n - 1 ? al.closed_n - 1 : al.closed_offset + hi + (cut_side == Bc::dirichlet ? 1 : 0);
  int gaps = b_ci - a_ci;
  double len = al.h * gaps;

  DomainSpec ps;
  if (parent.dim == 1) {
    ps.kind = "interval";
    ps.lengths = {len};
    ps.grid = {np};
    ps.bc = {bc_name(bl), bc_name(br)};
    if (parent.metric) {
      const MetricWeight& mw = *parent.metric;
      ps.metric = "sampled";
      ps.metric_g.assign(mw.g.begin() + a_ci, mw.g.begin() + b_ci + 1);
      if (!mw.dg.empty()) ps.metric_dg.assign(mw.dg.begin() + a_ci, mw.dg.begin() + b_ci + 1);
    }
  } else {
    ps.kind = "rectangle";
    if (axis == 0) {
      ps.lengths = {len, parent.ay.length};
      ps.grid = {np, parent.ay.n};
      ps.bc = {bc_name(bl), bc_name(br), bc_name(parent.ay.left), bc_name(parent.ay.right)};
    } else {
      ps.lengths = {parent.ax.length, len};
      ps.grid = {parent.ax.n, np};
      ps.bc = {bc_name(parent.ax.left), bc_name(parent.ax.right), bc_name(bl), bc_name(br)};
    }
  }
  return build_domain(ps);
}

std::vector<double> lowest_modes(const DomainHandle& piece, int kmax) {
  OperatorHandle op = assemble_laplacian(piece);
  return eigendecompose(op, std::min(kmax, op->n())).lambda;
}

BracketReport bracket(const Partition& part, int kmax, const char* who) {
  if (kmax < 1) throw std::invalid_argument(std::string(who) + ": kmax must be positive (kmax)");
  OperatorHandle pop = assemble_laplacian(part.dom);
  if (kmax > pop->n()) throw std::invalid_argument(std::string(who) + ": kmax exceeds the parent mode count (kmax)");

  BracketReport rep;
  rep.lambda = eigendecompose(pop, kmax).lambda;

  std::vector<double> merged;
  for (const auto& piece : part.pieces) {
    std::vector<double> lam = lowest_modes(piece, kmax);
    merged.insert(merged.end(), lam.begin(), lam.end());
  }
  if (static_cast<int>(merged.size()) < kmax)
    throw std::invalid_argument(std::string(who) + ": pieces too small to yield kmax modes (kmax)");
  std::sort(merged.begin(), merged.end());
  merged.resize(kmax);
  rep.bound = std::move(merged);

  bool dir = part.kind == CutKind::dirichlet_cut;
  rep.holds.resize(kmax);
  for (int k = 0; k < kmax; ++k) {
    double tol = 1e-10 * std::max({1.0, std::abs(rep.lambda[k]), std::abs(rep.bound[k])});
    rep.holds[k] = dir ? rep.lambda[k] <= rep.bound[k] + tol : rep.bound[k] <= rep.lambda[k] + tol;
  }
  return rep;
}

}  // namespace

Partition make_partition(const DomainHandle& dom, const std::vector<double>& cuts, int axis, CutKind kind) {
  if (!dom) throw std::invalid_argument("make_partition: null domain handle");
  if (dom->kind != DomainKind::interval && dom->kind != DomainKind::rectangle)
    throw std::invalid_argument("make_partition: only intervals and rectangles can be partitioned (domain)");
  if (axis < 0 || axis >= dom->dim) throw std::invalid_argument("make_partition: axis out of range (axis)");

  const AxisLayout& al = axis == 0 ? dom->ax : dom->ay;
  std::vector<int> ci;
  for (double c : cuts) {
    long i = std::lround((c - al.x0) / al.h);
    if (i < 0 || i >= al.n || std::abs(al.coord(static_cast<int>(i)) - c) > 1e-6 * al.h)
      throw std::invalid_argument("make_partition: cut must align with an interior grid node (cuts)");
    ci.push_back(static_cast<int>(i));
  }
  std::sort(ci.begin(), ci.end());
  if (std::adjacent_find(ci.begin(), ci.end()) != ci.end())
    throw std::invalid_argument("make_partition: duplicate cut positions (cuts)");

  Partition part;
  part.dom = dom;
  part.axis = axis;
  part.kind = kind;
  for (int i : ci) part.cuts.push_back(al.coord(i));

  Bc side = kind == CutKind::dirichlet_cut ? Bc::dirichlet : Bc::neumann;
  int lo = 0;
  for (std::size_t s = 0; s <= ci.size(); ++s) {
    int hi = s < ci.size() ? (kind == CutKind::dirichlet_cut ? ci[s] - 1 : ci[s]) : al.n - 1;
    part.pieces.push_back(build_piece(*dom, axis, lo, hi, side));
    if (s < ci.size()) lo = kind == CutKind::dirichlet_cut ? ci[s] + 1 : ci[s];
  }
  return part;
}

double rayleigh_quotient(const Field& f, const DiscreteOperator& op) {
  if (f.dom.get() != op.dom.get())
    throw std::invalid_argument("rayleigh_quotient: field/operator domain mismatch");
  double den = inner_product(f, f);
  if (den <= 0.0) throw std::invalid_argument("rayleigh_quotient: field is zero (f)");
  return dirichlet_energy(op, f, f) / den;
}

double minmax_estimate(const SpectralDecomposition& dec, const std::vector<Field>& constraints) {
  const DiscreteOperator& op = *dec.op;
  int n = op.n();
  const auto& w = op.w();
  std::vector<double> sw(n);
  for (int i = 0; i < n; ++i) sw[i] = std::sqrt(w[i]);

  Matrix b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = sw[i] * op.A(i, j) / sw[j];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      double v = 0.5 * (b(i, j) + b(j, i));
      b(i, j) = b(j, i) = v;
    }

  // Orthonormalize the constraint directions in the symmetrized coordinates
  // (two Gram-Schmidt passes); dependent or zero constraints drop out, which
  // only weakens the constraint set and keeps the min-max bound valid.
  auto project_out = [n](std::vector<double>& z, const std::vector<std::vector<double>>& basis) {
    for (const auto& q : basis) {
      double c = kernels::dot(z.data(), q.data(), n);
      kernels::axpy(n, -c, q.data(), z.data());
    }
  };
  auto nrm = [n](const std::vector<double>& z) { return std::sqrt(kernels::dot(z.data(), z.data(), n)); };

  std::vector<std::vector<double>> q;
  for (const Field& c : constraints) {
    if (c.dom.get() != dec.dom.get())
      throw std::invalid_argument("minmax_estimate: constraint domain mismatch (constraints)");
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) z[i] = sw[i] * c.v[i];
    double n0 = nrm(z);
    project_out(z, q);
    project_out(z, q);
    double n1 = nrm(z);
    if (n0 == 0.0 || n1 <= 1e-10 * n0) continue;
    for (auto& zi : z) zi /= n1;
    q.push_back(std::move(z));
  }
  int r = static_cast<int>(q.size());
  if (r >= n) throw std::invalid_argument("minmax_estimate: constraints span the whole space (constraints)");

  // Complement basis by Gram-Schmidt extension of coordinate directions.
  std::vector<std::vector<double>> p;
  for (int i = 0; i < n && static_cast<int>(p.size()) < n - r; ++i) {
    std::vector<double> z(n, 0.0);
    z[i] = 1.0;
    project_out(z, q);
    project_out(z, p);
    project_out(z, q);
    project_out(z, p);
    double nz = nrm(z);
    if (nz <= 1e-6) continue;
    for (auto& zi : z) zi /= nz;
    p.push_back(std::move(z));
  }
  int m = static_cast<int>(p.size());
  if (m != n - r) throw std::runtime_error("minmax_estimate: failed to build a complement basis");

  Matrix c(m, m);
  std::vector<double> t(n);
  for (int j = 0; j < m; ++j) {
    kernels::matvec(b, n, p[j].data(), t.data());
    for (int i = 0; i <= j; ++i) {
      double v = kernels::dot(p[i].data(), t.data(), n);
      c(i, j) = c(j, i) = v;
    }
  }
  return detail::symmetric_eigenvalues(std::move(c)).front();
}

BracketReport dirichlet_bracket(const Partition& part, int kmax) {
  if (part.kind != CutKind::dirichlet_cut)
    throw std::invalid_argument("dirichlet_bracket: partition does not carry dirichlet cuts (part)");
  return bracket(part, kmax, "dirichlet_bracket");
}

BracketReport neumann_bracket(const Partition& part, int kmax) {
  if (part.kind != CutKind::neumann_cut)
    throw std::invalid_argument("neumann_bracket: partition does not carry neumann cuts (part)");
  return bracket(part, kmax, "neumann_bracket");
}

double fundamental_tone(const DomainHandle& sub) {
  if (!sub) throw std::invalid_argument("fundamental_tone: null domain handle");
  const Domain& d = *sub;
  bool all_dirichlet = false;
  switch (d.kind) {
    case DomainKind::interval:
      all_dirichlet = d.ax.left == Bc::dirichlet && d.ax.right == Bc::dirichlet;
      break;
    case DomainKind::rectangle:
      all_dirichlet = d.ax.left == Bc::dirichlet && d.ax.right == Bc::dirichlet &&
                      d.ay.left == Bc::dirichlet && d.ay.right == Bc::dirichlet;
      break;
    case DomainKind::masked_grid:
      all_dirichlet = true;  // mask boundaries are Dirichlet by construction
      break;
    case DomainKind::circle:
      all_dirichlet = false;
      break;
  }
  if (!all_dirichlet)
    throw std::invalid_argument("fundamental_tone: domain must have an all-Dirichlet boundary (sub)");
  bool big_enough = d.kind == DomainKind::masked_grid
                        ? d.n_active >= 3
                        : d.ax.n >= 3 && (d.dim == 1 || d.ay.n >= 3);
  if (!big_enough)
    throw std::invalid_argument("fundamental_tone: domain too small, need at least 3 nodes per axis (sub)");
  return eigendecompose(assemble_laplacian(sub), 1).lambda[0];
}

double fundamental_tone_union(const std::vector<DomainHandle>& pieces) {
  if (pieces.empty()) throw std::invalid_argument("fundamental_tone_union: empty piece list (pieces)");
  double tone = fundamental_tone(pieces[0]);
  for (std::size_t i = 1; i < pieces.size(); ++i) tone = std::min(tone, fundamental_tone(pieces[i]));
  return tone;
}

}  // namespace rootlap
