#include "rootlap/geometry.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>

namespace rootlap {

namespace {

Bc parse_bc(const std::string& s) {
  if (s == "dirichlet") return Bc::dirichlet;
  if (s == "neumann") return Bc::neumann;
  if (s == "periodic") return Bc::periodic;
  throw std::invalid_argument("build_domain: unknown boundary condition '" + s + "' (bc)");
}

AxisLayout make_axis(double length, int n, Bc left, Bc right, bool periodic) {
  if (n < 1) throw std::invalid_argument("build_domain: nodes per axis must be positive (grid)");
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("build_domain: lengths must be positive and finite (lengths)");
  AxisLayout ax;
  ax.n = n;
  ax.length = length;
  ax.left = left;
  ax.right = right;
  ax.periodic = periodic;
  if (periodic) {
    ax.h = length / n;
    ax.x0 = 0.0;
    ax.closed_n = n;
    ax.closed_offset = 0;
  } else {
    int gaps = n - 1 + (left == Bc::dirichlet ? 1 : 0) + (right == Bc::dirichlet ? 1 : 0);
    if (gaps < 1) throw std::invalid_argument("build_domain: grid too small for the boundary layout (grid)");
    ax.h = length / gaps;
    ax.closed_offset = (left == Bc::dirichlet) ? 1 : 0;
    ax.x0 = ax.h * ax.closed_offset;
    ax.closed_n = gaps + 1;
  }
  return ax;
}

MetricWeight make_metric(const DomainSpec& spec, const AxisLayout& ax) {
  MetricWeight m;
  m.tag = spec.metric;
  int cn = ax.closed_n;
  m.g.resize(cn);
  if (spec.metric == "exp2x") {
    m.dg.resize(cn);
    for (int i = 0; i < cn; ++i) {
      double x = ax.closed_coord(i);
      m.g[i] = std::exp(2.0 * x);
      m.dg[i] = 2.0 * m.g[i];
    }
  } else if (spec.metric == "one_plus_x2") {
    m.dg.resize(cn);
    for (int i = 0; i < cn; ++i) {
      double x = ax.closed_coord(i);
      m.g[i] = 1.0 + x * x;
      m.dg[i] = 2.0 * x;
    }
  } else if (spec.metric == "sampled") {
    if (static_cast<int>(spec.metric_g.size()) != cn)
      throw std::invalid_argument("build_domain: sampled metric needs one value per closed-grid vertex (metric_g)");
    m.g = spec.metric_g;
    if (!spec.metric_dg.empty()) {
      if (static_cast<int>(spec.metric_dg.size()) != cn)
        throw std::invalid_argument("build_domain: metric derivative sample count mismatch (metric_dg)");
      m.dg = spec.metric_dg;
    }
  } else {
    throw std::invalid_argument("build_domain: unknown metric tag '" + spec.metric + "' (metric)");
  }
  m.sqrt_g.resize(cn);
  for (int i = 0; i < cn; ++i) {
    if (!(m.g[i] > 0.0) || !std::isfinite(m.g[i]))
      throw std::invalid_argument("build_domain: metric weight must be positive and finite (metric)");
    m.sqrt_g[i] = std::sqrt(m.g[i]);
  }
  return m;
}

double axis_weight(const AxisLayout& ax, int i) {
  if (ax.periodic) return ax.h;
  bool at_left = (i == 0 && ax.left == Bc::neumann);
  bool at_right = (i == ax.n - 1 && ax.right == Bc::neumann);
  return (at_left || at_right) ? 0.5 * ax.h : ax.h;
}

void check_mask_connected(const Domain& dom) {
  int nx = dom.ax.n, ny = dom.ay.n;
  std::vector<char> seen(dom.mask.size(), 0);
  int start = -1, total = 0;
  for (int l = 0; l < static_cast<int>(dom.mask.size()); ++l)
    if (dom.mask[l]) {
      ++total;
      if (start < 0) start = l;
    }
  if (total == 0) throw std::invalid_argument("build_domain: masked-grid active region is empty (mask)");
  std::queue<int> q;
  q.push(start);
  seen[start] = 1;
  int reached = 0;
  while (!q.empty()) {
    int l = q.front();
    q.pop();
    ++reached;
    int i = l % nx, j = l / nx;
    const int di[4] = {-1, 1, 0, 0}, dj[4] = {0, 0, -1, 1};
    for (int d = 0; d < 4; ++d) {
      int ii = i + di[d], jj = j + dj[d];
      if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) continue;
      int ll = jj * nx + ii;
      if (dom.mask[ll] && !seen[ll]) {
        seen[ll] = 1;
        q.push(ll);
      }
    }
  }
  if (reached != total)
    throw std::invalid_argument("build_domain: masked-grid active region must be 4-connected (mask)");
}

void require_same_domain(const DomainHandle& a, const DomainHandle& b, const char* op) {
  if (!a || !b || a.get() != b.get())
    throw std::invalid_argument(std::string(op) + ": fields live on different domains");
}

// Second-order first derivative along one maximal run of active nodes.
// idx holds the active indices of the run in lattice order.
void run_deriv(const std::vector<double>& f, std::vector<double>& out,
               const std::vector<int>& idx, double h, bool wrap) {
  int m = static_cast<int>(idx.size());
  if (wrap) {
    for (int r = 0; r < m; ++r) {
      int prev = idx[(r + m - 1) % m], next = idx[(r + 1) % m];
      out[idx[r]] = (f[next] - f[prev]) / (2.0 * h);
    }
    return;
  }
  if (m < 3)
    throw std::invalid_argument("gradient: stencils need at least 3 nodes per active run (grid)");
  out[idx[0]] = (-3.0 * f[idx[0]] + 4.0 * f[idx[1]] - f[idx[2]]) / (2.0 * h);
  for (int r = 1; r < m - 1; ++r) out[idx[r]] = (f[idx[r + 1]] - f[idx[r - 1]]) / (2.0 * h);
  out[idx[m - 1]] = (3.0 * f[idx[m - 1]] - 4.0 * f[idx[m - 2]] + f[idx[m - 3]]) / (2.0 * h);
}

// d/dx of active-node samples; handles full rows, circle wrap and mask runs.
std::vector<double> deriv_x(const Domain& dom, const std::vector<double>& f) {
  std::vector<double> out(dom.n_active, 0.0);
  bool wrap = dom.ax.periodic;
  for (int j = 0; j < (dom.dim == 2 ? dom.ay.n : 1); ++j) {
    std::vector<int> run;
    for (int i = 0; i < dom.ax.n; ++i) {
      int a = dom.active_at(i, j);
      if (a >= 0) {
        run.push_back(a);
      } else if (!run.empty()) {
        run_deriv(f, out, run, dom.ax.h, false);
        run.clear();
      }
    }
    if (!run.empty()) run_deriv(f, out, run, dom.ax.h, wrap && static_cast<int>(run.size()) == dom.ax.n);
  }
  return out;
}

std::vector<double> deriv_y(const Domain& dom, const std::vector<double>& f) {
  std::vector<double> out(dom.n_active, 0.0);
  for (int i = 0; i < dom.ax.n; ++i) {
    std::vector<int> run;
    for (int j = 0; j < dom.ay.n; ++j) {
      int a = dom.active_at(i, j);
      if (a >= 0) {
        run.push_back(a);
      } else if (!run.empty()) {
        run_deriv(f, out, run, dom.ay.h, false);
        run.clear();
      }
    }
    if (!run.empty()) run_deriv(f, out, run, dom.ay.h, false);
  }
  return out;
}

void check_vec(const VecField& p, const char* op) {
  if (!p.dom) throw std::invalid_argument(std::string(op) + ": vector field has no domain");
  if (static_cast<int>(p.vx.size()) != p.dom->n_active)
    throw std::invalid_argument(std::string(op) + ": x-component size mismatch");
  if (p.dom->dim == 2 && static_cast<int>(p.vy.size()) != p.dom->n_active)
    throw std::invalid_argument(std::string(op) + ": y-component size mismatch");
}

}  // namespace

double Domain::g_at(int a) const {
  if (!metric) return 1.0;
  return metric->g[ax.closed_offset + ix_of(a)];
}

double Domain::sqrtg_at(int a) const {
  if (!metric) return 1.0;
  return metric->sqrt_g[ax.closed_offset + ix_of(a)];
}

double Domain::dg_at(int a) const {
  if (!metric) return 0.0;
  int ci = ax.closed_offset + ix_of(a);
  if (!metric->dg.empty()) return metric->dg[ci];
  const auto& g = metric->g;
  int cn = ax.closed_n;
  double h = ax.h;
  if (ax.periodic) return (g[(ci + 1) % cn] - g[(ci + cn - 1) % cn]) / (2.0 * h);
  if (ci == 0) return (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h);
  if (ci == cn - 1) return (3.0 * g[cn - 1] - 4.0 * g[cn - 2] + g[cn - 3]) / (2.0 * h);
  return (g[ci + 1] - g[ci - 1]) / (2.0 * h);
}

Field::Field(DomainHandle d, std::vector<double> values) : dom(std::move(d)), v(std::move(values)) {
  if (!dom) throw std::invalid_argument("field: null domain handle");
  if (static_cast<int>(v.size()) != dom->n_active)
    throw std::invalid_argument("field: value count must equal the active node count");
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("field: values must be finite");
}

Field::Field(DomainHandle d) : dom(std::move(d)) {
  if (!dom) throw std::invalid_argument("field: null domain handle");
  v.assign(dom->n_active, 0.0);
}

VecField::VecField(DomainHandle d) : dom(std::move(d)) {
  if (!dom) throw std::invalid_argument("vector field: null domain handle");
  vx.assign(dom->n_active, 0.0);
  if (dom->dim == 2) vy.assign(dom->n_active, 0.0);
}

VecField::VecField(DomainHandle d, std::vector<double> x_comp, std::vector<double> y_comp)
    : dom(std::move(d)), vx(std::move(x_comp)), vy(std::move(y_comp)) {
  if (!dom) throw std::invalid_argument("vector field: null domain handle");
  if (static_cast<int>(vx.size()) != dom->n_active ||
      (dom->dim == 2 && static_cast<int>(vy.size()) != dom->n_active) ||
      (dom->dim == 1 && !vy.empty()))
    throw std::invalid_argument("vector field: component size must equal the active node count");
  for (double x : vx)
    if (!std::isfinite(x)) throw std::invalid_argument("vector field: values must be finite");
  for (double x : vy)
    if (!std::isfinite(x)) throw std::invalid_argument("vector field: values must be finite");
}

DomainHandle build_domain(const DomainSpec& spec) {
  auto dom = std::make_shared<Domain>();
  std::vector<Bc> bcs;
  for (const auto& s : spec.bc) bcs.push_back(parse_bc(s));

  if (spec.kind == "interval" || spec.kind == "circle") {
    dom->kind = spec.kind == "circle" ? DomainKind::circle : DomainKind::interval;
    dom->dim = 1;
    if (spec.lengths.size() != 1)
      throw std::invalid_argument("build_domain: 1D domains need exactly one length (lengths)");
    if (spec.grid.size() != 1)
      throw std::invalid_argument("build_domain: 1D domains need exactly one grid count (grid)");
    if (dom->kind == DomainKind::circle) {
      for (Bc b : bcs)
        if (b != Bc::periodic)
          throw std::invalid_argument("build_domain: circles are periodic; other conditions conflict (bc)");
      dom->ax = make_axis(spec.lengths[0], spec.grid[0], Bc::periodic, Bc::periodic, true);
    } else {
      Bc l = Bc::dirichlet, r = Bc::dirichlet;
      if (bcs.size() == 1) l = r = bcs[0];
      else if (bcs.size() == 2) { l = bcs[0]; r = bcs[1]; }
      else if (!bcs.empty())
        throw std::invalid_argument("build_domain: interval takes one or two bc entries (bc)");
      if (l == Bc::periodic || r == Bc::periodic)
        throw std::invalid_argument("build_domain: periodic conditions are only for circles (bc)");
      dom->ax = make_axis(spec.lengths[0], spec.grid[0], l, r, false);
    }
  } else if (spec.kind == "rectangle" || spec.kind == "masked-grid") {
    dom->kind = spec.kind == "rectangle" ? DomainKind::rectangle : DomainKind::masked_grid;
    dom->dim = 2;
    if (spec.lengths.size() != 2)
      throw std::invalid_argument("build_domain: 2D domains need two lengths (lengths)");
    if (spec.grid.size() != 2)
      throw std::invalid_argument("build_domain: 2D domains need two grid counts (grid)");
    Bc b[4] = {Bc::dirichlet, Bc::dirichlet, Bc::dirichlet, Bc::dirichlet};
    if (bcs.size() == 1) b[0] = b[1] = b[2] = b[3] = bcs[0];
    else if (bcs.size() == 4) { b[0] = bcs[0]; b[1] = bcs[1]; b[2] = bcs[2]; b[3] = bcs[3]; }
    else if (!bcs.empty())
      throw std::invalid_argument("build_domain: rectangles take one or four bc entries (bc)");
    for (Bc x : b)
      if (x == Bc::periodic)
        throw std::invalid_argument("build_domain: periodic conditions are only for circles (bc)");
    if (dom->kind == DomainKind::masked_grid)
      for (Bc x : b)
        if (x != Bc::dirichlet)
          throw std::invalid_argument("build_domain: masked grids are all-Dirichlet (bc)");
    dom->ax = make_axis(spec.lengths[0], spec.grid[0], b[0], b[1], false);
    dom->ay = make_axis(spec.lengths[1], spec.grid[1], b[2], b[3], false);
  } else {
    throw std::invalid_argument("build_domain: unknown domain kind '" + spec.kind + "' (kind)");
  }

  if (!spec.metric.empty() && spec.metric != "flat") {
    if (dom->dim != 1)
      throw std::invalid_argument("build_domain: only 1D domains support metric weights (metric)");
    dom->metric = make_metric(spec, dom->ax);
  }

  int nx = dom->ax.n, ny = dom->dim == 2 ? dom->ay.n : 1;
  if (dom->kind == DomainKind::masked_grid) {
    if (spec.mask.empty())
      throw std::invalid_argument("build_domain: masked-grid needs a mask (mask)");
    if (static_cast<int>(spec.mask.size()) != ny)
      throw std::invalid_argument("build_domain: mask must have one row per y node (mask)");
    dom->mask.assign(static_cast<std::size_t>(nx) * ny, 0);
    for (int j = 0; j < ny; ++j) {
      if (static_cast<int>(spec.mask[j].size()) != nx)
        throw std::invalid_argument("build_domain: mask rows must have one entry per x node (mask)");
      for (int i = 0; i < nx; ++i) {
        int m = spec.mask[j][i];
        if (m != 0 && m != 1)
          throw std::invalid_argument("build_domain: mask entries must be 0 or 1 (mask)");
        dom->mask[j * nx + i] = static_cast<std::uint8_t>(m);
      }
    }
    check_mask_connected(*dom);
  }

  dom->act_of_lat.assign(static_cast<std::size_t>(nx) * ny, -1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int l = j * nx + i;
      if (!dom->mask.empty() && !dom->mask[l]) continue;
      dom->act_of_lat[l] = dom->n_active++;
      dom->lat_of_act.push_back(l);
    }

  dom->w.resize(dom->n_active);
  for (int a = 0; a < dom->n_active; ++a) {
    int i = dom->ix_of(a);
    double wgt = axis_weight(dom->ax, i);
    if (dom->dim == 2) wgt *= axis_weight(dom->ay, dom->jy_of(a));
    dom->w[a] = wgt * dom->sqrtg_at(a);
  }
  return dom;
}

double volume(const Domain& dom) {
  if (!dom.metric) {
    double v = dom.ax.length;
    if (dom.dim == 2) {
      if (dom.kind == DomainKind::masked_grid) {
        double cells = 0.0;
        for (auto m : dom.mask) cells += m;
        return cells * dom.ax.h * dom.ay.h;
      }
      v *= dom.ay.length;
    }
    return v;
  }
  const auto& sg = dom.metric->sqrt_g;
  int cn = dom.ax.closed_n;
  double h = dom.ax.h, s = 0.0;
  if (dom.ax.periodic) {
    for (int i = 0; i < cn; ++i) s += sg[i];
    return h * s;
  }
  s = 0.5 * (sg[0] + sg[cn - 1]);
  for (int i = 1; i < cn - 1; ++i) s += sg[i];
  return h * s;
}

VecField gradient(const Field& f) {
  if (!f.dom) throw std::invalid_argument("gradient: field has no domain");
  const Domain& dom = *f.dom;
  VecField out(f.dom);
  out.vx = deriv_x(dom, f.v);
  if (dom.metric)
    for (int a = 0; a < dom.n_active; ++a) out.vx[a] /= dom.g_at(a);
  if (dom.dim == 2) out.vy = deriv_y(dom, f.v);
  return out;
}

Field divergence(const VecField& p) {
  check_vec(p, "divergence");
  const Domain& dom = *p.dom;
  Field out(p.dom);
  if (dom.metric) {
    std::vector<double> psi(dom.n_active);
    for (int a = 0; a < dom.n_active; ++a) psi[a] = p.vx[a] * dom.sqrtg_at(a);
    psi = deriv_x(dom, psi);
    for (int a = 0; a < dom.n_active; ++a) out.v[a] = psi[a] / dom.sqrtg_at(a);
    return out;
  }
  out.v = deriv_x(dom, p.vx);
  if (dom.dim == 2) {
    auto dy = deriv_y(dom, p.vy);
    for (int a = 0; a < dom.n_active; ++a) out.v[a] += dy[a];
  }
  return out;
}

Field divergence_christoffel(const VecField& p) {
  check_vec(p, "divergence");
  const Domain& dom = *p.dom;
  Field out(p.dom);
  out.v = deriv_x(dom, p.vx);
  if (dom.metric)
    for (int a = 0; a < dom.n_active; ++a)
      out.v[a] += p.vx[a] * dom.dg_at(a) / (2.0 * dom.g_at(a));
  if (dom.dim == 2) {
    auto dy = deriv_y(dom, p.vy);
    for (int a = 0; a < dom.n_active; ++a) out.v[a] += dy[a];
  }
  return out;
}

Field christoffel(const DomainHandle& dom) {
  if (!dom) throw std::invalid_argument("christoffel: null domain handle");
  Field out(dom);
  if (dom->metric)
    for (int a = 0; a < dom->n_active; ++a)
      out.v[a] = dom->dg_at(a) / (2.0 * dom->g_at(a));
  return out;
}

VecField lie_bracket(const VecField& p, const VecField& q) {
  check_vec(p, "lie_bracket");
  check_vec(q, "lie_bracket");
  require_same_domain(p.dom, q.dom, "lie_bracket");
  const Domain& dom = *p.dom;
  VecField out(p.dom);
  auto dxq = deriv_x(dom, q.vx), dxp = deriv_x(dom, p.vx);
  if (dom.dim == 1) {
    for (int a = 0; a < dom.n_active; ++a) out.vx[a] = p.vx[a] * dxq[a] - q.vx[a] * dxp[a];
    return out;
  }
  auto dyqx = deriv_y(dom, q.vx), dypx = deriv_y(dom, p.vx);
  auto dxqy = deriv_x(dom, q.vy), dxpy = deriv_x(dom, p.vy);
  auto dyqy = deriv_y(dom, q.vy), dypy = deriv_y(dom, p.vy);
  for (int a = 0; a < dom.n_active; ++a) {
    out.vx[a] = p.vx[a] * dxq[a] + p.vy[a] * dyqx[a] - q.vx[a] * dxp[a] - q.vy[a] * dypx[a];
    out.vy[a] = p.vx[a] * dxqy[a] + p.vy[a] * dyqy[a] - q.vx[a] * dxpy[a] - q.vy[a] * dypy[a];
  }
  return out;
}

VecField covariant_derivative(const VecField& xi, const VecField& p) {
  check_vec(xi, "covariant_derivative");
  check_vec(p, "covariant_derivative");
  require_same_domain(xi.dom, p.dom, "covariant_derivative");
  const Domain& dom = *p.dom;
  VecField out(p.dom);
  auto dxp = deriv_x(dom, p.vx);
  if (dom.dim == 1) {
    for (int a = 0; a < dom.n_active; ++a) {
      double gamma = dom.metric ? dom.dg_at(a) / (2.0 * dom.g_at(a)) : 0.0;
      out.vx[a] = xi.vx[a] * (dxp[a] + p.vx[a] * gamma);
    }
    return out;
  }
  auto dypx = deriv_y(dom, p.vx);
  auto dxpy = deriv_x(dom, p.vy), dypy = deriv_y(dom, p.vy);
  for (int a = 0; a < dom.n_active; ++a) {
    out.vx[a] = xi.vx[a] * dxp[a] + xi.vy[a] * dypx[a];
    out.vy[a] = xi.vx[a] * dxpy[a] + xi.vy[a] * dypy[a];
  }
  return out;
}

Field vec_inner(const VecField& p, const VecField& q) {
  check_vec(p, "vec_inner");
  check_vec(q, "vec_inner");
  require_same_domain(p.dom, q.dom, "vec_inner");
  const Domain& dom = *p.dom;
  Field out(p.dom);
  for (int a = 0; a < dom.n_active; ++a) {
    out.v[a] = dom.g_at(a) * p.vx[a] * q.vx[a];
    if (dom.dim == 2) out.v[a] += p.vy[a] * q.vy[a];
  }
  return out;
}

Field vec_apply(const VecField& xi, const Field& f) {
  check_vec(xi, "vec_apply");
  require_same_domain(xi.dom, f.dom, "vec_apply");
  const Domain& dom = *xi.dom;
  Field out(xi.dom);
  auto dx = deriv_x(dom, f.v);
  for (int a = 0; a < dom.n_active; ++a) out.v[a] = xi.vx[a] * dx[a];
  if (dom.dim == 2) {
    auto dy = deriv_y(dom, f.v);
    for (int a = 0; a < dom.n_active; ++a) out.v[a] += xi.vy[a] * dy[a];
  }
  return out;
}

}  // namespace rootlap
