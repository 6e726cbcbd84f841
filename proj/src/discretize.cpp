#include "rootlap/discretize.hpp"

#include <cmath>
#include <stdexcept>

#include "rootlap/calculus.hpp"
#include "rootlap/eigensolve.hpp"

namespace rootlap {

namespace {

constexpr int kDenseCap = 4096;

// Edge coefficient of the conservative stencil between two closed-grid
// vertices: the mean of g^{11} sqrt(g) = 1/sqrt(g) (flat: 1).
double edge_mu(const Domain& dom, int ci_a, int ci_b) {
  if (!dom.metric) return 1.0;
  const auto& sg = dom.metric->sqrt_g;
  return 0.5 * (1.0 / sg[ci_a] + 1.0 / sg[ci_b]);
}

double axis_weight_at(const AxisLayout& ax, int i) {
  if (ax.periodic) return ax.h;
  bool half = (i == 0 && ax.left == Bc::neumann) || (i == ax.n - 1 && ax.right == Bc::neumann);
  return half ? 0.5 * ax.h : ax.h;
}

}  // namespace

OperatorHandle assemble_laplacian(const DomainHandle& dom) {
  if (!dom) throw std::invalid_argument("assemble_laplacian: null domain handle");
  int n = dom->n_active;
  if (n > kDenseCap)
    throw std::invalid_argument("assemble_laplacian: active node count exceeds the 4096 dense cap (grid)");
  auto op = std::make_shared<DiscreteOperator>();
  op->dom = dom;
  op->A = Matrix(n, n);
  Matrix& A = op->A;

  const AxisLayout& ax = dom->ax;
  const AxisLayout& ay = dom->ay;
  int nx = ax.n, ny = dom->dim == 2 ? ay.n : 1;
  double ihx2 = 1.0 / (ax.h * ax.h);
  double ihy2 = dom->dim == 2 ? 1.0 / (ay.h * ay.h) : 0.0;

  for (int a = 0; a < n; ++a) {
    int i = dom->ix_of(a), j = dom->jy_of(a);
    int ci = ax.closed_offset + i;
    double isg = dom->metric ? 1.0 / dom->sqrtg_at(a) : 1.0;

    if (ax.periodic) {
      int il = (i + nx - 1) % nx, ir = (i + 1) % nx;
      double mul = edge_mu(*dom, ci, il), mur = edge_mu(*dom, ci, ir);
      A(a, a) += (mul + mur) * ihx2 * isg;
      A(a, dom->active_at(il, j)) -= mul * ihx2 * isg;
      A(a, dom->active_at(ir, j)) -= mur * ihx2 * isg;
    } else {
      bool mirror_left = (i == 0 && ax.left == Bc::neumann);
      bool mirror_right = (i == nx - 1 && ax.right == Bc::neumann);
      if (!mirror_left) {
        // left coupling; a Dirichlet ghost or masked-out neighbor keeps only
        // the diagonal term (ghost value 0)
        double mul = edge_mu(*dom, ci, ci - 1);
        int b = i > 0 ? dom->active_at(i - 1, j) : -1;
        A(a, a) += mul * ihx2 * isg;
        if (b >= 0) A(a, b) -= mul * ihx2 * isg;
      }
      if (!mirror_right) {
        double mur = edge_mu(*dom, ci, ci + 1);
        int b = i < nx - 1 ? dom->active_at(i + 1, j) : -1;
        A(a, a) += mur * ihx2 * isg;
        if (b >= 0) A(a, b) -= mur * ihx2 * isg;
      }
      // a mirror ghost doubles the interior-facing coupling
      if (mirror_left && nx > 1) {
        double mur = edge_mu(*dom, ci, ci + 1);
        A(a, a) += mur * ihx2 * isg;
        A(a, dom->active_at(i + 1, j)) -= mur * ihx2 * isg;
      }
      if (mirror_right && nx > 1) {
        double mul = edge_mu(*dom, ci, ci - 1);
        A(a, a) += mul * ihx2 * isg;
        A(a, dom->active_at(i - 1, j)) -= mul * ihx2 * isg;
      }
    }

    if (dom->dim == 2) {
      bool mirror_bottom = (j == 0 && ay.left == Bc::neumann);
      bool mirror_top = (j == ny - 1 && ay.right == Bc::neumann);
      if (!mirror_bottom) {
        int b = j > 0 ? dom->active_at(i, j - 1) : -1;
        A(a, a) += ihy2;
        if (b >= 0) A(a, b) -= ihy2;
      }
      if (!mirror_top) {
        int b = j < ny - 1 ? dom->active_at(i, j + 1) : -1;
        A(a, a) += ihy2;
        if (b >= 0) A(a, b) -= ihy2;
      }
      if (mirror_bottom && ny > 1) {
        A(a, a) += ihy2;
        A(a, dom->active_at(i, j + 1)) -= ihy2;
      }
      if (mirror_top && ny > 1) {
        A(a, a) += ihy2;
        A(a, dom->active_at(i, j - 1)) -= ihy2;
      }
    }
  }

  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    const double* row = A.row(r);
    for (int c = 0; c < n; ++c) s += std::abs(row[c]);
    op->norm_inf = std::max(op->norm_inf, s);
  }
  return op;
}

double inner_product(const Field& f, const Field& h) {
  if (!f.dom || !h.dom || f.dom.get() != h.dom.get())
    throw std::invalid_argument("inner_product: fields live on different domains");
  const auto& w = f.dom->w;
  double s = 0.0;
  for (int i = 0; i < f.dom->n_active; ++i) s += w[i] * f.v[i] * h.v[i];
  return s;
}

double dirichlet_energy(const DiscreteOperator& op, const Field& f, const Field& h) {
  if (f.dom.get() != op.dom.get() || h.dom.get() != op.dom.get())
    throw std::invalid_argument("dirichlet_energy: field/operator domain mismatch");
  int n = op.n();
  std::vector<double> ah(n);
  kernels::matvec(op.A, n, h.v.data(), ah.data());
  const auto& w = op.w();
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += w[i] * f.v[i] * ah[i];
  return s;
}

namespace {

// The geometric side of the first Green formula: (Grad f, Grad h) summed
// edge by edge, including the ghost edges cut off by Dirichlet boundaries.
// Equal to f'(W A)h by summation by parts, but evaluated through entirely
// different arithmetic, which is what makes the r1 residual meaningful.
double edge_energy(const Domain& dom, const std::vector<double>& f, const std::vector<double>& h) {
  const AxisLayout& ax = dom.ax;
  const AxisLayout& ay = dom.ay;
  int nx = ax.n, ny = dom.dim == 2 ? ay.n : 1;
  double s = 0.0;
  for (int j = 0; j < ny; ++j) {
    double wy = dom.dim == 2 ? axis_weight_at(ay, j) : 1.0;
    for (int i = 0; i < nx; ++i) {
      int a = dom.active_at(i, j);
      if (a < 0) continue;
      int ci = ax.closed_offset + i;
      if (ax.periodic) {
        int ir = (i + 1) % nx;
        int b = dom.active_at(ir, j);
        double mu = edge_mu(dom, ci, (ci + 1) % ax.closed_n);
        s += mu * wy / ax.h * (f[a] - f[b]) * (h[a] - h[b]);
        continue;
      }
      if (i < nx - 1) {
        int b = dom.active_at(i + 1, j);
        double mu = edge_mu(dom, ci, ci + 1);
        if (b >= 0)
          s += mu * wy / ax.h * (f[a] - f[b]) * (h[a] - h[b]);
        else
          s += mu * wy / ax.h * f[a] * h[a];  // masked-out neighbor: ghost edge
      } else if (ax.right == Bc::dirichlet) {
        s += edge_mu(dom, ci, ci + 1) * wy / ax.h * f[a] * h[a];
      }
      if (i > 0) {
        if (dom.active_at(i - 1, j) < 0) s += edge_mu(dom, ci, ci - 1) * wy / ax.h * f[a] * h[a];
      } else if (ax.left == Bc::dirichlet) {
        s += edge_mu(dom, ci, ci - 1) * wy / ax.h * f[a] * h[a];
      }
    }
  }
  if (dom.dim == 2) {
    for (int i = 0; i < nx; ++i) {
      double wx = axis_weight_at(ax, i);
      for (int j = 0; j < ny; ++j) {
        int a = dom.active_at(i, j);
        if (a < 0) continue;
        if (j < ny - 1) {
          int b = dom.active_at(i, j + 1);
          if (b >= 0)
            s += wx / ay.h * (f[a] - f[b]) * (h[a] - h[b]);
          else
            s += wx / ay.h * f[a] * h[a];
        } else if (ay.right == Bc::dirichlet) {
          s += wx / ay.h * f[a] * h[a];
        }
        if (j > 0) {
          if (dom.active_at(i, j - 1) < 0) s += wx / ay.h * f[a] * h[a];
        } else if (ay.left == Bc::dirichlet) {
          s += wx / ay.h * f[a] * h[a];
        }
      }
    }
  }
  return s;
}

}  // namespace

GreenReport check_green_identities(const Field& f, const Field& h, const SpectralDecomposition& dec) {
  const auto& op = *dec.op;
  if (f.dom.get() != op.dom.get() || h.dom.get() != op.dom.get())
    throw std::invalid_argument("check_green_identities: field/operator domain mismatch");
  const Domain& dom = *op.dom;
  int n = op.n();
  const auto& w = dom.w;

  auto wnorm = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += w[i] * v[i] * v[i];
    return std::sqrt(s);
  };
  double nf = wnorm(f.v), nh = wnorm(h.v);

  GreenReport rep;
  std::vector<double> af(n), ah(n);
  kernels::matvec(op.A, n, f.v.data(), af.data());
  kernels::matvec(op.A, n, h.v.data(), ah.data());
  double h_af = 0.0, f_ah = 0.0;
  for (int i = 0; i < n; ++i) {
    h_af += w[i] * h.v[i] * af[i];
    f_ah += w[i] * f.v[i] * ah[i];
  }

  rep.r1 = std::abs(h_af - edge_energy(dom, h.v, f.v));
  rep.scale1 = op.norm_inf * nf * nh + 1e-300;
  rep.r4 = std::abs(h_af - f_ah);
  rep.scale4 = rep.scale1;

  Field rf = radical_apply(dec, f), rh = radical_apply(dec, h);
  double h_rf = 0.0, rh_f = 0.0;
  for (int i = 0; i < n; ++i) {
    h_rf += w[i] * h.v[i] * rf.v[i];
    rh_f += w[i] * rh.v[i] * f.v[i];
  }
  rep.r2 = std::abs(h_rf - rh_f);
  double rmax = dec.radical.empty() ? 0.0 : dec.radical.back();
  rep.scale2 = rmax * nf * nh + 1e-300;

  // Divergence theorem applied to P = f grad h.
  VecField gh = gradient(h);
  VecField p(f.dom);
  for (int i = 0; i < n; ++i) {
    p.vx[i] = f.v[i] * gh.vx[i];
    if (dom.dim == 2) p.vy[i] = f.v[i] * gh.vy[i];
  }
  Field dv = divergence(p);
  double total = 0.0, abssum = 0.0;
  for (int i = 0; i < n; ++i) {
    total += w[i] * dv.v[i];
    abssum += w[i] * std::abs(dv.v[i]);
  }
  rep.r3 = std::abs(total);
  rep.scale3 = std::max(abssum, op.norm_inf * nf * nh) + 1e-300;
  return rep;
}

}  // namespace rootlap
