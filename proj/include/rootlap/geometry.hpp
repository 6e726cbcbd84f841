#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rootlap {

enum class Bc { dirichlet, neumann, periodic };
enum class DomainKind { interval, circle, rectangle, masked_grid };

/// Conformal 1D metric weight g > 0 sampled on the closed vertex grid
/// {0, h, ..., L} (boundary vertices included regardless of bc, so the
/// Riemannian volume can be integrated over the whole segment). dg holds
/// analytic derivative samples when the metric came from a whitelisted tag;
/// when empty, consumers fall back to second-order differences of g.
struct MetricWeight {
  std::string tag;  // "exp2x", "one_plus_x2" or "sampled"
  std::vector<double> g;
  std::vector<double> sqrt_g;
  std::vector<double> dg;  // empty when only samples are known
};

/// Plain description of a domain; this is what the CLI flags and the JSON
/// spec file produce. build_domain validates it and derives the lattice.
struct DomainSpec {
  std::string kind;                    // interval | circle | rectangle | masked-grid
  std::vector<double> lengths;         // 1 or 2 entries
  std::vector<int> grid;               // active nodes per axis, 1 or 2 entries
  std::vector<std::string> bc;         // 0, 1, 2 (1D: left,right) or 4 (2D: left,right,bottom,top)
  std::string metric;                  // "", "flat", "exp2x", "one_plus_x2", "sampled"
  std::vector<double> metric_g;        // closed-grid samples when metric == "sampled"
  std::vector<double> metric_dg;       // optional derivative samples
  std::vector<std::vector<int>> mask;  // masked-grid: grid[1] rows of grid[0] 0/1 flags
};

/// Node layout along one axis. Active nodes are the unknowns; the closed
/// vertex grid additionally contains boundary vertices excluded by Dirichlet
/// conditions.
struct AxisLayout {
  int n = 0;           // active nodes
  double length = 0.0;
  double h = 0.0;
  double x0 = 0.0;     // coordinate of active node 0
  Bc left = Bc::dirichlet, right = Bc::dirichlet;
  bool periodic = false;
  int closed_n = 0;    // vertices on [0, L] (== n for periodic)
  int closed_offset = 0;  // closed index of active node 0

  double coord(int i) const { return x0 + h * i; }
  double closed_coord(int ci) const { return h * ci; }
};

/// Discretized domain: vertex-centered uniform lattice, Dirichlet boundary
/// vertices excluded from the active set, Neumann boundary vertices included
/// (mirror ghosts), circles periodic. Immutable after construction; shared
/// by handle everywhere.
class Domain {
 public:
  DomainKind kind = DomainKind::interval;
  int dim = 1;
  AxisLayout ax, ay;                  // ay unused for 1D
  std::optional<MetricWeight> metric; // 1D only
  std::vector<std::uint8_t> mask;     // masked-grid: ax.n * ay.n flags (row-major by j)

  int n_active = 0;
  std::vector<int> act_of_lat;  // lattice index -> active index or -1
  std::vector<int> lat_of_act;  // active index -> lattice index
  std::vector<double> w;        // quadrature weight per active node (includes sqrt(g))

  int lattice_index(int i, int j) const { return j * ax.n + i; }
  int active_at(int i, int j) const { return act_of_lat[lattice_index(i, j)]; }
  int ix_of(int a) const { return lat_of_act[a] % ax.n; }
  int jy_of(int a) const { return lat_of_act[a] / ax.n; }
  double x(int a) const { return ax.coord(ix_of(a)); }
  double y(int a) const { return dim == 2 ? ay.coord(jy_of(a)) : 0.0; }

  /// Metric samples at an active node (closed-grid indexed); 1.0 when flat.
  double g_at(int a) const;
  double sqrtg_at(int a) const;
  /// dg at an active node: analytic samples when available, otherwise a
  /// second-order difference of the closed-grid samples.
  double dg_at(int a) const;
};

using DomainHandle = std::shared_ptr<const Domain>;

/// Scalar field sampled on the active nodes of a domain.
struct Field {
  DomainHandle dom;
  std::vector<double> v;

  Field() = default;
  Field(DomainHandle d, std::vector<double> values);
  explicit Field(DomainHandle d);
  int size() const { return static_cast<int>(v.size()); }
};

/// Vector field: component samples per coordinate direction.
struct VecField {
  DomainHandle dom;
  std::vector<double> vx, vy;  // vy empty for 1D domains

  VecField() = default;
  explicit VecField(DomainHandle d);
  VecField(DomainHandle d, std::vector<double> x_comp, std::vector<double> y_comp);
};

DomainHandle build_domain(const DomainSpec& spec);

/// Riemannian volume of the domain: the geometric length/area for flat
/// metrics (exact), otherwise the trapezoid integral of sqrt(g) over the
/// closed vertex grid.
double volume(const Domain& dom);

/// grad f = g^{kl} (d_l f) d_k: second-order differences, one-sided at the
/// ends of each active run, periodic wrap on circles.
VecField gradient(const Field& f);

/// Conservative divergence (1/sqrt g) d_j(eta^j sqrt g).
Field divergence(const VecField& p);

/// Christoffel-form divergence d_j eta^j + eta^l Gamma^j_{lj}.
Field divergence_christoffel(const VecField& p);

/// Gamma^1_{11} samples (1D metric domains; identically zero when flat).
Field christoffel(const DomainHandle& dom);

/// [P,Q]^k = eta^j d_j zeta^k - zeta^j d_j eta^k.
VecField lie_bracket(const VecField& p, const VecField& q);

/// (nabla_xi P)^k = xi^j (d_j eta^k + eta^l Gamma^k_{lj}).
VecField covariant_derivative(const VecField& xi, const VecField& p);

/// Pointwise metric inner product <P,Q>_g as a scalar field.
Field vec_inner(const VecField& p, const VecField& q);

/// Directional derivative xi(f) = xi^j d_j f (no metric factor).
Field vec_apply(const VecField& xi, const Field& f);

}  // namespace rootlap
