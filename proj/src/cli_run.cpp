#include "rootlap/cli_run.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rootlap/calculus.hpp"
#include "rootlap/discretize.hpp"
#include "rootlap/domain_spec.hpp"
#include "rootlap/eigensolve.hpp"
#include "rootlap/evolution.hpp"
#include "rootlap/geometry.hpp"
#include "rootlap/nodal.hpp"
#include "rootlap/variational.hpp"

namespace rootlap {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Tiny arithmetic expression evaluator for --init style flags. Supports
// numbers, x, y, pi, + - * / ^, parentheses, and sin cos tan exp log sqrt abs.
class ExprParser {
 public:
  using Fn = std::function<double(double, double)>;

  static Fn parse(const std::string& text, const char* flag) {
    ExprParser p(text, flag);
    Fn f = p.expr();
    p.skip_ws();
    if (p.pos_ != p.s_.size()) p.fail("trailing characters");
    return f;
  }

 private:
  ExprParser(const std::string& s, const char* flag) : s_(s), flag_(flag) {}

  [[noreturn]] void fail(const std::string& why) const {
    throw std::invalid_argument("field expression: " + why + " at position " + std::to_string(pos_) + " (" + flag_ +
                                ")");
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  Fn expr() {
    Fn left = term();
    for (;;) {
      if (eat('+')) {
        Fn right = term();
        left = [left, right](double x, double y) { return left(x, y) + right(x, y); };
      } else if (eat('-')) {
        Fn right = term();
        left = [left, right](double x, double y) { return left(x, y) - right(x, y); };
      } else {
        return left;
      }
    }
  }
  Fn term() {
    Fn left = unary();
    for (;;) {
      if (eat('*')) {
        Fn right = unary();
        left = [left, right](double x, double y) { return left(x, y) * right(x, y); };
      } else if (eat('/')) {
        Fn right = unary();
        left = [left, right](double x, double y) { return left(x, y) / right(x, y); };
      } else {
        return left;
      }
    }
  }
  Fn unary() {
    if (eat('-')) {
      Fn inner = unary();
      return [inner](double x, double y) { return -inner(x, y); };
    }
    return power();
  }
  Fn power() {
    Fn base = atom();
    if (eat('^')) {
      Fn exp = unary();
      return [base, exp](double x, double y) { return std::pow(base(x, y), exp(x, y)); };
    }
    return base;
  }
  Fn atom() {
    skip_ws();
    if (eat('(')) {
      Fn inner = expr();
      if (!eat(')')) fail("missing ')'");
      return inner;
    }
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return ident();
    fail("expected a number, name, or '('");
  }
  Fn number() {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(s_.substr(pos_), &used);
    } catch (const std::exception&) {
      fail("bad number");
    }
    pos_ += used;
    return [v](double, double) { return v; };
  }
  Fn ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    std::string name = s_.substr(start, pos_ - start);
    if (name == "x") return [](double x, double) { return x; };
    if (name == "y") return [](double, double y) { return y; };
    if (name == "pi") return [](double, double) { return kPi; };
    if (eat('(')) {
      Fn arg = expr();
      if (!eat(')')) fail("missing ')'");
      if (name == "sin") return [arg](double x, double y) { return std::sin(arg(x, y)); };
      if (name == "cos") return [arg](double x, double y) { return std::cos(arg(x, y)); };
      if (name == "tan") return [arg](double x, double y) { return std::tan(arg(x, y)); };
      if (name == "exp") return [arg](double x, double y) { return std::exp(arg(x, y)); };
      if (name == "log") return [arg](double x, double y) { return std::log(arg(x, y)); };
      if (name == "sqrt") return [arg](double x, double y) { return std::sqrt(arg(x, y)); };
      if (name == "abs") return [arg](double x, double y) { return std::abs(arg(x, y)); };
    }
    fail("unknown name '" + name + "'");
  }

  std::string s_;
  const char* flag_;
  std::size_t pos_ = 0;
};

Field sample_expression(const DomainHandle& dom, const std::string& text, const char* flag) {
  ExprParser::Fn fn = ExprParser::parse(text, flag);
  std::vector<double> v(dom->n_active);
  for (int a = 0; a < dom->n_active; ++a) v[a] = fn(dom->x(a), dom->y(a));
  return Field(dom, std::move(v));
}

// ---------------------------------------------------------------------------
// Deterministic pseudo-random stream (splitmix64) for the seeded subcommands.
struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed * 0x9E3779B97F4A7C15ull + 0x2545F4914F6CDD1Dull) {}
  double next() {  // uniform in [-1, 1)
    s += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z = z ^ (z >> 31);
    return static_cast<double>(z >> 11) * 0x1.0p-52 - 1.0;
  }
};

// Random field that vanishes within three lattice layers of any boundary or
// masked-out node, so the divergence-theorem residual is exactly telescoping.
Field random_supported_field(const DomainHandle& dom, Rng& rng) {
  const Domain& d = *dom;
  std::vector<double> v(d.n_active);
  for (int a = 0; a < d.n_active; ++a) v[a] = rng.next();
  if (!d.ax.periodic) {
    for (int a = 0; a < d.n_active; ++a) {
      int ix = d.ix_of(a), jy = d.jy_of(a);
      bool clipped = false;
      for (int dj = -3; dj <= 3 && !clipped; ++dj)
        for (int di = -3; di <= 3 && !clipped; ++di) {
          int i = ix + di, j = d.dim == 2 ? jy + dj : 0;
          if (d.dim == 1 && dj != 0) continue;
          if (i < 0 || i >= d.ax.n || (d.dim == 2 && (j < 0 || j >= d.ay.n)))
            clipped = true;
          else if (d.active_at(i, j) < 0)
            clipped = true;
        }
      if (clipped) v[a] = 0.0;
    }
  }
  return Field(dom, std::move(v));
}

struct Assertion {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool ok = false;
};

struct RunState {
  // effective configuration
  nlohmann::json config = nlohmann::json::object();
  // tabular output (csv) and structured output (json results)
  std::string header;
  std::vector<std::string> rows;
  nlohmann::json results = nlohmann::json::object();
  std::vector<Assertion> assertions;

  void assert_le(const std::string& name, double value, double bound) {
    assertions.push_back({name, value, bound, value <= bound});
  }
  void assert_true(const std::string& name, bool ok) {
    assertions.push_back({name, ok ? 1.0 : 0.0, 1.0, ok});
  }
  bool all_ok() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.ok; });
  }
};

// ---------------------------------------------------------------------------
// Domain options shared by every subcommand.
struct DomainOpts {
  std::string spec_path;
  std::string kind = "interval";
  double length = 1.0;
  double lx = 1.0, ly = 1.0;
  std::vector<int> grid{200};
  std::vector<std::string> bc;
  std::string metric;
  // option handles, to detect inline flags when --spec is also given
  std::vector<CLI::Option*> inline_opts;

  void add_to(CLI::App* cmd) {
    inline_opts.push_back(cmd->add_option("--domain", kind, "Domain kind: interval|circle|rectangle")
                              ->check(CLI::IsMember({"interval", "circle", "rectangle"})));
    inline_opts.push_back(cmd->add_option("--length", length, "Interval length / circle circumference"));
    inline_opts.push_back(cmd->add_option("--lx", lx, "Rectangle x extent"));
    inline_opts.push_back(cmd->add_option("--ly", ly, "Rectangle y extent"));
    inline_opts.push_back(
        cmd->add_option("--grid", grid, "Active nodes per axis (one value, or two for rectangles)")->expected(1, 2));
    inline_opts.push_back(
        cmd->add_option("--bc", bc, "Boundary conditions: dirichlet|neumann (1, 2, or 4 values)")->expected(1, 4));
    inline_opts.push_back(cmd->add_option("--metric", metric, "Metric weight tag: flat|exp2x|one_plus_x2"));
    cmd->add_option("--spec", spec_path, "JSON domain-spec file (overrides inline domain flags)");
  }

  DomainSpec resolve() const {
    bool any_inline = std::any_of(inline_opts.begin(), inline_opts.end(),
                                  [](const CLI::Option* o) { return o->count() > 0; });
    if (!spec_path.empty()) {
      if (any_inline) std::cerr << "warning: --spec file overrides inline domain flags\n";
      return load_domain_spec(spec_path);
    }
    DomainSpec spec;
    spec.kind = kind;
    if (kind == "rectangle") {
      spec.lengths = {lx, ly};
      spec.grid = grid.size() == 2 ? grid : std::vector<int>{grid[0], grid[0]};
    } else {
      spec.lengths = {length};
      spec.grid = {grid[0]};
    }
    spec.bc = bc;
    spec.metric = metric;
    return spec;
  }
};

nlohmann::json spec_to_json(const DomainSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.kind;
  j["lengths"] = spec.lengths;
  j["grid"] = spec.grid;
  j["bc"] = spec.bc;
  if (!spec.metric.empty()) j["metric"] = spec.metric;
  if (!spec.mask.empty()) j["mask"] = spec.mask;
  return j;
}

// ---------------------------------------------------------------------------
// Subcommand bodies. Each fills the RunState; run_cli handles emission and
// the exit code.

void cmd_spectrum(RunState& st, const DomainSpec& spec, int modes) {
  DomainHandle dom = build_domain(spec);
  OperatorHandle op = assemble_laplacian(dom);
  SpectralDecomposition dec = eigendecompose(op, modes);

  st.header = "k,lambda,radical,residual";
  nlohmann::json jrows = nlohmann::json::array();
  double worst = 0.0;
  for (int k = 0; k < dec.count(); ++k) {
    st.rows.push_back(std::to_string(k + 1) + "," + fmt(dec.lambda[k]) + "," + fmt(dec.radical[k]) + "," +
                      fmt(dec.residual[k]));
    jrows.push_back({{"k", k + 1},
                     {"lambda", dec.lambda[k]},
                     {"radical", dec.radical[k]},
                     {"residual", dec.residual[k]}});
    worst = std::max(worst, dec.residual[k]);
  }
  st.results["modes"] = jrows;
  st.assert_le("max_residual", worst, 1e-7);
}

void cmd_weyl(RunState& st, const DomainSpec& spec, int modes, const std::string& closed_form,
              std::vector<double> levels, int fit_lo, int fit_hi) {
  RadicalSpectrum rs;
  if (!closed_form.empty()) {
    ClosedForm form = ClosedForm::none;
    if (closed_form == "interval-dirichlet") form = ClosedForm::interval_dirichlet;
    else if (closed_form == "interval-neumann") form = ClosedForm::interval_neumann;
    else if (closed_form == "interval-mixed") form = ClosedForm::interval_mixed;
    else if (closed_form == "circle") form = ClosedForm::circle;
    else if (closed_form == "rectangle-dirichlet") form = ClosedForm::rectangle_dirichlet;
    std::vector<double> lengths = spec.kind == "rectangle" ? spec.lengths : std::vector<double>{spec.lengths[0]};
    rs = closed_form_spectrum(form, lengths, modes);
  } else {
    DomainHandle dom = build_domain(spec);
    auto dec = std::make_shared<SpectralDecomposition>(eigendecompose(assemble_laplacian(dom), modes));
    rs = make_spectrum(dec);
  }

  st.header = "name,value";
  auto row = [&st](const std::string& name, double v) {
    st.rows.push_back(name + "," + fmt(v));
    st.results[name] = v;
  };
  row("modes", rs.count());
  for (double level : levels) {
    row("count_lambda_at_" + fmt(level), weyl_count(rs, level, Scale::lambda));
    row("count_radical_at_" + fmt(level), weyl_count(rs, level, Scale::radical));
  }
  if (fit_lo <= 0) fit_lo = std::max(1, rs.count() / 2);
  if (fit_hi <= 0) fit_hi = rs.count();
  WeylFit fit = weyl_fit(rs, fit_lo, fit_hi);
  row("fit_lo", fit_lo);
  row("fit_hi", fit_hi);
  row("exponent", fit.exponent);
  row("constant", fit.constant);
  row("predicted_constant", fit.predicted_constant);
}

void cmd_heat_wave(RunState& st, const DomainSpec& spec, int modes, bool wave, const std::string& init, int init_mode,
                   std::vector<double> times, const WaveParams& wp) {
  DomainHandle dom = build_domain(spec);
  OperatorHandle op = assemble_laplacian(dom);
  SpectralDecomposition dec = eigendecompose(op, modes);
  const char* who = wave ? "wave" : "heat";

  Field f0;
  if (!init.empty()) {
    f0 = sample_expression(dom, init, "init");
  } else {
    if (init_mode < 1 || init_mode > dec.count())
      throw std::invalid_argument(std::string(who) + ": initial mode out of range (mode)");
    f0 = dec.mode(init_mode - 1);
  }

  std::sort(times.begin(), times.end());
  st.header = "t,x,y,u";
  nlohmann::json jsnap = nlohmann::json::array();
  std::vector<double> norms;
  for (double t : times) {
    Field u = wave ? wave_solve(dec, f0, t, wp) : heat_solve(dec, f0, t);
    norms.push_back(std::sqrt(inner_product(u, u)));
    nlohmann::json ju = nlohmann::json::array();
    for (int a = 0; a < dom->n_active; ++a) {
      st.rows.push_back(fmt(t) + "," + fmt(dom->x(a)) + "," + fmt(dom->y(a)) + "," + fmt(u.v[a]));
      ju.push_back(u.v[a]);
    }
    jsnap.push_back({{"t", t}, {"norm", norms.back()}, {"u", ju}});
  }
  st.results["snapshots"] = jsnap;

  if (wave) {
    ModalState ms = modal_state(std::make_shared<SpectralDecomposition>(dec), f0);
    double tmax = times.empty() ? 10.0 : std::max(times.back(), 1.0);
    double e0 = wave_energy(dec, ms, 0.0, wp), drift = 0.0;
    for (int i = 0; i <= 100; ++i) {
      double e = wave_energy(dec, ms, tmax * i / 100.0, wp);
      drift = std::max(drift, std::abs(e - e0));
    }
    st.results["energy"] = e0;
    st.assert_le("energy_drift_rel", drift / std::max(e0, 1e-300), 1e-10);
  } else {
    double worst = 0.0;
    for (std::size_t i = 1; i < norms.size(); ++i)
      worst = std::max(worst, norms[i] - norms[i - 1]);
    st.assert_le("norm_increase", worst, 1e-12 * std::max(1.0, norms.empty() ? 0.0 : norms.front()));
  }
}

void cmd_rayleigh(RunState& st, const DomainSpec& spec, const std::string& init) {
  DomainHandle dom = build_domain(spec);
  OperatorHandle op = assemble_laplacian(dom);
  Field f = sample_expression(dom, init, "init");
  double q = rayleigh_quotient(f, *op);
  double l1 = eigendecompose(op, 1).lambda[0];

  st.header = "name,value";
  st.rows.push_back("quotient," + fmt(q));
  st.rows.push_back("lambda1," + fmt(l1));
  st.results["quotient"] = q;
  st.results["lambda1"] = l1;
  st.assert_true("quotient_ge_lambda1", q >= l1 - 1e-10 * std::max(1.0, std::abs(l1)));
}

void cmd_bracket(RunState& st, const DomainSpec& spec, const std::vector<double>& cuts, const std::string& cut_kind,
                 int axis, int kmax) {
  DomainHandle dom = build_domain(spec);
  CutKind kind = cut_kind == "neumann" ? CutKind::neumann_cut : CutKind::dirichlet_cut;
  Partition part = make_partition(dom, cuts, axis, kind);
  BracketReport rep =
      kind == CutKind::dirichlet_cut ? dirichlet_bracket(part, kmax) : neumann_bracket(part, kmax);

  st.header = "k,lambda,bound,holds";
  nlohmann::json jrows = nlohmann::json::array();
  bool all = true;
  for (int k = 0; k < kmax; ++k) {
    st.rows.push_back(std::to_string(k + 1) + "," + fmt(rep.lambda[k]) + "," + fmt(rep.bound[k]) + "," +
                      (rep.holds[k] ? "1" : "0"));
    jrows.push_back(
        {{"k", k + 1}, {"lambda", rep.lambda[k]}, {"bound", rep.bound[k]}, {"holds", static_cast<bool>(rep.holds[k])}});
    all = all && rep.holds[k];
  }
  st.results["table"] = jrows;
  st.results["cut_kind"] = cut_kind;
  st.assert_true("bracket_holds", all);
}

void cmd_nodal(RunState& st, const DomainSpec& spec, int modes, double zero_tol, int tone_k, double tone_tol) {
  DomainHandle dom = build_domain(spec);
  OperatorHandle op = assemble_laplacian(dom);
  SpectralDecomposition dec = eigendecompose(op, modes);

  st.header = "k,n_k,ok";
  nlohmann::json jrows = nlohmann::json::array();
  bool all = true;
  for (int k = 1; k <= modes; ++k) {
    NodalPartition part = nodal_domains(dec.mode(k - 1), zero_tol);
    bool ok = part.count <= k;
    st.rows.push_back(std::to_string(k) + "," + std::to_string(part.count) + "," + (ok ? "1" : "0"));
    jrows.push_back({{"k", k}, {"n_k", part.count}, {"ok", ok}});
    all = all && ok;
  }
  st.results["courant"] = jrows;
  st.assert_true("courant_bound", all);

  if (tone_k > 0) {
    NodalToneReport tone = nodal_tone_check(dec, tone_k);
    st.results["tone"] = {{"k", tone_k}, {"tone", tone.tone}, {"lambda_k", tone.lambda_k}, {"rel_err", tone.rel_err}};
    st.assert_le("tone_rel_err", tone.rel_err, tone_tol);
  }
}

void cmd_green(RunState& st, const DomainSpec& spec, int modes, int pairs, double tol, std::uint64_t seed) {
  DomainHandle dom = build_domain(spec);
  OperatorHandle op = assemble_laplacian(dom);
  SpectralDecomposition dec = eigendecompose(op, std::min(modes, op->n()));
  Rng rng(seed);

  st.header = "pair,r1,scale1,r2,scale2,r3,scale3,r4,scale4,ok";
  nlohmann::json jrows = nlohmann::json::array();
  bool all = true;
  for (int p = 1; p <= pairs; ++p) {
    Field f = random_supported_field(dom, rng);
    Field h = random_supported_field(dom, rng);
    GreenReport rep = check_green_identities(f, h, dec);
    bool ok = rep.ok(tol);
    all = all && ok;
    st.rows.push_back(std::to_string(p) + "," + fmt(rep.r1) + "," + fmt(rep.scale1) + "," + fmt(rep.r2) + "," +
                      fmt(rep.scale2) + "," + fmt(rep.r3) + "," + fmt(rep.scale3) + "," + fmt(rep.r4) + "," +
                      fmt(rep.scale4) + "," + (ok ? "1" : "0"));
    jrows.push_back({{"pair", p},
                     {"r1", rep.r1},
                     {"scale1", rep.scale1},
                     {"r2", rep.r2},
                     {"scale2", rep.scale2},
                     {"r3", rep.r3},
                     {"scale3", rep.scale3},
                     {"r4", rep.r4},
                     {"scale4", rep.scale4},
                     {"ok", ok}});
  }
  st.results["pairs"] = jrows;
  st.results["tolerance"] = tol;
  st.assert_true("green_identities", all);
}

void cmd_diffgeo(RunState& st, const DomainSpec& spec, double tol) {
  DomainHandle dom = build_domain(spec);
  const Domain& d = *dom;
  double lx = d.ax.length, ly = d.dim == 2 ? d.ay.length : 1.0;

  VecField p(dom), q(dom), xi(dom);
  for (int a = 0; a < d.n_active; ++a) {
    double x = d.x(a), y = d.y(a);
    p.vx[a] = std::sin(kPi * x / lx) + 0.3 * std::cos(2.0 * x);
    q.vx[a] = std::cos(0.5 * kPi * x / lx) + 1.2;
    xi.vx[a] = 0.7 + 0.3 * std::sin(1.7 * kPi * x / lx);
    if (d.dim == 2) {
      p.vx[a] *= std::cos(kPi * y / ly);
      p.vy[a] = std::cos(kPi * x / lx) * std::sin(kPi * y / ly);
      q.vy[a] = std::sin(0.5 * kPi * y / ly) - 0.8;
      xi.vy[a] = 0.5 - 0.2 * std::cos(1.3 * kPi * y / ly);
    }
  }

  auto max_abs_diff = [&d](const Field& a, const Field& b) {
    double m = 0.0;
    for (int i = 0; i < d.n_active; ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
  };

  // Two divergence readings of the same field.
  double div_gap = max_abs_diff(divergence(p), divergence_christoffel(p));

  // Christoffel symbols from analytic dg against a pure finite-difference
  // reading of the sampled g (zero for flat metrics, where both vanish).
  double gamma_gap = 0.0;
  if (d.dim == 1 && d.metric) {
    Field gamma = christoffel(dom);
    const MetricWeight& mw = *d.metric;
    for (int a = 0; a < d.n_active; ++a) {
      int ci = d.ax.closed_offset + a;
      double dg_fd;
      if (d.ax.periodic) {
        int n = d.ax.closed_n;
        dg_fd = (mw.g[(ci + 1) % n] - mw.g[(ci + n - 1) % n]) / (2.0 * d.ax.h);
      } else if (ci == 0) {
        dg_fd = (-3.0 * mw.g[0] + 4.0 * mw.g[1] - mw.g[2]) / (2.0 * d.ax.h);
      } else if (ci == d.ax.closed_n - 1) {
        dg_fd = (3.0 * mw.g[ci] - 4.0 * mw.g[ci - 1] + mw.g[ci - 2]) / (2.0 * d.ax.h);
      } else {
        dg_fd = (mw.g[ci + 1] - mw.g[ci - 1]) / (2.0 * d.ax.h);
      }
      gamma_gap = std::max(gamma_gap, std::abs(gamma.v[a] - dg_fd / (2.0 * d.g_at(a))));
    }
  }

  // Torsion-free: nabla_X Y - nabla_Y X - [X, Y] = 0.
  VecField txy = covariant_derivative(xi, p);
  VecField tyx = covariant_derivative(p, xi);
  VecField lb = lie_bracket(xi, p);
  double torsion = 0.0;
  for (int a = 0; a < d.n_active; ++a) {
    torsion = std::max(torsion, std::abs(txy.vx[a] - tyx.vx[a] - lb.vx[a]));
    if (d.dim == 2) torsion = std::max(torsion, std::abs(txy.vy[a] - tyx.vy[a] - lb.vy[a]));
  }

  // Metric compatibility: X<P,Q> = <nabla_X P, Q> + <P, nabla_X Q>.
  Field inner_pq = vec_inner(p, q);
  Field lhs = vec_apply(xi, inner_pq);
  Field i1 = vec_inner(covariant_derivative(xi, p), q);
  Field i2 = vec_inner(p, covariant_derivative(xi, q));
  double compat = 0.0;
  for (int a = 0; a < d.n_active; ++a)
    compat = std::max(compat, std::abs(lhs.v[a] - i1.v[a] - i2.v[a]));

  st.header = "check,value,bound,ok";
  auto row = [&st](const std::string& name, double value, double bound) {
    st.assert_le(name, value, bound);
    st.rows.push_back(name + "," + fmt(value) + "," + fmt(bound) + "," + (value <= bound ? "1" : "0"));
    st.results[name] = value;
  };
  row("div_agreement", div_gap, tol);
  row("christoffel_vs_fd", gamma_gap, tol);
  row("torsion_defect", torsion, 1e-10);
  row("metric_compat_defect", compat, 100.0 * tol);
}

void emit(const RunState& st, const std::string& format, const std::string& output) {
  std::ostringstream out;
  if (format == "json") {
    nlohmann::json doc;
    doc["config"] = st.config;
    doc["results"] = st.results;
    nlohmann::json ja = nlohmann::json::array();
    for (const Assertion& a : st.assertions)
      ja.push_back({{"name", a.name}, {"value", a.value}, {"bound", a.bound}, {"ok", a.ok}});
    doc["assertions"] = ja;
    out << doc.dump(2) << "\n";
  } else {
    out << st.header << "\n";
    for (const std::string& r : st.rows) out << r << "\n";
  }
  if (output.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(output);
    if (!f) throw std::invalid_argument("cannot open output file '" + output + "' (output)");
    f << out.str();
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"rootlap: spectral square-root Laplacian toolkit on 1D/2D grids"};
  app.require_subcommand(1);

  std::string format = "csv", output;
  int modes = 8;
  std::uint64_t seed = 1;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", output, "Write output to a file instead of stdout");
  app.add_option("--seed", seed, "Seed for randomized subcommands");

  struct {
    DomainOpts dom;
    std::string closed_form;
    std::vector<double> levels;
    int fit_lo = 0, fit_hi = 0;
    std::string init;
    int init_mode = 1;
    std::vector<double> times{0.0, 0.5, 1.0};
    WaveParams wp;
    std::vector<double> cuts;
    std::string cut_kind = "dirichlet";
    int axis = 0;
    int kmax = 10;
    double zero_tol = 1e-8;
    int tone_k = 0;
    double tone_tol = 5e-3;
    int pairs = 20;
    double tolerance = 1e-9;
    double diffgeo_tol = 1e-4;
  } o;

  CLI::App* spectrum = app.add_subcommand("spectrum", "Eigenvalues, radicals, and residuals");
  o.dom.add_to(spectrum);
  spectrum->add_option("--modes", modes, "Number of modes");

  CLI::App* weyl = app.add_subcommand("weyl", "Counting function and Weyl-law fit");
  o.dom.add_to(weyl);
  weyl->add_option("--modes", modes, "Number of modes");
  weyl->add_option("--closed-form", o.closed_form, "Use an analytic spectrum instead of solving")
      ->check(CLI::IsMember(
          {"interval-dirichlet", "interval-neumann", "interval-mixed", "circle", "rectangle-dirichlet"}));
  weyl->add_option("--level", o.levels, "Report N(level); repeatable");
  weyl->add_option("--fit-lo", o.fit_lo, "Fit window start (1-based mode index)");
  weyl->add_option("--fit-hi", o.fit_hi, "Fit window end (1-based mode index)");

  CLI::App* heat = app.add_subcommand("heat", "Heat evolution snapshots");
  CLI::App* wave = app.add_subcommand("wave", "Wave evolution snapshots and energy check");
  for (CLI::App* cmd : {heat, wave}) {
    o.dom.add_to(cmd);
    cmd->add_option("--modes", modes, "Number of modes");
    cmd->add_option("--init", o.init, "Initial field expression in x [and y]");
    cmd->add_option("--mode", o.init_mode, "Use eigenmode k as initial field (default)");
    cmd->add_option("--time", o.times, "Snapshot times; repeatable");
  }
  wave->add_option("--rho", o.wp.rho, "Membrane density");
  wave->add_option("--tau", o.wp.tau, "Membrane tension");

  CLI::App* rayleigh = app.add_subcommand("rayleigh", "Rayleigh quotient of a field expression");
  o.dom.add_to(rayleigh);
  rayleigh->add_option("--init", o.init, "Field expression in x [and y]")->required();

  CLI::App* bracket = app.add_subcommand("bracket", "Dirichlet/Neumann bracketing across a partition");
  o.dom.add_to(bracket);
  bracket->add_option("--cut", o.cuts, "Cut coordinates; repeatable")->required();
  bracket->add_option("--cut-kind", o.cut_kind, "Interface condition on the cuts")
      ->check(CLI::IsMember({"dirichlet", "neumann"}));
  bracket->add_option("--axis", o.axis, "Cut axis (0 = x, 1 = y)");
  bracket->add_option("--kmax", o.kmax, "Number of bracketed eigenvalues");

  CLI::App* nodal = app.add_subcommand("nodal", "Nodal-domain counts, Courant bound, tone check");
  o.dom.add_to(nodal);
  nodal->add_option("--modes", modes, "Number of modes");
  nodal->add_option("--zero-tol", o.zero_tol, "Relative zero-set tolerance");
  nodal->add_option("--tone-k", o.tone_k, "Run the tone identity check for mode k");
  nodal->add_option("--tone-tol", o.tone_tol, "Relative error bound for the tone check");

  CLI::App* green = app.add_subcommand("green", "Green/divergence identity residuals on random fields");
  o.dom.add_to(green);
  green->add_option("--modes", modes, "Number of modes backing the radical operator");
  green->add_option("--pairs", o.pairs, "Number of random field pairs");
  green->add_option("--tolerance", o.tolerance, "Residual bound relative to each scale");

  CLI::App* diffgeo = app.add_subcommand("diffgeo", "Christoffel/divergence cross-checks");
  o.dom.add_to(diffgeo);
  diffgeo->add_option("--tolerance", o.diffgeo_tol, "Bound for the O(h^2) agreement checks");

  // let --format/--output/--seed appear after the subcommand name
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunState st;
  try {
    CLI::App* sub = app.get_subcommands().front();
    DomainSpec spec = o.dom.resolve();
    st.config["subcommand"] = sub->get_name();
    st.config["domain"] = spec_to_json(spec);
    st.config["format"] = format;
    st.config["seed"] = seed;
    st.config["modes"] = modes;

    if (sub == spectrum) {
      cmd_spectrum(st, spec, modes);
    } else if (sub == weyl) {
      cmd_weyl(st, spec, modes, o.closed_form, o.levels, o.fit_lo, o.fit_hi);
    } else if (sub == heat || sub == wave) {
      cmd_heat_wave(st, spec, modes, sub == wave, o.init, o.init_mode, o.times, o.wp);
    } else if (sub == rayleigh) {
      cmd_rayleigh(st, spec, o.init);
    } else if (sub == bracket) {
      cmd_bracket(st, spec, o.cuts, o.cut_kind, o.axis, o.kmax);
    } else if (sub == nodal) {
      cmd_nodal(st, spec, modes, o.zero_tol, o.tone_k, o.tone_tol);
    } else if (sub == green) {
      cmd_green(st, spec, modes, o.pairs, o.tolerance, seed);
    } else if (sub == diffgeo) {
      cmd_diffgeo(st, spec, o.diffgeo_tol);
    }
    emit(st, format, output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (!st.all_ok()) {
    for (const Assertion& a : st.assertions)
      if (!a.ok)
        std::cerr << "assertion failed: " << a.name << " value " << fmt(a.value) << " bound " << fmt(a.bound) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace rootlap
