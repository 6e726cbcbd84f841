#include "rootlap/evolution.hpp"

#include <cmath>
#include <stdexcept>

namespace rootlap {

namespace {

void check_params(const WaveParams& p) {
  if (!(p.rho > 0.0)) throw std::invalid_argument("wave: membrane density must be positive (rho)");
  if (!(p.tau > 0.0)) throw std::invalid_argument("wave: membrane tension must be positive (tau)");
}

// Assemble sum_k c_k phi_k phi_k' and fold the quadrature weights in on the
// right so the kernel acts as an integral operator on node values.
KernelOperator assemble_kernel(const SpectralDecomposition& dec, const std::vector<double>& coef, double t,
                               KernelKind kind, const WaveParams& p) {
  int n = dec.n();
  KernelOperator ko;
  ko.dom = dec.dom;
  ko.time = t;
  ko.kind = kind;
  ko.params = p;
  ko.K = Matrix(n, n);
  for (int k = 0; k < dec.count(); ++k) kernels::outer_accumulate(ko.K, coef[k], dec.phi(k));
  const auto& w = dec.dom->w;
  for (int i = 0; i < n; ++i) {
    double* row = ko.K.row(i);
    for (int j = 0; j < n; ++j) row[j] *= w[j];
  }
  return ko;
}

}  // namespace

KernelOperator heat_kernel(const SpectralDecomposition& dec, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("heat_kernel: time must be nonnegative (t)");
  std::vector<double> coef(dec.count());
  for (int k = 0; k < dec.count(); ++k) coef[k] = std::exp(-dec.radical[k] * t);
  return assemble_kernel(dec, coef, t, KernelKind::heat, WaveParams{});
}

KernelOperator wave_kernel(const SpectralDecomposition& dec, double t, const WaveParams& p) {
  check_params(p);
  if (!(t >= 0.0)) throw std::invalid_argument("wave_kernel: time must be nonnegative (t)");
  std::vector<double> coef(dec.count());
  for (int k = 0; k < dec.count(); ++k) coef[k] = std::cos(std::sqrt(dec.radical[k] * p.tau / p.rho) * t);
  return assemble_kernel(dec, coef, t, KernelKind::wave, p);
}

Field kernel_apply(const KernelOperator& k, const Field& f) {
  if (f.dom.get() != k.dom.get()) throw std::invalid_argument("kernel_apply: field/kernel domain mismatch");
  std::vector<double> out(k.n());
  kernels::matvec(k.K, k.n(), f.v.data(), out.data());
  return Field(k.dom, std::move(out));
}

Field heat_solve(const SpectralDecomposition& dec, const Field& f, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("heat_solve: time must be nonnegative (t)");
  std::vector<double> alpha = expand(dec, f);
  for (int k = 0; k < dec.count(); ++k) alpha[k] *= std::exp(-dec.radical[k] * t);
  return synthesize(dec, alpha);
}

ModalState modal_state(std::shared_ptr<const SpectralDecomposition> dec, const Field& f) {
  if (!dec) throw std::invalid_argument("modal_state: null decomposition handle");
  ModalState st;
  st.source = dec;
  st.amplitude = expand(*dec, f);
  st.phase.assign(st.amplitude.size(), 0.0);
  return st;
}

Field wave_solve(const SpectralDecomposition& dec, const Field& f, double t, const WaveParams& p) {
  check_params(p);
  std::vector<double> alpha = expand(dec, f);
  for (int k = 0; k < dec.count(); ++k) alpha[k] *= std::cos(std::sqrt(dec.radical[k] * p.tau / p.rho) * t);
  return synthesize(dec, alpha);
}

double wave_energy(const SpectralDecomposition& dec, const ModalState& state, double t, const WaveParams& p) {
  check_params(p);
  if (static_cast<int>(state.amplitude.size()) > dec.count() || state.amplitude.size() != state.phase.size())
    throw std::invalid_argument("wave_energy: state does not match the decomposition (state)");
  double e = 0.0;
  for (std::size_t k = 0; k < state.amplitude.size(); ++k) {
    double omega = std::sqrt(dec.radical[k] * p.tau / p.rho);
    double arg = omega * (t - state.phase[k]);
    double a = state.amplitude[k] * std::cos(arg);
    double da = -state.amplitude[k] * omega * std::sin(arg);
    e += da * da + omega * omega * a * a;
  }
  return 0.5 * e;
}

}  // namespace rootlap
