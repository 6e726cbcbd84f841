#pragma once

#include <memory>
#include <vector>

#include "rootlap/eigensolve.hpp"

namespace rootlap {

enum class KernelKind { heat, wave };

/// Membrane density and tension; enters the wave frequency as
/// omega_k = sqrt(r_k * tau / rho).
struct WaveParams {
  double rho = 1.0;
  double tau = 1.0;
};

/// Dense integral kernel sampled on the active nodes: (K f)_i approximates
/// int K(x_i, y) f(y) dV(y), i.e. the quadrature weights are folded into K.
/// W*K is symmetric because the underlying mode sum is.
struct KernelOperator {
  DomainHandle dom;
  Matrix K;
  double time = 0.0;
  KernelKind kind = KernelKind::heat;
  WaveParams params;

  int n() const { return K.rows; }
};

/// Modal superposition sum_k A_k cos(omega_k (t - beta_k)) phi_k. Phases are
/// kept zero by the released-membrane convention (zero initial velocity).
struct ModalState {
  std::shared_ptr<const SpectralDecomposition> source;
  std::vector<double> amplitude;
  std::vector<double> phase;
};

/// Heat kernel K_t = sum_k e^{-r_k t} phi_k phi_k' W. Semigroup identity
/// K_{s+t} = K_s K_t holds to round-off by W-orthonormality of the modes.
KernelOperator heat_kernel(const SpectralDecomposition& dec, double t);

/// Wave kernel sum_k cos(omega_k t) phi_k phi_k' W (zero-velocity data).
KernelOperator wave_kernel(const SpectralDecomposition& dec, double t, const WaveParams& p);

Field kernel_apply(const KernelOperator& k, const Field& f);

/// Exact modal heat evolution sum_k e^{-r_k t} (f, phi_k)_W phi_k.
Field heat_solve(const SpectralDecomposition& dec, const Field& f, double t);

/// State with A_k = (f, phi_k)_W and zero phases.
ModalState modal_state(std::shared_ptr<const SpectralDecomposition> dec, const Field& f);

/// Exact modal wave evolution sum_k cos(omega_k t) (f, phi_k)_W phi_k with
/// omega_k = sqrt(r_k tau / rho).
Field wave_solve(const SpectralDecomposition& dec, const Field& f, double t, const WaveParams& p);

/// E(t) = 1/2 sum_k (a_k'(t)^2 + omega_k^2 a_k(t)^2) for the modal system;
/// constant in t for the exact solution.
double wave_energy(const SpectralDecomposition& dec, const ModalState& state, double t, const WaveParams& p);

}  // namespace rootlap
