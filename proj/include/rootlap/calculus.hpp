#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "rootlap/eigensolve.hpp"

namespace rootlap {

/// Closed-form families with known continuum spectra.
enum class ClosedForm { none, interval_dirichlet, interval_neumann, interval_mixed, circle, rectangle_dirichlet };

/// Spectrum viewed through the square root: r_k = sqrt(lambda_k) ascending.
/// Either wraps a numerical decomposition (source set) or carries an analytic
/// spectrum generated from a ClosedForm tag, in which case source is empty.
struct RadicalSpectrum {
  std::shared_ptr<const SpectralDecomposition> source;
  ClosedForm closed_form = ClosedForm::none;
  std::vector<double> lambda;
  std::vector<double> radical;
  int dim = 1;
  double vol = 0.0;  // length / circumference / area, used by the Weyl fit

  int count() const { return static_cast<int>(lambda.size()); }
};

RadicalSpectrum make_spectrum(std::shared_ptr<const SpectralDecomposition> dec);

/// Analytic spectra: dirichlet (pi k/L)^2, neumann (pi(k-1)/L)^2, mixed
/// (pi(k-1/2)/L)^2, circle 0 then (2 pi k/L)^2 doubled, rectangle tensor sums
/// pi^2 (i^2/Lx^2 + j^2/Ly^2) with i,j >= 1, each listed ascending.
RadicalSpectrum closed_form_spectrum(ClosedForm form, const std::vector<double>& lengths, int count);

/// Finite functional calculus: fn(sqrt A) u = sum_k fn(r_k) (u, phi_k)_W phi_k
/// over the computed modes.
Field apply_function(const SpectralDecomposition& dec, const std::function<double(double)>& fn, const Field& u);

/// The square-root operator itself: apply_function with fn(t) = t.
Field radical_apply(const SpectralDecomposition& dec, const Field& u);

/// Node-wise sqrt|(A f)_i|: the pointwise reading of the square-root
/// Laplacian. Nonlinear; kept as a diagnostic only.
Field pointwise_radical(const Field& f, const DiscreteOperator& op);

/// Max-norm gap between the pointwise diagnostic and the spectral operator
/// applied to the same field.
double pointwise_gap(const SpectralDecomposition& dec, const Field& f);

enum class Scale { lambda, radical };

/// Counting function N(level) = #{k : lambda_k <= level} (or r_k <= level).
int weyl_count(const RadicalSpectrum& s, double level, Scale scale);

struct WeylFit {
  double exponent = 0.0;            // unconstrained slope of log N vs log lambda
  double constant = 0.0;            // amplitude of the leading term C lambda^{n/2}
  double predicted_constant = 0.0;  // omega_n * vol / (2 pi)^n
};

/// Least-squares fit of log N(lambda_k) against log lambda_k over the
/// 1-based inclusive mode window [k_lo, k_hi]. The exponent comes from the
/// free two-parameter fit; the constant is the log-space least-squares
/// amplitude at the theoretical power n/2, the coefficient the Weyl law
/// actually predicts.
WeylFit weyl_fit(const RadicalSpectrum& s, int k_lo, int k_hi);

/// Volume of the n-dimensional unit ball by the recursion
/// omega_n = (2 pi / n) omega_{n-2}, omega_0 = 1, omega_1 = 2.
double unit_ball_volume(int n);

}  // namespace rootlap
