#include "rootlap/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rootlap/discretize.hpp"

namespace rootlap {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_lengths(const std::vector<double>& lengths, std::size_t want, const char* what) {
  if (lengths.size() != want)
    throw std::invalid_argument(std::string("closed_form_spectrum: ") + what + " (lengths)");
  for (double l : lengths)
    if (!(l > 0.0)) throw std::invalid_argument("closed_form_spectrum: lengths must be positive (lengths)");
}

std::vector<double> rectangle_lambdas(double lx, double ly, int count) {
  // Tensor sums pi^2 (i^2/lx^2 + j^2/ly^2), i,j >= 1. Grow the index box
  // until the count-th smallest value cannot be undercut by a larger index.
  int b = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count)))) + 2;
  for (;;) {
    std::vector<double> all;
    all.reserve(static_cast<std::size_t>(b) * b);
    for (int i = 1; i <= b; ++i)
      for (int j = 1; j <= b; ++j)
        all.push_back(kPi * kPi * (i * static_cast<double>(i) / (lx * lx) + j * static_cast<double>(j) / (ly * ly)));
    std::sort(all.begin(), all.end());
    double next_axis = kPi * kPi * (b + 1.0) * (b + 1.0) / std::max(lx, ly) / std::max(lx, ly);
    double floor_new = next_axis + kPi * kPi / std::min(lx, ly) / std::min(lx, ly);
    if (static_cast<int>(all.size()) >= count && all[count - 1] <= floor_new)
      return {all.begin(), all.begin() + count};
    b *= 2;
  }
}

}  // namespace

RadicalSpectrum make_spectrum(std::shared_ptr<const SpectralDecomposition> dec) {
  if (!dec) throw std::invalid_argument("make_spectrum: null decomposition handle");
  RadicalSpectrum s;
  s.source = dec;
  s.lambda = dec->lambda;
  s.radical = dec->radical;
  s.dim = dec->dom->dim;
  s.vol = volume(*dec->dom);
  return s;
}

RadicalSpectrum closed_form_spectrum(ClosedForm form, const std::vector<double>& lengths, int count) {
  if (count < 1) throw std::invalid_argument("closed_form_spectrum: count must be positive (count)");
  RadicalSpectrum s;
  s.closed_form = form;
  switch (form) {
    case ClosedForm::interval_dirichlet:
      require_lengths(lengths, 1, "interval form takes one length");
      for (int k = 1; k <= count; ++k) s.lambda.push_back(std::pow(kPi * k / lengths[0], 2));
      s.dim = 1;
      s.vol = lengths[0];
      break;
    case ClosedForm::interval_neumann:
      require_lengths(lengths, 1, "interval form takes one length");
      for (int k = 1; k <= count; ++k) s.lambda.push_back(std::pow(kPi * (k - 1) / lengths[0], 2));
      s.dim = 1;
      s.vol = lengths[0];
      break;
    case ClosedForm::interval_mixed:
      require_lengths(lengths, 1, "interval form takes one length");
      for (int k = 1; k <= count; ++k) s.lambda.push_back(std::pow(kPi * (k - 0.5) / lengths[0], 2));
      s.dim = 1;
      s.vol = lengths[0];
      break;
    case ClosedForm::circle:
      require_lengths(lengths, 1, "circle form takes one length");
      s.lambda.push_back(0.0);
      for (int k = 1; static_cast<int>(s.lambda.size()) < count; ++k) {
        double l = std::pow(2.0 * kPi * k / lengths[0], 2);
        s.lambda.push_back(l);
        if (static_cast<int>(s.lambda.size()) < count) s.lambda.push_back(l);
      }
      s.dim = 1;
      s.vol = lengths[0];
      break;
    case ClosedForm::rectangle_dirichlet:
      require_lengths(lengths, 2, "rectangle form takes two lengths");
      s.lambda = rectangle_lambdas(lengths[0], lengths[1], count);
      s.dim = 2;
      s.vol = lengths[0] * lengths[1];
      break;
    case ClosedForm::none:
      throw std::invalid_argument("closed_form_spectrum: a concrete form tag is required (form)");
  }
  s.radical.resize(s.lambda.size());
  for (std::size_t k = 0; k < s.lambda.size(); ++k) s.radical[k] = std::sqrt(s.lambda[k]);
  return s;
}

Field apply_function(const SpectralDecomposition& dec, const std::function<double(double)>& fn, const Field& u) {
  if (!fn) throw std::invalid_argument("apply_function: null function (fn)");
  std::vector<double> alpha = expand(dec, u);
  for (int k = 0; k < dec.count(); ++k) {
    double s = fn(dec.radical[k]);
    if (!std::isfinite(s))
      throw std::invalid_argument("apply_function: fn(r_k) is not finite at mode k=" + std::to_string(k) + " (fn)");
    alpha[k] *= s;
  }
  return synthesize(dec, alpha);
}

Field radical_apply(const SpectralDecomposition& dec, const Field& u) {
  return apply_function(dec, [](double t) { return t; }, u);
}

Field pointwise_radical(const Field& f, const DiscreteOperator& op) {
  if (f.dom.get() != op.dom.get())
    throw std::invalid_argument("pointwise_radical: field/operator domain mismatch");
  int n = op.n();
  std::vector<double> af(n);
  kernels::matvec(op.A, n, f.v.data(), af.data());
  for (int i = 0; i < n; ++i) af[i] = std::sqrt(std::abs(af[i]));
  return Field(op.dom, std::move(af));
}

double pointwise_gap(const SpectralDecomposition& dec, const Field& f) {
  Field pw = pointwise_radical(f, *dec.op);
  Field sp = radical_apply(dec, f);
  double gap = 0.0;
  for (int i = 0; i < pw.size(); ++i) gap = std::max(gap, std::abs(pw.v[i] - sp.v[i]));
  return gap;
}

int weyl_count(const RadicalSpectrum& s, double level, Scale scale) {
  const auto& vals = scale == Scale::lambda ? s.lambda : s.radical;
  return static_cast<int>(std::upper_bound(vals.begin(), vals.end(), level) - vals.begin());
}

WeylFit weyl_fit(const RadicalSpectrum& s, int k_lo, int k_hi) {
  if (k_lo < 1 || k_hi > s.count() || k_lo > k_hi)
    throw std::invalid_argument("weyl_fit: window out of range (k_lo, k_hi)");
  int m = k_hi - k_lo + 1;
  if (m < 10) throw std::invalid_argument("weyl_fit: window needs at least 10 modes (k_lo, k_hi)");

  std::vector<double> xs(m), ys(m);
  for (int j = 0; j < m; ++j) {
    double l = s.lambda[k_lo - 1 + j];
    if (!(l > 0.0)) throw std::invalid_argument("weyl_fit: window must avoid zero modes (k_lo)");
    xs[j] = std::log(l);
    ys[j] = std::log(static_cast<double>(weyl_count(s, l, Scale::lambda)));
  }
  double mx = 0.0, my = 0.0;
  for (int j = 0; j < m; ++j) {
    mx += xs[j];
    my += ys[j];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (int j = 0; j < m; ++j) {
    sxx += (xs[j] - mx) * (xs[j] - mx);
    sxy += (xs[j] - mx) * (ys[j] - my);
  }
  if (sxx == 0.0) throw std::domain_error("weyl_fit: eigenvalues in the window are identical; fit is degenerate");

  WeylFit fit;
  fit.exponent = sxy / sxx;
  // The amplitude is measured against the theoretical power lambda^{n/2}:
  // comparing a coefficient of lambda^p (fitted p) against omega_n vol/(2 pi)^n,
  // which multiplies lambda^{n/2}, would be dimensionally meaningless.
  fit.constant = std::exp(my - 0.5 * s.dim * mx);
  double omega = unit_ball_volume(s.dim);
  fit.predicted_constant = omega * s.vol / std::pow(2.0 * kPi, s.dim);
  return fit;
}

double unit_ball_volume(int n) {
  if (n < 1) throw std::invalid_argument("unit_ball_volume: dimension must be at least 1 (n)");
  double w_even = 1.0;  // omega_0
  double w_odd = 2.0;   // omega_1
  for (int m = 2; m <= n; ++m) {
    if (m % 2 == 0)
      w_even *= 2.0 * kPi / m;
    else
      w_odd *= 2.0 * kPi / m;
  }
  return n % 2 == 0 ? w_even : w_odd;
}

}  // namespace rootlap
