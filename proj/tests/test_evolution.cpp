#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rootlap/evolution.hpp"

using namespace rootlap;
using oracle::kPi;

namespace {

std::shared_ptr<const SpectralDecomposition> full_solve(const DomainSpec& spec) {
  auto dom = build_domain(spec);
  return std::make_shared<SpectralDecomposition>(
      eigendecompose(assemble_laplacian(dom), dom->n_active));
}

double kernel_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.a.size(); ++i) worst = std::max(worst, std::abs(a.a[i] - b.a[i]));
  return worst;
}

double kernel_scale(const Matrix& a) {
  double m = 0.0;
  for (double x : a.a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("heat kernel semigroup: K_s K_t = K_{s+t} on the full basis") {
  auto dec = full_solve(oracle::interval_spec(1.0, 60));
  oracle::Rng rng(321);
  for (int trial = 0; trial < 6; ++trial) {
    double s = 0.05 + 0.4 * std::abs(rng.uniform());
    double t = 0.05 + 0.4 * std::abs(rng.uniform());
    auto ks = heat_kernel(*dec, s), kt = heat_kernel(*dec, t), kst = heat_kernel(*dec, s + t);
    Matrix prod(60, 60);
    kernels::matmul(ks.K, kt.K, prod);
    // K folds the quadrature weights in on the right, so the matrix product
    // K_s K_t is exactly the discrete composition of the two operators.
    CHECK(kernel_diff(prod, kst.K) <= 1e-9 * std::max(kernel_scale(kst.K), 1.0));
  }
}

TEST_CASE("heat kernel at t = 0 is the identity on the resolved span") {
  auto dec = full_solve(oracle::circle_spec(2.0, 40));
  auto k0 = heat_kernel(*dec, 0.0);
  Field f = oracle::random_field(dec->dom, 17);
  Field back = kernel_apply(k0, f);
  CHECK(oracle::max_abs_diff(back.v, f.v) <= 1e-10 * oracle::max_abs(f.v));
}

TEST_CASE("modal heat decay: each mode shrinks by exactly exp(-r_k t)") {
  auto dec = full_solve(oracle::interval_spec(1.0, 80));
  for (int k : {0, 3, 9}) {
    Field u = heat_solve(*dec, dec->mode(k), 1.0);
    double factor = std::exp(-dec->radical[k]);
    double worst = 0.0;
    for (int i = 0; i < u.size(); ++i)
      worst = std::max(worst, std::abs(u.v[i] - factor * dec->phi(k)[i]));
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("heat evolution is a contraction in the weighted norm") {
  auto dec = full_solve(oracle::interval_spec(1.0, 70, {"neumann", "neumann"}));
  Field f = oracle::random_field(dec->dom, 23);
  double n0 = inner_product(f, f);
  double prev = n0;
  for (double t : {0.01, 0.1, 1.0, 5.0}) {
    Field u = heat_solve(*dec, f, t);
    double nt = inner_product(u, u);
    CHECK(nt <= prev * (1.0 + 1e-12));
    prev = nt;
  }
  // On a Neumann domain the mean is conserved, so the norm floors at the
  // constant-mode energy instead of draining to zero.
  Field ones(dec->dom, std::vector<double>(70, 1.0));
  double mean2 = inner_product(f, ones);
  double floor2 = mean2 * mean2 / inner_product(ones, ones);
  REQUIRE(floor2 > 1e-8);  // seed chosen so the mean is safely nonzero
  Field late = heat_solve(*dec, f, 200.0);
  CHECK(inner_product(late, late) == doctest::Approx(floor2).epsilon(1e-8));
}

TEST_CASE("heat kernel and modal solve agree") {
  auto dec = full_solve(oracle::interval_spec(1.0, 50, {"dirichlet", "neumann"}));
  Field f = oracle::random_field(dec->dom, 29);
  auto kt = heat_kernel(*dec, 0.7);
  Field via_kernel = kernel_apply(kt, f);
  Field via_modes = heat_solve(*dec, f, 0.7);
  CHECK(oracle::max_abs_diff(via_kernel.v, via_modes.v) <= 1e-10 * oracle::max_abs(f.v));
}

TEST_CASE("wave evolution: cosine factor per mode and sign flip at half period") {
  auto dec = full_solve(oracle::interval_spec(kPi, 200));
  WaveParams p;
  Field phi1 = dec->mode(0);
  double omega1 = std::sqrt(dec->radical[0] * p.tau / p.rho);
  // At t = pi / omega the mode returns inverted.
  Field flipped = wave_solve(*dec, phi1, kPi / omega1, p);
  double worst = 0.0;
  for (int i = 0; i < phi1.size(); ++i)
    worst = std::max(worst, std::abs(flipped.v[i] + phi1.v[i]));
  CHECK(worst <= 1e-8);
  // Intermediate time: the cosine factor.
  Field mid = wave_solve(*dec, phi1, 0.37, p);
  double factor = std::cos(omega1 * 0.37);
  worst = 0.0;
  for (int i = 0; i < phi1.size(); ++i)
    worst = std::max(worst, std::abs(mid.v[i] - factor * phi1.v[i]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("wave energy is conserved along the modal flow") {
  auto dec = full_solve(oracle::interval_spec(1.0, 90));
  WaveParams p;
  p.rho = 2.0;
  p.tau = 0.5;
  Field f = oracle::random_field(dec->dom, 41);
  ModalState state = modal_state(dec, f);
  double e0 = wave_energy(*dec, state, 0.0, p);
  CHECK(e0 > 0.0);
  for (int i = 1; i <= 100; ++i) {
    double t = 0.1 * i;
    double et = wave_energy(*dec, state, t, p);
    CHECK(std::abs(et - e0) <= 1e-10 * e0);
  }
}

TEST_CASE("wave parameters scale the frequency as sqrt(tau/rho)") {
  auto dec = full_solve(oracle::interval_spec(1.0, 60));
  Field phi1 = dec->mode(0);
  WaveParams fast;
  fast.tau = 4.0;  // doubles omega
  double omega = std::sqrt(dec->radical[0]);
  double t = 0.3;
  Field u_fast = wave_solve(*dec, phi1, t, fast);
  Field u_base = wave_solve(*dec, phi1, 2.0 * t, WaveParams{});
  // cos(2 omega t) both ways.
  CHECK(oracle::max_abs_diff(u_fast.v, u_base.v) <= 1e-12);
  (void)omega;
}

TEST_CASE("wave kernel matches the modal solution") {
  auto dec = full_solve(oracle::circle_spec(2.0 * kPi, 48));
  WaveParams p;
  Field f = oracle::random_field(dec->dom, 77);
  auto kt = wave_kernel(*dec, 1.3, p);
  CHECK(kt.kind == KernelKind::wave);
  Field via_kernel = kernel_apply(kt, f);
  Field via_modes = wave_solve(*dec, f, 1.3, p);
  CHECK(oracle::max_abs_diff(via_kernel.v, via_modes.v) <= 1e-10 * oracle::max_abs(f.v));
}

TEST_CASE("evolution rejects bad arguments") {
  auto dec = full_solve(oracle::interval_spec(1.0, 20));
  Field f = oracle::random_field(dec->dom, 5);
  CHECK_THROWS_AS(heat_kernel(*dec, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(heat_solve(*dec, f, -1.0), std::invalid_argument);
  WaveParams bad;
  bad.rho = 0.0;
  CHECK_THROWS_AS(wave_solve(*dec, f, 1.0, bad), std::invalid_argument);
  bad.rho = 1.0;
  bad.tau = -2.0;
  CHECK_THROWS_AS(wave_kernel(*dec, 1.0, bad), std::invalid_argument);
  // Mismatched modal state.
  ModalState state = modal_state(dec, f);
  state.amplitude.pop_back();
  CHECK_THROWS_AS(wave_energy(*dec, state, 0.0, WaveParams{}), std::invalid_argument);
  // Kernel applied to a field from another domain.
  auto other = build_domain(oracle::interval_spec(1.0, 21));
  auto kt = heat_kernel(*dec, 0.5);
  CHECK_THROWS_AS(kernel_apply(kt, Field(other)), std::invalid_argument);
}
