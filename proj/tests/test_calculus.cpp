#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rootlap/calculus.hpp"

using namespace rootlap;
using oracle::kPi;

namespace {

std::shared_ptr<const SpectralDecomposition> solve(const DomainSpec& spec, int count) {
  auto dom = build_domain(spec);
  return std::make_shared<SpectralDecomposition>(eigendecompose(assemble_laplacian(dom), count));
}

}  // namespace

TEST_CASE("unit_ball_volume: classic values and rejection of n < 1") {
  CHECK(unit_ball_volume(1) == 2.0);
  CHECK(unit_ball_volume(2) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-15));
  CHECK(unit_ball_volume(4) == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-15));
  CHECK(unit_ball_volume(5) == doctest::Approx(8.0 * kPi * kPi / 15.0).epsilon(1e-15));
  CHECK_THROWS_AS(unit_ball_volume(0), std::invalid_argument);
  CHECK_THROWS_AS(unit_ball_volume(-2), std::invalid_argument);
}

TEST_CASE("closed_form_spectrum matches independently recomputed formulas") {
  int m = 200;
  auto di = closed_form_spectrum(ClosedForm::interval_dirichlet, {2.0}, m);
  CHECK(oracle::max_abs_diff(di.lambda, oracle::interval_dirichlet_lambdas(2.0, m)) <=
        1e-10 * di.lambda.back());
  auto ne = closed_form_spectrum(ClosedForm::interval_neumann, {2.0}, m);
  CHECK(oracle::max_abs_diff(ne.lambda, oracle::interval_neumann_lambdas(2.0, m)) <=
        1e-10 * ne.lambda.back());
  auto mx = closed_form_spectrum(ClosedForm::interval_mixed, {2.0}, m);
  CHECK(oracle::max_abs_diff(mx.lambda, oracle::interval_mixed_lambdas(2.0, m)) <=
        1e-10 * mx.lambda.back());
  auto ci = closed_form_spectrum(ClosedForm::circle, {2.0}, m);
  CHECK(oracle::max_abs_diff(ci.lambda, oracle::circle_lambdas(2.0, m)) <=
        1e-10 * ci.lambda.back());
  // Rectangle: the tensor enumeration must come out globally sorted. Checked
  // against a brute-force enumeration for two aspect ratios.
  for (auto lens : {std::vector<double>{kPi, kPi}, std::vector<double>{1.0, 2.5}}) {
    auto re = closed_form_spectrum(ClosedForm::rectangle_dirichlet, lens, 500);
    auto want = oracle::rectangle_dirichlet_lambdas(lens[0], lens[1], 500);
    CHECK(oracle::max_abs_diff(re.lambda, want) <= 1e-10 * want.back());
    CHECK(re.dim == 2);
    CHECK(re.vol == doctest::Approx(lens[0] * lens[1]).epsilon(1e-14));
  }
  // Radicals are the square roots.
  for (int k = 0; k < m; ++k) CHECK(di.radical[k] == std::sqrt(di.lambda[k]));
}

TEST_CASE("make_spectrum carries dimension, volume and the numerical modes") {
  auto dec = solve(oracle::interval_spec(1.0, 100), 10);
  auto s = make_spectrum(dec);
  CHECK(s.dim == 1);
  CHECK(s.vol == 1.0);
  CHECK(s.count() == 10);
  CHECK(s.source == dec);
  CHECK(s.lambda == dec->lambda);
}

TEST_CASE("weyl_count counts modes at or below the level on both scales") {
  RadicalSpectrum s;
  s.lambda = {1.0, 4.0, 4.0, 9.0};
  s.radical = {1.0, 2.0, 2.0, 3.0};
  CHECK(weyl_count(s, 0.5, Scale::lambda) == 0);
  CHECK(weyl_count(s, 4.0, Scale::lambda) == 3);
  CHECK(weyl_count(s, 100.0, Scale::lambda) == 4);
  CHECK(weyl_count(s, 2.0, Scale::radical) == 3);
  CHECK(weyl_count(s, 2.9, Scale::radical) == 3);
}

TEST_CASE("lattice spot check: N(100) = 69 on the pi-square") {
  // Counted by the independent lattice enumeration...
  CHECK(oracle::rectangle_lattice_count(kPi, kPi, 100.0) == 69);
  // ...and by the library's counting function on the closed-form spectrum.
  auto s = closed_form_spectrum(ClosedForm::rectangle_dirichlet, {kPi, kPi}, 200);
  CHECK(weyl_count(s, 100.0, Scale::lambda) == 69);
  CHECK(weyl_count(s, 10.0, Scale::radical) == 69);
}

TEST_CASE("weyl_fit on the interval closed form reproduces the 1D law exactly") {
  auto s = closed_form_spectrum(ClosedForm::interval_dirichlet, {1.0}, 1200);
  auto fit = weyl_fit(s, 100, 1100);
  // N(lambda_k) = k and lambda_k = (pi k)^2, so the log-log fit is exact:
  // exponent 1/2, amplitude 1/pi.
  CHECK(std::abs(fit.exponent - 0.5) <= 1e-10);
  CHECK(oracle::rel_err(fit.constant, 1.0 / kPi) <= 1e-10);
  CHECK(oracle::rel_err(fit.predicted_constant, 1.0 / kPi) <= 1e-12);
}

TEST_CASE("weyl_fit on the square closed form approaches the 2D law") {
  auto s = closed_form_spectrum(ClosedForm::rectangle_dirichlet, {kPi, kPi}, 1600);
  // Window [370, 1529] covers lambda in [500, 2000].
  CHECK(s.lambda[369] == doctest::Approx(500.0).epsilon(1e-12));
  CHECK(s.lambda[1528] == doctest::Approx(2000.0).epsilon(1e-12));
  auto fit = weyl_fit(s, 370, 1529);
  CHECK(std::abs(fit.exponent - 1.0) <= 0.05);
  CHECK(oracle::rel_err(fit.predicted_constant, kPi / 4.0) <= 1e-12);
  CHECK(oracle::rel_err(fit.constant, kPi / 4.0) <= 0.15);
}

TEST_CASE("weyl_fit window validation") {
  auto s = closed_form_spectrum(ClosedForm::interval_dirichlet, {1.0}, 50);
  CHECK_THROWS_AS(weyl_fit(s, 0, 20), std::invalid_argument);
  CHECK_THROWS_AS(weyl_fit(s, 10, 51), std::invalid_argument);
  CHECK_THROWS_AS(weyl_fit(s, 10, 15), std::invalid_argument);  // fewer than 10 points
  auto ne = closed_form_spectrum(ClosedForm::interval_neumann, {1.0}, 50);
  CHECK_THROWS_AS(weyl_fit(ne, 1, 30), std::invalid_argument);  // zero mode in window
  RadicalSpectrum flat;
  flat.lambda.assign(20, 3.0);
  flat.radical.assign(20, std::sqrt(3.0));
  flat.dim = 1;
  flat.vol = 1.0;
  CHECK_THROWS_AS(weyl_fit(flat, 1, 20), std::domain_error);  // degenerate window
}

TEST_CASE("numerical interval spectrum fits the 1D Weyl law") {
  // Keep the window well below the grid cutoff: past k ~ n/5 the discrete
  // eigenvalues bend away from the continuum power law.
  auto dec = solve(oracle::interval_spec(1.0, 600), 100);
  auto s = make_spectrum(dec);
  auto fit = weyl_fit(s, 20, 80);
  CHECK(std::abs(fit.exponent - 0.5) <= 0.01);
  CHECK(oracle::rel_err(fit.constant, 1.0 / kPi) <= 0.02);
}

TEST_CASE("apply_function: spectral calculus on eigenmodes is scalar action") {
  auto dec = solve(oracle::interval_spec(1.0, 80), 80);
  Field f1 = dec->mode(2);
  // fn(r) = r^2 reproduces A phi = lambda phi.
  Field af = apply_function(*dec, [](double r) { return r * r; }, f1);
  double worst = 0.0;
  for (int i = 0; i < f1.size(); ++i)
    worst = std::max(worst, std::abs(af.v[i] - dec->lambda[2] * f1.v[i]));
  CHECK(worst <= 1e-9 * dec->lambda[2]);
  // fn = identity on the radical scale: radical_apply.
  Field rf = radical_apply(*dec, f1);
  worst = 0.0;
  for (int i = 0; i < f1.size(); ++i)
    worst = std::max(worst, std::abs(rf.v[i] - dec->radical[2] * f1.v[i]));
  CHECK(worst <= 1e-9 * dec->radical[2]);
}

TEST_CASE("radical_apply squares to the Laplacian on the resolved span") {
  auto dom = build_domain(oracle::interval_spec(1.0, 90));
  auto op = assemble_laplacian(dom);
  auto dec = std::make_shared<SpectralDecomposition>(eigendecompose(op, 90));
  Field f = oracle::random_field(dom, 55);
  Field rrf = radical_apply(*dec, radical_apply(*dec, f));
  std::vector<double> af(90, 0.0);
  kernels::matvec(op->A, 90, f.v.data(), af.data());
  double scale = op->norm_inf * oracle::max_abs(f.v);
  CHECK(oracle::max_abs_diff(rrf.v, af) <= 1e-8 * scale);
}

TEST_CASE("heat-trace style functional calculus stays bounded") {
  auto dec = solve(oracle::interval_spec(1.0, 60), 60);
  Field f = oracle::random_field(dec->dom, 91);
  Field g = apply_function(*dec, [](double r) { return std::exp(-r); }, f);
  CHECK(oracle::max_abs(g.v) <= 60.0 * oracle::max_abs(f.v));
  // Non-finite scalar values are rejected with the offending mode named.
  CHECK_THROWS_AS(apply_function(*dec, [](double r) { return 1.0 / (r - r); }, f),
                  std::invalid_argument);
}

TEST_CASE("pointwise_radical is the literal node-wise square root") {
  auto dom = build_domain(oracle::interval_spec(1.0, 40));
  auto op = assemble_laplacian(dom);
  Field f = oracle::random_field(dom, 12);
  Field pr = pointwise_radical(f, *op);
  std::vector<double> af(40, 0.0);
  kernels::matvec(op->A, 40, f.v.data(), af.data());
  for (int i = 0; i < 40; ++i) CHECK(pr.v[i] == std::sqrt(std::abs(af[i])));
}

TEST_CASE("pointwise_gap: the diagnostic differs from the spectral operator") {
  // On an eigenmode the pointwise rule gives sqrt(lambda |phi|), the spectral
  // one sqrt(lambda) phi; they cannot agree where |phi| is small.
  auto dec = solve(oracle::interval_spec(1.0, 120), 120);
  Field f = dec->mode(0);
  double gap = pointwise_gap(*dec, f);
  Field spec_side = radical_apply(*dec, f);
  Field point_side = pointwise_radical(f, *dec->op);
  CHECK(gap == doctest::Approx(oracle::max_abs_diff(spec_side.v, point_side.v)).epsilon(1e-12));
  CHECK(gap > 0.1 * dec->radical[0] * oracle::max_abs(f.v));
}
