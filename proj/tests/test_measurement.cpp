#include "doctest.h"

#include "helpers.hpp"
#include "widelin/estimators.hpp"
#include "widelin/measurement.hpp"

#include <cmath>
#include <numbers>

using namespace widelin;
using namespace widelin::testing;

namespace {

RVec lowpass_response(Rng& rng, Index n_h = 12) {
  const RVec fir = (RVec(4) << 0.0881, 0.4408, 0.4408, 0.0881).finished();
  RVec h = RVec::Zero(n_h);
  for (Index i = 0; i < n_h - 3; ++i) {
    const double s = rng.gaussian();
    for (Index q = 0; q < 4; ++q) h[i + q] += s * fir[q];
  }
  return h;
}

}  // namespace

TEST_CASE("exp_model_matrix") {
  SUBCASE("zero frequency gives an all-ones column") {
    const CMat h = exp_model_matrix({0.0}, 5);
    CHECK((h - CMat::Ones(5, 1)).norm() < 1e-15);
  }
  SUBCASE("first row uses k = 1") {
    const CMat h = exp_model_matrix({0.1, 0.2}, 20);
    CHECK(h.rows() == 20);
    CHECK(std::abs(h(0, 0) - std::polar(1.0, 0.1)) < 1e-15);
    CHECK(std::abs(h(19, 1) - std::polar(1.0, 0.2 * 20)) < 1e-14);
  }
  SUBCASE("omega = pi alternates sign") {
    const CMat h = exp_model_matrix({std::numbers::pi}, 2);
    CHECK(std::abs(h(0, 0) - Complex(-1, 0)) < 1e-14);
    CHECK(std::abs(h(1, 0) - Complex(1, 0)) < 1e-13);
  }
}

TEST_CASE("gen_improper_noise endpoints") {
  Rng rng(21);
  const CVec real_only = gen_improper_noise(ImproperNoiseSpec(0.0, 100), rng);
  CHECK(real_only.imag().norm() == 0.0);
  const CVec imag_only = gen_improper_noise(ImproperNoiseSpec(1.0, 100), rng);
  CHECK(imag_only.real().norm() == 0.0);
}

TEST_CASE("gen_improper_noise is proper at rho = 1/sqrt(2)") {
  Rng rng(22);
  const ImproperNoiseSpec spec(1.0 / std::sqrt(2.0), 1);
  const std::int64_t draws = 1000000;
  Complex pseudo(0, 0);
  for (std::int64_t i = 0; i < draws; ++i) {
    const CVec n = gen_improper_noise(spec, rng);
    pseudo += n[0] * n[0];
  }
  pseudo /= static_cast<double>(draws);
  // Var(n^2) per draw is O(1), so 4 standard errors is about 4/sqrt(N).
  const double band = 4.0 / std::sqrt(static_cast<double>(draws));
  CHECK(std::abs(pseudo.real()) < band);
  CHECK(std::abs(pseudo.imag()) < band);
}

TEST_CASE("converted_noise_stats closed forms") {
  SUBCASE("no phase noise collapses the formulas") {
    const auto cs = converted_noise_stats(2.0, 0.4, 1e-3, 0.0);
    CHECK(cs.alpha == 1.0);
    CHECK(cs.beta == 1.0);
    CHECK(cs.sigma2 == doctest::Approx(1e-3));
    // The formula cancels A^2 against itself, leaving roundoff at the
    // scale of A^2 * eps.
    CHECK(std::abs(cs.pseudo_sigma2 - std::polar(1e-3, 0.8)) < 1e-12);
  }
  SUBCASE("zero magnitude") {
    const auto cs = converted_noise_stats(0.0, 0.25, 1e-2, 0.3);
    CHECK(cs.sigma2 == doctest::Approx(1e-2));
    CHECK(std::abs(cs.pseudo_sigma2 - std::polar(cs.beta * 1e-2, 0.5)) <
          1e-15);
  }
  SUBCASE("beta equals alpha to the fourth") {
    for (double s : {1e-3, 0.05, 0.4, 2.0}) {
      const auto cs = converted_noise_stats(1.0, 0.0, 0.0, s);
      CHECK(cs.beta == doctest::Approx(std::pow(cs.alpha, 4)).epsilon(1e-14));
    }
  }
}

TEST_CASE("converted_noise_stats matches Monte-Carlo moments") {
  // Moment oracle in the regime where the zero-mean magnitude-noise
  // approximation is valid.
  Rng rng(23);
  const double a = 1.0, phi = 0.0, sa2 = 1e-4, sp2 = 0.1;
  const auto cs = converted_noise_stats(a, phi, sa2, sp2);
  const std::int64_t draws = 1000000;
  Complex mean(0, 0);
  std::vector<Complex> samples;
  samples.reserve(draws);
  for (std::int64_t i = 0; i < draws; ++i) {
    const double ya = a + std::sqrt(sa2) * rng.gaussian();
    const double yphi = phi + std::sqrt(sp2) * rng.gaussian();
    const Complex y = std::polar(ya, yphi);
    samples.push_back(y);
    mean += y;
  }
  mean /= static_cast<double>(draws);
  double var = 0.0;
  Complex pvar(0, 0);
  for (const Complex& y : samples) {
    var += std::norm(y - mean);
    pvar += (y - mean) * (y - mean);
  }
  var /= static_cast<double>(draws);
  pvar /= static_cast<double>(draws);
  CHECK(std::abs(var - cs.sigma2) / cs.sigma2 < 0.01);
  CHECK(std::abs(pvar - cs.pseudo_sigma2) / std::abs(cs.pseudo_sigma2) < 0.01);
}

TEST_CASE("gen_polar_measurements") {
  Rng rng(24);
  const RVec h = lowpass_response(rng);
  const Index n_y = 10;
  SUBCASE("zero noise reproduces the true response exactly") {
    auto [y0, polar] = gen_polar_measurements(h, 1.0, RVec::Zero(n_y),
                                              RVec::Zero(n_y), rng);
    auto [a, phi] = true_polar_response(h, 1.0, n_y);
    CHECK(y0 == doctest::Approx(a[0]).epsilon(1e-14));
    for (const auto& m : polar) {
      CHECK(m.y_a == doctest::Approx(a[m.k]).epsilon(1e-12));
      CHECK(m.y_phi == doctest::Approx(phi[m.k]).epsilon(1e-10));
    }
  }
  SUBCASE("magnitude truncation keeps samples nonnegative") {
    const RVec zero = RVec::Zero(3);
    const RVec sa2 = RVec::Constant(4, 1e-2);
    const RVec sp2 = RVec::Zero(4);
    int truncated = 0;
    for (int it = 0; it < 500; ++it) {
      auto [y0, polar] = gen_polar_measurements(zero, 1.0, sa2, sp2, rng);
      for (const auto& m : polar) {
        CHECK(m.y_a >= 0.0);
        if (m.y_a == 0.0) ++truncated;
      }
    }
    // With A = 0 roughly half of the draws are truncated.
    CHECK(truncated > 500);
    CHECK(truncated < 1000);
  }
}

TEST_CASE("build_example2_model") {
  Rng rng(25);
  const RVec h = lowpass_response(rng);
  const Index n_y = 10, n_h = 12;
  const RVec sa2 = RVec::Constant(n_y, 1e-4);
  RVec sp2 = RVec::Constant(n_y, 1e-2);
  sp2[0] = 0.0;

  SUBCASE("zero phase noise gives D = I") {
    auto [y0, polar] =
        gen_polar_measurements(h, 1.0, sa2, RVec::Zero(n_y), rng);
    auto [model, stats, y] = build_example2_model(
        y0, polar, 1.0, n_h, sa2, RVec::Zero(n_y), StatsSource::kMeasurements);
    CHECK((model.h() - dft_submatrix(n_y, n_h, 2 * n_y - 1)).norm() < 1e-14);
  }
  SUBCASE("stats from a noiseless draw equal the bound model") {
    auto [y0, polar] =
        gen_polar_measurements(h, 1.0, RVec::Zero(n_y), RVec::Zero(n_y), rng);
    auto [a, phi] = true_polar_response(h, 1.0, n_y);
    auto [m1, s1, y1] = build_example2_model(y0, polar, 1.0, n_h, sa2, sp2,
                                             StatsSource::kMeasurements);
    auto [m2, s2, y2] = build_example2_model(
        y0, polar, 1.0, n_h, sa2, sp2, StatsSource::kProvidedResponse, a, phi);
    CHECK((s1.cov() - s2.cov()).norm() < 1e-10);
    CHECK((s1.pseudo_cov() - s2.pseudo_cov()).norm() < 1e-10);
    CHECK((m1.h() - m2.h()).norm() < 1e-12);
  }
  SUBCASE("noisy model estimates stay close to truth at small noise") {
    auto [y0, polar] = gen_polar_measurements(h, 1.0, RVec::Constant(n_y, 1e-10),
                                              RVec::Constant(n_y, 1e-10), rng);
    auto [model, stats, y] = build_example2_model(
        y0, polar, 1.0, n_h, RVec::Constant(n_y, 1e-10),
        RVec::Constant(n_y, 1e-10), StatsSource::kMeasurements);
    CHECK(rel_diff(bwlue_real(model, stats, y).x_real, h) < 1e-4);
  }
}

TEST_CASE("dc_regularize") {
  Rng rng(26);
  const RVec h = lowpass_response(rng);
  const Index n_y = 10, n_h = 12;
  const RVec sa2 = RVec::Constant(n_y, 1e-4);
  RVec sp2 = RVec::Constant(n_y, 1e-2);
  sp2[0] = 0.0;
  auto [y0, polar] = gen_polar_measurements(h, 1.0, sa2, sp2, rng);

  // Rebuild the un-regularized stats by hand for the tests below.
  auto [model, stats_reg, y] = build_example2_model(
      y0, polar, 1.0, n_h, sa2, sp2, StatsSource::kMeasurements);
  CMat cov = stats_reg.cov();
  CMat pcov = stats_reg.pseudo_cov();
  cov(0, 0) = Complex(sa2[0], 0);
  pcov(0, 0) = Complex(sa2[0], 0);
  const NoiseStats raw(cov, pcov);

  SUBCASE("stated rule: pseudo-variance at DC goes to zero") {
    const NoiseStats reg = dc_regularize(raw, model);
    CHECK(std::abs(reg.pseudo_cov()(0, 0)) == 0.0);
    CHECK(reg.cov()(0, 0).real() == doctest::Approx(sa2[0]));
  }
  SUBCASE("estimate is invariant to the regularization constant") {
    const NoiseStats reg1 = dc_regularize(raw, model, 1.0);
    const NoiseStats reg7 = dc_regularize(raw, model, 7.0);
    const RVec x1 = bwlue_real(model, reg1, y).x_real;
    const RVec x7 = bwlue_real(model, reg7, y).x_real;
    CHECK(rel_diff(x1, x7) < tol::equiv);
    // And matches the composite-domain estimate with arbitrary row weight.
    const RVec xc = real_composite_blue(model, reg7, y).x_real;
    CHECK(rel_diff(x1, xc) < tol::equiv);
  }
  SUBCASE("regularized augmented covariance is invertible") {
    const NoiseStats reg = dc_regularize(raw, model);
    const CMat aug = build_augmented_covariance(reg).blocks;
    CHECK_NOTHROW(hermitian_solve(
        aug, CMat(CMat::Identity(aug.rows(), aug.cols())), "augmented"));
  }
  SUBCASE("refuses a model whose DC row has imaginary content") {
    CMat bad = model.h();
    bad(0, 1) += Complex(0, 0.5);
    CHECK_THROWS_AS(dc_regularize(raw, ComplexLinearModel(bad)),
                    ValidationError);
  }
}

TEST_CASE("idft_estimator") {
  Rng rng(27);
  const RVec h = lowpass_response(rng);
  const Index n_y = 10, n_h = 12;
  SUBCASE("noiseless measurements are inverted exactly") {
    auto [y0, polar] =
        gen_polar_measurements(h, 1.0, RVec::Zero(n_y), RVec::Zero(n_y), rng);
    const auto rep = idft_estimator(y0, polar, 1.0, n_h);
    CHECK(rel_diff(rep.x_real, h) < 1e-10);
  }
  SUBCASE("dft consistency: F_ds h equals the zero-padded DFT of h") {
    const Index n_d = 2 * n_y - 1;
    const CMat f_ds = dft_submatrix(n_d, n_h, n_d);
    const CVec via_matrix = f_ds * h.cast<Complex>();
    for (Index k = 0; k < n_d; ++k) {
      Complex acc(0, 0);
      for (Index n = 0; n < n_h; ++n)
        acc += h[n] * std::polar(1.0, -2.0 * std::numbers::pi *
                                          static_cast<double>(k * n) /
                                          static_cast<double>(n_d));
      CHECK(std::abs(via_matrix[k] - acc) < 1e-12);
    }
    // Single-sided matrix is the top of the double-sided one.
    CHECK((dft_submatrix(n_y, n_h, n_d) - f_ds.topRows(n_y)).norm() == 0.0);
  }
  SUBCASE("phase noise makes the estimator biased") {
    // Mean estimate shrinks towards alpha * h when D is ignored.
    const double sp = 0.5;
    RVec sp2 = RVec::Constant(n_y, sp);
    sp2[0] = 0.0;
    const RVec sa2 = RVec::Constant(n_y, 1e-6);
    RVec mean = RVec::Zero(n_h);
    const int draws = 4000;
    for (int i = 0; i < draws; ++i) {
      auto [y0, polar] = gen_polar_measurements(h, 1.0, sa2, sp2, rng);
      mean += idft_estimator(y0, polar, 1.0, n_h).x_real;
    }
    mean /= draws;
    CHECK((mean - h).norm() / h.norm() > 0.05);
  }
}

TEST_CASE("two_step_estimator") {
  Rng rng(28);
  const RVec h = lowpass_response(rng);
  const Index n_y = 10, n_h = 12;
  SUBCASE("noiseless recovery") {
    auto [y0, polar] =
        gen_polar_measurements(h, 1.0, RVec::Zero(n_y), RVec::Zero(n_y), rng);
    const auto rep = two_step_estimator(y0, polar, 1.0, n_h,
                                        RVec::Constant(n_y, 1e-12),
                                        RVec::Constant(n_y, 1e-12));
    CHECK(rel_diff(rep.x_real, h) < 1e-6);
  }
  SUBCASE("converges to the single-step estimate as noise vanishes") {
    const RVec sa2 = RVec::Constant(n_y, 1e-8);
    RVec sp2 = RVec::Constant(n_y, 1e-8);
    sp2[0] = 0.0;
    auto [y0, polar] = gen_polar_measurements(h, 1.0, sa2, sp2, rng);
    auto [model, stats, y] = build_example2_model(
        y0, polar, 1.0, n_h, sa2, sp2, StatsSource::kMeasurements);
    const RVec single = bwlue_real(model, stats, y).x_real;
    const RVec two = two_step_estimator(y0, polar, 1.0, n_h, sa2, sp2).x_real;
    CHECK(rel_diff(two, single) < 1e-6);
  }
}
