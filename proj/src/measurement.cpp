#include "widelin/measurement.hpp"

#include "widelin/estimators.hpp"

#include <cmath>
#include <numbers>

namespace widelin {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_2pi(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}
}  // namespace

ImproperNoiseSpec::ImproperNoiseSpec(double rho_, Index n_) : rho(rho_), n(n_) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw ValidationError("improper noise rho must lie in [0, 1]");
  if (n < 1) throw ValidationError("noise dimension must be positive");
}

CMat dft_submatrix(Index n_y, Index n_h, Index n_d) {
  if (n_y > n_d || n_h > n_d)
    throw ValidationError("DFT submatrix larger than the DFT matrix");
  CMat f(n_y, n_h);
  for (Index k = 0; k < n_y; ++k)
    for (Index l = 0; l < n_h; ++l)
      f(k, l) = std::polar(1.0, -kTwoPi * static_cast<double>(k * l) /
                                    static_cast<double>(n_d));
  return f;
}

CMat exp_model_matrix(const std::vector<double>& omegas, Index n_y) {
  if (n_y < 1) throw ValidationError("n_y must be at least 1");
  CMat h(n_y, static_cast<Index>(omegas.size()));
  for (Index k = 0; k < n_y; ++k)
    for (Index l = 0; l < h.cols(); ++l)
      h(k, l) = std::polar(1.0, omegas[static_cast<std::size_t>(l)] *
                                    static_cast<double>(k + 1));
  return h;
}

CVec gen_improper_noise(const ImproperNoiseSpec& spec, Rng& rng) {
  const RVec n_r = rng.gaussian_vector(spec.n);
  const RVec n_i = rng.gaussian_vector(spec.n);
  const double a = std::sqrt(1.0 - spec.rho * spec.rho);
  CVec n(spec.n);
  n.real() = a * n_r;
  n.imag() = spec.rho * n_i;
  return n;
}

NoiseStats improper_noise_stats(double rho, Index n) {
  // E[n n^H] = I, E[n n^T] = (1 - 2 rho^2) I.
  const double pseudo = 1.0 - 2.0 * rho * rho;
  return NoiseStats(CMat::Identity(n, n),
                    pseudo * CMat::Identity(n, n));
}

ConvertedStats converted_noise_stats(double a_k, double phi_k, double sigma_a2,
                                     double sigma_phi2) {
  if (a_k < 0.0 || sigma_a2 < 0.0 || sigma_phi2 < 0.0)
    throw ValidationError("converted_noise_stats: negative input");
  const double alpha = std::exp(-sigma_phi2 / 2.0);
  const double beta = std::exp(-2.0 * sigma_phi2);
  const double sigma2 = a_k * a_k * (1.0 - alpha * alpha) + sigma_a2;
  const Complex pseudo =
      std::polar(1.0, 2.0 * phi_k) *
      (beta * a_k * a_k + beta * sigma_a2 - a_k * a_k * alpha * alpha);
  return ConvertedStats{alpha, beta, sigma2, pseudo};
}

std::pair<RVec, RVec> true_polar_response(const RVec& h, double t_s,
                                          Index n_y) {
  const Index n_d = 2 * n_y - 1;
  const CMat f_ss = dft_submatrix(n_y, h.size(), n_d);
  const CVec resp = t_s * (f_ss * h.cast<Complex>());
  RVec a(n_y), phi(n_y);
  // DC response is real; keep its sign in a[0] with phi[0] = 0.
  a[0] = resp[0].real();
  phi[0] = 0.0;
  for (Index k = 1; k < n_y; ++k) {
    a[k] = std::abs(resp[k]);
    phi[k] = wrap_2pi(std::arg(resp[k]));
  }
  return {std::move(a), std::move(phi)};
}

std::pair<double, std::vector<PolarMeasurement>> gen_polar_measurements(
    const RVec& h, double t_s, const RVec& sigma_a2, const RVec& sigma_phi2,
    Rng& rng) {
  const Index n_y = sigma_a2.size();
  if (sigma_phi2.size() != n_y)
    throw ValidationError("sigma_a2 and sigma_phi2 lengths differ");
  if (n_y < 2) throw ValidationError("need at least one AC measurement");

  auto [a, phi] = true_polar_response(h, t_s, n_y);

  // DC: signed real value, plain Gaussian noise, no truncation.
  const double y0 = a[0] + std::sqrt(sigma_a2[0]) * rng.gaussian();

  std::vector<PolarMeasurement> polar;
  polar.reserve(static_cast<std::size_t>(n_y - 1));
  for (Index k = 1; k < n_y; ++k) {
    double y_a = a[k] + std::sqrt(sigma_a2[k]) * rng.gaussian();
    if (y_a < 0.0) y_a = 0.0;
    const double y_phi =
        wrap_2pi(phi[k] + std::sqrt(sigma_phi2[k]) * rng.gaussian());
    polar.push_back(PolarMeasurement{y_a, y_phi, k});
  }
  return {y0, std::move(polar)};
}

std::tuple<ComplexLinearModel, NoiseStats, CVec> build_example2_model(
    double y0, const std::vector<PolarMeasurement>& polar, double t_s,
    Index n_h, const RVec& sigma_a2, const RVec& sigma_phi2,
    StatsSource stats_source, const RVec& a_true, const RVec& phi_true) {
  const Index n_y = static_cast<Index>(polar.size()) + 1;
  if (sigma_a2.size() != n_y || sigma_phi2.size() != n_y)
    throw ValidationError("variance vectors do not match measurement count");
  if (stats_source == StatsSource::kProvidedResponse &&
      (a_true.size() != n_y || phi_true.size() != n_y))
    throw ValidationError("provided response does not match measurement count");
  const Index n_d = 2 * n_y - 1;
  if (n_h > n_d)
    throw ValidationError("n_h exceeds the number of real measurements");

  // Work in the 1/T_S-scaled domain: y' = y / T_S, so H = D F_ss and all
  // noise variances scale by 1/T_S^2. h comes out in natural units.
  const double s = 1.0 / t_s;
  const double s2 = s * s;

  CMat h_model = dft_submatrix(n_y, n_h, n_d);
  CVec y(n_y);
  y[0] = Complex(y0 * s, 0.0);
  CVec cov_diag(n_y), pcov_diag(n_y);
  cov_diag[0] = Complex(sigma_a2[0] * s2, 0.0);
  pcov_diag[0] = Complex(sigma_a2[0] * s2, 0.0);

  for (const PolarMeasurement& m : polar) {
    const Index k = m.k;
    const double a_k = stats_source == StatsSource::kProvidedResponse
                           ? a_true[k]
                           : m.y_a;
    const double phi_k = stats_source == StatsSource::kProvidedResponse
                             ? phi_true[k]
                             : m.y_phi;
    const ConvertedStats cs =
        converted_noise_stats(a_k, phi_k, sigma_a2[k], sigma_phi2[k]);
    h_model.row(k) *= cs.alpha;  // [D]_{k,k} = alpha_k, [D]_{0,0} = 1
    y[k] = std::polar(m.y_a, m.y_phi) * s;
    cov_diag[k] = Complex(cs.sigma2 * s2, 0.0);
    pcov_diag[k] = cs.pseudo_sigma2 * s2;
  }

  NoiseStats stats(cov_diag.asDiagonal(), pcov_diag.asDiagonal());
  ComplexLinearModel model(std::move(h_model));
  NoiseStats regularized = dc_regularize(stats, model);
  return {std::move(model), std::move(regularized), std::move(y)};
}

NoiseStats dc_regularize(const NoiseStats& stats,
                         const ComplexLinearModel& model,
                         double imag_var) {
  if (stats.size() != model.n_y())
    throw ValidationError("noise statistics size differs from model n_y");
  const double row_scale = model.h().row(0).norm();
  if (model.h().row(0).imag().cwiseAbs().maxCoeff() >
      tol::herm * std::max(1.0, row_scale))
    throw ValidationError(
        "dc_regularize: DC row of Im{H} is not zero; regularization would "
        "change the estimate");

  const double s0 = stats.cov()(0, 0).real();
  if (imag_var < 0.0) imag_var = 0.5 * s0;  // default: pseudo-variance -> 0
  // Keep the real-part variance at s0/2, set the (information-free)
  // imaginary-part variance to imag_var.
  CMat cov = stats.cov();
  CMat pcov = stats.pseudo_cov();
  cov(0, 0) = Complex(0.5 * s0 + imag_var, 0.0);
  pcov(0, 0) = Complex(0.5 * s0 - imag_var, 0.0);
  return NoiseStats(std::move(cov), std::move(pcov));
}

EstimateReport idft_estimator(double y0,
                              const std::vector<PolarMeasurement>& polar,
                              double t_s, Index n_h) {
  const Index n_y = static_cast<Index>(polar.size()) + 1;
  const Index n_d = 2 * n_y - 1;
  if (n_h > n_d)
    throw ValidationError("n_h exceeds the double-sided spectrum length");

  // Double-sided spectrum in the 1/T_S-scaled domain: DC, AC, then the
  // conjugate flip of the AC part.
  CVec y_ds(n_d);
  y_ds[0] = Complex(y0 / t_s, 0.0);
  for (const PolarMeasurement& m : polar) {
    const Complex v = std::polar(m.y_a, m.y_phi) / t_s;
    y_ds[m.k] = v;
    y_ds[n_d - m.k] = std::conj(v);
  }

  // Inverse DFT, then window to the first n_h samples.
  CVec h_full(n_d);
  for (Index n = 0; n < n_d; ++n) {
    Complex acc(0.0, 0.0);
    for (Index k = 0; k < n_d; ++k)
      acc += y_ds[k] * std::polar(1.0, kTwoPi * static_cast<double>(n * k) /
                                           static_cast<double>(n_d));
    h_full[n] = acc / static_cast<double>(n_d);
  }
  RVec h_hat = drop_imaginary(h_full.head(n_h), "idft");
  return EstimateReport{EstimatorId::kIdft, std::move(h_hat), CVec(),
                        std::nullopt};
}

EstimateReport two_step_estimator(double y0,
                                  const std::vector<PolarMeasurement>& polar,
                                  double t_s, Index n_h, const RVec& sigma_a2,
                                  const RVec& sigma_phi2) {
  // Step 1: WLLS on the measurement-domain model (D is known from the
  // phase-noise variances and is included).
  auto [model, stats_meas, y] =
      build_example2_model(y0, polar, t_s, n_h, sigma_a2, sigma_phi2,
                           StatsSource::kMeasurements);
  const EstimateReport step1 = wlls(model, y);

  // Transform the step-1 impulse response back to a frequency response and
  // evaluate the converted-measurement moments there.
  auto [a_hat, phi_hat] = true_polar_response(step1.x_real, t_s,
                                              static_cast<Index>(y.size()));
  a_hat[0] = std::abs(a_hat[0]);  // only the AC entries are used below

  auto [model2, stats2, y2] =
      build_example2_model(y0, polar, t_s, n_h, sigma_a2, sigma_phi2,
                           StatsSource::kProvidedResponse, a_hat, phi_hat);
  EstimateReport rep = bwlue_real(model2, stats2, y2);
  rep.estimator_id = EstimatorId::kTwoStep;
  return rep;
}

}  // namespace widelin
