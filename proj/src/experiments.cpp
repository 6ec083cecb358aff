#include "widelin/experiments.hpp"

#include "widelin/augmented.hpp"
#include "widelin/estimators.hpp"
#include "widelin/measurement.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace widelin {

void SweepConfig::validate() const {
  if (grid.empty()) throw ValidationError("sweep grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw ValidationError("sweep grid must be strictly increasing");
  if (trials < 1) throw ValidationError("trials must be at least 1");
}

double SweepConfig::fixed(const std::string& key, double fallback) const {
  auto it = fixed_params.find(key);
  return it == fixed_params.end() ? fallback : it->second;
}

MonteCarloStats monte_carlo(
    const std::function<std::vector<double>(Rng&)>& trial,
    std::size_t n_estimators, std::int64_t trials, std::uint64_t master_seed,
    int workers) {
  if (trials < 1) throw ValidationError("trials must be at least 1");
  if (workers <= 0)
    workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<int>(
      std::min<std::int64_t>(workers, trials));

  // Per-trial results indexed by trial number; folded in index order below
  // so the reduction does not depend on the schedule.
  std::vector<std::vector<double>> results(
      static_cast<std::size_t>(trials));
  std::atomic<std::int64_t> next{0};
  std::atomic<std::int64_t> failed{0};

  auto worker = [&] {
    for (;;) {
      const std::int64_t t = next.fetch_add(1);
      if (t >= trials) return;
      Rng rng = Rng::substream(master_seed, static_cast<std::uint64_t>(t));
      try {
        results[static_cast<std::size_t>(t)] = trial(rng);
      } catch (const std::exception&) {
        failed.fetch_add(1);
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  const std::int64_t n_failed = failed.load();
  if (static_cast<double>(n_failed) > 1e-3 * static_cast<double>(trials)) {
    std::ostringstream msg;
    msg << "trial failure rate too high: " << n_failed << " of " << trials;
    throw NearSingularError(msg.str());
  }

  std::vector<double> sum(n_estimators, 0.0), sum_sq(n_estimators, 0.0);
  std::int64_t n_ok = 0;
  for (const auto& r : results) {
    if (r.empty()) continue;  // failed trial, counted and excluded
    ++n_ok;
    for (std::size_t e = 0; e < n_estimators; ++e) {
      sum[e] += r[e];
      sum_sq[e] += r[e] * r[e];
    }
  }
  if (n_ok < 1) throw NearSingularError("all Monte-Carlo trials failed");

  MonteCarloStats out;
  out.failed_trials = n_failed;
  out.mean.resize(n_estimators);
  out.std_error.resize(n_estimators);
  const double n = static_cast<double>(n_ok);
  for (std::size_t e = 0; e < n_estimators; ++e) {
    out.mean[e] = sum[e] / n;
    const double var =
        n > 1 ? std::max(0.0, (sum_sq[e] / n - out.mean[e] * out.mean[e])) *
                    n / (n - 1)
              : 0.0;
    out.std_error[e] = std::sqrt(var / n);
  }
  return out;
}

namespace {

double mean_sq_error(const RVec& x_hat, const RVec& x_true) {
  return (x_hat - x_true).squaredNorm() /
         static_cast<double>(x_true.size());
}

double mean_sq_error(const CVec& x_hat, const RVec& x_true) {
  return (x_hat - x_true.cast<Complex>()).squaredNorm() /
         static_cast<double>(x_true.size());
}

}  // namespace

SweepResult run_example1(const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.sweep_variable != SweepVariable::kRho)
    throw ValidationError("example 1 sweeps rho");

  const Index n_y = static_cast<Index>(cfg.fixed("n_y", 20));
  const double omega1 = cfg.fixed("omega1", 0.1);
  const double omega2 = cfg.fixed("omega2", 0.2);
  RVec x_true(2);
  x_true << cfg.fixed("x1", 1.0), cfg.fixed("x2", 1.0);
  const double noise_scale = cfg.fixed("noise_scale", 1.0);

  const ComplexLinearModel model(exp_model_matrix({omega1, omega2}, n_y));

  SweepResult result;
  result.estimator_labels = {"ls",         "ls_real_part",
                             "wlls",       "bwlue_standard",
                             "bwlue_standard_real_part", "bwlue_real"};

  // At rho = 0 and rho = 1 the augmented noise covariance is exactly
  // singular (purely real / purely imaginary noise). Shrinking the assumed
  // pseudo-covariance by 1 - kPseudoShrink keeps every operator well posed;
  // the noise draws themselves are untouched, and the estimators weight the
  // near-noiseless directions so heavily that the endpoint MSE still drops
  // to the order of kPseudoShrink.
  constexpr double kPseudoShrink = 1e-6;

  for (double rho : cfg.grid) {
    const NoiseStats stats_exact = improper_noise_stats(rho, n_y);
    const NoiseStats stats(stats_exact.cov(),
                           (1.0 - kPseudoShrink) * stats_exact.pseudo_cov());

    // All six estimators are linear operators; factor once per sweep point.
    const CMat g_ls = ls_operator(model);
    const CMat g_wlls = wlls_operator(model);
    const CMat g_bws = bwlue_standard_operator(model, stats);
    const CMat g_bwr = bwlue_real_operator(model, stats);

    const CVec hx = model.h() * x_true.cast<Complex>();
    const ImproperNoiseSpec spec(rho, n_y);

    auto trial = [&](Rng& rng) {
      const CVec y = hx + noise_scale * gen_improper_noise(spec, rng);
      const CVec y_aug = augment(y);

      const CVec x_ls = g_ls * y;
      const CVec x_bws = g_bws * y_aug;
      const RVec x_wlls =
          drop_imaginary(g_wlls * y_aug, "wlls");
      const RVec x_bwr =
          drop_imaginary(g_bwr * y_aug, "bwlue_real");

      return std::vector<double>{
          mean_sq_error(x_ls, x_true),
          mean_sq_error(RVec(x_ls.real()), x_true),
          mean_sq_error(x_wlls, x_true),
          mean_sq_error(x_bws, x_true),
          mean_sq_error(RVec(x_bws.real()), x_true),
          mean_sq_error(x_bwr, x_true)};
    };

    MonteCarloStats stats_mc = monte_carlo(
        trial, result.estimator_labels.size(), cfg.trials, cfg.master_seed,
        cfg.workers);
    result.rows.push_back(
        SweepRow{rho, std::move(stats_mc.mean), std::move(stats_mc.std_error)});
  }
  return result;
}

SweepResult run_example2(const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.sweep_variable == SweepVariable::kRho)
    throw ValidationError("example 2 sweeps sigma_a2 or sigma_phi2");
  const bool sweep_mag = cfg.sweep_variable == SweepVariable::kSigmaA2;

  const Index n_h = static_cast<Index>(cfg.fixed("n_h", 12));
  const Index n_y = static_cast<Index>(cfg.fixed("n_y", 10));
  const double t_s = cfg.fixed("t_s", 1.0);
  const double sigma_a2_fixed = cfg.fixed("sigma_a2", 1e-4);
  const double sigma_phi2_fixed = cfg.fixed("sigma_phi2", 1e-1);
  const double zero_noise = cfg.fixed("zero_noise", 0.0);

  // Low-pass shaping filter for the random impulse responses.
  const RVec fir = (RVec(4) << 0.0881, 0.4408, 0.4408, 0.0881).finished();
  const Index n_seed = n_h - fir.size() + 1;
  if (n_seed < 1) throw ValidationError("n_h too small for the FIR shaping");

  SweepResult result;
  result.estimator_labels = {"idft", "wlls", "bwlue_real", "two_step",
                             "bound"};

  // The standalone WLLS column is statistics-free: its model matrix is the
  // bare DFT submatrix, without the phase-noise attenuation diagonal D
  // (whose entries derive from the phase-noise variances). The two-step
  // estimator's internal WLLS does include D.
  const ComplexLinearModel model_plain(
      dft_submatrix(n_y, n_h, 2 * n_y - 1));
  const CMat g_wlls = wlls_operator(model_plain);

  for (double v : cfg.grid) {
    RVec sigma_a2 = RVec::Constant(n_y, sweep_mag ? v : sigma_a2_fixed);
    RVec sigma_phi2 =
        RVec::Constant(n_y, sweep_mag ? sigma_phi2_fixed : v);
    sigma_phi2[0] = 0.0;  // DC is a real measurement, no phase
    if (zero_noise != 0.0) {
      // Effectively noiseless while keeping every covariance invertible.
      sigma_a2.setConstant(1e-30);
      sigma_phi2.setConstant(1e-30);
      sigma_phi2[0] = 0.0;
    }

    auto trial = [&, sigma_a2, sigma_phi2](Rng& rng) {
      // Random low-pass impulse response: 9 unit normals convolved with fir.
      const RVec seed = rng.gaussian_vector(n_seed);
      RVec h = RVec::Zero(n_h);
      for (Index i = 0; i < n_seed; ++i)
        for (Index q = 0; q < fir.size(); ++q) h[i + q] += seed[i] * fir[q];

      auto [y0, polar] =
          gen_polar_measurements(h, t_s, sigma_a2, sigma_phi2, rng);

      std::vector<double> err;
      err.reserve(5);
      err.push_back(
          mean_sq_error(idft_estimator(y0, polar, t_s, n_h).x_real, h));

      auto [model, stats_meas, y] = build_example2_model(
          y0, polar, t_s, n_h, sigma_a2, sigma_phi2,
          StatsSource::kMeasurements);
      err.push_back(mean_sq_error(
          drop_imaginary(g_wlls * augment(y), "wlls"), h));
      err.push_back(
          mean_sq_error(drop_imaginary(
                            bwlue_real_operator(model, stats_meas) * augment(y),
                            "bwlue_real"),
                        h));
      err.push_back(mean_sq_error(
          two_step_estimator(y0, polar, t_s, n_h, sigma_a2, sigma_phi2).x_real,
          h));

      // Performance bound: converted moments evaluated at the true response.
      auto [a_true, phi_true] = true_polar_response(h, t_s, n_y);
      auto [model_b, stats_b, y_b] = build_example2_model(
          y0, polar, t_s, n_h, sigma_a2, sigma_phi2,
          StatsSource::kProvidedResponse, a_true, phi_true);
      err.push_back(
          mean_sq_error(drop_imaginary(
                            bwlue_real_operator(model_b, stats_b) * augment(y_b),
                            "bound"),
                        h));
      return err;
    };

    MonteCarloStats stats_mc =
        monte_carlo(trial, result.estimator_labels.size(), cfg.trials,
                    cfg.master_seed, cfg.workers);
    result.rows.push_back(
        SweepRow{v, std::move(stats_mc.mean), std::move(stats_mc.std_error)});
  }
  return result;
}

}  // namespace widelin
