// Command-line front end: canned experiment sweeps, estimation from
// measurement files, and a fast self-check.
//
// Exit codes: 0 success, 2 usage/config error, 3 runtime numeric failure.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "widelin/estimators.hpp"
#include "widelin/experiments.hpp"
#include "widelin/io.hpp"
#include "widelin/measurement.hpp"

namespace fs = std::filesystem;
using namespace widelin;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct CommonOpts {
  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 1;
  std::int64_t trials = -1;  // -1: command default
  int workers = 0;           // 0: machine parallelism
};

fs::path resolve_output_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("WIDELIN_OUTPUT")) return env;
  return ".";
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i)
    out.push_back(lo + (hi - lo) * i / static_cast<double>(n - 1));
  return out;
}

std::vector<double> logspace(double lo, double hi, int per_decade) {
  std::vector<double> out;
  const double l0 = std::log10(lo), l1 = std::log10(hi);
  const int n = static_cast<int>(std::lround((l1 - l0) * per_decade)) + 1;
  for (int i = 0; i < n; ++i)
    out.push_back(std::pow(10.0, l0 + (l1 - l0) * i / (n - 1.0)));
  return out;
}

// Config file values are applied first, then CLI overrides win.
void apply_config_file(const CommonOpts& opts, SweepConfig& cfg) {
  if (opts.config_path.empty()) return;
  const auto kv = read_config(opts.config_path);
  static const std::vector<std::string> known = {
      "trials", "seed",   "workers", "n_y",        "n_h",
      "omega1", "omega2", "x1",      "x2",         "t_s",
      "sigma_a2", "sigma_phi2", "noise_scale", "zero_noise"};
  for (const auto& [key, value] : kv) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError("unknown config key: " + key);
    if (key == "trials")
      cfg.trials = std::stoll(value);
    else if (key == "seed")
      cfg.master_seed = std::stoull(value);
    else if (key == "workers")
      cfg.workers = std::stoi(value);
    else
      cfg.fixed_params[key] = std::stod(value);
  }
}

void apply_cli_overrides(const CommonOpts& opts, SweepConfig& cfg) {
  cfg.master_seed = opts.seed;
  if (opts.trials >= 0) cfg.trials = opts.trials;
  cfg.workers = opts.workers;
}

int run_sweep_command(bool example1, const CommonOpts& opts,
                      const std::string& sweep) {
  SweepConfig cfg;
  if (example1) {
    cfg.sweep_variable = SweepVariable::kRho;
    cfg.grid = linspace(0.0, 1.0, 21);
    cfg.trials = 100000;
  } else if (sweep == "mag") {
    cfg.sweep_variable = SweepVariable::kSigmaA2;
    cfg.grid = logspace(1e-5, 1.0, 6);
    cfg.trials = 20000;
  } else if (sweep == "phase") {
    cfg.sweep_variable = SweepVariable::kSigmaPhi2;
    cfg.grid = logspace(1e-6, 1e-1, 6);
    cfg.trials = 20000;
  } else {
    throw ValidationError("--sweep must be 'mag' or 'phase'");
  }
  apply_config_file(opts, cfg);
  apply_cli_overrides(opts, cfg);
  cfg.validate();

  const fs::path dir = resolve_output_dir(opts.output_dir);
  fs::create_directories(dir);

  if (example1) {
    const SweepResult res = run_example1(cfg);
    write_sweep_dat(dir / "example1_mse.dat", res);
    write_sweep_csv(dir / "example1_mse.csv", res, "rho");
    std::cout << "wrote " << (dir / "example1_mse.dat").string() << " and .csv ("
              << res.rows.size() << " sweep points)\n";
  } else {
    const SweepResult res = run_example2(cfg);
    const std::string stem = "example2_" + sweep + "_bmse";
    const std::string sweep_name =
        sweep == "mag" ? "sigma_a2" : "sigma_phi2";
    write_sweep_dat(dir / (stem + ".dat"), res);
    write_sweep_csv(dir / (stem + ".csv"), res, sweep_name);
    std::cout << "wrote " << (dir / (stem + ".dat")).string() << " and .csv ("
              << res.rows.size() << " sweep points)\n";
  }
  return kExitOk;
}

int run_estimate(const CommonOpts& opts, const std::string& input,
                 const std::string& method, Index n_h) {
  const MeasurementFile file = read_measurement_csv(input);
  const Index n_y = static_cast<Index>(file.rows.size());
  if (n_h <= 0) throw ValidationError("--nh is required and must be positive");
  if (n_h > 2 * n_y - 1)
    throw ValidationError(
        "n_h exceeds 2*n_y - 1: not identifiable from " +
        std::to_string(n_y) + " complex measurements");

  const double t_s = 1.0;
  const double y0 = file.y0();
  const auto polar = file.polar();
  const RVec sa2 = file.sigma_a2();
  const RVec sp2 = file.sigma_phi2();

  EstimateReport rep{EstimatorId::kIdft, RVec(), CVec(), std::nullopt};
  if (method == "idft") {
    rep = idft_estimator(y0, polar, t_s, n_h);
  } else if (method == "wlls") {
    // Statistics-free method: bare DFT model without the attenuation
    // diagonal derived from the phase-noise variances.
    auto [model, stats, y] = build_example2_model(
        y0, polar, t_s, n_h, sa2, sp2, StatsSource::kMeasurements);
    const ComplexLinearModel plain(dft_submatrix(n_y, n_h, 2 * n_y - 1));
    rep = wlls(plain, y);
  } else if (method == "bwlue") {
    auto [model, stats, y] = build_example2_model(
        y0, polar, t_s, n_h, sa2, sp2, StatsSource::kMeasurements);
    rep = bwlue_real(model, stats, y);
  } else if (method == "twostep") {
    rep = two_step_estimator(y0, polar, t_s, n_h, sa2, sp2);
  } else {
    throw ValidationError("--method must be one of idft|wlls|bwlue|twostep");
  }

  const fs::path dir = resolve_output_dir(opts.output_dir);
  fs::create_directories(dir);
  const fs::path out = dir / "h_estimate.csv";
  std::ofstream os(out);
  os << "n,h_hat" << (rep.covariance ? ",std_dev" : "") << "\n";
  for (Index n = 0; n < rep.x_real.size(); ++n) {
    os << n << ',' << format_full(rep.x_real[n]);
    if (rep.covariance)
      os << ',' << format_full(std::sqrt((*rep.covariance)(n, n)));
    os << '\n';
  }
  std::cout << "wrote " << out.string() << " (" << method << ", n_h=" << n_h
            << ")\n";
  return kExitOk;
}

// Fast invariant suite: the estimator equivalence lattice plus constraint
// checks on random instances. `inject_fault` perturbs a named estimator to
// prove the checks can fail loudly.
int run_check(std::uint64_t seed, const std::string& inject_fault) {
  Rng rng(seed);
  auto rand_cplx = [&](Index r, Index c) {
    CMat m(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j)
        m(i, j) = Complex(rng.gaussian(), rng.gaussian());
    return m;
  };
  auto rand_stats = [&](Index n) {
    RMat b(2 * n, 2 * n);
    for (Index i = 0; i < 2 * n; ++i)
      for (Index j = 0; j < 2 * n; ++j) b(i, j) = rng.gaussian();
    const RMat c_r = b * b.transpose() + 0.1 * RMat::Identity(2 * n, 2 * n);
    const Complex im(0, 1);
    CMat t(2 * n, 2 * n);
    t << CMat::Identity(n, n), im * CMat::Identity(n, n),
        CMat::Identity(n, n), -im * CMat::Identity(n, n);
    const CMat aug = t * c_r.cast<Complex>() * t.adjoint();
    return NoiseStats(aug.topLeftCorner(n, n), aug.topRightCorner(n, n));
  };

  struct Check {
    std::string name;
    bool ok;
  };
  std::vector<Check> checks;
  auto run = [&](const std::string& name, auto&& fn) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception&) {
      ok = false;
    }
    checks.push_back({name, ok});
  };

  const int reps = 20;
  auto max_over = [&](auto&& fn) {
    double worst = 0.0;
    for (int i = 0; i < reps; ++i) {
      const Index n_y = 3 + i % 6;
      const Index n_x = 1 + i % n_y;
      const ComplexLinearModel model(rand_cplx(n_y, n_x));
      const NoiseStats stats = rand_stats(n_y);
      const CVec y = rand_cplx(n_y, 1);
      worst = std::max(worst, fn(model, stats, y));
    }
    return worst;
  };
  const double fault = inject_fault.empty() ? 0.0 : 1e-3;
  auto wlls_maybe_faulty = [&](const ComplexLinearModel& m, const CVec& y) {
    RVec x = wlls(m, y).x_real;
    if (inject_fault == "wlls") x[0] += fault * (1.0 + x.norm());
    return x;
  };

  run("bwlue_real == real_composite_blue", [&] {
    return max_over([](const auto& m, const auto& s, const auto& y) {
      return (bwlue_real(m, s, y).x_real -
              real_composite_blue(m, s, y).x_real)
          .norm();
    }) < tol::equiv * 10;
  });
  run("bwlue_real(Caug=I) == wlls", [&] {
    return max_over([&](const auto& m, const auto&, const CVec& y) {
      return (bwlue_real(m, NoiseStats::white(m.n_y()), y).x_real -
              wlls_maybe_faulty(m, y))
          .norm();
    }) < tol::equiv * 10;
  });
  run("wwlls(W=I) == wlls", [&] {
    return max_over([&](const auto& m, const auto&, const CVec& y) {
      const WeightSpec w(CMat::Identity(m.n_y(), m.n_y()));
      return (wwlls(m, w, y).x_real - wlls_maybe_faulty(m, y)).norm();
    }) < tol::equiv * 10;
  });
  run("bwlue_standard(proper) == blue", [&] {
    double worst = 0.0;
    for (int i = 0; i < reps; ++i) {
      const Index n_y = 4 + i % 5;
      const Index n_x = 1 + i % (n_y - 1);
      const ComplexLinearModel model(rand_cplx(n_y, n_x));
      const CMat g = rand_cplx(n_y, n_y + 2);
      const NoiseStats stats = NoiseStats::proper(
          g * g.adjoint() + 0.1 * CMat::Identity(n_y, n_y));
      const CVec y = rand_cplx(n_y, 1);
      worst = std::max(worst, (bwlue_standard(model, stats, y).x_complex -
                               blue(model, stats, y).x_complex)
                                  .norm());
    }
    return worst < tol::equiv * 10;
  });
  run("blue(C=I) == ls", [&] {
    return max_over([](const auto& m, const auto&, const CVec& y) {
      return (blue(m, NoiseStats::white(m.n_y()), y).x_complex -
              ls(m, y).x_complex)
          .norm();
    }) < tol::equiv * 10;
  });
  run("G_BW * Htilde == I", [&] {
    return max_over([](const auto& m, const auto& s, const auto&) {
      const CMat g = bwlue_real_operator(m, s);
      const CMat ht = stack_conjugate(m.h()).h_tilde;
      return (g * ht - CMat::Identity(m.n_x(), m.n_x())).norm();
    }) < tol::equiv * 10;
  });

  bool all_ok = true;
  for (const auto& c : checks) {
    std::cout << (c.ok ? "PASS  " : "FAIL  ") << c.name << '\n';
    all_ok &= c.ok;
  }
  return all_ok ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"widely linear estimation toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string sweep, method = "bwlue", input, inject_fault;
  Index n_h = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "config file (key = value)");
    cmd->add_option("--seed", opts.seed, "master seed");
    cmd->add_option("--trials", opts.trials, "Monte-Carlo trials");
    cmd->add_option("--workers", opts.workers,
                    "worker threads (0 = machine parallelism)");
    cmd->add_option("--output", opts.output_dir,
                    "output directory (or WIDELIN_OUTPUT)");
  };

  CLI::App* ex1 = app.add_subcommand("example1",
                                     "two-exponential magnitude estimation "
                                     "swept over the noise impropriety");
  add_common(ex1);

  CLI::App* ex2 = app.add_subcommand(
      "example2", "impulse-response identification from polar measurements");
  add_common(ex2);
  ex2->add_option("--sweep", sweep, "mag | phase")->required();

  CLI::App* est = app.add_subcommand(
      "estimate", "estimate an impulse response from a measurement CSV");
  add_common(est);
  est->add_option("input", input, "measurement CSV")->required();
  est->add_option("--nh", n_h, "impulse response length")->required();
  est->add_option("--method", method, "idft | wlls | bwlue | twostep");

  CLI::App* chk =
      app.add_subcommand("check", "run the fast invariant suite");
  chk->add_option("--seed", opts.seed, "master seed");
  chk->add_option("--inject-fault", inject_fault,
                  "perturb a named estimator (test hook)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (ex1->parsed()) return run_sweep_command(true, opts, "");
    if (ex2->parsed()) return run_sweep_command(false, opts, sweep);
    if (est->parsed()) return run_estimate(opts, input, method, n_h);
    if (chk->parsed()) return run_check(opts.seed, inject_fault);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
