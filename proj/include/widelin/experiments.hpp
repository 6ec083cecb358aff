#ifndef WIDELIN_EXPERIMENTS_HPP
#define WIDELIN_EXPERIMENTS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "widelin/rng.hpp"
#include "widelin/types.hpp"

namespace widelin {

enum class SweepVariable { kRho, kSigmaA2, kSigmaPhi2 };

struct SweepConfig {
  SweepVariable sweep_variable;
  std::vector<double> grid;      // nonempty, strictly increasing
  std::int64_t trials = 1;
  std::uint64_t master_seed = 0;
  int workers = 1;               // <= 0 means hardware concurrency
  std::map<std::string, double> fixed_params;

  void validate() const;
  double fixed(const std::string& key, double fallback) const;
};

struct SweepRow {
  double sweep_value;
  std::vector<double> mse;        // per estimator, averaged over components
  std::vector<double> std_error;  // Monte-Carlo standard error of the mean
};

struct SweepResult {
  std::vector<std::string> estimator_labels;
  std::vector<SweepRow> rows;
};

struct MonteCarloStats {
  std::vector<double> mean;       // mean squared error per estimator
  std::vector<double> std_error;
  std::int64_t failed_trials = 0;
};

// Runs `trials` independent trials on `workers` threads. Per-trial results
// are stored by trial index and folded in index order, so the reduction is
// bit-identical for any worker count. Trials that throw are counted as
// failed; a failure rate above 0.1% aborts with a diagnostic.
MonteCarloStats monte_carlo(const std::function<std::vector<double>(Rng&)>& trial,
                            std::size_t n_estimators, std::int64_t trials,
                            std::uint64_t master_seed, int workers);

// Example 1: two complex exponentials in tunably improper noise, six
// estimators
// swept over rho.
SweepResult run_example1(const SweepConfig& cfg);

// Example 2: impulse-response identification from polar measurements; five
// estimators (IDFT, WLLS, BWLUE-real, two-step, bound) swept over either
// sigma_a2 or sigma_phi2.
SweepResult run_example2(const SweepConfig& cfg);

}  // namespace widelin

#endif  // WIDELIN_EXPERIMENTS_HPP
