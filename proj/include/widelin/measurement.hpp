#ifndef WIDELIN_MEASUREMENT_HPP
#define WIDELIN_MEASUREMENT_HPP

#include <tuple>
#include <vector>

#include "widelin/augmented.hpp"
#include "widelin/rng.hpp"
#include "widelin/types.hpp"

namespace widelin {

// Tunably improper unit-power noise n = sqrt(1-rho^2) n_r + j rho n_i.
struct ImproperNoiseSpec {
  double rho;
  Index n;

  ImproperNoiseSpec(double rho_, Index n_);
};

// One magnitude/phase measurement at frequency index k >= 1.
struct PolarMeasurement {
  double y_a;    // magnitude sample, >= 0
  double y_phi;  // phase sample in [0, 2*pi)
  Index k;
};

// Converted-measurement moments of a polar measurement in Cartesian
// coordinates.
struct ConvertedStats {
  double alpha;            // E[cos(n_phi)] = exp(-sigma_phi^2 / 2)
  double beta;             // E[cos(2 n_phi)] = alpha^4
  double sigma2;           // variance of the Cartesian noise
  Complex pseudo_sigma2;   // pseudo-variance of the Cartesian noise
};

// DFT-based frequency measurement model y_ss ~ D F_ss h + n (working in
// the 1/T_S-scaled domain; h itself is in natural units either way).
struct FrequencyModel {
  CMat f_ss;      // first n_y rows, first n_h columns of the N_D-point DFT
  RVec d;         // diagonal of D: d[0] = 1, d[k] = alpha_k
  double t_s;
  Index n_h;
  Index n_y;

  Index n_d() const { return 2 * n_y - 1; }
};

enum class StatsSource { kMeasurements, kProvidedResponse };

// DFT matrix columns: the n_y x n_h north-west submatrix of the n_d-point
// DFT matrix, entries exp(-j 2 pi k l / n_d).
CMat dft_submatrix(Index n_y, Index n_h, Index n_d);

// Example-1 model matrix, [H]_{k,l} = exp(j Omega_l k), k = 1..n_y.
CMat exp_model_matrix(const std::vector<double>& omegas, Index n_y);

CVec gen_improper_noise(const ImproperNoiseSpec& spec, Rng& rng);

// Analytic second moments of the tunably improper noise for this rho:
// cov = I, pseudo_cov = (1 - 2 rho^2) I.
NoiseStats improper_noise_stats(double rho, Index n);

ConvertedStats converted_noise_stats(double a_k, double phi_k, double sigma_a2,
                                     double sigma_phi2);

// Forward-simulates the Example-2 measurement process for impulse response h:
// a real DC measurement plus n_y - 1 polar measurements with truncated
// Gaussian magnitude noise and wrapped Gaussian phase noise.
std::pair<double, std::vector<PolarMeasurement>> gen_polar_measurements(
    const RVec& h, double t_s, const RVec& sigma_a2, const RVec& sigma_phi2,
    Rng& rng);

// True magnitude/phase response of h on the measurement grid (DC entry is
// the signed real response; its phase slot is 0 or pi folded into A_0's sign
// handling by the caller).
std::pair<RVec, RVec> true_polar_response(const RVec& h, double t_s,
                                          Index n_y);

// Assembles the compact Example-2 model: H = D F_ss, diagonal converted
// noise statistics (DC-regularized), and the Cartesian measurement vector
// in the scaled domain. When stats_source is kProvidedResponse the moments
// are evaluated at (a_true, phi_true) instead of the measurements.
std::tuple<ComplexLinearModel, NoiseStats, CVec> build_example2_model(
    double y0, const std::vector<PolarMeasurement>& polar, double t_s,
    Index n_h, const RVec& sigma_a2, const RVec& sigma_phi2,
    StatsSource stats_source, const RVec& a_true = RVec(),
    const RVec& phi_true = RVec());

// Makes the augmented covariance invertible at DC, where sigma_0^2 equals
// the pseudo-variance and the imaginary-part variance is zero. The model's
// DC row must have a zero imaginary part (checked); the imaginary-part
// variance carries no information there, so the estimate is invariant to
// imag_var. Default imag_var = sigma_0^2/2 gives pseudo_sigma_0^2 = 0.
NoiseStats dc_regularize(const NoiseStats& stats,
                         const ComplexLinearModel& model,
                         double imag_var = -1.0);

// IDFT baseline: conjugate-flip the single-sided measurements to a full
// spectrum, inverse-DFT, keep the first n_h (real) samples.
EstimateReport idft_estimator(double y0,
                              const std::vector<PolarMeasurement>& polar,
                              double t_s, Index n_h);

// WLLS first to approximate the converted noise statistics from the
// estimated response, then the real-vector BWLUE with those statistics.
EstimateReport two_step_estimator(double y0,
                                  const std::vector<PolarMeasurement>& polar,
                                  double t_s, Index n_h, const RVec& sigma_a2,
                                  const RVec& sigma_phi2);

}  // namespace widelin

#endif  // WIDELIN_MEASUREMENT_HPP
