#ifndef WIDELIN_TYPES_HPP
#define WIDELIN_TYPES_HPP

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace widelin {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
// Relative Hermitian/symmetry tolerance on validated inputs.
inline constexpr double herm = 1e-10;
// Allowed negative floor on the minimum eigenvalue of a PSD matrix.
inline constexpr double psd = -1e-10;
// Relative residual bound for hermitian_solve.
inline constexpr double solve = 1e-10;
// Relative tolerance for estimator-equivalence checks.
inline constexpr double equiv = 1e-8;
// Relative imaginary residue allowed before truncating a real-constrained
// estimate.
inline constexpr double real = 1e-8;
// Condition-number ceiling before a solve is reported as near singular.
inline constexpr double cond_max = 1e12;
}  // namespace tol

// Input failed a structural validation (non-Hermitian block, bad dimension,
// violated precondition).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A matrix that a formula inverts is singular or numerically close to it.
// The message names the role of the offending matrix.
class NearSingularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EstimatorId {
  kLs,
  kLsRealPart,
  kWlls,
  kWwlls,
  kBlue,
  kBwlueStandard,
  kBwlueStandardRealPart,
  kBwlueReal,
  kBwlueRealProper,
  kRealCompositeBlue,
  kIdft,
  kTwoStep,
  kBound,
};

const char* estimator_name(EstimatorId id);

// Estimate plus optional analytic covariance. Real-constrained estimators
// store a real vector in x_real; the others keep x_complex.
struct EstimateReport {
  EstimatorId estimator_id;
  RVec x_real;              // empty unless the estimator is real-constrained
  CVec x_complex;           // empty for real-constrained estimators
  std::optional<RMat> covariance;

  bool is_real() const { return x_real.size() > 0; }
};

}  // namespace widelin

#endif  // WIDELIN_TYPES_HPP
