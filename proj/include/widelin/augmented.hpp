#ifndef WIDELIN_AUGMENTED_HPP
#define WIDELIN_AUGMENTED_HPP

#include <string>
#include <utility>

#include "widelin/types.hpp"

namespace widelin {

// Second-order noise description: covariance C (Hermitian PSD) and
// complementary covariance C~ (symmetric). Validated on construction.
class NoiseStats {
 public:
  NoiseStats(CMat cov, CMat pseudo_cov);

  static NoiseStats proper(CMat cov);
  static NoiseStats white(Index n);  // proper unit noise

  const CMat& cov() const { return cov_; }
  const CMat& pseudo_cov() const { return pseudo_cov_; }
  Index size() const { return cov_.rows(); }

 private:
  CMat cov_;
  CMat pseudo_cov_;
};

// The 2Nx2N block matrix [[C, C~], [C~*, C*]].
struct AugmentedCovariance {
  CMat blocks;

  Index half() const { return blocks.rows() / 2; }
};

// Linear model y = H x + n with real-valued x. Construction checks the
// identifiability condition: [Re H; Im H] must have column rank n_x, which
// requires 2 n_y >= n_x.
class ComplexLinearModel {
 public:
  explicit ComplexLinearModel(CMat h);

  const CMat& h() const { return h_; }
  Index n_y() const { return h_.rows(); }
  Index n_x() const { return h_.cols(); }

 private:
  CMat h_;
};

// H stacked on top of its conjugate, [H; H*].
struct ConjugateStack {
  CMat h_tilde;
};

AugmentedCovariance build_augmented_covariance(const NoiseStats& stats);

bool is_proper(const NoiseStats& stats, double tol);

ConjugateStack stack_conjugate(const CMat& h);

// Stacks a vector on top of its conjugate: [y; y*].
CVec augment(const CVec& y);

// Equivalent real model: H_R = [Re H; Im H] and the real noise covariance
// (1/4) T^H C_aug T with T = [[I, jI], [I, -jI]].
std::pair<RMat, RMat> to_real_composite(const ComplexLinearModel& model,
                                        const NoiseStats& stats);

// Real composite measurement vector [Re y; Im y].
RVec real_composite(const CVec& y);

// Solves a X = b for Hermitian a via an LDLT factorization. `role` names
// the matrix in diagnostics. Throws NearSingularError when the condition
// estimate exceeds tol::cond_max.
CMat hermitian_solve(const CMat& a, const CMat& b, const std::string& role);
RMat hermitian_solve(const RMat& a, const RMat& b, const std::string& role);

}  // namespace widelin

#endif  // WIDELIN_AUGMENTED_HPP
