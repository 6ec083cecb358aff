#ifndef WIDELIN_TESTS_HELPERS_HPP
#define WIDELIN_TESTS_HELPERS_HPP

#include <Eigen/Cholesky>

#include "widelin/augmented.hpp"
#include "widelin/rng.hpp"

namespace widelin::testing {

inline CMat random_complex(Index rows, Index cols, Rng& rng) {
  CMat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      m(i, j) = Complex(rng.gaussian(), rng.gaussian());
  return m;
}

inline CMat random_hermitian_pd(Index n, Rng& rng) {
  const CMat g = random_complex(n, n + 2, rng);
  return g * g.adjoint() + 0.1 * CMat::Identity(n, n);
}

// Random improper noise statistics with a strictly positive-definite
// augmented covariance, generated through a random real composite
// covariance C_R and the transform Caug = T C_R T^H.
inline NoiseStats random_improper_stats(Index n, Rng& rng) {
  RMat b(2 * n, 2 * n);
  for (Index i = 0; i < 2 * n; ++i)
    for (Index j = 0; j < 2 * n; ++j) b(i, j) = rng.gaussian();
  const RMat c_r = b * b.transpose() + 0.1 * RMat::Identity(2 * n, 2 * n);

  const Complex j(0.0, 1.0);
  CMat t(2 * n, 2 * n);
  t << CMat::Identity(n, n), j * CMat::Identity(n, n), CMat::Identity(n, n),
      -j * CMat::Identity(n, n);
  const CMat aug = t * c_r.cast<Complex>() * t.adjoint();
  return NoiseStats(aug.topLeftCorner(n, n), aug.topRightCorner(n, n));
}

// Draws correlated noise with the given statistics by sampling the real
// composite representation.
inline CVec sample_noise(const NoiseStats& stats, Rng& rng) {
  const Index n = stats.size();
  const Complex j(0.0, 1.0);
  CMat t(2 * n, 2 * n);
  t << CMat::Identity(n, n), j * CMat::Identity(n, n), CMat::Identity(n, n),
      -j * CMat::Identity(n, n);
  const CMat aug = build_augmented_covariance(stats).blocks;
  const CMat c_r_c = 0.25 * t.adjoint() * aug * t;
  RMat c_r = c_r_c.real();
  c_r = 0.5 * (c_r + c_r.transpose()).eval();
  Eigen::LLT<RMat> llt(c_r + 1e-14 * RMat::Identity(2 * n, 2 * n));
  RVec w = llt.matrixL() * rng.gaussian_vector(2 * n);
  CVec out(n);
  out.real() = w.head(n);
  out.imag() = w.tail(n);
  return out;
}

inline double rel_diff(const RVec& a, const RVec& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

inline double rel_diff(const CVec& a, const CVec& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace widelin::testing

#endif
