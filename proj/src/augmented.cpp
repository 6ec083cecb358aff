#include "widelin/augmented.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

namespace widelin {

namespace {

double rel_err(const CMat& a, const CMat& b) {
  const double scale = std::max(1.0, b.norm());
  return (a - b).norm() / scale;
}

}  // namespace

NoiseStats::NoiseStats(CMat cov, CMat pseudo_cov)
    : cov_(std::move(cov)), pseudo_cov_(std::move(pseudo_cov)) {
  if (cov_.rows() != cov_.cols())
    throw ValidationError("noise covariance must be square");
  if (pseudo_cov_.rows() != cov_.rows() || pseudo_cov_.cols() != cov_.cols())
    throw ValidationError("pseudo-covariance size differs from covariance");
  if (rel_err(cov_, cov_.adjoint()) > tol::herm)
    throw ValidationError("noise covariance is not Hermitian");
  if (rel_err(pseudo_cov_, pseudo_cov_.transpose()) > tol::herm)
    throw ValidationError("noise pseudo-covariance is not symmetric");

  // Round-off symmetrization after validation.
  cov_ = 0.5 * (cov_ + cov_.adjoint()).eval();
  pseudo_cov_ = 0.5 * (pseudo_cov_ + pseudo_cov_.transpose()).eval();

  const Index n = cov_.rows();
  CMat aug(2 * n, 2 * n);
  aug << cov_, pseudo_cov_, pseudo_cov_.conjugate(), cov_.conjugate();
  Eigen::SelfAdjointEigenSolver<CMat> es(aug, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < tol::psd * scale)
    throw ValidationError(
        "augmented noise covariance is not positive semi-definite");
}

NoiseStats NoiseStats::proper(CMat cov) {
  const Index n = cov.rows();
  return NoiseStats(std::move(cov), CMat::Zero(n, n));
}

NoiseStats NoiseStats::white(Index n) {
  return NoiseStats(CMat::Identity(n, n), CMat::Zero(n, n));
}

ComplexLinearModel::ComplexLinearModel(CMat h) : h_(std::move(h)) {
  const Index ny = h_.rows(), nx = h_.cols();
  if (ny < 1 || nx < 1) throw ValidationError("model matrix is empty");
  if (2 * ny < nx)
    throw ValidationError(
        "model needs 2*n_y >= n_x complex measurements for real parameters");
  RMat stacked(2 * ny, nx);
  stacked << h_.real(), h_.imag();
  Eigen::ColPivHouseholderQR<RMat> qr(stacked);
  if (qr.rank() < nx)
    throw ValidationError(
        "stacked real model matrix [Re H; Im H] is rank deficient");
}

AugmentedCovariance build_augmented_covariance(const NoiseStats& stats) {
  const Index n = stats.size();
  CMat blocks(2 * n, 2 * n);
  blocks << stats.cov(), stats.pseudo_cov(), stats.pseudo_cov().conjugate(),
      stats.cov().conjugate();
  return AugmentedCovariance{std::move(blocks)};
}

bool is_proper(const NoiseStats& stats, double tol) {
  if (stats.size() == 0) return true;
  return stats.pseudo_cov().cwiseAbs().maxCoeff() <= tol;
}

ConjugateStack stack_conjugate(const CMat& h) {
  CMat ht(2 * h.rows(), h.cols());
  ht << h, h.conjugate();
  return ConjugateStack{std::move(ht)};
}

CVec augment(const CVec& y) {
  CVec out(2 * y.size());
  out << y, y.conjugate();
  return out;
}

std::pair<RMat, RMat> to_real_composite(const ComplexLinearModel& model,
                                        const NoiseStats& stats) {
  const Index ny = model.n_y();
  if (stats.size() != ny)
    throw ValidationError("noise statistics size differs from model n_y");

  RMat h_r(2 * ny, model.n_x());
  h_r << model.h().real(), model.h().imag();

  const Complex j(0.0, 1.0);
  CMat t(2 * ny, 2 * ny);
  t << CMat::Identity(ny, ny), j * CMat::Identity(ny, ny),
      CMat::Identity(ny, ny), -j * CMat::Identity(ny, ny);

  const CMat aug = build_augmented_covariance(stats).blocks;
  const CMat c_r_complex = 0.25 * t.adjoint() * aug * t;
  if (c_r_complex.imag().cwiseAbs().maxCoeff() >
      tol::herm * std::max(1.0, c_r_complex.norm()))
    throw ValidationError("real composite covariance has imaginary residue");
  RMat c_r = c_r_complex.real();
  c_r = 0.5 * (c_r + c_r.transpose()).eval();
  return {std::move(h_r), std::move(c_r)};
}

RVec real_composite(const CVec& y) {
  RVec out(2 * y.size());
  out << y.real(), y.imag();
  return out;
}

namespace {

template <typename Mat>
Mat hermitian_solve_impl(const Mat& a, const Mat& b, const std::string& role) {
  if (a.rows() != a.cols()) throw ValidationError(role + " is not square");
  if (a.rows() != b.rows())
    throw ValidationError(role + " size does not match right-hand side");
  const double herm_err =
      (a - Mat(a.adjoint())).norm() / std::max(1.0, a.norm());
  if (herm_err > tol::herm)
    throw ValidationError(role + " is not Hermitian");

  const Mat sym = 0.5 * (a + Mat(a.adjoint()));
  Eigen::LDLT<Mat> ldlt(sym);
  if (ldlt.info() != Eigen::Success)
    throw NearSingularError(role + ": factorization failed");
  const double rcond = ldlt.rcond();
  if (!(rcond > 0.0) || 1.0 / rcond > tol::cond_max)
    throw NearSingularError(role + " is singular or near singular");

  Mat x = ldlt.solve(b);
  // Backward-stable residual scales with the condition number.
  const double resid = (sym * x - b).norm();
  const double bound = tol::solve * std::max(1.0, b.norm()) / rcond;
  if (resid > bound)
    throw NearSingularError(role + ": solve residual too large");
  return x;
}

}  // namespace

CMat hermitian_solve(const CMat& a, const CMat& b, const std::string& role) {
  return hermitian_solve_impl<CMat>(a, b, role);
}

RMat hermitian_solve(const RMat& a, const RMat& b, const std::string& role) {
  return hermitian_solve_impl<RMat>(a, b, role);
}

}  // namespace widelin
