#include "widelin/estimators.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace widelin {

const char* estimator_name(EstimatorId id) {
  switch (id) {
    case EstimatorId::kLs: return "ls";
    case EstimatorId::kLsRealPart: return "ls_real_part";
    case EstimatorId::kWlls: return "wlls";
    case EstimatorId::kWwlls: return "wwlls";
    case EstimatorId::kBlue: return "blue";
    case EstimatorId::kBwlueStandard: return "bwlue_standard";
    case EstimatorId::kBwlueStandardRealPart: return "bwlue_standard_real_part";
    case EstimatorId::kBwlueReal: return "bwlue_real";
    case EstimatorId::kBwlueRealProper: return "bwlue_real_proper";
    case EstimatorId::kRealCompositeBlue: return "real_composite_blue";
    case EstimatorId::kIdft: return "idft";
    case EstimatorId::kTwoStep: return "two_step";
    case EstimatorId::kBound: return "bound";
  }
  return "unknown";
}

WeightSpec::WeightSpec(CMat w) : w_(std::move(w)) {
  if (w_.rows() != w_.cols())
    throw ValidationError("weighting matrix must be square");
  if ((w_ - w_.adjoint()).norm() > tol::herm * std::max(1.0, w_.norm()))
    throw ValidationError("weighting matrix is not Hermitian");
  w_ = 0.5 * (w_ + w_.adjoint()).eval();
}

RVec drop_imaginary(const CVec& x, const char* who) {
  const double residue = x.imag().norm();
  if (residue > tol::real * (1.0 + x.norm()))
    throw ValidationError(std::string(who) +
                          ": estimate has non-negligible imaginary residue");
  return x.real();
}

namespace {

EstimateReport complex_report(EstimatorId id, CVec x) {
  return EstimateReport{id, RVec(), std::move(x), std::nullopt};
}

EstimateReport real_report(EstimatorId id, const CVec& x) {
  return EstimateReport{id, drop_imaginary(x, estimator_name(id)), CVec(),
                        std::nullopt};
}

void check_stats_size(const ComplexLinearModel& model,
                      const NoiseStats& stats) {
  if (stats.size() != model.n_y())
    throw ValidationError("noise statistics size differs from model n_y");
}

}  // namespace

CMat ls_operator(const ComplexLinearModel& model) {
  const CMat& h = model.h();
  if (model.n_x() > model.n_y())
    throw ValidationError("ls: more parameters than measurements");
  return hermitian_solve(CMat(h.adjoint() * h), CMat(h.adjoint()),
                         "LS normal matrix H^H H");
}

EstimateReport ls(const ComplexLinearModel& model, const CVec& y) {
  return complex_report(EstimatorId::kLs, ls_operator(model) * y);
}

EstimateReport ls_real_part(const ComplexLinearModel& model, const CVec& y) {
  EstimateReport base = ls(model, y);
  return EstimateReport{EstimatorId::kLsRealPart, base.x_complex.real(), CVec(),
                        std::nullopt};
}

CMat wlls_operator(const ComplexLinearModel& model) {
  const CMat ht = stack_conjugate(model.h()).h_tilde;
  // (Htilde^H Htilde)^-1 Htilde^H; equals (Re{H^H H})^-1 applied to
  // [H^H, H^T] / ... acting on [y; y*].
  return hermitian_solve(CMat(ht.adjoint() * ht), CMat(ht.adjoint()),
                         "WLLS normal matrix Re{H^H H}");
}

EstimateReport wlls(const ComplexLinearModel& model, const CVec& y) {
  return real_report(EstimatorId::kWlls, wlls_operator(model) * augment(y));
}

CMat wwlls_operator(const ComplexLinearModel& model, const WeightSpec& w) {
  if (w.w().rows() != model.n_y())
    throw ValidationError("weighting matrix size differs from model n_y");
  const CMat ht = stack_conjugate(model.h()).h_tilde;
  const Index ny = model.n_y();
  CMat w_aug = CMat::Zero(2 * ny, 2 * ny);
  w_aug.topLeftCorner(ny, ny) = w.w();
  w_aug.bottomRightCorner(ny, ny) = w.w().conjugate();
  const CMat htw = ht.adjoint() * w_aug;
  return hermitian_solve(CMat(htw * ht), htw,
                         "WWLLS normal matrix Re{H^H W H}");
}

EstimateReport wwlls(const ComplexLinearModel& model, const WeightSpec& w,
                     const CVec& y) {
  return real_report(EstimatorId::kWwlls,
                     wwlls_operator(model, w) * augment(y));
}

CMat blue_operator(const ComplexLinearModel& model, const NoiseStats& stats) {
  check_stats_size(model, stats);
  if (model.n_x() > model.n_y())
    throw ValidationError("blue: more parameters than measurements");
  const CMat& h = model.h();
  const CMat cinv_h =
      hermitian_solve(stats.cov(), h, "noise covariance C_nn");
  return hermitian_solve(CMat(h.adjoint() * cinv_h), CMat(cinv_h.adjoint()),
                         "BLUE normal matrix H^H C^-1 H");
}

EstimateReport blue(const ComplexLinearModel& model, const NoiseStats& stats,
                    const CVec& y) {
  return complex_report(EstimatorId::kBlue, blue_operator(model, stats) * y);
}

CMat bwlue_standard_operator(const ComplexLinearModel& model,
                             const NoiseStats& stats) {
  check_stats_size(model, stats);
  if (model.n_y() <= model.n_x())
    throw ValidationError(
        "bwlue_standard: requires n_y > n_x complex measurements");
  const Index ny = model.n_y(), nx = model.n_x();
  // Block-diagonal augmented model matrix [[H, 0], [0, H*]].
  CMat h_aug = CMat::Zero(2 * ny, 2 * nx);
  h_aug.topLeftCorner(ny, nx) = model.h();
  h_aug.bottomRightCorner(ny, nx) = model.h().conjugate();
  const CMat aug = build_augmented_covariance(stats).blocks;
  const CMat cinv_h =
      hermitian_solve(aug, h_aug, "augmented noise covariance");
  const CMat g_aug = hermitian_solve(CMat(h_aug.adjoint() * cinv_h),
                                     CMat(cinv_h.adjoint()),
                                     "augmented BWLUE normal matrix");
  // The conjugate half of the augmented estimate is redundant.
  return g_aug.topRows(nx);
}

EstimateReport bwlue_standard(const ComplexLinearModel& model,
                              const NoiseStats& stats, const CVec& y) {
  return complex_report(EstimatorId::kBwlueStandard,
                        bwlue_standard_operator(model, stats) * augment(y));
}

EstimateReport bwlue_standard_real_part(const ComplexLinearModel& model,
                                        const NoiseStats& stats,
                                        const CVec& y) {
  EstimateReport base = bwlue_standard(model, stats, y);
  return EstimateReport{EstimatorId::kBwlueStandardRealPart,
                        base.x_complex.real(), CVec(), std::nullopt};
}

CMat bwlue_real_operator(const ComplexLinearModel& model,
                         const NoiseStats& stats) {
  check_stats_size(model, stats);
  const CMat ht = stack_conjugate(model.h()).h_tilde;
  const CMat aug = build_augmented_covariance(stats).blocks;
  CMat cinv_ht;
  try {
    cinv_ht = hermitian_solve(aug, ht, "augmented noise covariance");
  } catch (const NearSingularError& e) {
    throw NearSingularError(
        std::string(e.what()) +
        " (for a zero-information DC row, see dc_regularize)");
  }
  return hermitian_solve(CMat(ht.adjoint() * cinv_ht), CMat(cinv_ht.adjoint()),
                         "BWLUE-real normal matrix Htilde^H Caug^-1 Htilde");
}

EstimateReport bwlue_real(const ComplexLinearModel& model,
                          const NoiseStats& stats, const CVec& y) {
  EstimateReport rep = real_report(EstimatorId::kBwlueReal,
                                   bwlue_real_operator(model, stats) * augment(y));
  rep.covariance = analytic_covariance(model, stats);
  return rep;
}

EstimateReport bwlue_real_proper(const ComplexLinearModel& model,
                                 const CMat& cov, const CVec& y) {
  const CMat& h = model.h();
  if (cov.rows() != model.n_y())
    throw ValidationError("covariance size differs from model n_y");
  const CMat cinv_h = hermitian_solve(cov, h, "noise covariance C_nn");
  const CMat cinv_y = hermitian_solve(cov, CMat(y), "noise covariance C_nn");
  const RMat normal = (h.adjoint() * cinv_h).real();
  const RVec rhs = (h.adjoint() * cinv_y).real();
  RVec x = hermitian_solve(normal, RMat(rhs),
                           "proper BWLUE-real normal matrix Re{H^H C^-1 H}");
  return EstimateReport{EstimatorId::kBwlueRealProper, std::move(x), CVec(),
                        std::nullopt};
}

RMat real_composite_blue_operator(const ComplexLinearModel& model,
                                  const NoiseStats& stats) {
  auto [h_r, c_r] = to_real_composite(model, stats);
  const RMat cinv_h =
      hermitian_solve(c_r, h_r, "real composite noise covariance");
  return hermitian_solve(RMat(h_r.transpose() * cinv_h),
                         RMat(cinv_h.transpose()),
                         "real composite normal matrix");
}

EstimateReport real_composite_blue(const ComplexLinearModel& model,
                                   const NoiseStats& stats, const CVec& y) {
  RVec x = real_composite_blue_operator(model, stats) * real_composite(y);
  return EstimateReport{EstimatorId::kRealCompositeBlue, std::move(x), CVec(),
                        std::nullopt};
}

RMat analytic_covariance(const ComplexLinearModel& model,
                         const NoiseStats& stats) {
  check_stats_size(model, stats);
  const CMat ht = stack_conjugate(model.h()).h_tilde;
  const CMat aug = build_augmented_covariance(stats).blocks;
  const CMat cinv_ht = hermitian_solve(aug, ht, "augmented noise covariance");
  const CMat normal = ht.adjoint() * cinv_ht;
  const CMat cov = hermitian_solve(
      normal, CMat(CMat::Identity(normal.rows(), normal.cols())),
      "BWLUE-real normal matrix Htilde^H Caug^-1 Htilde");
  if (cov.imag().cwiseAbs().maxCoeff() > tol::real * (1.0 + cov.norm()))
    throw ValidationError(
        "analytic covariance has non-negligible imaginary residue");
  RMat out = cov.real();
  return 0.5 * (out + out.transpose()).eval();
}

}  // namespace widelin
