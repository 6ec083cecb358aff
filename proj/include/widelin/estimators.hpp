#ifndef WIDELIN_ESTIMATORS_HPP
#define WIDELIN_ESTIMATORS_HPP

#include "widelin/augmented.hpp"
#include "widelin/types.hpp"

namespace widelin {

// Hermitian weighting matrix for the weighted widely linear LS estimator.
class WeightSpec {
 public:
  explicit WeightSpec(CMat w);
  const CMat& w() const { return w_; }

 private:
  CMat w_;
};

// Every estimator in this module is a linear (or widely linear) operator on
// the measurements. The *_operator functions return that operator so that
// Monte-Carlo sweeps can factor once and apply per trial; the plain
// functions are one-shot conveniences on top of them.
//
// Operator domains:
//   y      (n_y)   : ls, blue
//   [y;y*] (2 n_y) : wlls, wwlls, bwlue_standard, bwlue_real
//   [Re y; Im y]   : real_composite_blue

// x_hat = (H^H H)^-1 H^H y, complex in general.
CMat ls_operator(const ComplexLinearModel& model);
EstimateReport ls(const ComplexLinearModel& model, const CVec& y);

EstimateReport ls_real_part(const ComplexLinearModel& model, const CVec& y);

// Widely linear LS for real x: x_hat = (Re{H^H H})^-1 Re{H^H y}.
// Operator acts on the augmented vector [y; y*].
CMat wlls_operator(const ComplexLinearModel& model);
EstimateReport wlls(const ComplexLinearModel& model, const CVec& y);

// Weighted WLLS: x_hat = (Re{H^H W H})^-1 Re{H^H W y}.
CMat wwlls_operator(const ComplexLinearModel& model, const WeightSpec& w);
EstimateReport wwlls(const ComplexLinearModel& model, const WeightSpec& w,
                     const CVec& y);

// x_hat = (H^H C^-1 H)^-1 H^H C^-1 y, complex in general.
CMat blue_operator(const ComplexLinearModel& model, const NoiseStats& stats);
EstimateReport blue(const ComplexLinearModel& model, const NoiseStats& stats,
                    const CVec& y);

// Standard BWLUE on the augmented model; only the x-part of the augmented
// estimate is returned. Requires n_y > n_x.
CMat bwlue_standard_operator(const ComplexLinearModel& model,
                             const NoiseStats& stats);
EstimateReport bwlue_standard(const ComplexLinearModel& model,
                              const NoiseStats& stats, const CVec& y);

EstimateReport bwlue_standard_real_part(const ComplexLinearModel& model,
                                        const NoiseStats& stats, const CVec& y);

// BWLUE for real parameter vectors:
// x_hat = (Htilde^H Caug^-1 Htilde)^-1 Htilde^H Caug^-1 [y; y*].
CMat bwlue_real_operator(const ComplexLinearModel& model,
                         const NoiseStats& stats);
EstimateReport bwlue_real(const ComplexLinearModel& model,
                          const NoiseStats& stats, const CVec& y);

// Proper-noise fast path: x_hat = (Re{H^H C^-1 H})^-1 Re{H^H C^-1 y}.
EstimateReport bwlue_real_proper(const ComplexLinearModel& model,
                                 const CMat& cov, const CVec& y);

// BLUE on the equivalent real composite model; the independent cross-check
// for bwlue_real.
RMat real_composite_blue_operator(const ComplexLinearModel& model,
                                  const NoiseStats& stats);
EstimateReport real_composite_blue(const ComplexLinearModel& model,
                                   const NoiseStats& stats, const CVec& y);

// Covariance of the real-vector BWLUE, (Htilde^H Caug^-1 Htilde)^-1.
RMat analytic_covariance(const ComplexLinearModel& model,
                         const NoiseStats& stats);

// Verifies the imaginary residue of a nominally real complex vector is
// below tol::real * (1 + norm) and returns the real part. Throws
// ValidationError otherwise.
RVec drop_imaginary(const CVec& x, const char* who);

}  // namespace widelin

#endif  // WIDELIN_ESTIMATORS_HPP
