#pragma once

#include <string>
#include <vector>

#include "hpc/model.hpp"
#include "hpc/modulation.hpp"
#include "hpc/solver.hpp"

namespace hpc::diag {

struct RateFit {
  double T_star = 0.0;       // root of the linear fit of 1/|min w_x| vs t
  double uncertainty = 0.0;  // spread between fit root and stop-extrapolation
  double exponent = 0.0;     // log-log slope of |min w_x| vs (T* - t)
  double decades = 0.0;      // dynamic range of |min w_x| used
  int n_samples = 0;
};

/// Throws on fewer than 20 usable samples or less than 1.5 decades.
/// When trust_dx > 0, samples whose similarity-frame grid spacing
/// dx * |min w_x|^{3/2} exceeds ~0.25 are dropped: past that point the
/// discrete solution no longer tracks the focusing profile and the slope
/// magnitude reads low.
RateFit fit_blowup_rate(std::span<const solver::SlopeSample> series,
                        double trust_dx = 0.0);

struct BlowupEstimate {
  double T_star = 0.0;
  double T_star_uncertainty = 0.0;
  double x_star = 0.0;
  double x_star_uncertainty = 0.0;
};

/// Blow-up time and location. 1/|min w_x| is linear in t for this system
/// up to modulation-scale corrections, so the primary estimate is the
/// root of a linear fit over the resolved window (dx |min w_x|^{3/2}
/// small); the characteristic extrapolation from the stop sample provides
/// the cross-check that sizes the uncertainty. The location extrapolates
/// the fitted drift of the argmin track to T*.
BlowupEstimate estimate_blowup(std::span<const solver::SlopeSample> series,
                               double dx = 0.0);

/// Frame parameters fitted to the local similarity shape of w: value at
/// the minimum (kappa), its location (xi), and the remaining time scale
/// (delta = tau - t, so min w_x ~ -1/delta). The fit uses the resolved
/// wings of the profile and is insensitive to core smearing, which makes
/// it the sharp frame measurement near the stop time.
struct SimilarityFrame {
  double kappa = 0.0;
  double xi = 0.0;
  double delta = 0.0;
  double residual = 0.0;  // rms of the fit, in units of sqrt(delta)
  int nodes = 0;
};

SimilarityFrame fit_similarity_frame(const PhysicalState& state);

/// Blow-up estimate from the fitted frame at the final state:
/// T* = t + delta, x* = xi + drift * delta with the drift from the frame
/// transport speed kappa - kappa0/(1+alpha) (+ ratio * z at the core for
/// the coupled system).
BlowupEstimate estimate_blowup_from_frame(const PhysicalState& state,
                                          const ModelParams& p);

struct CuspFit {
  double exponent = 0.0;      // mean of the two sides
  double exponent_left = 0.0;
  double exponent_right = 0.0;
  double asymmetry = 0.0;
  double gradient_exponent = 0.0;  // log-log slope of |w_x| vs |x - x*|
  double decades = 0.0;
  double inner_cut = 0.0, outer_cut = 0.0;
};

/// Log-log regression of |w(x) - w(x*)| against |x - x*| on both sides,
/// excluding the innermost three cells. Throws when fewer than 1.5
/// resolved decades are available.
CuspFit fit_cusp_exponent(const PhysicalState& state, double x_star);

struct Margin {
  std::string id;
  double margin = 0.0;  // |value| / bound, so <= 1 is inside the regime
  double worst_y = 0.0;
};

struct BootstrapReport {
  double s = 0.0;
  double t = 0.0;
  double slack = 0.01;  // tolerated interpolation noise
  std::vector<Margin> margins;
  std::vector<Margin> violations;  // margins exceeding 1 + slack
};

/// Evaluates the full regime-monitor inequality list on one snapshot.
BootstrapReport bootstrap_monitor(const mod::SelfSimilarSnapshot& snap,
                                  const ModelParams& p);

struct ContinuationSeries {
  std::vector<double> t;
  std::vector<double> integral;  // running trapezoid of sup_x(|q_x| + |u_x|)
  double log_coefficient = 0.0;  // fitted c in I ~ -c ln(T* - t)
  bool divergence_flag = false;
};

/// The gradient-accumulation integral driving the continuation criterion.
/// Pointwise |q_x| + |u_x| = max(|w_x|, |z_x|); near blow-up the w-slope
/// dominates, so the per-step minimum slope track is the integrand.
ContinuationSeries continuation_integral(std::span<const solver::SlopeSample> series,
                                         double T_star);

struct ProfileDistance {
  double inner_sup = 0.0;         // sup_{|y| <= 1/M} |dW~/dy|
  double weighted_mid_sup = 0.0;  // sup_{1/M <= |y| <= e^{3s/2}} (1+y^2)^{1/3} |dW~/dy|
  double weighted_far_sup = 0.0;  // sup_{|y| >= e^{3s/2}} (1+y^2)^{1/3} |dW/dy|
};

ProfileDistance profile_distance(const mod::SelfSimilarSnapshot& snap,
                                 const ModelParams& p);

}  // namespace hpc::diag
