#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hpc::burgers {

/// Value of the stable self-similar Burgers profile at similarity
/// coordinate y: the unique real root W of W^3 + W + y = 0, evaluated
/// branch-stably (no catastrophic cancellation for large |y|) and
/// polished by one Newton step. Strictly decreasing and odd in y.
double wbar(double y);

/// n-th y-derivative of the profile, n = 1..5, through the closed chain
/// dW/dy = -1/(1+3W^2) and its analytic derivatives. Finite for all y.
double wbar_deriv(double y, int n);

/// Profile value and derivatives 0..5 at one point.
struct ProfileSample {
  double y = 0.0;
  std::array<double, 6> w{};  // w[0] = W, w[n] = d^n W / dy^n
};

ProfileSample sample(double y);

/// Residual of the profile ODE -W/2 + (3y/2 + W) W_y at one point.
double ode_residual(double y);

/// One checked property of the profile.
struct PropertyCheck {
  std::string id;
  bool pass = false;
  double worst_margin = 0.0;  // max over grid of |value| / bound (<= 1 passes)
  double worst_y = 0.0;
};

struct ProfileReport {
  std::vector<PropertyCheck> items;
  double ode_residual_sup = 0.0;    // sup over grid of the ODE residual
  double cubic_residual_sup = 0.0;  // sup of |y + W + W^3| / (1 + |y|)
  bool all_pass() const;
};

using Sampler = std::function<ProfileSample(double)>;

/// Checks every pointwise property of the profile on the given grid:
/// origin values (0,-1,0,6), the three weighted estimates, the near-origin
/// derivative caps on |y| <= 1/5, the two-sided slope envelope on
/// |y| >= 100, and the auxiliary damping inequality. Inequalities are
/// exact (non-strict); `tol` only gates the two identity residuals.
ProfileReport check_profile_properties(std::span<const double> y_grid, double tol);

/// Same, with an injectable sampler (used to exercise deliberately
/// broken profiles).
ProfileReport check_profile_properties(std::span<const double> y_grid, double tol,
                                       const Sampler& sampler);

/// Sign-symmetric grid: 0 plus +/- log-spaced points spanning [lo, hi].
/// Total size 2*half + 1.
std::vector<double> log_symmetric_grid(double lo, double hi, std::size_t half);

/// CSV table y, wbar, dwbar1..dwbar5.
void write_profile_csv(std::ostream& os, std::span<const double> y_grid);

}  // namespace hpc::burgers
