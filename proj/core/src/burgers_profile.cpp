#include "hpc/burgers_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace hpc::burgers {

double wbar(double y) {
  if (!std::isfinite(y)) throw std::domain_error("wbar: non-finite argument");
  if (y == 0.0) return 0.0;
  const double ay = std::abs(y);
  // Real root of W^3 + W + y = 0. The textbook two-cube-root form loses
  // all precision for large |y| because the roots nearly cancel; instead
  // compute the large branch B = cbrt(|y|/2 + sqrt(y^2/4 + 1/27)) and use
  // A*B = 1/3, so |W| = B - 1/(3B).
  const double r = std::sqrt(0.25 * ay * ay + 1.0 / 27.0);
  const double b = std::cbrt(0.5 * ay + r);
  double w = 1.0 / (3.0 * b) - b;  // root for y = +|y| (negative)
  // One Newton polish on the cubic; the derivative 1 + 3W^2 >= 1 keeps it
  // well conditioned everywhere.
  w -= (w * (1.0 + w * w) + ay) / (1.0 + 3.0 * w * w);
  return y > 0 ? w : -w;
}

double wbar_deriv(double y, int n) {
  if (n < 1 || n > 5) throw std::invalid_argument("wbar_deriv: order must be 1..5");
  const double w = wbar(y);
  const double w2 = w * w;
  const double d = 1.0 + 3.0 * w2;
  switch (n) {
    case 1: return -1.0 / d;
    case 2: return -6.0 * w / (d * d * d);
    case 3: return (6.0 - 90.0 * w2) / std::pow(d, 5);
    case 4: return w * (360.0 - 2160.0 * w2) / std::pow(d, 7);
    case 5: return -(360.0 - 20520.0 * w2 + 71280.0 * w2 * w2) / std::pow(d, 9);
  }
  return 0.0;  // unreachable
}

ProfileSample sample(double y) {
  ProfileSample s;
  s.y = y;
  s.w[0] = wbar(y);
  const double w2 = s.w[0] * s.w[0];
  const double d = 1.0 + 3.0 * w2;
  s.w[1] = -1.0 / d;
  s.w[2] = -6.0 * s.w[0] / (d * d * d);
  s.w[3] = (6.0 - 90.0 * w2) / std::pow(d, 5);
  s.w[4] = s.w[0] * (360.0 - 2160.0 * w2) / std::pow(d, 7);
  s.w[5] = -(360.0 - 20520.0 * w2 + 71280.0 * w2 * w2) / std::pow(d, 9);
  return s;
}

double ode_residual(double y) {
  const ProfileSample s = sample(y);
  return -0.5 * s.w[0] + (1.5 * y + s.w[0]) * s.w[1];
}

bool ProfileReport::all_pass() const {
  return std::all_of(items.begin(), items.end(),
                     [](const PropertyCheck& c) { return c.pass; });
}

namespace {

struct Worst {
  double margin = 0.0;
  double y = 0.0;
  void feed(double m, double at) {
    if (m > margin) { margin = m; y = at; }
  }
};

}  // namespace

ProfileReport check_profile_properties(std::span<const double> y_grid, double tol,
                                       const Sampler& sampler) {
  if (y_grid.empty()) throw std::invalid_argument("check_profile_properties: empty grid");

  ProfileReport rep;
  Worst origin, w_ii0, w_ii1, w_ii2, w_iii3, w_iii4, w_iii5, w_iv, w_v;
  bool saw_origin = false;

  for (double y : y_grid) {
    const ProfileSample s = sampler(y);
    const double w = s.w[0];

    const double cubic = std::abs(y + w + w * w * w) / (1.0 + std::abs(y));
    rep.cubic_residual_sup = std::max(rep.cubic_residual_sup, cubic);
    const double ode = std::abs(-0.5 * w + (1.5 * y + w) * s.w[1]);
    rep.ode_residual_sup = std::max(rep.ode_residual_sup, ode);

    if (y == 0.0) {
      saw_origin = true;
      origin.feed(std::abs(w), 0.0);
      origin.feed(std::abs(s.w[1] + 1.0), 0.0);
      origin.feed(std::abs(s.w[2]), 0.0);
      origin.feed(std::abs(s.w[3] - 6.0) / 6.0, 0.0);
    }

    const double y2 = y * y;
    w_ii0.feed(std::abs(w) / std::pow(1.0 + y2, 1.0 / 6.0), y);
    w_ii1.feed(std::abs(s.w[1]) * std::pow(1.0 + y2, 1.0 / 3.0), y);
    w_ii2.feed(std::abs(s.w[2]) * std::pow(1.0 + y2, 5.0 / 6.0), y);

    if (std::abs(y) <= 0.2) {
      w_iii3.feed(std::abs(s.w[3]) / 6.0, y);
      w_iii4.feed(std::abs(s.w[4]) / 30.0, y);
      w_iii5.feed(std::abs(s.w[5]) / 360.0, y);
    }

    if (std::abs(y) >= 100.0) {
      // -(7/20) y^{-2/3} <= W_y <= -(1/4) y^{-2/3}
      const double scale = std::pow(std::abs(y), -2.0 / 3.0);
      const double lo = -0.35 * scale, hi = -0.25 * scale;
      w_iv.feed(s.w[1] < lo ? s.w[1] / lo : 0.0, y);
      w_iv.feed(s.w[1] > hi ? hi / s.w[1] : 0.0, y);
    }

    // (v): 5/2 + 3 W_y + (3y/2 + W)/(y(1+y^2)) >= y^2/(1+y^2).
    // At y = 0 the middle term is the limit 1/2 (series through W ~ -y).
    const double mid = (y == 0.0) ? 0.5 : (1.5 * y + w) / (y * (1.0 + y2));
    const double lhs = 2.5 + 3.0 * s.w[1] + mid;
    const double rhs = y2 / (1.0 + y2);
    w_v.feed(lhs < rhs ? 1.0 + (rhs - lhs) : 0.0, y);
  }

  auto push = [&rep](const std::string& id, const Worst& w, double bound) {
    rep.items.push_back({id, w.margin <= bound, w.margin, w.y});
  };
  if (saw_origin) push("i_origin_values", origin, tol);
  push("ii_weighted_w", w_ii0, 1.0);
  push("ii_weighted_dw", w_ii1, 1.0);
  push("ii_weighted_d2w", w_ii2, 1.0);
  push("iii_d3w_near0", w_iii3, 1.0);
  push("iii_d4w_near0", w_iii4, 1.0);
  push("iii_d5w_near0", w_iii5, 1.0);
  push("iv_slope_envelope", w_iv, 1.0);
  push("v_damping_auxiliary", w_v, 1.0);
  rep.items.push_back({"ode_residual", rep.ode_residual_sup < tol, rep.ode_residual_sup, 0.0});
  rep.items.push_back(
      {"cubic_identity", rep.cubic_residual_sup < 1e-12, rep.cubic_residual_sup, 0.0});
  return rep;
}

ProfileReport check_profile_properties(std::span<const double> y_grid, double tol) {
  return check_profile_properties(y_grid, tol, [](double y) { return sample(y); });
}

std::vector<double> log_symmetric_grid(double lo, double hi, std::size_t half) {
  if (!(lo > 0.0) || !(hi > lo) || half < 2)
    throw std::invalid_argument("log_symmetric_grid: bad range");
  std::vector<double> g;
  g.reserve(2 * half + 1);
  const double step = std::log(hi / lo) / double(half - 1);
  for (std::size_t i = 0; i < half; ++i) g.push_back(-hi * std::exp(-step * double(i)));
  g.push_back(0.0);
  for (std::size_t i = 0; i < half; ++i) g.push_back(lo * std::exp(step * double(i)));
  return g;
}

void write_profile_csv(std::ostream& os, std::span<const double> y_grid) {
  os << "y,wbar,dwbar1,dwbar2,dwbar3,dwbar4,dwbar5\n";
  char line[256];
  for (double y : y_grid) {
    const ProfileSample s = sample(y);
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  y, s.w[0], s.w[1], s.w[2], s.w[3], s.w[4], s.w[5]);
    os << line;
  }
}

}  // namespace hpc::burgers
