#include <doctest.h>

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "hpc/burgers_profile.hpp"

using namespace hpc::burgers;

namespace {

// independent oracle: the cubic residual of a candidate root
double cubic_residual(double w, double y) { return w * w * w + w + y; }

// textbook two-cube-root evaluation, reliable for moderate |y|
double wbar_textbook(double y) {
  const double r = std::sqrt(1.0 / 27.0 + 0.25 * y * y);
  return std::cbrt(-0.5 * y + r) - std::cbrt(0.5 * y + r);
}

}  // namespace

TEST_CASE("profile values at pinned points") {
  CHECK(wbar(0.0) == 0.0);
  // cubic residual of W = -1 at y = 2 is exactly 0, so wbar(2) = -1
  CHECK(cubic_residual(-1.0, 2.0) == 0.0);
  CHECK(wbar(2.0) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(wbar(-2.0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("derivatives at pinned points") {
  CHECK(wbar_deriv(0.0, 1) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(wbar_deriv(0.0, 2) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(wbar_deriv(0.0, 3) == doctest::Approx(6.0).epsilon(1e-14));
  // oracle: -1/(1+3 wbar(2)^2) with wbar(2) = -1
  CHECK(wbar_deriv(2.0, 1) == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK_THROWS_AS(wbar_deriv(1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(wbar_deriv(1.0, 6), std::invalid_argument);
  CHECK_THROWS_AS(wbar(std::nan("")), std::domain_error);
}

TEST_CASE("cubic identity and agreement with the textbook form") {
  const auto grid = log_symmetric_grid(1e-6, 1e6, 4000);
  for (double y : grid) {
    const double w = wbar(y);
    CHECK(std::abs(cubic_residual(w, y)) / (1.0 + std::abs(y)) < 1e-12);
  }
  // the naive form cancels catastrophically for large |y|; compare where it
  // is still accurate
  for (double y : log_symmetric_grid(1e-6, 100.0, 2000))
    CHECK(std::abs(wbar(y) - wbar_textbook(y)) < 1e-10);
}

TEST_CASE("profile is odd and strictly decreasing") {
  const auto grid = log_symmetric_grid(1e-5, 1e5, 500);
  double prev = wbar(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double w = wbar(grid[i]);
    CHECK(w < prev);
    prev = w;
    CHECK(wbar(-grid[i]) == doctest::Approx(-w).scale(1.0).epsilon(1e-13));
    CHECK(wbar_deriv(grid[i], 1) < 0.0);
  }
}

TEST_CASE("ODE residual vanishes") {
  for (double y : log_symmetric_grid(1e-6, 1e6, 2000))
    CHECK(std::abs(ode_residual(y)) < 1e-10);
}

TEST_CASE("derivative chain matches finite differences, order >= 1.9") {
  const double ys[] = {0.0, 0.3, -0.7, 1.9, 13.0, -45.0};
  for (double y : ys) {
    // observed order of the central-difference error for dW/dy
    const double h1 = 1e-3, h2 = 5e-4;
    auto err = [y](double h) {
      const double fd = (wbar(y + h) - wbar(y - h)) / (2.0 * h);
      return std::abs(fd - wbar_deriv(y, 1));
    };
    const double e1 = err(h1), e2 = err(h2);
    if (e2 > 1e-13) {  // avoid the round-off floor
      const double order = std::log(e1 / e2) / std::log(h1 / h2);
      CHECK(order >= 1.9);
    }
    // successive orders against differences of the previous order
    for (int n = 2; n <= 5; ++n) {
      const double h = 1e-4 * std::max(1.0, std::abs(y));
      const double fd = (wbar_deriv(y + h, n - 1) - wbar_deriv(y - h, n - 1)) / (2.0 * h);
      CHECK(wbar_deriv(y, n) ==
            doctest::Approx(fd).epsilon(1e-5).scale(std::abs(fd) + 1.0));
    }
  }
}

TEST_CASE("all profile properties hold on the canonical grid") {
  const auto grid = log_symmetric_grid(1e-6, 1e6, 50000);  // 100001 points
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = check_profile_properties(grid, 1e-10);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& item : rep.items) {
    INFO(item.id, " margin=", item.worst_margin, " at y=", item.worst_y);
    CHECK(item.pass);
  }
  CHECK(rep.ode_residual_sup < 1e-10);
  CHECK(dt < 1.0);
}

TEST_CASE("origin-only grid passes the origin identities exactly") {
  const double zero = 0.0;
  const auto rep = check_profile_properties(std::span<const double>(&zero, 1), 1e-12);
  for (const auto& item : rep.items) {
    INFO(item.id);
    CHECK(item.pass);
  }
}

TEST_CASE("a shifted profile breaks the weighted bound") {
  const auto grid = log_symmetric_grid(1e-3, 10.0, 200);
  const auto rep = check_profile_properties(grid, 1e-10, [](double y) {
    ProfileSample s = sample(y);
    s.w[0] += 0.5;
    return s;
  });
  bool weighted_w_failed = false;
  for (const auto& item : rep.items)
    if (item.id == "ii_weighted_w" && !item.pass) weighted_w_failed = true;
  CHECK(weighted_w_failed);
}

TEST_CASE("empty grid rejected") {
  CHECK_THROWS_AS(check_profile_properties({}, 1e-10), std::invalid_argument);
}
