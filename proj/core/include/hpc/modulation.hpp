#pragma once

#include <array>
#include <vector>

#include "hpc/model.hpp"

namespace hpc::mod {

/// Frame trackers: tau (blow-up time), xi (location), kappa (amplitude),
/// all at clock t; s = -ln(tau - t).
struct ModulationState {
  double t = 0.0;
  double tau = 0.0;
  double xi = 0.0;
  double kappa = 0.0;
  double tau_dot = 0.0;
  double xi_dot = 0.0;
  double s() const;
  double exp_s() const { return 1.0 / (tau - t); }
};

/// Frame read directly off the fields: xi = sub-grid argmin of w_x,
/// kappa = w(xi), tau - t = -1/min w_x (which pins dW/dy(0) = -1).
/// Throws when no negative slope exists.
ModulationState extract_empirical(const PhysicalState& state);

/// x-derivatives of (w, z, phi) at x = xi: 4th-order difference stacks
/// interpolated off-grid, orders w 0..4, z 0..2, phi 0..3.
struct CenterDerivatives {
  std::array<double, 5> w{};
  std::array<double, 3> z{};
  std::array<double, 4> phi{};
};
CenterDerivatives center_derivatives(const PhysicalState& state, double xi);

/// Right side of the modulation ODE system pinned by the constraints at
/// y = 0. Returns (tau_dot, xi_dot). Throws when |d3W/dy3(0)| < 0.5
/// (ill-conditioned frame).
std::pair<double, double> modulation_rhs(const PhysicalState& state,
                                         const ModulationState& m,
                                         const ModelParams& p);

/// Fields in the frozen frame at one instant, on the native nodes that
/// fall inside the requested y-window, plus y-derivative stacks obtained
/// from x-space differences by the chain rule.
struct SelfSimilarSnapshot {
  double s = 0.0;
  double t = 0.0;
  double tau = 0.0, xi = 0.0, kappa = 0.0, tau_dot = 0.0, xi_dot = 0.0;
  double dy = 0.0;  // native y-spacing dx * e^{3s/2}
  std::vector<double> y;
  std::vector<double> W, Z, Phi, sigma, U;
  std::array<std::vector<double>, 5> dW;    // dW[n] = d^n W, n = 1..4 used
  std::array<std::vector<double>, 5> dZ;    // n = 1..4
  std::array<std::vector<double>, 6> dPhi;  // n = 1..5

  /// Stride-decimated copy (keeps endpoints) for cheap history storage.
  SelfSimilarSnapshot decimated(std::size_t max_points) const;
};

/// Largest window such that [xi - w e^{-3s/2}, xi + w e^{-3s/2}] stays
/// inside the grid.
double max_y_window(const PhysicalState& state, const ModulationState& m);

SelfSimilarSnapshot to_selfsimilar(const PhysicalState& state, const ModulationState& m,
                                   const ModelParams& p, double y_window);

/// Integrates the modulation ODE frame alongside a run; falls back to
/// holding tau_dot/xi_dot once the frame derivatives are no longer
/// resolvable on the grid (dy > freeze_dy).
class ModulationIntegrator {
 public:
  ModulationIntegrator(const ModelParams& p, double freeze_dy = 0.3);
  void start(const PhysicalState& initial);
  /// Call after each solver step with the advanced state.
  void advance(const PhysicalState& after);
  const ModulationState& current() const { return m_; }
  bool frozen() const { return frozen_; }
  const std::vector<ModulationState>& series() const { return series_; }

 private:
  ModelParams p_;
  double freeze_dy_;
  bool frozen_ = false;
  ModulationState m_;
  std::vector<ModulationState> series_;
};

enum class VelocityField { W, Z, Sigma, U };

struct Trajectory {
  std::vector<double> s;
  std::vector<double> y;
  bool exited_window = false;
};

/// Particle path dy/ds = V(y, s) integrated with RK4 over a stored
/// snapshot history (linear blending between snapshots in s, cubic in y).
Trajectory integrate_trajectory(VelocityField which, double y0, double s0, double s1,
                                std::span<const SelfSimilarSnapshot> history,
                                const ModelParams& p, double ds = 0.0);

/// The transport velocity of the chosen field evaluated on one snapshot.
double velocity_at(VelocityField which, const SelfSimilarSnapshot& snap, double y,
                   const ModelParams& p);

}  // namespace hpc::mod
