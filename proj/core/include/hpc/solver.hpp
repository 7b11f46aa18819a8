#pragma once

#include <functional>
#include <vector>

#include "hpc/model.hpp"

namespace hpc::solver {

enum class PhiMethod { DuhamelStep, ImexCentral };
enum class Transport { Weno5, Upwind2 };
enum class Coupling { Full, BurgersTest };
enum class StopReason { SlopeThreshold, TimeLimit, Instability, StepLimit };

struct SolverConfig {
  ModelParams params;
  PhiMethod phi_method = PhiMethod::ImexCentral;
  Transport transport = Transport::Weno5;
  Coupling coupling = Coupling::Full;
  double stop_slope = 0.0;   // <= 0: default 0.2/dx
  double t_max_factor = 2.0; // time limit = factor * epsilon
  int snapshot_stride = 0;   // 0: aim for ~48 snapshots
  bool store_snapshots = true;
  long max_steps = 50'000'000;

  double effective_stop_slope(double dx) const {
    return stop_slope > 0.0 ? stop_slope : 0.2 / dx;
  }
};

struct SlopeSample {
  double t = 0.0;
  double min_wx = 0.0;   // parabolic sub-grid refinement of the grid minimum
  double argmin_x = 0.0;
};

struct RunTrace {
  std::vector<SlopeSample> slope_series;
  std::vector<PhysicalState> snapshots;
  PhysicalState final_state;
  StopReason stop_reason = StopReason::TimeLimit;
  long steps = 0;
  double dx = 0.0;
  double mass_initial = 0.0;
  double mass_final = 0.0;
};

/// Time derivatives of all three fields at the given state (diffusion
/// evaluated explicitly here; step() treats it implicitly). Throws on
/// vacuum (w <= z anywhere).
void rhs(const PhysicalState& s, const SolverConfig& cfg, Field& dw, Field& dz, Field& dphi);

/// CFL-limited step from the transport speeds, additionally clamped by
/// blow-up proximity (0.2/|min w_x|) and the reaction rate.
double cfl_dt(const PhysicalState& s, const SolverConfig& cfg);

/// One Strang-split step: half reaction-diffusion step, SSP-RK3 transport
/// with phi frozen, half reaction-diffusion step. Boundary cells are held
/// at their initial values.
void step(PhysicalState& s, double dt, const SolverConfig& cfg);

/// Minimum of the discrete w_x (4th-order differences) with a parabolic
/// sub-grid refinement around the minimizing node.
SlopeSample min_slope_sample(const PhysicalState& s);

double discrete_mass(const PhysicalState& s, const ModelParams& p);

using SnapshotObserver = std::function<void(const PhysicalState&, const SlopeSample&)>;

/// Integrates until the slope threshold, the time limit, or an
/// instability; records the slope series every step. The observer (if
/// any) fires on the initial state, every snapshot_stride-th step, and
/// the final state.
RunTrace run_until_blowup(const PhysicalState& initial, const SolverConfig& cfg,
                          const SnapshotObserver& observer = nullptr);

}  // namespace hpc::solver
