#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "hpc/config.hpp"
#include "hpc/diagnostics.hpp"
#include "hpc/initial_data.hpp"
#include "hpc/modulation.hpp"
#include "hpc/solver.hpp"

namespace hpc::pipeline {

struct RunManifest {
  std::string config_path;
  std::string out_dir;
  std::string mode = "simulate";  // simulate | diagnose | profile-check | initial-check | sweep
  bool force = false;
  int jobs = 1;
};

/// Thrown when initial-data validation fails and --force is absent.
struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimulationResult {
  init::ValidationReport validation;
  solver::StopReason stop_reason = solver::StopReason::TimeLimit;
  long steps = 0;
  std::vector<solver::SlopeSample> slope_series;
  PhysicalState initial_state, final_state;
  diag::BlowupEstimate blowup;
  std::optional<diag::RateFit> rate;
  std::string rate_error;
  std::optional<diag::CuspFit> cusp;
  std::string cusp_error;
  double cusp_at_t = 0.0;     // profile time the cusp fit used
  double cusp_at_slope = 0.0; // measured |min w_x| there
  diag::ContinuationSeries continuation;
  std::vector<diag::BootstrapReport> bootstrap;
  std::vector<mod::ModulationState> mod_ode;
  std::vector<mod::ModulationState> mod_empirical;
  std::vector<mod::SelfSimilarSnapshot> history;  // decimated, for trajectories
  std::vector<diag::ProfileDistance> profile_distances;
  double mass_initial = 0.0, mass_final = 0.0;
  double phixx_initial = 0.0, phixx_max = 0.0;
  double zx_max = 0.0;
  double wx_initial = 0.0, wx_peak = 0.0;
  double runtime_seconds = 0.0;

  double wx_growth() const { return wx_peak / wx_initial; }
};

/// Full pipeline: build -> validate -> run -> modulation -> diagnostics.
/// Writes artifacts into out_dir when non-empty. Throws ValidationFailure
/// when the data fails validation and force is false.
SimulationResult simulate(const RunConfig& rc, const std::string& out_dir,
                          bool force = false, bool monitor = true);

/// Lemma-style profile check on the canonical grid; returns all-pass.
bool profile_check(const std::string& out_dir, std::size_t half_points = 50000);

init::ValidationReport initial_check(const RunConfig& rc, const std::string& out_dir);

struct SweepRow {
  double value = 0.0;
  bool ok = false;
  std::string error;
  double T_star = 0.0, x_star = 0.0;
  double rate_exponent = 0.0, cusp_exponent = 0.0;
  double min_bootstrap_headroom = 0.0;  // 1 - max margin, > 0 means inside regime
};

std::vector<SweepRow> sweep(const RunConfig& rc, const std::string& out_dir, int jobs,
                            bool force);

int run(const RunManifest& manifest);  // CLI entry; returns the exit code

}  // namespace hpc::pipeline
