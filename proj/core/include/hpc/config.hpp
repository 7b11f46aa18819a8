#pragma once

#include <map>
#include <optional>
#include <string>

#include "hpc/model.hpp"

namespace hpc {

/// Flat key = value configuration. Lines starting with '#' and blank
/// lines are ignored; keys are case-sensitive. Unknown keys are an error
/// so that typos cannot silently fall back to defaults.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  const std::map<std::string, std::string>& raw() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

/// Everything a single run needs, resolved from a config file over the
/// documented defaults.
struct RunConfig {
  ModelParams params;
  std::string phi_method = "imex-central";   // or "duhamel"
  std::string transport_scheme = "weno5";    // or "upwind2"
  std::string coupling = "full";             // or "burgers-test"
  double stop_slope = 0.0;                   // 0 -> default 0.2/dx
  double t_max_factor = 2.0;                 // stop at t = factor * epsilon
  double cusp_capture_slope = 0.0;           // 0 -> fit the cusp on the final state
  int snapshot_stride = 0;                   // 0 -> pick ~40 snapshots
  // initial data knobs
  double cutoff_inner = 0.0;                 // 0 -> admissible-decay default (1.06)
  double cutoff_outer = 0.0;                 // >0 -> explicit compact taper
  double z_amplitude = 0.0;
  double phi_perturbation = -1.0;            // <0 -> auto-fit largest admissible
  std::string phi_shape = "cosine";          // or "bump"
  // sweep
  std::string sweep_param;                   // "epsilon" | "beta" | "gamma" | empty
  std::vector<double> sweep_values;
};

RunConfig resolve_run_config(const Config& cfg);

/// The effective configuration, serialized back to the flat format so a
/// run directory always carries the exact values it was produced with.
std::string render_run_config(const RunConfig& rc);

}  // namespace hpc
