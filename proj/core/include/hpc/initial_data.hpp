#pragma once

#include <string>
#include <vector>

#include "hpc/model.hpp"

namespace hpc::init {

/// Recipe for one member of the admissible data family.
struct InitialDataSpec {
  ModelParams params;
  /// chi == 1 on |x| <= cutoff_inner.
  double cutoff_inner = 1.06;
  /// 0: decay chi along the largest slope budget the far-field weighted
  /// bound allows (admissible; support end is computed). > 0: explicit C^4
  /// taper to zero at this x (narrow domains; the validator will flag the
  /// weighted slope bound when it is violated).
  double cutoff_outer = 0.0;
  double z_amplitude = 0.0;
  /// < 0: pick the largest amplitude passing the weighted and C^4 bounds
  /// (with a 5% margin). >= 0: explicit amplitude.
  double phi_perturbation = -1.0;
  std::string phi_shape = "cosine";  // "cosine" | "bump"
};

/// C^4 cutoff profile on x >= 0 (used with |x|), cached densely.
class CutoffProfile {
 public:
  static CutoffProfile admissible(double inner);
  static CutoffProfile taper(double inner, double outer);

  double value(double ax) const;
  double derivative(double ax) const;
  double inner() const { return inner_; }
  double support_end() const { return end_; }

 private:
  double inner_ = 0.0, end_ = 0.0, h_ = 0.0;
  std::vector<double> chi_, dchi_;  // Hermite tables from inner_ to end_
};

/// Built data plus the analytic evaluators the validator needs; finite
/// differences on coarse solver grids cannot resolve the inner-scale
/// derivative constraints.
struct BuiltInitialData {
  InitialDataSpec spec;
  PhysicalState state;
  CutoffProfile cutoff;
  double phi_amplitude = 0.0;
  double z_scale = 0.0;

  double w0(double x) const;
  double dw0(double x, int n) const;   // n = 1..4
  double z0(double x) const;
  double dz0(double x, int n) const;
  double phi0(double x) const;
  double dphi0(double x, int n) const;
};

/// Samples the family member on the configured grid. Throws when an
/// admissible cutoff cannot fit inside the domain, naming the constraint
/// that would break.
BuiltInitialData build(const InitialDataSpec& spec);

struct ConstraintCheck {
  std::string id;
  bool pass = false;
  double observed = 0.0;  // most binding value over the grid
  double bound = 0.0;     // the bound it is held against
  double margin = 0.0;    // observed / bound
  std::string note;       // e.g. a flagged bound discrepancy
};

struct ValidationReport {
  std::vector<ConstraintCheck> items;
  bool all_pass() const;
  std::string to_json() const;
};

/// Evaluates every data-class constraint with per-constraint margins.
/// Derivative-level constraints use the analytic evaluators; value-level
/// constraints read the sampled arrays (so doctored states are caught).
ValidationReport validate(const BuiltInitialData& data);

}  // namespace hpc::init
