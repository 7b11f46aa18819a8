#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace hpc {

using Field = std::vector<double>;

/// Uniform cell-centered grid on [-L, L] with N cells.
struct Grid1D {
  double L = 1.0;
  int N = 1024;
  double dx() const { return 2.0 * L / N; }
  double x(int i) const { return -L + (i + 0.5) * dx(); }
  std::vector<double> nodes() const {
    std::vector<double> xs(N);
    for (int i = 0; i < N; ++i) xs[i] = x(i);
    return xs;
  }
};

/// Physical and scheme parameters. The pressure law is P(rho) = rho^gamma / gamma
/// with the remaining model coefficients normalized to one; the damping
/// coefficient beta is kept free.
struct ModelParams {
  double gamma = 2.0;    // adiabatic exponent, > 1
  double beta = 0.0;     // damping coefficient, >= 0
  double kappa0 = 15.0;  // wave amplitude constant
  double epsilon = 0.01; // initial slope scale: min dw0/dx = -1/epsilon
  double M = 12.5;       // regime-monitor constant; 8*M*epsilon <= 1 here
  double L = 6.0;        // domain half-width
  int N = 16384;         // grid cells
  double cfl = 0.4;
  bool relax_regime_checks = false;  // accept configs outside the monitored regime

  double alpha() const { return 0.5 * (gamma - 1.0); }
  /// Kinematic drift of the steepening wave, alpha*kappa0/(1+alpha).
  double drift_speed() const { return alpha() * kappa0 / (1.0 + alpha()); }
  double min_admissible_kappa0() const { return 5.0 * (1.0 + alpha()) / alpha(); }

  /// Throws std::invalid_argument on structurally bad values. Regime
  /// conditions (kappa0 floor, 8*M*epsilon <= 1) throw only when
  /// relax_regime_checks is false; they bound what the bootstrap monitor
  /// can certify, not what the solver can run.
  void validate() const;
  /// Non-empty when the configuration is outside the monitored regime.
  std::vector<std::string> regime_warnings() const;

  Grid1D grid() const { return Grid1D{L, N}; }
};

struct Background {
  double rho;  // = phi
  double phi;
  double q;    // kappa0 / 2
};

/// Constant far-field state: rho = phi = (alpha*kappa0/2)^(1/alpha), q = kappa0/2.
Background background(const ModelParams& p);

/// Fields sampled on the grid at one time. `t` is the clock of the
/// rescaled Riemann-variable system; t_orig = (1+alpha)/2 * t.
struct PhysicalState {
  double t = 0.0;
  double t_orig = 0.0;
  Grid1D grid;
  Field w, z, phi;
};

/// (rho, u) -> (w, z) with q = rho^alpha/alpha, w = u + q + kappa0/2,
/// z = u - q + kappa0/2. Throws on non-positive density.
void riemann_from_primitive(std::span<const double> rho, std::span<const double> u,
                            const ModelParams& p, Field& w, Field& z);

/// (w, z) -> (rho, u, q) with q = (w-z)/2, u = (w+z-kappa0)/2,
/// rho = (alpha q)^(1/alpha). Throws a vacuum error where w <= z.
void primitive_from_riemann(std::span<const double> w, std::span<const double> z,
                            const ModelParams& p, Field& rho, Field& u, Field& q);

/// Pointwise helpers.
double rho_from_q(double q, double alpha);
double q_from_rho(double rho, double alpha);

}  // namespace hpc
