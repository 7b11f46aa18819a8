#pragma once

#include <span>
#include <vector>

#include "hpc/model.hpp"

namespace hpc::heat {

/// Sampled Gaussian kernel for one diffusion time, truncated at
/// 8*sqrt(2t) (beyond that the omitted mass is < 1e-14). Weights are
/// normalized to exact unit sum, so convolution obeys the discrete
/// maximum principle by construction.
struct KernelConvolution {
  double t = 0.0;
  double dx = 0.0;
  std::vector<double> weights;  // symmetric, index 0 = center
  double raw_mass = 0.0;        // trapezoid mass before normalization

  static KernelConvolution make(double t, double dx);
};

/// H_t * f on a uniform grid, far field extended by the boundary values.
std::vector<double> convolve(std::span<const double> f, double t, double dx);

/// Chemoattractant field at time t from the variation-of-constants
/// representation of the reaction-diffusion equation: with lam = D =
/// 2/(1+alpha) and source S = lam * alpha^(1/alpha) q^(1/alpha),
///   phi(t) = e^{-lam t} H_{D t} * phi0
///          + int_0^t e^{-lam (t-t')} H_{D (t-t')} * S(t') dt'.
/// The history integral is a trapezoid over the given samples; the
/// singular-looking endpoint uses H_{0+} * S = S.
std::vector<double> duhamel_phi(std::span<const double> phi0,
                                std::span<const double> times,
                                std::span<const std::vector<double>> q_history,
                                double t, double dx, const ModelParams& p);

struct DecayCheck {
  double C0 = 0.0;            // sup (1+x^2)^a |f|
  double C1 = 0.0;            // smallest constant covering both kernel bounds
  double tail_exponent = 0.0; // fitted log|f| vs log(1+x^2) slope on the tail
  bool pass = false;          // input decays at least like (1+x^2)^{-a}
};

/// Verifies |H_t*f| <= C1 (1+x^2)^{-a} and |H_t*f_x| <= C1 t^{-1/2} (1+x^2)^{-a}
/// over the given diffusion times and returns the smallest empirical C1.
DecayCheck weighted_decay_check(std::span<const double> f, std::span<const double> x,
                                double a, std::span<const double> times);

/// Same with geometrically spaced times in (0, T].
DecayCheck weighted_decay_check(std::span<const double> f, std::span<const double> x,
                                double a, double T);

}  // namespace hpc::heat
