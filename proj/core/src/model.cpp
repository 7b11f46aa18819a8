#include "hpc/model.hpp"

#include <cmath>
#include <stdexcept>

namespace hpc {

void ModelParams::validate() const {
  if (!(gamma > 1.0)) throw std::invalid_argument("gamma must be > 1");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (!(kappa0 > 0.0)) throw std::invalid_argument("kappa0 must be > 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(M > 0.0)) throw std::invalid_argument("M must be > 0");
  if (!(L > 0.0)) throw std::invalid_argument("L must be > 0");
  if (N < 16) throw std::invalid_argument("N too small");
  if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument("cfl must be in (0,1)");
  if (!relax_regime_checks) {
    const auto warns = regime_warnings();
    if (!warns.empty())
      throw std::invalid_argument("outside monitored regime: " + warns.front() +
                                  " (set relax_regime_checks to run anyway)");
  }
}

std::vector<std::string> ModelParams::regime_warnings() const {
  std::vector<std::string> w;
  if (kappa0 < min_admissible_kappa0() * (1.0 - 1e-12))
    w.push_back("kappa0 below 5(1+alpha)/alpha");
  if (8.0 * M * epsilon > 1.0 + 1e-12)
    w.push_back("8*M*epsilon exceeds 1");
  return w;
}

Background background(const ModelParams& p) {
  const double a = p.alpha();
  Background b;
  b.phi = std::pow(a * p.kappa0 / 2.0, 1.0 / a);
  b.rho = b.phi;
  b.q = p.kappa0 / 2.0;
  return b;
}

double rho_from_q(double q, double alpha) { return std::pow(alpha * q, 1.0 / alpha); }
double q_from_rho(double rho, double alpha) { return std::pow(rho, alpha) / alpha; }

void riemann_from_primitive(std::span<const double> rho, std::span<const double> u,
                            const ModelParams& p, Field& w, Field& z) {
  if (rho.size() != u.size()) throw std::invalid_argument("rho/u size mismatch");
  const double a = p.alpha();
  const double half_k = p.kappa0 / 2.0;
  w.resize(rho.size());
  z.resize(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0)) throw std::domain_error("riemann_from_primitive: rho <= 0");
    const double q = q_from_rho(rho[i], a);
    w[i] = u[i] + q + half_k;
    z[i] = u[i] - q + half_k;
  }
}

void primitive_from_riemann(std::span<const double> w, std::span<const double> z,
                            const ModelParams& p, Field& rho, Field& u, Field& q) {
  if (w.size() != z.size()) throw std::invalid_argument("w/z size mismatch");
  const double a = p.alpha();
  rho.resize(w.size());
  u.resize(w.size());
  q.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double qi = 0.5 * (w[i] - z[i]);
    if (!(qi > 0.0))
      throw std::domain_error("primitive_from_riemann: vacuum (w <= z) at index " +
                              std::to_string(i));
    q[i] = qi;
    u[i] = 0.5 * (w[i] + z[i] - p.kappa0);
    rho[i] = rho_from_q(qi, a);
  }
}

}  // namespace hpc
