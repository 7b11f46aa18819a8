#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hpc/initial_data.hpp"
#include "hpc/solver.hpp"

using namespace hpc;
using namespace hpc::solver;

namespace {

init::BuiltInitialData burgers_data(int n, double l, double eps = 0.01) {
  init::InitialDataSpec spec;
  spec.params.N = n;
  spec.params.L = l;
  spec.params.epsilon = eps;
  spec.params.relax_regime_checks = true;
  spec.cutoff_inner = 0.35 * l;
  spec.cutoff_outer = 0.8 * l;
  return init::build(spec);
}

SolverConfig burgers_config(const ModelParams& p, double stop) {
  SolverConfig sc;
  sc.params = p;
  sc.coupling = Coupling::BurgersTest;
  sc.stop_slope = stop;
  sc.store_snapshots = false;
  return sc;
}

PhysicalState background_state(const ModelParams& p) {
  const Background bg = background(p);
  PhysicalState s;
  s.grid = p.grid();
  s.w.assign(p.N, p.kappa0);
  s.z.assign(p.N, 0.0);
  s.phi.assign(p.N, bg.phi);
  return s;
}

// characteristics oracle for the decoupled mode
double characteristic_w(const init::BuiltInitialData& d, double x, double t) {
  const double c = d.spec.params.kappa0 / (1.0 + d.spec.params.alpha());
  double x0 = x;
  for (int it = 0; it < 100; ++it) {
    const double g = x0 + t * (d.w0(x0) - c) - x;
    const double dg = 1.0 + t * d.dw0(x0, 1);
    x0 -= g / dg;
    if (std::abs(g) < 1e-14) break;
  }
  return d.w0(x0);
}

}  // namespace

TEST_CASE("rhs vanishes at the background state for any beta") {
  for (double beta : {0.0, 1.0, 4.0}) {
    ModelParams p;
    p.N = 256;
    p.L = 2.0;
    p.beta = beta;
    p.relax_regime_checks = true;
    const PhysicalState s = background_state(p);
    SolverConfig sc;
    sc.params = p;
    Field dw, dz, dphi;
    rhs(s, sc, dw, dz, dphi);
    for (int i = 0; i < p.N; ++i) {
      CHECK(dw[i] == 0.0);
      CHECK(dz[i] == 0.0);
      CHECK(std::abs(dphi[i]) < 1e-12);
    }
  }
}

TEST_CASE("burgers-test rhs reduces to pure transport") {
  auto d = burgers_data(4096, 0.5);
  SolverConfig sc = burgers_config(d.spec.params, 100.0);
  Field dw, dz, dphi;
  rhs(d.state, sc, dw, dz, dphi);
  for (double v : dz) CHECK(v == 0.0);
  for (double v : dphi) CHECK(v == 0.0);
  // nodes outside the inner similarity scale match the analytic transport
  const double c = d.spec.params.kappa0 / (1.0 + d.spec.params.alpha());
  for (int i = 0; i < 4096; i += 32) {
    const double x = d.state.grid.x(i);
    if (std::abs(x) < 0.05 || std::abs(x) > 0.35) continue;
    const double expect = -(d.w0(x) - c) * d.dw0(x, 1);
    CHECK(dw[i] == doctest::Approx(expect).epsilon(5e-3).scale(std::abs(expect) + 1.0));
  }
}

TEST_CASE("rhs operator converges at high order against the analytic derivative") {
  double prev = 0.0;
  for (int n : {8192, 16384, 32768}) {
    auto d = burgers_data(n, 0.5);
    SolverConfig sc = burgers_config(d.spec.params, 100.0);
    Field dw, dz, dphi;
    rhs(d.state, sc, dw, dz, dphi);
    const double c = d.spec.params.kappa0 / (1.0 + d.spec.params.alpha());
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = d.state.grid.x(i);
      if (std::abs(x) > 0.3) continue;
      worst = std::max(worst, std::abs(dw[i] + (d.w0(x) - c) * d.dw0(x, 1)));
    }
    if (prev > 0.0) {
      const double order = std::log2(prev / worst);
      CHECK(order > 3.5);
    }
    prev = worst;
  }
}

TEST_CASE("cfl_dt arithmetic at the background") {
  ModelParams p;
  p.N = 2000;
  p.L = 1.0;  // dx = 1e-3
  p.relax_regime_checks = true;
  const PhysicalState s = background_state(p);
  SolverConfig sc;
  sc.params = p;
  // speed = alpha*kappa0/(1+alpha) = 5, dt = 0.4 * 1e-3 / 5
  CHECK(cfl_dt(s, sc) == doctest::Approx(8e-5).epsilon(1e-10));
}

TEST_CASE("cfl_dt clamps near blow-up") {
  ModelParams p;
  p.N = 2000;
  p.L = 1.0;
  p.relax_regime_checks = true;
  PhysicalState s = background_state(p);
  // inject a steep negative slope of -1000 over a few cells
  const double dx = s.grid.dx();
  for (int i = 0; i < p.N; ++i) {
    const double x = s.grid.x(i);
    s.w[i] = p.kappa0 - 1000.0 * dx * std::tanh((x - 0.2) / dx);
  }
  SolverConfig sc;
  sc.params = p;
  CHECK(cfl_dt(s, sc) <= 2e-4 * (1.0 + 1e-12));
}

TEST_CASE("background is a fixed point of step() over many steps") {
  ModelParams p;
  p.N = 512;
  p.L = 2.0;
  p.beta = 1.0;
  p.relax_regime_checks = true;
  PhysicalState s = background_state(p);
  SolverConfig sc;
  sc.params = p;
  const double dt = cfl_dt(s, sc);
  for (int k = 0; k < 10000; ++k) step(s, dt, sc);
  const Background bg = background(p);
  for (int i = 0; i < p.N; ++i) {
    CHECK(std::abs(s.w[i] - p.kappa0) < 1e-11);
    CHECK(std::abs(s.z[i]) < 1e-11);
    CHECK(std::abs(s.phi[i] - bg.phi) < 1e-9);
  }
}

TEST_CASE("two half steps vs one full step differ at third order") {
  auto d = burgers_data(2048, 0.5);
  SolverConfig sc = burgers_config(d.spec.params, 1e9);
  auto run = [&](double dt, int halves) {
    PhysicalState s = d.state;
    for (int k = 0; k < halves; ++k) step(s, dt / halves, sc);
    return s;
  };
  const double dt = 2e-5;
  const auto full = run(dt, 1);
  const auto half = run(dt, 2);
  double diff = 0.0;
  for (int i = 0; i < 2048; ++i) diff = std::max(diff, std::abs(full.w[i] - half.w[i]));
  // O(dt^3) scaling: quartering dt cuts the mismatch by ~64
  const auto full2 = run(dt / 4, 1);
  const auto half2 = run(dt / 4, 2);
  double diff2 = 0.0;
  for (int i = 0; i < 2048; ++i) diff2 = std::max(diff2, std::abs(full2.w[i] - half2.w[i]));
  CHECK(diff2 < diff / 30.0);
}

TEST_CASE("burgers solution matches characteristics before blow-up") {
  auto d = burgers_data(8192, 0.5);
  SolverConfig sc = burgers_config(d.spec.params, 1e9);
  sc.t_max_factor = 0.5;  // t = eps/2
  auto trace = run_until_blowup(d.state, sc);
  CHECK(trace.stop_reason == StopReason::TimeLimit);
  double linf = 0.0;
  for (int i = 0; i < 8192; ++i) {
    const double x = trace.final_state.grid.x(i);
    if (std::abs(x) > 0.35) continue;
    linf = std::max(linf, std::abs(trace.final_state.w[i] -
                                   characteristic_w(d, x, trace.final_state.t)));
  }
  CHECK(linf < 5e-3);
}

TEST_CASE("burgers convergence under grid doubling, observed order >= 1.8") {
  double prev = 0.0;
  for (int n : {8192, 16384, 32768}) {
    auto d = burgers_data(n, 0.5);
    SolverConfig sc = burgers_config(d.spec.params, 1e9);
    sc.t_max_factor = 0.5;
    auto trace = run_until_blowup(d.state, sc);
    double linf = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = trace.final_state.grid.x(i);
      if (std::abs(x) > 0.35) continue;
      linf = std::max(linf, std::abs(trace.final_state.w[i] -
                                     characteristic_w(d, x, trace.final_state.t)));
    }
    if (prev > 0.0) CHECK(std::log2(prev / linf) >= 1.8);
    prev = linf;
  }
}

TEST_CASE("burgers run stops by slope threshold near the characteristic time") {
  auto d = burgers_data(8192, 0.5);
  SolverConfig sc = burgers_config(d.spec.params, 300.0);
  auto trace = run_until_blowup(d.state, sc);
  CHECK(trace.stop_reason == StopReason::SlopeThreshold);
  const auto& last = trace.slope_series.back();
  // characteristic blow-up time is exactly eps
  const double t_star = last.t - 1.0 / last.min_wx;
  CHECK(t_star == doctest::Approx(0.01).epsilon(0.05));
  // slope series is strictly time-increasing with finite values
  for (std::size_t i = 1; i < trace.slope_series.size(); ++i) {
    CHECK(trace.slope_series[i].t > trace.slope_series[i - 1].t);
    CHECK(std::isfinite(trace.slope_series[i].min_wx));
  }
}

TEST_CASE("slope minimum is non-increasing once steep") {
  auto d = burgers_data(8192, 0.5);
  SolverConfig sc = burgers_config(d.spec.params, 300.0);
  auto trace = run_until_blowup(d.state, sc);
  double prev = 0.0;
  for (const auto& s : trace.slope_series) {
    if (s.min_wx < -200.0) {  // -2/eps
      if (prev < 0.0) CHECK(s.min_wx <= prev * (1.0 - 0.01) + 0.0);
      if (prev < 0.0) CHECK(s.min_wx <= prev + 0.01 * std::abs(prev));
      prev = s.min_wx;
    }
  }
}

TEST_CASE("mass conservation on a smooth run") {
  auto d = burgers_data(4096, 0.5);
  SolverConfig sc = burgers_config(d.spec.params, 1e9);
  sc.t_max_factor = 0.5;
  auto trace = run_until_blowup(d.state, sc);
  CHECK(std::abs(trace.mass_final - trace.mass_initial) / trace.mass_initial < 1e-6);
}

TEST_CASE("stop threshold too high on quiet data leads to a time-limit stop") {
  ModelParams p;
  p.N = 1024;
  p.L = 2.0;
  p.relax_regime_checks = true;
  PhysicalState s = background_state(p);
  for (int i = 0; i < p.N; ++i) s.w[i] += 0.01 * std::sin(s.grid.x(i));
  SolverConfig sc;
  sc.params = p;
  sc.coupling = Coupling::BurgersTest;
  sc.stop_slope = 10.0;
  sc.store_snapshots = false;
  auto trace = run_until_blowup(s, sc);
  CHECK(trace.stop_reason == StopReason::TimeLimit);
}

TEST_CASE("vacuum data is rejected by rhs") {
  ModelParams p;
  p.N = 64;
  p.L = 1.0;
  p.relax_regime_checks = true;
  PhysicalState s = background_state(p);
  s.z[30] = s.w[30];  // q = 0 there
  SolverConfig sc;
  sc.params = p;
  Field dw, dz, dphi;
  CHECK_THROWS_AS(rhs(s, sc, dw, dz, dphi), std::domain_error);
}

TEST_CASE("imex and duhamel phi paths agree on a smooth run") {
  init::InitialDataSpec spec;
  spec.params.N = 2048;
  spec.params.L = 6.0;
  spec.params.M = 45.0;
  spec.params.relax_regime_checks = true;
  auto d = init::build(spec);
  SolverConfig a;
  a.params = spec.params;
  a.coupling = Coupling::Full;
  a.stop_slope = 1e9;
  a.t_max_factor = 0.5;
  a.store_snapshots = false;
  SolverConfig b = a;
  b.phi_method = PhiMethod::DuhamelStep;
  auto ta = run_until_blowup(d.state, a);
  auto tb = run_until_blowup(d.state, b);
  double rel = 0.0, scale = 0.0;
  for (int i = 0; i < spec.params.N; ++i) {
    rel = std::max(rel, std::abs(ta.final_state.phi[i] - tb.final_state.phi[i]));
    scale = std::max(scale, std::abs(ta.final_state.phi[i]));
  }
  CHECK(rel / scale < 1e-4);
}
