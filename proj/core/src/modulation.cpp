#include "hpc/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hpc/solver.hpp"

namespace hpc::mod {

double ModulationState::s() const {
  const double gap = tau - t;
  if (!(gap > 0.0)) throw std::runtime_error("modulation: tau - t must stay positive");
  return -std::log(gap);
}

namespace {

/// Cubic Lagrange interpolation on a uniform grid.
double interp_cubic(const Field& f, const Grid1D& g, double x) {
  const double dx = g.dx();
  const double fi = (x - g.x(0)) / dx;
  int i0 = int(std::floor(fi)) - 1;
  i0 = std::clamp(i0, 0, g.N - 4);
  const double u = fi - (i0 + 1);
  const double fm = f[i0], f0 = f[i0 + 1], f1 = f[i0 + 2], f2 = f[i0 + 3];
  return fm * (-u * (u - 1) * (u - 2) / 6.0) + f0 * ((u * u - 1) * (u - 2) / 2.0) +
         f1 * (-u * (u + 1) * (u - 2) / 2.0) + f2 * (u * (u * u - 1) / 6.0);
}

/// 4th-order central difference of order n (2nd order for n == 5), edges
/// clamped to the nearest interior stencil.
void derivative_array(const Field& f, double h, int n, std::vector<double>& out) {
  const int N = int(f.size());
  out.resize(N);
  const int r = n == 5 ? 3 : (n <= 2 ? 2 : 3);
  auto stencil = [&](int i) -> double {
    const double* c = f.data() + i;
    switch (n) {
      case 1: return (8.0 * (c[1] - c[-1]) - (c[2] - c[-2])) / (12.0 * h);
      case 2:
        return (-30.0 * c[0] + 16.0 * (c[1] + c[-1]) - (c[2] + c[-2])) / (12.0 * h * h);
      case 3:
        return (-13.0 * (c[1] - c[-1]) + 8.0 * (c[2] - c[-2]) - (c[3] - c[-3])) /
               (8.0 * h * h * h);
      case 4:
        return (-c[-3] + 12.0 * c[-2] - 39.0 * c[-1] + 56.0 * c[0] - 39.0 * c[1] +
                12.0 * c[2] - c[3]) /
               (6.0 * h * h * h * h);
      case 5:
        return (-c[-3] + 4.0 * c[-2] - 5.0 * c[-1] + 5.0 * c[1] - 4.0 * c[2] + c[3]) /
               (2.0 * std::pow(h, 5));
      default: throw std::invalid_argument("derivative_array: order 1..5");
    }
  };
#pragma omp parallel for schedule(static)
  for (int i = r; i < N - r; ++i) out[i] = stencil(i);
  for (int i = 0; i < r; ++i) out[i] = out[r];
  for (int i = N - r; i < N; ++i) out[i] = out[N - r - 1];
}

}  // namespace

ModulationState extract_empirical(const PhysicalState& state) {
  const solver::SlopeSample m = solver::min_slope_sample(state);
  if (!(m.min_wx < 0.0))
    throw std::runtime_error("extract_empirical: w_x is nowhere negative (no frame)");
  ModulationState out;
  out.t = state.t;
  out.tau = state.t - 1.0 / m.min_wx;
  out.xi = m.argmin_x;
  out.kappa = interp_cubic(state.w, state.grid, m.argmin_x);
  return out;
}

CenterDerivatives center_derivatives(const PhysicalState& state, double xi) {
  CenterDerivatives c;
  const double h = state.grid.dx();
  std::vector<double> stack;
  c.w[0] = interp_cubic(state.w, state.grid, xi);
  c.z[0] = interp_cubic(state.z, state.grid, xi);
  c.phi[0] = interp_cubic(state.phi, state.grid, xi);
  for (int n = 1; n <= 4; ++n) {
    derivative_array(state.w, h, n, stack);
    c.w[n] = interp_cubic(stack, state.grid, xi);
    if (n <= 2) {
      derivative_array(state.z, h, n, stack);
      c.z[n] = interp_cubic(stack, state.grid, xi);
    }
    if (n <= 3) {
      derivative_array(state.phi, h, n, stack);
      c.phi[n] = interp_cubic(stack, state.grid, xi);
    }
  }
  return c;
}

std::pair<double, double> modulation_rhs(const PhysicalState& state,
                                         const ModulationState& m, const ModelParams& p) {
  const double alpha = p.alpha();
  const double ratio = (1.0 - alpha) / (1.0 + alpha);
  const double gap = m.tau - state.t;  // e^{-s}
  if (!(gap > 0.0)) throw std::runtime_error("modulation_rhs: frame collapsed");
  const CenterDerivatives c = center_derivatives(state, m.xi);

  // all y-space center values written through x-space derivatives; the
  // exponential factors collapse into powers of the gap
  const double tau_dot = p.beta * gap / (1.0 + alpha) + ratio * gap * c.z[1] -
                         2.0 / (1.0 + alpha) * gap * gap * (c.phi[2] - 0.5 * p.beta * c.z[1]);

  const double w3_y0 = gap * gap * gap * gap * c.w[3];  // d3W/dy3 at y = 0
  if (std::abs(w3_y0) < 0.5)
    throw std::runtime_error("modulation_rhs: |d3W(0)| < 0.5, frame ill-conditioned");

  const double one_m = 1.0 - tau_dot;
  const double g72 = std::pow(gap, 3.5);
  const double g52 = std::pow(gap, 2.5);
  const double f2_0 = (2.0 / (1.0 + alpha) * g72 * (c.phi[3] - 0.5 * p.beta * c.z[2]) +
                       ratio * g52 * c.z[2]) /
                      one_m;
  const double xi_dot = -one_m * std::sqrt(gap) * f2_0 / w3_y0 + m.kappa + ratio * c.z[0] -
                        p.kappa0 / (1.0 + alpha);
  return {tau_dot, xi_dot};
}

double max_y_window(const PhysicalState& state, const ModulationState& m) {
  const double e32 = std::pow(m.exp_s(), 1.5);
  const double room = std::min(state.grid.L - m.xi, state.grid.L + m.xi) -
                      2.0 * state.grid.dx();
  return room * e32;
}

SelfSimilarSnapshot to_selfsimilar(const PhysicalState& state, const ModulationState& m,
                                   const ModelParams& p, double y_window) {
  if (!(y_window > 0.0)) throw std::invalid_argument("to_selfsimilar: y_window <= 0");
  if (y_window > max_y_window(state, m) * (1.0 + 1e-12))
    throw std::invalid_argument("to_selfsimilar: y-window maps outside the x-domain");

  SelfSimilarSnapshot snap;
  snap.t = state.t;
  snap.tau = m.tau;
  snap.xi = m.xi;
  snap.kappa = m.kappa;
  snap.tau_dot = m.tau_dot;
  snap.xi_dot = m.xi_dot;
  snap.s = m.s();

  const double es = m.exp_s();           // e^{s}
  const double es12 = std::sqrt(es);     // e^{s/2}
  const double e32 = es * es12;          // e^{3s/2}
  const double dx = state.grid.dx();
  snap.dy = dx * e32;

  const double half_width = y_window / e32;
  const int N = state.grid.N;
  int i0 = int(std::floor((m.xi - half_width + state.grid.L) / dx));
  int i1 = int(std::ceil((m.xi + half_width + state.grid.L) / dx));
  i0 = std::clamp(i0, 0, N - 1);
  i1 = std::clamp(i1, 0, N - 1);
  const int n = i1 - i0 + 1;

  snap.y.resize(n);
  snap.W.resize(n);
  snap.Z.resize(n);
  snap.Phi.resize(n);
  snap.sigma.resize(n);
  snap.U.resize(n);
  const double alpha = p.alpha();
  for (int k = 0; k < n; ++k) {
    const int i = i0 + k;
    const double x = state.grid.x(i);
    snap.y[k] = (x - m.xi) * e32;
    snap.W[k] = es12 * (state.w[i] - m.kappa);
    snap.Z[k] = state.z[i];
    snap.Phi[k] = state.phi[i];
    const double q = 0.5 * (state.w[i] - state.z[i]);
    snap.sigma[k] = rho_from_q(q, alpha);
    snap.U[k] = 0.5 * (state.w[i] + state.z[i] - p.kappa0);
  }

  std::vector<double> stack;
  for (int d = 1; d <= 5; ++d) {
    if (d <= 4) {
      derivative_array(state.w, dx, d, stack);
      auto& out = snap.dW[d];
      out.resize(n);
      const double scale = es12 * std::pow(e32, -double(d));
      for (int k = 0; k < n; ++k) out[k] = scale * stack[i0 + k];
      derivative_array(state.z, dx, d, stack);
      auto& oz = snap.dZ[d];
      oz.resize(n);
      const double zscale = std::pow(e32, -double(d));
      for (int k = 0; k < n; ++k) oz[k] = zscale * stack[i0 + k];
    }
    derivative_array(state.phi, dx, d, stack);
    auto& op = snap.dPhi[d];
    op.resize(n);
    const double pscale = std::pow(e32, -double(d));
    for (int k = 0; k < n; ++k) op[k] = pscale * stack[i0 + k];
  }
  return snap;
}

SelfSimilarSnapshot SelfSimilarSnapshot::decimated(std::size_t max_points) const {
  const std::size_t n = y.size();
  if (n <= max_points) return *this;
  SelfSimilarSnapshot out = *this;
  const std::size_t stride = (n + max_points - 1) / max_points;
  auto dec = [stride, n](const std::vector<double>& v) {
    std::vector<double> r;
    r.reserve(n / stride + 2);
    for (std::size_t i = 0; i < n; i += stride) r.push_back(v[i]);
    if ((n - 1) % stride != 0) r.push_back(v[n - 1]);
    return r;
  };
  out.y = dec(y);
  out.W = dec(W);
  out.Z = dec(Z);
  out.Phi = dec(Phi);
  out.sigma = dec(sigma);
  out.U = dec(U);
  for (auto& v : out.dW) if (!v.empty()) v = dec(v);
  for (auto& v : out.dZ) if (!v.empty()) v = dec(v);
  for (auto& v : out.dPhi) if (!v.empty()) v = dec(v);
  out.dy = dy * stride;
  return out;
}

ModulationIntegrator::ModulationIntegrator(const ModelParams& p, double freeze_dy)
    : p_(p), freeze_dy_(freeze_dy) {}

void ModulationIntegrator::start(const PhysicalState& initial) {
  m_ = ModulationState{};
  m_.t = initial.t;
  m_.tau = initial.t + p_.epsilon;
  m_.xi = 0.0;
  m_.kappa = interp_cubic(initial.w, initial.grid, 0.0);
  auto [td, xd] = modulation_rhs(initial, m_, p_);
  m_.tau_dot = td;
  m_.xi_dot = xd;
  frozen_ = false;
  series_.clear();
  series_.push_back(m_);
}

void ModulationIntegrator::advance(const PhysicalState& after) {
  const double dt = after.t - m_.t;
  if (dt <= 0.0) return;
  if (!frozen_) {
    const double dy = after.grid.dx() * std::pow(m_.exp_s(), 1.5);
    if (dy > freeze_dy_) frozen_ = true;
  }
  if (frozen_) {
    // derivatives no longer grid-resolvable; coast on the last rates
    m_.tau += m_.tau_dot * dt;
    m_.xi += m_.xi_dot * dt;
    m_.t = after.t;
  } else {
    // explicit predictor, trapezoid corrector on the advanced state
    ModulationState pred = m_;
    pred.t = after.t;
    pred.tau = m_.tau + dt * m_.tau_dot;
    pred.xi = m_.xi + dt * m_.xi_dot;
    pred.kappa = interp_cubic(after.w, after.grid, pred.xi);
    auto [td2, xd2] = modulation_rhs(after, pred, p_);
    m_.tau += 0.5 * dt * (m_.tau_dot + td2);
    m_.xi += 0.5 * dt * (m_.xi_dot + xd2);
    m_.t = after.t;
    m_.tau_dot = td2;
    m_.xi_dot = xd2;
  }
  m_.kappa = interp_cubic(after.w, after.grid, m_.xi);
  series_.push_back(m_);
}

namespace {

double interp_y(const std::vector<double>& ys, const std::vector<double>& f, double y) {
  // uniform ascending y-array
  const double dy = ys[1] - ys[0];
  const double fi = (y - ys[0]) / dy;
  const int n = int(ys.size());
  int i0 = std::clamp(int(std::floor(fi)) - 1, 0, n - 4);
  const double u = fi - (i0 + 1);
  const double fm = f[i0], f0 = f[i0 + 1], f1 = f[i0 + 2], f2 = f[i0 + 3];
  return fm * (-u * (u - 1) * (u - 2) / 6.0) + f0 * ((u * u - 1) * (u - 2) / 2.0) +
         f1 * (-u * (u + 1) * (u - 2) / 2.0) + f2 * (u * (u * u - 1) / 6.0);
}

}  // namespace

double velocity_at(VelocityField which, const SelfSimilarSnapshot& snap, double y,
                   const ModelParams& p) {
  const double alpha = p.alpha();
  const double ratio = (1.0 - alpha) / (1.0 + alpha);
  const double es12 = std::exp(0.5 * snap.s);
  const double one_m = 1.0 - snap.tau_dot;
  switch (which) {
    case VelocityField::W: {
      const double Z = interp_y(snap.y, snap.Z, y);
      const double W = interp_y(snap.y, snap.W, y);
      const double gw =
          es12 / one_m * (snap.kappa + ratio * Z - snap.xi_dot - p.kappa0 / (1.0 + alpha));
      return gw + 1.5 * y + W / one_m;
    }
    case VelocityField::Z: {
      const double W = interp_y(snap.y, snap.W, y);
      const double Z = interp_y(snap.y, snap.Z, y);
      const double gz =
          es12 / one_m * (ratio * snap.kappa - snap.xi_dot - p.kappa0 / (1.0 + alpha)) +
          ratio / one_m * W;
      return gz + 1.5 * y + es12 / one_m * Z;
    }
    case VelocityField::Sigma: {
      const double U = interp_y(snap.y, snap.U, y);
      return -es12 * snap.xi_dot / one_m + 1.5 * y + es12 / one_m * U;
    }
    case VelocityField::U: {
      const double U = interp_y(snap.y, snap.U, y);
      const double sig = interp_y(snap.y, snap.sigma, y);
      return -es12 * snap.xi_dot / one_m + 1.5 * y + es12 / one_m * U +
             es12 / one_m * std::pow(sig, alpha);
    }
  }
  return 0.0;
}

Trajectory integrate_trajectory(VelocityField which, double y0, double s0, double s1,
                                std::span<const SelfSimilarSnapshot> history,
                                const ModelParams& p, double ds) {
  if (history.size() < 2) throw std::invalid_argument("integrate_trajectory: need history");
  if (!(s1 > s0)) throw std::invalid_argument("integrate_trajectory: s1 <= s0");
  if (s0 < history.front().s - 1e-9 || s1 > history.back().s + 1e-9)
    throw std::invalid_argument("integrate_trajectory: s-range not covered by history");

  auto window_ok = [&](const SelfSimilarSnapshot& sn, double y) {
    return y >= sn.y.front() + 2 * sn.dy && y <= sn.y.back() - 2 * sn.dy;
  };

  // blended velocity, linear in s between bracketing snapshots
  auto vel = [&](double y, double s, bool& inside) -> double {
    std::size_t k = 0;
    while (k + 2 < history.size() && history[k + 1].s <= s) ++k;
    const auto& a = history[k];
    const auto& b = history[k + 1];
    const double u = std::clamp((s - a.s) / (b.s - a.s), 0.0, 1.0);
    inside = window_ok(a, y) && window_ok(b, y);
    if (!inside) return 0.0;
    return (1.0 - u) * velocity_at(which, a, y, p) + u * velocity_at(which, b, y, p);
  };

  if (ds <= 0.0) ds = (s1 - s0) / 2048.0;
  Trajectory tr;
  double y = y0;
  for (double s = s0; s < s1 - 1e-12;) {
    const double h = std::min(ds, s1 - s);
    tr.s.push_back(s);
    tr.y.push_back(y);
    bool in1 = true, in2 = true, in3 = true, in4 = true;
    const double k1 = vel(y, s, in1);
    const double k2 = vel(y + 0.5 * h * k1, s + 0.5 * h, in2);
    const double k3 = vel(y + 0.5 * h * k2, s + 0.5 * h, in3);
    const double k4 = vel(y + h * k3, s + h, in4);
    if (!(in1 && in2 && in3 && in4)) {
      tr.exited_window = true;
      return tr;
    }
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s += h;
  }
  tr.s.push_back(s1);
  tr.y.push_back(y);
  return tr;
}

}  // namespace hpc::mod
