#include "hpc/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hpc::heat {

KernelConvolution KernelConvolution::make(double t, double dx) {
  if (!(t > 0.0)) throw std::domain_error("heat kernel: t must be > 0");
  if (!(dx > 0.0)) throw std::domain_error("heat kernel: dx must be > 0");
  KernelConvolution k;
  k.t = t;
  k.dx = dx;
  const double radius = 8.0 * std::sqrt(2.0 * t);
  const int m = std::max(1, int(std::ceil(radius / dx)));
  k.weights.resize(m + 1);
  const double norm = dx / std::sqrt(4.0 * std::numbers::pi * t);
  for (int j = 0; j <= m; ++j) {
    const double x = j * dx;
    k.weights[j] = norm * std::exp(-x * x / (4.0 * t));
  }
  k.raw_mass = k.weights[0];
  for (int j = 1; j <= m; ++j) k.raw_mass += 2.0 * k.weights[j];
  for (double& w : k.weights) w /= k.raw_mass;
  return k;
}

std::vector<double> convolve(std::span<const double> f, double t, double dx) {
  const KernelConvolution k = KernelConvolution::make(t, dx);
  const int n = int(f.size());
  const int m = int(k.weights.size()) - 1;
  std::vector<double> out(n);
  const double left = f.front(), right = f.back();
  auto at = [&](int j) { return j < 0 ? left : (j >= n ? right : f[j]); };
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double acc = k.weights[0] * f[i];
    for (int j = 1; j <= m; ++j) acc += k.weights[j] * (at(i - j) + at(i + j));
    out[i] = acc;
  }
  return out;
}

std::vector<double> duhamel_phi(std::span<const double> phi0,
                                std::span<const double> times,
                                std::span<const std::vector<double>> q_history,
                                double t, double dx, const ModelParams& p) {
  if (times.size() != q_history.size() || times.empty())
    throw std::invalid_argument("duhamel_phi: history samples missing or mismatched");
  if (times.front() > 0.0 || times.back() < t)
    throw std::invalid_argument("duhamel_phi: history must cover [0, t]");
  const double alpha = p.alpha();
  const double lam = 2.0 / (1.0 + alpha);  // = D
  const double src_coeff = lam * std::pow(alpha, 1.0 / alpha);

  auto source = [&](std::size_t k) {
    std::vector<double> s(q_history[k].size());
    for (std::size_t i = 0; i < s.size(); ++i)
      s[i] = src_coeff * std::pow(q_history[k][i], 1.0 / alpha);
    return s;
  };

  std::vector<double> phi;
  if (t > 0.0) {
    phi = convolve(phi0, lam * t, dx);
    for (double& v : phi) v *= std::exp(-lam * t);
  } else {
    phi.assign(phi0.begin(), phi0.end());
    return phi;
  }

  // trapezoid over the stored samples up to t
  std::size_t last = 0;
  while (last + 1 < times.size() && times[last + 1] <= t) ++last;
  std::vector<double> prev, cur;
  for (std::size_t k = 0; k <= last; ++k) {
    const double tk = times[k];
    std::vector<double> term = source(k);
    if (t - tk > 0.0) {
      term = convolve(term, lam * (t - tk), dx);
      const double damp = std::exp(-lam * (t - tk));
      for (double& v : term) v *= damp;
    }
    cur = std::move(term);
    if (k > 0) {
      const double h = times[k] - times[k - 1];
      for (std::size_t i = 0; i < phi.size(); ++i)
        phi[i] += 0.5 * h * (prev[i] + cur[i]);
    }
    prev = std::move(cur);
  }
  if (times[last] < t) {  // partial final interval ending exactly at t
    std::vector<double> end_term = source(last);  // H_{0+} * S = S at t' = t
    // linear interpolation of the source sample is unnecessary: the stored
    // history is step-dense, so reuse the last sample at both ends
    const double h = t - times[last];
    for (std::size_t i = 0; i < phi.size(); ++i)
      phi[i] += 0.5 * h * (prev[i] + end_term[i]);
  }
  return phi;
}

namespace {

std::vector<double> central_derivative(std::span<const double> f, double dx) {
  const int n = int(f.size());
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    const int im = std::max(0, i - 1), ip = std::min(n - 1, i + 1);
    g[i] = (f[ip] - f[im]) / ((ip - im) * dx);
  }
  return g;
}

}  // namespace

DecayCheck weighted_decay_check(std::span<const double> f, std::span<const double> x,
                                double a, std::span<const double> times) {
  if (!(a > 0.0)) throw std::domain_error("weighted_decay_check: a must be > 0");
  if (f.size() != x.size() || f.size() < 16)
    throw std::invalid_argument("weighted_decay_check: bad input");
  const double dx = x[1] - x[0];

  DecayCheck out;
  for (std::size_t i = 0; i < f.size(); ++i)
    out.C0 = std::max(out.C0, std::pow(1.0 + x[i] * x[i], a) * std::abs(f[i]));

  // fitted tail decay of the input itself, outer quarter of the grid
  {
    double sxx = 0, sxy = 0, sx = 0, sy = 0;
    int m = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (std::abs(x[i]) < 0.75 * std::abs(x.back()) || std::abs(f[i]) < 1e-300) continue;
      const double lx = std::log(1.0 + x[i] * x[i]);
      const double ly = std::log(std::abs(f[i]));
      sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
      ++m;
    }
    if (m >= 4 && sxx * m - sx * sx > 0)
      out.tail_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    else
      out.tail_exponent = -a;  // identically-zero tail: any decay rate holds
    const bool zero_tail = (m < 4);
    out.pass = zero_tail || out.tail_exponent <= -0.9 * a + 1e-9;
  }

  const std::vector<double> fx = central_derivative(f, dx);
  for (double t : times) {
    const auto g = convolve(f, t, dx);
    const auto gx = convolve(fx, t, dx);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double wgt = std::pow(1.0 + x[i] * x[i], a);
      out.C1 = std::max(out.C1, wgt * std::abs(g[i]));
      out.C1 = std::max(out.C1, std::sqrt(t) * wgt * std::abs(gx[i]));
    }
  }
  return out;
}

DecayCheck weighted_decay_check(std::span<const double> f, std::span<const double> x,
                                double a, double T) {
  if (!(T > 0.0)) throw std::domain_error("weighted_decay_check: T must be > 0");
  std::vector<double> ts;
  const int m = 12;
  for (int j = 0; j < m; ++j) ts.push_back(T * std::pow(1e-3, double(m - 1 - j) / (m - 1)));
  return weighted_decay_check(f, x, a, ts);
}

}  // namespace hpc::heat
