#include "hpc/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "hpc/burgers_profile.hpp"
#include "hpc/io.hpp"

namespace hpc::pipeline {

using nlohmann::json;

namespace {

init::InitialDataSpec data_spec_from(const RunConfig& rc) {
  init::InitialDataSpec ds;
  ds.params = rc.params;
  ds.z_amplitude = rc.z_amplitude;
  ds.phi_perturbation = rc.phi_perturbation;
  ds.phi_shape = rc.phi_shape;
  if (rc.cutoff_outer > 0.0) {
    ds.cutoff_inner = rc.cutoff_inner > 0.0 ? rc.cutoff_inner : 0.35 * rc.params.L;
    ds.cutoff_outer = rc.cutoff_outer;
  } else if (rc.cutoff_inner > 0.0) {
    ds.cutoff_inner = rc.cutoff_inner;
  } else if (rc.params.L < 5.5) {
    // the admissible decay cannot fit; fall back to a flagged compact taper
    ds.cutoff_inner = 0.35 * rc.params.L;
    ds.cutoff_outer = 0.85 * rc.params.L;
  }
  return ds;
}

solver::SolverConfig solver_config_from(const RunConfig& rc) {
  solver::SolverConfig sc;
  sc.params = rc.params;
  sc.phi_method = rc.phi_method == "duhamel" ? solver::PhiMethod::DuhamelStep
                                             : solver::PhiMethod::ImexCentral;
  sc.transport = rc.transport_scheme == "upwind2" ? solver::Transport::Upwind2
                                                  : solver::Transport::Weno5;
  sc.coupling = rc.coupling == "burgers-test" ? solver::Coupling::BurgersTest
                                              : solver::Coupling::Full;
  sc.stop_slope = rc.stop_slope;
  sc.t_max_factor = rc.t_max_factor;
  sc.snapshot_stride = rc.snapshot_stride;
  sc.store_snapshots = false;  // the pipeline streams its own artifacts
  return sc;
}

const char* stop_reason_name(solver::StopReason r) {
  switch (r) {
    case solver::StopReason::SlopeThreshold: return "slope-threshold";
    case solver::StopReason::TimeLimit: return "t-limit";
    case solver::StopReason::Instability: return "instability";
    case solver::StopReason::StepLimit: return "step-limit";
  }
  return "?";
}

double max_abs_second_derivative(const Field& f, double dx) {
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < f.size(); ++i)
    m = std::max(m, std::abs(f[i - 1] - 2.0 * f[i] + f[i + 1]) / (dx * dx));
  return m;
}

double max_abs_first_derivative(const Field& f, double dx) {
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < f.size(); ++i)
    m = std::max(m, std::abs(f[i + 1] - f[i - 1]) / (2.0 * dx));
  return m;
}

}  // namespace

SimulationResult simulate(const RunConfig& rc, const std::string& out_dir, bool force,
                          bool monitor) {
  const auto t0 = std::chrono::steady_clock::now();
  SimulationResult res;

  if (!out_dir.empty()) {
    io::ensure_dir(out_dir);
    io::ensure_dir(out_dir + "/snapshots");
    io::ensure_dir(out_dir + "/selfsim");
    io::write_text_file(out_dir + "/config.effective", render_run_config(rc));
  }

  init::BuiltInitialData data = init::build(data_spec_from(rc));
  res.validation = init::validate(data);
  if (!out_dir.empty())
    io::write_text_file(out_dir + "/validation.json", res.validation.to_json());
  if (!res.validation.all_pass() && !force) {
    std::string failed;
    for (const auto& c : res.validation.items)
      if (!c.pass) failed += (failed.empty() ? "" : ", ") + c.id;
    throw ValidationFailure("initial data validation failed: " + failed);
  }

  const solver::SolverConfig sc = solver_config_from(rc);
  const bool full = sc.coupling == solver::Coupling::Full;
  res.initial_state = data.state;
  res.phixx_initial = max_abs_second_derivative(data.state.phi, data.state.grid.dx());

  mod::ModulationIntegrator ode_frame(rc.params);
  if (full) ode_frame.start(data.state);

  int snap_index = 0;
  std::mutex io_mutex;
  std::optional<PhysicalState> cusp_state;
  auto observer = [&](const PhysicalState& s, const solver::SlopeSample& sample) {
    if (rc.cusp_capture_slope > 0.0 && !cusp_state &&
        sample.min_wx <= -rc.cusp_capture_slope)
      cusp_state = s;
    if (full && s.t > 0.0) ode_frame.advance(s);
    res.phixx_max = std::max(
        res.phixx_max, max_abs_second_derivative(s.phi, s.grid.dx()));
    res.zx_max = std::max(res.zx_max, max_abs_first_derivative(s.z, s.grid.dx()));

    if (full && sample.min_wx < 0.0) {
      try {
        mod::ModulationState emp = mod::extract_empirical(s);
        // refine the frame off the resolved wings: the raw slope minimum
        // reads low once the core approaches the grid scale, which would
        // bias every (tau - t)-scaled derivative the monitor checks
        try {
          const diag::SimilarityFrame f = diag::fit_similarity_frame(s);
          if (f.residual < 0.05) {
            emp.tau = s.t + f.delta;
            emp.xi = f.xi;
            emp.kappa = f.kappa;
          }
        } catch (const std::runtime_error&) {
        }
        auto [td, xd] = mod::modulation_rhs(s, emp, rc.params);
        emp.tau_dot = td;
        emp.xi_dot = xd;
        res.mod_empirical.push_back(emp);
        const double window = mod::max_y_window(s, emp) * 0.999;
        mod::SelfSimilarSnapshot snap = mod::to_selfsimilar(s, emp, rc.params, window);
        if (monitor) {
          res.bootstrap.push_back(diag::bootstrap_monitor(snap, rc.params));
          res.profile_distances.push_back(diag::profile_distance(snap, rc.params));
        }
        res.history.push_back(snap.decimated(2048));
      } catch (const std::runtime_error&) {
        // frame not extractable on this snapshot (flat slope or collapsed
        // derivative); diagnostics simply skip it
      }
    }
    if (!out_dir.empty()) {
      std::scoped_lock lk(io_mutex);
      char name[64];
      std::snprintf(name, sizeof name, "/snapshots/%04d.csv", snap_index++);
      io::write_snapshot_csv(out_dir + name, s, rc.params);
    }
  };

  solver::RunTrace trace = solver::run_until_blowup(data.state, sc, observer);
  res.stop_reason = trace.stop_reason;
  res.steps = trace.steps;
  res.slope_series = std::move(trace.slope_series);
  res.final_state = std::move(trace.final_state);
  res.mass_initial = trace.mass_initial;
  res.mass_final = trace.mass_final;
  res.mod_ode = ode_frame.series();

  res.wx_initial = std::abs(res.slope_series.front().min_wx);
  for (const auto& s : res.slope_series)
    res.wx_peak = std::max(res.wx_peak, std::abs(s.min_wx));

  // frame-fit estimate where the wings are fit-able, else the slope-track fit
  try {
    const PhysicalState& bs = cusp_state ? *cusp_state : res.final_state;
    res.blowup = diag::estimate_blowup_from_frame(bs, rc.params);
  } catch (const std::runtime_error&) {
    res.blowup = diag::estimate_blowup(res.slope_series, res.final_state.grid.dx());
  }
  try {
    res.rate = diag::fit_blowup_rate(res.slope_series, res.final_state.grid.dx());
  } catch (const std::runtime_error& e) {
    res.rate_error = e.what();
  }
  try {
    const PhysicalState& cs = cusp_state ? *cusp_state : res.final_state;
    const solver::SlopeSample cm = solver::min_slope_sample(cs);
    res.cusp = diag::fit_cusp_exponent(cs, cm.argmin_x);
    res.cusp_at_t = cs.t;
    res.cusp_at_slope = -cm.min_wx;
  } catch (const std::runtime_error& e) {
    res.cusp_error = e.what();
  }
  res.continuation = diag::continuation_integral(res.slope_series, res.blowup.T_star);

  res.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!out_dir.empty()) {
    {
      std::vector<std::vector<double>> cols(3);
      for (const auto& s : res.slope_series) {
        cols[0].push_back(s.t);
        cols[1].push_back(s.min_wx);
        cols[2].push_back(s.argmin_x);
      }
      const std::vector<std::string> hdr = {"t", "min_wx", "argmin_x"};
      io::write_csv_file(out_dir + "/slope_series.csv", hdr, cols);
    }
    {
      int k = 0;
      for (const auto& snap : res.history) {
        char name[64];
        std::snprintf(name, sizeof name, "/selfsim/%04d.csv", k++);
        std::vector<std::string> hdr = {"y", "W", "Z", "Phi", "sigma", "U",
                                        "dW1", "dW2", "dW3", "dW4"};
        io::write_csv_file(out_dir + name, hdr,
                           {snap.y, snap.W, snap.Z, snap.Phi, snap.sigma, snap.U,
                            snap.dW[1], snap.dW[2], snap.dW[3], snap.dW[4]});
      }
    }
    {
      std::vector<std::vector<double>> cols(7);
      for (const auto& m : res.mod_empirical) {
        cols[0].push_back(m.t);
        cols[1].push_back(m.s());
        cols[2].push_back(m.tau);
        cols[3].push_back(m.xi);
        cols[4].push_back(m.kappa);
        cols[5].push_back(m.tau_dot);
        cols[6].push_back(m.xi_dot);
      }
      const std::vector<std::string> hdr = {"t", "s", "tau", "xi", "kappa", "tau_dot", "xi_dot"};
      io::write_csv_file(out_dir + "/modulation.csv", hdr, cols);
    }

    json summary;
    summary["stop_reason"] = stop_reason_name(res.stop_reason);
    summary["steps"] = res.steps;
    summary["t_stop"] = res.final_state.t;
    summary["T_star_est"] = res.blowup.T_star;
    summary["T_star_uncertainty"] = res.blowup.T_star_uncertainty;
    summary["x_star_est"] = res.blowup.x_star;
    summary["x_star_uncertainty"] = res.blowup.x_star_uncertainty;
    summary["mass_initial"] = res.mass_initial;
    summary["mass_final"] = res.mass_final;
    summary["mass_drift_rel"] =
        std::abs(res.mass_final - res.mass_initial) / std::abs(res.mass_initial);
    summary["wx_growth"] = res.wx_growth();
    summary["phixx_initial"] = res.phixx_initial;
    summary["phixx_max"] = res.phixx_max;
    summary["zx_max"] = res.zx_max;
    io::write_text_file(out_dir + "/summary.json", summary.dump(2) + "\n");

    json dj;
    if (res.rate) {
      dj["rate"] = {{"T_star", res.rate->T_star},
                    {"exponent", res.rate->exponent},
                    {"decades", res.rate->decades},
                    {"n_samples", res.rate->n_samples}};
    } else {
      dj["rate"] = {{"error", res.rate_error}};
    }
    if (res.cusp) {
      dj["cusp"] = {{"exponent", res.cusp->exponent},
                    {"exponent_left", res.cusp->exponent_left},
                    {"exponent_right", res.cusp->exponent_right},
                    {"gradient_exponent", res.cusp->gradient_exponent},
                    {"decades", res.cusp->decades},
                    {"profile_t", res.cusp_at_t},
                    {"profile_min_wx", -res.cusp_at_slope},
                    {"note", "profile taken at the slope-threshold time above, "
                             "not at T* itself"}};
    } else {
      dj["cusp"] = {{"error", res.cusp_error}};
    }
    dj["continuation"] = {{"total", res.continuation.integral.empty()
                                        ? 0.0
                                        : res.continuation.integral.back()},
                          {"log_coefficient", res.continuation.log_coefficient},
                          {"divergence_flag", res.continuation.divergence_flag}};
    json viol = json::array();
    for (const auto& rep : res.bootstrap)
      for (const auto& v : rep.violations)
        viol.push_back({{"id", v.id}, {"s", rep.s}, {"t", rep.t},
                        {"margin", v.margin}, {"y", v.worst_y}});
    dj["bootstrap_violations"] = viol;
    dj["bootstrap_snapshots"] = res.bootstrap.size();
    io::write_text_file(out_dir + "/diagnostics.json", dj.dump(2) + "\n");

    if (!res.bootstrap.empty()) {
      std::vector<std::string> hdr = {"s"};
      for (const auto& m : res.bootstrap.front().margins) hdr.push_back(m.id);
      std::vector<std::vector<double>> cols(hdr.size());
      for (const auto& rep : res.bootstrap) {
        cols[0].push_back(rep.s);
        for (std::size_t k = 0; k < rep.margins.size(); ++k)
          cols[k + 1].push_back(rep.margins[k].margin);
      }
      io::write_csv_file(out_dir + "/bootstrap_margins.csv", hdr, cols);
    }
  }
  return res;
}

bool profile_check(const std::string& out_dir, std::size_t half_points) {
  const auto grid = burgers::log_symmetric_grid(1e-6, 1e6, half_points);
  const auto rep = burgers::check_profile_properties(grid, 1e-10);
  if (!out_dir.empty()) {
    io::ensure_dir(out_dir);
    json j;
    j["ode_residual_sup"] = rep.ode_residual_sup;
    j["cubic_residual_sup"] = rep.cubic_residual_sup;
    json items = json::array();
    for (const auto& it : rep.items)
      items.push_back({{"id", it.id}, {"pass", it.pass}, {"worst_margin", it.worst_margin},
                       {"worst_y", it.worst_y}});
    j["items"] = items;
    j["all_pass"] = rep.all_pass();
    io::write_text_file(out_dir + "/profile_report.json", j.dump(2) + "\n");
    std::ofstream csv(out_dir + "/profile.csv");
    const auto coarse = burgers::log_symmetric_grid(1e-6, 1e6, 2000);
    burgers::write_profile_csv(csv, coarse);
  }
  return rep.all_pass();
}

init::ValidationReport initial_check(const RunConfig& rc, const std::string& out_dir) {
  init::BuiltInitialData data = init::build(data_spec_from(rc));
  auto rep = init::validate(data);
  if (!out_dir.empty()) {
    io::ensure_dir(out_dir);
    io::write_text_file(out_dir + "/validation.json", rep.to_json());
    io::write_snapshot_csv(out_dir + "/initial_state.csv", data.state, rc.params);
  }
  return rep;
}

std::vector<SweepRow> sweep(const RunConfig& rc, const std::string& out_dir, int jobs,
                            bool force) {
  if (rc.sweep_param.empty() || rc.sweep_values.empty()) {
    simulate(rc, out_dir, force);
    return {};
  }
  if (rc.sweep_param != "epsilon" && rc.sweep_param != "beta" && rc.sweep_param != "gamma")
    throw std::runtime_error("sweep_param must be epsilon, beta or gamma");

  std::vector<SweepRow> rows(rc.sweep_values.size());
  std::mutex next_mutex;
  std::size_t next = 0;
  auto worker = [&] {
    while (true) {
      std::size_t k;
      {
        std::scoped_lock lk(next_mutex);
        if (next >= rows.size()) return;
        k = next++;
      }
      RunConfig job = rc;
      job.sweep_param.clear();
      job.sweep_values.clear();
      const double v = rc.sweep_values[k];
      if (rc.sweep_param == "epsilon") job.params.epsilon = v;
      if (rc.sweep_param == "beta") job.params.beta = v;
      if (rc.sweep_param == "gamma") job.params.gamma = v;
      rows[k].value = v;
      try {
        const std::string dir =
            out_dir.empty() ? "" : out_dir + "/job_" + std::to_string(k);
        const SimulationResult r = simulate(job, dir, force);
        rows[k].ok = true;
        rows[k].T_star = r.blowup.T_star;
        rows[k].x_star = r.blowup.x_star;
        if (r.rate) rows[k].rate_exponent = r.rate->exponent;
        if (r.cusp) rows[k].cusp_exponent = r.cusp->exponent;
        double worst = 0.0;
        for (const auto& rep : r.bootstrap)
          for (const auto& m : rep.margins) worst = std::max(worst, m.margin);
        rows[k].min_bootstrap_headroom = 1.0 - worst;
      } catch (const std::exception& e) {
        rows[k].ok = false;
        rows[k].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < std::max(1, jobs); ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  if (!out_dir.empty()) {
    io::ensure_dir(out_dir);
    std::ofstream f(out_dir + "/sweep.csv");
    f << rc.sweep_param << ",ok,T_star,x_star,rate_exponent,cusp_exponent,bootstrap_headroom\n";
    for (const auto& r : rows) {
      char line[256];
      std::snprintf(line, sizeof line, "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.value,
                    r.ok ? 1 : 0, r.T_star, r.x_star, r.rate_exponent, r.cusp_exponent,
                    r.min_bootstrap_headroom);
      f << line;
    }
  }
  return rows;
}

int run(const RunManifest& m) {
  RunConfig rc;
  try {
    if (!m.config_path.empty()) rc = resolve_run_config(Config::parse_file(m.config_path));
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  try {
    if (m.mode == "profile-check") {
      return profile_check(m.out_dir) ? 0 : 1;
    } else if (m.mode == "initial-check") {
      return initial_check(rc, m.out_dir).all_pass() ? 0 : 1;
    } else if (m.mode == "simulate") {
      const auto r = simulate(rc, m.out_dir, m.force);
      return r.stop_reason == solver::StopReason::Instability ? 4 : 0;
    } else if (m.mode == "diagnose") {
      // re-run the diagnostics stack on a fresh simulation without artifacts
      const auto r = simulate(rc, m.out_dir, m.force);
      return r.stop_reason == solver::StopReason::Instability ? 4 : 0;
    } else if (m.mode == "sweep") {
      sweep(rc, m.out_dir, m.jobs, m.force);
      return 0;
    }
    std::cerr << "unknown mode: " << m.mode << "\n";
    return 2;
  } catch (const ValidationFailure& e) {
    std::cerr << e.what() << "\n(use --force to run anyway)\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace hpc::pipeline
