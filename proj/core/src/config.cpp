#include "hpc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hpc {

namespace {

const std::set<std::string> kKnownKeys = {
    "gamma", "beta", "kappa0", "epsilon", "M", "L", "N", "cfl",
    "relax_regime_checks",
    "phi_method", "transport_scheme", "coupling",
    "stop_slope", "t_max_factor", "snapshot_stride", "cusp_capture_slope",
    "cutoff_inner", "cutoff_outer", "z_amplitude", "phi_perturbation", "phi_shape",
    "sweep_param", "sweep_values",
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!kKnownKeys.count(key))
      throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    c.kv_[key] = val;
  }
  return c;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_string(ss.str());
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::size_t pos = 0;
  const double v = std::stod(it->second, &pos);
  if (pos != it->second.size())
    throw std::runtime_error("config key '" + key + "': not a number: " + it->second);
  return v;
}

int Config::get_int(const std::string& key, int fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::size_t pos = 0;
  const int v = std::stoi(it->second, &pos);
  if (pos != it->second.size())
    throw std::runtime_error("config key '" + key + "': not an integer: " + it->second);
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw std::runtime_error("config key '" + key + "': not a boolean: " + it->second);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

RunConfig resolve_run_config(const Config& cfg) {
  RunConfig rc;
  ModelParams d;  // defaults
  rc.params.gamma = cfg.get_double("gamma", d.gamma);
  rc.params.beta = cfg.get_double("beta", d.beta);
  // kappa0 defaults to the smallest admissible amplitude for the given gamma
  const double a = 0.5 * (rc.params.gamma - 1.0);
  rc.params.kappa0 = cfg.get_double("kappa0", 5.0 * (1.0 + a) / a);
  rc.params.epsilon = cfg.get_double("epsilon", d.epsilon);
  rc.params.M = cfg.get_double("M", d.M);
  rc.params.L = cfg.get_double("L", d.L);
  rc.params.N = cfg.get_int("N", d.N);
  rc.params.cfl = cfg.get_double("cfl", d.cfl);
  rc.params.relax_regime_checks = cfg.get_bool("relax_regime_checks", false);

  rc.phi_method = cfg.get_string("phi_method", rc.phi_method);
  rc.transport_scheme = cfg.get_string("transport_scheme", rc.transport_scheme);
  rc.coupling = cfg.get_string("coupling", rc.coupling);
  rc.stop_slope = cfg.get_double("stop_slope", rc.stop_slope);
  rc.t_max_factor = cfg.get_double("t_max_factor", rc.t_max_factor);
  rc.cusp_capture_slope = cfg.get_double("cusp_capture_slope", rc.cusp_capture_slope);
  rc.snapshot_stride = cfg.get_int("snapshot_stride", rc.snapshot_stride);
  rc.cutoff_inner = cfg.get_double("cutoff_inner", rc.cutoff_inner);
  rc.cutoff_outer = cfg.get_double("cutoff_outer", rc.cutoff_outer);
  rc.z_amplitude = cfg.get_double("z_amplitude", rc.z_amplitude);
  rc.phi_perturbation = cfg.get_double("phi_perturbation", rc.phi_perturbation);
  rc.phi_shape = cfg.get_string("phi_shape", rc.phi_shape);

  rc.sweep_param = cfg.get_string("sweep_param", "");
  const std::string vals = cfg.get_string("sweep_values", "");
  if (!vals.empty()) {
    std::istringstream is(vals);
    std::string tok;
    while (std::getline(is, tok, ',')) rc.sweep_values.push_back(std::stod(tok));
  }

  if (rc.phi_method != "imex-central" && rc.phi_method != "duhamel")
    throw std::runtime_error("phi_method must be imex-central or duhamel");
  if (rc.transport_scheme != "weno5" && rc.transport_scheme != "upwind2")
    throw std::runtime_error("transport_scheme must be weno5 or upwind2");
  if (rc.coupling != "full" && rc.coupling != "burgers-test")
    throw std::runtime_error("coupling must be full or burgers-test");
  return rc;
}

std::string render_run_config(const RunConfig& rc) {
  std::ostringstream os;
  os.precision(17);
  os << "gamma = " << rc.params.gamma << "\n"
     << "beta = " << rc.params.beta << "\n"
     << "kappa0 = " << rc.params.kappa0 << "\n"
     << "epsilon = " << rc.params.epsilon << "\n"
     << "M = " << rc.params.M << "\n"
     << "L = " << rc.params.L << "\n"
     << "N = " << rc.params.N << "\n"
     << "cfl = " << rc.params.cfl << "\n"
     << "relax_regime_checks = " << (rc.params.relax_regime_checks ? "true" : "false") << "\n"
     << "phi_method = " << rc.phi_method << "\n"
     << "transport_scheme = " << rc.transport_scheme << "\n"
     << "coupling = " << rc.coupling << "\n"
     << "stop_slope = " << rc.stop_slope << "\n"
     << "t_max_factor = " << rc.t_max_factor << "\n"
     << "cusp_capture_slope = " << rc.cusp_capture_slope << "\n"
     << "snapshot_stride = " << rc.snapshot_stride << "\n"
     << "cutoff_inner = " << rc.cutoff_inner << "\n"
     << "cutoff_outer = " << rc.cutoff_outer << "\n"
     << "z_amplitude = " << rc.z_amplitude << "\n"
     << "phi_perturbation = " << rc.phi_perturbation << "\n"
     << "phi_shape = " << rc.phi_shape << "\n";
  if (!rc.sweep_param.empty()) {
    os << "sweep_param = " << rc.sweep_param << "\n"
       << "sweep_values = ";
    for (std::size_t i = 0; i < rc.sweep_values.size(); ++i)
      os << (i ? "," : "") << rc.sweep_values[i];
    os << "\n";
  }
  return os.str();
}

}  // namespace hpc
