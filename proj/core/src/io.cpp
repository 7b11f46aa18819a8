#include "hpc/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hpc::io {

void write_csv(std::ostream& os, std::span<const std::string> header,
               std::span<const std::span<const double>> columns) {
  if (header.size() != columns.size())
    throw std::invalid_argument("write_csv: header/column count mismatch");
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << "\n";
  if (columns.empty()) return;
  const std::size_t rows = columns[0].size();
  for (const auto& col : columns)
    if (col.size() != rows) throw std::invalid_argument("write_csv: ragged columns");
  char buf[64];
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", columns[c][r]);
      os << (c ? "," : "") << buf;
    }
    os << "\n";
  }
}

void write_csv_file(const std::string& path, std::span<const std::string> header,
                    const std::vector<std::vector<double>>& columns) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  std::vector<std::span<const double>> spans(columns.begin(), columns.end());
  write_csv(f, header, spans);
}

void write_snapshot_csv(const std::string& path, const PhysicalState& s,
                        const ModelParams& p, std::size_t max_rows) {
  Field rho, u, q;
  primitive_from_riemann(s.w, s.z, p, rho, u, q);
  std::vector<std::vector<double>> cols = {s.grid.nodes(), s.w, s.z, s.phi, rho, u};
  const std::size_t n = cols[0].size();
  if (max_rows > 0 && n > max_rows) {
    const std::size_t stride = (n + max_rows - 1) / max_rows;
    for (auto& c : cols) {
      std::vector<double> d;
      d.reserve(n / stride + 2);
      for (std::size_t i = 0; i < n; i += stride) d.push_back(c[i]);
      if ((n - 1) % stride != 0) d.push_back(c[n - 1]);
      c = std::move(d);
    }
  }
  const std::vector<std::string> header = {"x", "w", "z", "phi", "rho", "u"};
  write_csv_file(path, header, cols);
}

void ensure_dir(const std::string& path) {
  std::filesystem::path p(path);
  if (std::filesystem::exists(p)) {
    if (!std::filesystem::is_directory(p))
      throw std::runtime_error("not a directory: " + path);
    return;
  }
  std::filesystem::create_directories(p);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << text;
}

}  // namespace hpc::io
