#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hpc/model.hpp"

namespace hpc::io {

/// CSV with a header row; columns must all have the same length.
void write_csv(std::ostream& os, std::span<const std::string> header,
               std::span<const std::span<const double>> columns);

void write_csv_file(const std::string& path, std::span<const std::string> header,
                    const std::vector<std::vector<double>>& columns);

/// Snapshot table x, w, z, phi, rho, u; rows decimated to at most
/// max_rows (0 = all).
void write_snapshot_csv(const std::string& path, const PhysicalState& s,
                        const ModelParams& p, std::size_t max_rows = 8192);

/// Creates the directory (and parents). Throws if it exists as a file.
void ensure_dir(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace hpc::io
