#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "smc/config.hpp"

namespace smc {

/// Fixed nine-significant-digit scientific format (bit-stable regressions).
std::string format_sig9(double v);

/// CSV writer: '#' comment preamble, one header row, numeric rows.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void comment(const std::string& line);
  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t columns_ = 0;
};

/// Self-description block prepended to every artifact CSV.
std::vector<std::string> provenance_comments(const ExperimentConfig& config,
                                             const std::string& command);

/// Deterministic manifest.json (command, version, config hash + body, seed,
/// output list); no timestamps, so reruns are byte-identical.
void write_run_manifest(const std::string& dir, const ExperimentConfig& config,
                        const std::string& command, const std::vector<std::string>& outputs,
                        const std::string& name = "manifest.json");

/// Creates the directory (and parents) if needed; returns it back.
std::string ensure_dir(const std::string& dir);

}  // namespace smc
