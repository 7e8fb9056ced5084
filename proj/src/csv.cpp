#include "smc/csv.hpp"

#include <cstdio>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "smc/errors.hpp"
#include "smc/version.hpp"

namespace smc {

std::string format_sig9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path), path_(path) {
  if (!out_) throw Error("cannot open output file: " + path);
}

void CsvWriter::comment(const std::string& line) { out_ << "# " << line << "\n"; }

void CsvWriter::header(const std::vector<std::string>& names) {
  columns_ = names.size();
  for (std::size_t i = 0; i < names.size(); ++i)
    out_ << names[i] << (i + 1 < names.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
  if (columns_ != 0 && values.size() != columns_)
    throw Error("row width mismatch writing " + path_);
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << format_sig9(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

std::vector<std::string> provenance_comments(const ExperimentConfig& config,
                                             const std::string& command) {
  return {
      "command: " + command,
      "version: " + std::string(kVersion),
      "config_hash: " + config_hash(config),
      "seed: " + std::to_string(config.pbs.seed),
  };
}

void write_run_manifest(const std::string& dir, const ExperimentConfig& config,
                        const std::string& command, const std::vector<std::string>& outputs,
                        const std::string& name) {
  nlohmann::json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["config_hash"] = config_hash(config);
  m["seed"] = config.pbs.seed;
  m["config"] = nlohmann::json::parse(config_to_json(config));
  m["outputs"] = outputs;
  const std::filesystem::path p = std::filesystem::path(dir) / name;
  std::ofstream out(p);
  if (!out) throw Error("cannot open output file: " + p.string());
  out << m.dump(2) << "\n";
}

std::string ensure_dir(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace smc
