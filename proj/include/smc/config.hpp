#pragma once

#include <cstdint>
#include <string>

#include "smc/spheroid.hpp"

namespace smc {

/// Frequency/time discretization knobs shared by the analytical pipeline.
struct GridConfig {
  double dt = 0.5;          // s, time resolution (also the release bin width)
  double duration = 6000.0; // s, simulated horizon
  double oversample = 1.6;  // frequency window = oversample * duration
  int omega_count = 8192;   // frequency samples
  int n_max = 60;           // mode-series truncation order
};

struct ChannelParams {
  double per_cell_release = 3000.0;  // molecules per cell on release
};

struct OokParams {
  double slot = 600.0;            // T_s, s
  double per_cell_release = 1.0;  // single-molecule-per-cell link convention
  int isi_memory = 5;             // J
};

struct PbsParams {
  std::uint64_t seed = 1;
  int particles = 100000;
};

/// One experiment: geometry, medium, grids, link and simulator parameters.
/// Lengths are meters internally; the JSON schema takes micrometers for
/// lengths (keys suffixed _um).
struct ExperimentConfig {
  MediumSpec medium{1e-9};
  SpheroidSpec tx;
  SpheroidSpec rx;
  double separation = 1000e-6;  // m, transmitter center to receiver center
  GridConfig grid;
  ChannelParams channel;
  OokParams ook;
  PbsParams pbs;
  std::string output_dir;  // empty: env default or current directory
};

/// Table-style defaults: 275 um spheroids, 24000 cells of 3.14e-15 m^3,
/// receiver degradation 0.01/s, separation 1000 um, D = 1e-9 m^2/s.
ExperimentConfig default_config();

/// Strict JSON load: unknown keys are rejected by name, units converted,
/// invariants validated.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text, const std::string& origin);

/// Canonical (sorted-key) JSON round-trip of a config.
std::string config_to_json(const ExperimentConfig& config);

/// FNV-1a hash of the canonical JSON, hex encoded; identifies a run setup.
std::string config_hash(const ExperimentConfig& config);

/// Cross-field validation (throws ConfigError / module domain errors).
void validate_config(const ExperimentConfig& config);

}  // namespace smc
