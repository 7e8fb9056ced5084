#pragma once

#include <map>
#include <string>
#include <vector>

#include "smc/channel.hpp"
#include "smc/config.hpp"

namespace smc {

/// Analytical-vs-simulated agreement for one measurement probe.
struct ProbeComparison {
  std::string label;
  double peak_rel_error = 0.0;       // |simulated peak - analytical peak| / analytical peak
  double time_of_peak_offset = 0.0;  // s, simulated minus analytical
  double band_fraction = 1.0;        // samples past 5 s inside +-3 sigma binomial bands
  double max_sigma_residual = 0.0;   // only where the analytical value > 5% of its peak
  int samples_checked = 0;
};

struct ComparisonReport {
  std::string figure;
  std::vector<ProbeComparison> probes;
  std::map<std::string, double> metrics;
  std::vector<std::string> notes;    // provenance: series origins, seed, truncation
  std::vector<std::string> outputs;  // files written
};

/// Runs one figure preset (fig2..fig8), writes its CSV artifacts and a JSON
/// report into out_dir, and returns the comparison. Deterministic for a given
/// config (the particle seed included). Throws PresetUnknown otherwise.
ComparisonReport validate_figure(const std::string& figure_id, const ExperimentConfig& config,
                                 const std::string& out_dir);

/// End-to-end response with overridden cell counts / receiver degradation,
/// on the config's grids. Building block for trend sweeps.
struct DeskLink {
  TxSpheroid tx;
  RxSpheroid rx;
  ChannelResponse resp;
};

DeskLink desk_link(const ExperimentConfig& base, double tx_cells, double rx_cells,
                   double rx_degradation, double per_cell_release);

/// Slot-level link figures derived from one response.
struct LinkSummary {
  double eps_tx = 0.0, eps_rx = 0.0;
  double peak_p_obs = 0.0, t_peak = 0.0;
  double slot = 0.0, t_sample = 0.0;
  double y_ts = 0.0, isi_total = 0.0;
  double threshold = 0.0, ber = 0.0;
};

LinkSummary summarize_link(const DeskLink& link, double slot, int isi_memory);

}  // namespace smc
