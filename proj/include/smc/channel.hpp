#pragma once

#include <vector>

#include "smc/gfc_core.hpp"
#include "smc/grids.hpp"
#include "smc/rx_gfc.hpp"
#include "smc/tx_gfc.hpp"

namespace smc {

/// Knobs shared by the end-to-end pipeline stages.
struct ChannelOptions {
  SeriesTruncation trunc{};
  InversionOptions inversion{};
  int source_nodes = 64;   // transmitter source-radius quadrature nodes
  int nodes_r = 48;        // receiver volume quadrature, radial
  int nodes_theta = 48;    // receiver volume quadrature, polar
};

/// End-to-end link response for one release event at t = 0.
struct ChannelResponse {
  TimeSeries g;       // transmitter release rate, 1/s (bin averages)
  TimeSeries p_obs;   // probability one released molecule sits in the receiver
  TimeSeries y;       // expected molecule count in the receiver
  double t_sample = 0.0;         // time of the p_obs peak
  double per_cell_release = 0.0;
  bool separation_warning = false;
};

/// Far-separation check behind the point-transmitter approximation.
bool far_separation_ok(const TxSpheroid& tx, const RxSpheroid& rx, double separation);

/// Elementwise product of two sweeps on the same grid (time-domain
/// convolution of the corresponding signals).
FrequencySweep sweep_product(const FrequencySweep& a, const FrequencySweep& b);

/// Concentration at a query point near the receiver for a full spheroid
/// release: release-rate spectrum times the receiver point response, inverted
/// onto tgrid. `source` is the transmitter center in receiver coordinates.
/// Warns on stderr when the far-separation assumption is dubious.
TimeSeries end_to_end_concentration(const TxSpheroid& tx, const RxSpheroid& rx,
                                    const SphericalPoint& source, const SphericalPoint& query,
                                    const FrequencyGrid& grid, const TimeGrid& tgrid,
                                    const ChannelOptions& opt = {});

/// Observation probability and expected count: p_hat = g_hat * q_hat with
/// q_hat the receiver-volume mass kernel, y = per_cell_release * N_c * p_obs.
ChannelResponse observation_probability(const TxSpheroid& tx, const RxSpheroid& rx,
                                        double separation, double per_cell_release,
                                        const FrequencyGrid& grid, const TimeGrid& tgrid,
                                        const ChannelOptions& opt = {});

/// Sampling instant restricted to one slot: argmax of p_obs over (0, T_s].
double sample_time(const ChannelResponse& resp, double slot_duration);

/// Expected residual counts from the J previous slots, I_j = y(j T_s + t_s).
struct IsiProfile {
  std::vector<double> values;  // I_j for j = 1..J
  double total() const;
};

IsiProfile isi_means(const ChannelResponse& resp, int isi_memory, double slot_duration,
                     double t_sample);

/// Convenience overload using sample_time(resp, slot_duration).
IsiProfile isi_means(const ChannelResponse& resp, int isi_memory, double slot_duration);

/// Linear interpolation of a time series (exact at grid points).
double series_at(const TimeSeries& series, double t);

}  // namespace smc
