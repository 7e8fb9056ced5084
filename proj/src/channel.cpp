#include "smc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "smc/errors.hpp"

namespace smc {

bool far_separation_ok(const TxSpheroid& tx, const RxSpheroid& rx, double separation) {
  return separation >= 2.0 * (tx.spec.radius + rx.spec.radius);
}

namespace {

void warn_separation(const TxSpheroid& tx, const RxSpheroid& rx, double separation) {
  if (!far_separation_ok(tx, rx, separation))
    std::cerr << "warning: separation " << separation
              << " m is below twice the summed spheroid radii; the point-transmitter "
                 "approximation degrades at this range\n";
}

}  // namespace

FrequencySweep sweep_product(const FrequencySweep& a, const FrequencySweep& b) {
  if (a.grid.omega_count != b.grid.omega_count || a.grid.omega_step != b.grid.omega_step ||
      a.grid.decay != b.grid.decay)
    throw DomainError("frequency sweeps use different grids");
  FrequencySweep out;
  out.grid = a.grid;
  out.values = a.values * b.values;
  return out;
}

TimeSeries end_to_end_concentration(const TxSpheroid& tx, const RxSpheroid& rx,
                                    const SphericalPoint& source, const SphericalPoint& query,
                                    const FrequencyGrid& grid, const TimeGrid& tgrid,
                                    const ChannelOptions& opt) {
  warn_separation(tx, rx, source.r);
  const FrequencySweep g_hat = tx_release_spectrum(tx, grid, opt.source_nodes);
  const FrequencySweep c_rx = rx_point_sweep(rx, source, query, grid, opt.trunc);
  return inverse_transform(sweep_product(g_hat, c_rx), tgrid, opt.inversion);
}

ChannelResponse observation_probability(const TxSpheroid& tx, const RxSpheroid& rx,
                                        double separation, double per_cell_release,
                                        const FrequencyGrid& grid, const TimeGrid& tgrid,
                                        const ChannelOptions& opt) {
  if (per_cell_release <= 0.0)
    throw DomainError("observation_probability: per-cell release count must be positive");
  ChannelResponse resp;
  resp.per_cell_release = per_cell_release;
  resp.separation_warning = !far_separation_ok(tx, rx, separation);
  warn_separation(tx, rx, separation);

  const FrequencySweep g_hat = tx_release_spectrum(tx, grid, opt.source_nodes);
  const SphericalPoint source{separation, 0.0, 0.0};  // whole-ball kernel: angle-free
  const FrequencySweep q_hat =
      rx_observation_sweep(rx, source, grid, opt.trunc, opt.nodes_r, opt.nodes_theta);

  resp.p_obs = inverse_transform(sweep_product(g_hat, q_hat), tgrid, opt.inversion);
  const double p_max = resp.p_obs.values.maxCoeff();
  if (p_max > 1.0 + 1e-9)
    throw DomainError("observation_probability: probability exceeds 1");
  resp.p_obs.values = resp.p_obs.values.min(1.0);

  const double duration = tgrid.time(tgrid.count - 1);
  const ReleaseProfile rel =
      release_rate(tx, tgrid.dt, std::max(duration, 2.0 * tgrid.dt), opt.source_nodes);
  resp.g.grid = rel.grid;
  resp.g.values = rel.g;

  resp.y.grid = tgrid;
  resp.y.values = per_cell_release * tx.spec.cell_count * resp.p_obs.values;
  resp.t_sample = resp.p_obs.time_of_peak();
  return resp;
}

double sample_time(const ChannelResponse& resp, double slot_duration) {
  if (slot_duration <= 0.0) throw DomainError("sample_time: slot duration must be positive");
  const TimeGrid& g = resp.p_obs.grid;
  int best = -1;
  double best_v = 0.0;
  for (int i = 0; i < g.count; ++i) {
    const double t = g.time(i);
    if (t <= 0.0) continue;
    if (t > slot_duration + 1e-12 * slot_duration) break;
    const double v = resp.p_obs.values[i];
    if (best < 0 || v > best_v) {
      best = i;
      best_v = v;
    }
  }
  if (best < 0) throw GridTooShort("sample_time: no grid points inside the first slot");
  return g.time(best);
}

double series_at(const TimeSeries& series, double t) {
  const TimeGrid& g = series.grid;
  const double pos = (t - g.t0) / g.dt;
  if (pos < -1e-9 || pos > g.count - 1 + 1e-9)
    throw GridTooShort("series_at: query time outside the computed grid");
  const int lo = std::clamp(static_cast<int>(std::floor(pos)), 0, g.count - 1);
  const int hi = std::min(lo + 1, g.count - 1);
  const double frac = std::clamp(pos - lo, 0.0, 1.0);
  return (1.0 - frac) * series.values[lo] + frac * series.values[hi];
}

double IsiProfile::total() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

IsiProfile isi_means(const ChannelResponse& resp, int isi_memory, double slot_duration,
                     double t_sample) {
  if (isi_memory < 0) throw DomainError("isi_means: negative memory");
  if (slot_duration <= 0.0) throw DomainError("isi_means: slot duration must be positive");
  IsiProfile profile;
  for (int j = 1; j <= isi_memory; ++j)
    profile.values.push_back(std::max(0.0, series_at(resp.y, j * slot_duration + t_sample)));
  return profile;
}

IsiProfile isi_means(const ChannelResponse& resp, int isi_memory, double slot_duration) {
  return isi_means(resp, isi_memory, slot_duration, sample_time(resp, slot_duration));
}

}  // namespace smc
