#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "smc/config.hpp"
#include "smc/errors.hpp"
#include "smc/gfc_core.hpp"
#include "smc/rx_gfc.hpp"
#include "smc/validation.hpp"

using namespace smc;

namespace {

// Shrunken grid: same physics, faster inversion; long enough for 3 ISI slots.
ExperimentConfig quick_config() {
  ExperimentConfig c = default_config();
  c.grid.duration = 3000.0;
  c.grid.omega_count = 4096;
  return c;
}

const DeskLink& reference_link() {
  static const DeskLink link = desk_link(quick_config(), 24000, 24000, 0.01, 3000.0);
  return link;
}

}  // namespace

TEST_SUITE("validation") {

TEST_CASE("one-stop link summary is self-consistent") {
  const DeskLink& link = reference_link();
  const LinkSummary s = summarize_link(link, 600.0, 3);
  CHECK(s.eps_tx == doctest::Approx(0.13492412840352952).epsilon(1e-12));
  CHECK(s.eps_rx == doctest::Approx(0.13492412840352952).epsilon(1e-12));
  CHECK(s.peak_p_obs > 0.0);
  CHECK(s.peak_p_obs < 1.0);
  CHECK(s.t_peak > 0.0);
  CHECK(s.t_sample > 0.0);
  CHECK(s.t_sample <= s.slot);
  CHECK(s.slot == 600.0);
  // The sampled count is the expected-count series read at the sample instant.
  CHECK(s.y_ts == doctest::Approx(series_at(link.resp.y, s.t_sample)).epsilon(1e-12));
  CHECK(s.y_ts > 0.0);
  CHECK(s.isi_total >= 0.0);
  CHECK(s.isi_total < s.y_ts);  // interference below the in-slot signal here
  CHECK(s.threshold > 0.0);
  CHECK(s.ber >= 0.0);
  CHECK(s.ber <= 0.5);
  CHECK(std::isfinite(s.ber));
}

TEST_CASE("denser receiver packing raises and delays the peak and lowers the error rate") {
  const LinkSummary dense = summarize_link(reference_link(), 600.0, 3);
  const DeskLink sparse_link = desk_link(quick_config(), 24000, 9200, 0.01, 3000.0);
  const LinkSummary sparse = summarize_link(sparse_link, 600.0, 3);
  CHECK(sparse.eps_rx > dense.eps_rx);
  CHECK(dense.peak_p_obs > sparse.peak_p_obs);
  CHECK(dense.t_peak > sparse.t_peak);
  CHECK(dense.ber < sparse.ber);
}

TEST_CASE("figure presets reject unknown identifiers") {
  const auto dir = std::filesystem::temp_directory_path() / "smc_test_preset";
  std::filesystem::create_directories(dir);
  CHECK_THROWS_AS(validate_figure("fig1", quick_config(), dir.string()), PresetUnknown);
  CHECK_THROWS_AS(validate_figure("nonsense", quick_config(), dir.string()), PresetUnknown);
}

TEST_CASE("transparent receiver reproduces the free-diffusion kernel in time") {
  // With zero cells and zero degradation the receiver solve must collapse to
  // free diffusion from a point source: peak value (4 pi D t*)^{-3/2} e^{-3/2}
  // at t* = d^2 / (6 D), for any probe inside or outside the spheroid shell.
  const double d_coeff = 1e-9;
  SpheroidSpec spec;
  spec.radius = 275e-6;
  spec.cell_count = 0.0;
  spec.cell_volume = 3.14e-15;
  spec.degradation_rate = 0.0;
  const RxSpheroid rx = make_rx(spec, MediumSpec{d_coeff});
  const SphericalPoint source{1000e-6, M_PI / 2.0, 0.0};
  const std::vector<SphericalPoint> probes = {
      {0.0, 0.0, 0.0},            // spheroid center, 1000 um from the source
      {400e-6, M_PI / 2.0, 0.0},  // between shell and source, 600 um away
  };
  const double dists[] = {1000e-6, 600e-6};

  const FrequencyGrid grid = make_frequency_grid(1500.0, 4096, 1.6, 8.0);
  const TimeGrid tgrid = make_time_grid(0.0, 0.5, 3001);
  const std::vector<FrequencySweep> sweeps = rx_point_sweeps(rx, source, probes, grid);
  for (int i = 0; i < 2; ++i) {
    const TimeSeries series = inverse_transform(sweeps[i], tgrid);
    const double t_star = dists[i] * dists[i] / (6.0 * d_coeff);
    const double peak_star =
        std::pow(4.0 * M_PI * d_coeff * t_star, -1.5) * std::exp(-1.5);
    CHECK(std::abs(series.peak() - peak_star) < 0.01 * peak_star);
    CHECK(std::abs(series.time_of_peak() - t_star) <= tgrid.dt * 1.000001);
  }
}

}  // TEST_SUITE
