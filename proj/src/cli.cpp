#include "smc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smc/channel.hpp"
#include "smc/config.hpp"
#include "smc/csv.hpp"
#include "smc/errors.hpp"
#include "smc/ook.hpp"
#include "smc/pbs.hpp"
#include "smc/rx_gfc.hpp"
#include "smc/tx_gfc.hpp"
#include "smc/validation.hpp"
#include "smc/version.hpp"

namespace smc {

namespace {

std::string join_args(const std::vector<std::string>& args) {
  std::string s;
  for (const std::string& a : args) {
    if (!s.empty()) s += ' ';
    s += a;
  }
  return s;
}

std::string path_in(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir.empty() ? "." : dir) / name).string();
}

FrequencyGrid fgrid_of(const ExperimentConfig& cfg) {
  return make_frequency_grid(cfg.grid.duration, cfg.grid.omega_count, cfg.grid.oversample);
}

TimeGrid tgrid_of(const ExperimentConfig& cfg) {
  const int count = static_cast<int>(std::lround(cfg.grid.duration / cfg.grid.dt)) + 1;
  return make_time_grid(0.0, cfg.grid.dt, count);
}

SeriesTruncation trunc_of(const ExperimentConfig& cfg) {
  SeriesTruncation t;
  t.n_max = cfg.grid.n_max;
  return t;
}

int cmd_porosity(const ExperimentConfig& cfg, const std::string& dir, const std::string& command,
                 std::ostream& out) {
  const DerivedPorosity tx = derive_porosity(cfg.tx, cfg.medium);
  const DerivedPorosity rx = derive_porosity(cfg.rx, cfg.medium);
  char line[160];
  std::snprintf(line, sizeof line,
                "transmitter: eps=%.7f tau=%.7f d_eff=%.6e m^2/s kappa=%.7f", tx.porosity,
                tx.tortuosity, tx.d_eff, tx.kappa);
  out << line << "\n";
  std::snprintf(line, sizeof line,
                "receiver:    eps=%.7f tau=%.7f d_eff=%.6e m^2/s kappa=%.7f", rx.porosity,
                rx.tortuosity, rx.d_eff, rx.kappa);
  out << line << "\n";

  const std::string csv = path_in(dir, "porosity.csv");
  {
    CsvWriter w(csv);
    for (const std::string& c : provenance_comments(cfg, command)) w.comment(c);
    w.comment("derived parameters vs cell count at the receiver geometry");
    w.header({"n_c", "eps", "tau", "d_eff_m2_s", "kappa"});
    for (int n_c = 1000; n_c <= 25000; n_c += 500) {
      SpheroidSpec s = cfg.rx;
      s.cell_count = n_c;
      const DerivedPorosity d = derive_porosity(s, cfg.medium);
      w.row({static_cast<double>(n_c), d.porosity, d.tortuosity, d.d_eff, d.kappa});
    }
  }
  write_run_manifest(dir, cfg, command, {csv}, "porosity_manifest.json");
  return 0;
}

int cmd_gfc_rx(const ExperimentConfig& cfg, const std::string& dir, const std::string& command,
               std::ostream& out) {
  const RxSpheroid rx = make_rx(cfg.rx, cfg.medium);
  const SphericalPoint src{cfg.separation, M_PI / 2.0, 0.0};
  const FrequencyGrid grid = fgrid_of(cfg);
  const TimeGrid tgrid = tgrid_of(cfg);
  const BoundaryPairSweeps pair = rx_boundary_pair(rx, src, grid, trunc_of(cfg));
  const TimeSeries c_in = inverse_transform(pair.inside, tgrid);
  const TimeSeries c_out = inverse_transform(pair.outside, tgrid);
  out << "receiver surface response to a point release at r0=" << cfg.separation * 1e6
      << " um: peak inside " << format_sig9(c_in.peak()) << " /m^3 at " << c_in.time_of_peak()
      << " s, peak outside " << format_sig9(c_out.peak()) << " /m^3\n";

  const std::string csv = path_in(dir, "gfc_rx.csv");
  {
    CsvWriter w(csv);
    for (const std::string& c : provenance_comments(cfg, command)) w.comment(c);
    w.comment("surface point facing the source, just inside / just outside");
    w.header({"t_s", "conc_inside_per_m3", "conc_outside_per_m3"});
    for (int i = 0; i < tgrid.count; ++i)
      w.row({tgrid.time(i), c_in.values[i], c_out.values[i]});
  }
  write_run_manifest(dir, cfg, command, {csv}, "gfc_rx_manifest.json");
  return 0;
}

int cmd_gfc_tx(const ExperimentConfig& cfg, const std::string& dir, const std::string& command,
               std::ostream& out) {
  const TxSpheroid tx = make_tx(cfg.tx, cfg.medium);
  const double gamma = cfg.tx.radius;
  const FrequencyGrid grid = fgrid_of(cfg);
  const TimeGrid tgrid = tgrid_of(cfg);
  const FrequencySweep in_sweep = tx_volume_avg_sweep(tx, 0.999 * gamma, grid);
  const FrequencySweep out_sweep = tx_volume_avg_sweep(tx, 1.001 * gamma, grid);
  const TimeSeries c_in = inverse_transform(in_sweep, tgrid);
  const TimeSeries c_out = inverse_transform(out_sweep, tgrid);
  out << "transmitter surface response (cell-averaged release): peak inside "
      << format_sig9(c_in.peak()) << " /m^3, peak outside " << format_sig9(c_out.peak())
      << " /m^3\n";

  const std::string csv = path_in(dir, "gfc_tx.csv");
  {
    CsvWriter w(csv);
    for (const std::string& c : provenance_comments(cfg, command)) w.comment(c);
    w.comment("probe points at 0.999 and 1.001 of the transmitter radius");
    w.header({"t_s", "conc_inside_per_m3", "conc_outside_per_m3"});
    for (int i = 0; i < tgrid.count; ++i)
      w.row({tgrid.time(i), c_in.values[i], c_out.values[i]});
  }
  write_run_manifest(dir, cfg, command, {csv}, "gfc_tx_manifest.json");
  return 0;
}

int cmd_release_rate(const ExperimentConfig& cfg, const std::string& dir,
                     const std::string& command, std::ostream& out) {
  const TxSpheroid tx = make_tx(cfg.tx, cfg.medium);
  const ReleaseProfile rel = release_rate(tx, cfg.grid.dt, cfg.grid.duration);
  out << "released fraction by t=" << cfg.grid.duration << " s: " << format_sig9(rel.released_total)
      << "\n";

  const std::string csv = path_in(dir, "release_rate.csv");
  {
    CsvWriter w(csv);
    for (const std::string& c : provenance_comments(cfg, command)) w.comment(c);
    w.comment("expected release rate per released molecule, bin centers");
    w.header({"t_s", "g_per_s", "n_inside"});
    for (int i = 0; i < static_cast<int>(rel.g.size()); ++i)
      w.row({rel.grid.time(i), rel.g[i], rel.n_inside[i]});
  }
  write_run_manifest(dir, cfg, command, {csv}, "release_rate_manifest.json");
  return 0;
}

int cmd_channel(const ExperimentConfig& cfg, const std::string& dir, const std::string& command,
                std::ostream& out) {
  const TxSpheroid tx = make_tx(cfg.tx, cfg.medium);
  const RxSpheroid rx = make_rx(cfg.rx, cfg.medium);
  ChannelOptions opt;
  opt.trunc = trunc_of(cfg);
  const ChannelResponse resp = observation_probability(
      tx, rx, cfg.separation, cfg.channel.per_cell_release, fgrid_of(cfg), tgrid_of(cfg), opt);
  const double t_s = sample_time(resp, cfg.ook.slot);
  const IsiProfile isi = isi_means(resp, cfg.ook.isi_memory, cfg.ook.slot, t_s);
  out << "peak p_obs " << format_sig9(resp.p_obs.peak()) << " at " << resp.p_obs.time_of_peak()
      << " s; sample time " << t_s << " s in a " << cfg.ook.slot << " s slot; expected count "
      << format_sig9(series_at(resp.y, t_s)) << "\n";

  const std::string csv1 = path_in(dir, "channel.csv");
  {
    CsvWriter w(csv1);
    for (const std::string& c : provenance_comments(cfg, command)) w.comment(c);
    w.comment("observation probability and expected received count, " +
              std::to_string(cfg.channel.per_cell_release) + " molecules per cell");
    w.header({"t_s", "p_obs", "y"});
    for (int i = 0; i < resp.p_obs.grid.count; ++i)
      w.row({resp.p_obs.grid.time(i), resp.p_obs.values[i], resp.y.values[i]});
  }
  const std::string csv2 = path_in(dir, "channel_isi.csv");
  {
    CsvWriter w(csv2);
    for (const std::string& c : provenance_comments(cfg, command)) w.comment(c);
    w.comment("interfering means at offsets j*T_s past the sample time");
    w.header({"j", "I_j"});
    for (std::size_t j = 0; j < isi.values.size(); ++j)
      w.row({static_cast<double>(j + 1), isi.values[j]});
  }
  write_run_manifest(dir, cfg, command, {csv1, csv2}, "channel_manifest.json");
  return 0;
}

int cmd_ber(const ExperimentConfig& cfg, const std::string& dir, const std::string& command,
            std::ostream& out) {
  const DeskLink link = desk_link(cfg, cfg.tx.cell_count, cfg.rx.cell_count,
                                  cfg.rx.degradation_rate, cfg.ook.per_cell_release);
  const LinkSummary s = summarize_link(link, cfg.ook.slot, cfg.ook.isi_memory);
  out << "T_s " << s.slot << " s, memory " << cfg.ook.isi_memory << ": sample at " << s.t_sample
      << " s, signal mean " << format_sig9(s.y_ts) << ", interference total "
      << format_sig9(s.isi_total) << ", threshold " << format_sig9(s.threshold) << ", BER "
      << format_sig9(s.ber) << "\n";

  const std::string csv = path_in(dir, "ber.csv");
  {
    CsvWriter w(csv);
    for (const std::string& c : provenance_comments(cfg, command)) w.comment(c);
    w.comment("exact bit error rate, " + std::to_string(cfg.ook.per_cell_release) +
              " molecules per cell, memory " + std::to_string(cfg.ook.isi_memory));
    w.header({"T_s", "ber"});
    w.row({s.slot, s.ber});
  }
  write_run_manifest(dir, cfg, command, {csv}, "ber_manifest.json");
  return 0;
}

int cmd_pbs(const ExperimentConfig& cfg, const std::string& dir, const std::string& command,
            std::ostream& out) {
  const TxSpheroid tx = make_tx(cfg.tx, cfg.medium);
  const RxSpheroid rx = make_rx(cfg.rx, cfg.medium);
  ScenarioSphere stx, srx;
  stx.center = to_cartesian(cfg.tx.center);
  stx.radius = cfg.tx.radius;
  stx.diffusion = tx.der.d_eff;
  stx.degradation = cfg.tx.degradation_rate;
  srx.center = to_cartesian(cfg.rx.center);
  srx.radius = cfg.rx.radius;
  srx.diffusion = rx.der.d_eff;
  srx.degradation = cfg.rx.degradation_rate;
  const Scenario scenario = make_scenario(cfg.medium.diffusion_coeff, {stx, srx});

  const int per_cell =
      std::max(1, static_cast<int>(std::lround(cfg.pbs.particles / cfg.tx.cell_count)));
  PbsConfig pc;
  pc.dt = cfg.grid.dt;
  ParticleEnsemble ens = release_from_spheroid(cfg.tx, per_cell, cfg.pbs.seed, scenario);
  const TimeGrid tgrid = tgrid_of(cfg);

  const std::string csv = path_in(dir, "pbs_counts.csv");
  {
    CsvWriter w(csv);
    for (const std::string& c : provenance_comments(cfg, command)) w.comment(c);
    w.comment("particles released: " + std::to_string(ens.positions.size()) + " (" +
              std::to_string(per_cell) + " per cell)");
    w.header({"t_s", "count_transmitter", "count_receiver", "count_alive"});
    const auto record = [&](double t) {
      w.row({t, static_cast<double>(count_in_ball(ens, stx.center, stx.radius)),
             static_cast<double>(count_in_ball(ens, srx.center, srx.radius)),
             static_cast<double>(ens.alive_count())});
    };
    record(0.0);
    for (int i = 1; i < tgrid.count; ++i) {
      step(ens, scenario, pc);
      record(tgrid.time(i));
    }
  }
  out << "stepped " << ens.positions.size() << " particles for " << tgrid.count - 1
      << " steps of " << pc.dt << " s; " << ens.alive_count() << " alive at the end\n";
  write_run_manifest(dir, cfg, command, {csv}, "pbs_manifest.json");
  return 0;
}

int cmd_validate(const ExperimentConfig& cfg, const std::string& figure, const std::string& dir,
                 const std::string& command, std::ostream& out) {
  const ComparisonReport rep = validate_figure(figure, cfg, dir);
  out << rep.figure << ":\n";
  for (const ProbeComparison& p : rep.probes) {
    out << "  probe " << p.label << ": peak rel err " << format_sig9(p.peak_rel_error)
        << ", band fraction " << format_sig9(p.band_fraction) << " over " << p.samples_checked
        << " samples, worst residual " << format_sig9(p.max_sigma_residual) << " sigma\n";
  }
  for (const auto& [key, value] : rep.metrics)
    out << "  " << key << " = " << format_sig9(value) << "\n";
  for (const std::string& f : rep.outputs) out << "  wrote " << f << "\n";
  write_run_manifest(dir, cfg, command, rep.outputs, "validate_" + figure + "_manifest.json");
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"diffusive molecular-communication link between porous cell aggregates"};
  app.fallthrough();
  std::string config_path, out_flag, figure;
  std::uint64_t seed = 0;
  int n_max = 0, particles = 0, isi_memory = 0;
  double slot = 0.0;
  app.add_option("--config", config_path, "experiment config file (JSON)");
  app.add_option("--seed", seed, "particle-simulation seed");
  app.add_option("--out", out_flag, "output directory (default: $SMC_OUT_DIR, else .)");
  app.add_option("--n-max", n_max, "mode-series truncation order");
  app.add_option("--particles", particles, "particle count");
  app.add_option("--Ts", slot, "slot duration, s");
  app.add_option("--J", isi_memory, "interference memory (slots)");
  app.require_subcommand(1);

  CLI::App* s_por = app.add_subcommand("porosity", "derived porous-medium parameters");
  CLI::App* s_rx = app.add_subcommand("gfc-rx", "receiver response to a point release");
  CLI::App* s_tx = app.add_subcommand("gfc-tx", "transmitter response, cell-averaged release");
  CLI::App* s_rel = app.add_subcommand("release-rate", "expected transmitter release profile");
  CLI::App* s_ch = app.add_subcommand("channel", "end-to-end observation probability");
  CLI::App* s_ber = app.add_subcommand("ber", "exact on-off-keying bit error rate");
  CLI::App* s_pbs = app.add_subcommand("pbs", "particle simulation of the configured link");
  CLI::App* s_val = app.add_subcommand("validate", "figure preset, analytics vs particles");
  s_val->add_option("figure", figure, "fig2..fig8")->required();

  {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      return app.exit(e, out, err);
    }
  }

  try {
    ExperimentConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (app.count("--seed") > 0) cfg.pbs.seed = seed;
    if (app.count("--n-max") > 0) cfg.grid.n_max = n_max;
    if (app.count("--particles") > 0) cfg.pbs.particles = particles;
    if (app.count("--Ts") > 0) cfg.ook.slot = slot;
    if (app.count("--J") > 0) cfg.ook.isi_memory = isi_memory;
    if (app.count("--out") > 0) cfg.output_dir = out_flag;
    validate_config(cfg);

    std::string dir = cfg.output_dir;
    if (dir.empty()) {
      const char* env = std::getenv("SMC_OUT_DIR");
      dir = env != nullptr && env[0] != '\0' ? env : ".";
    }
    ensure_dir(dir);
    const std::string command = join_args(args);

    if (s_por->parsed()) return cmd_porosity(cfg, dir, command, out);
    if (s_rx->parsed()) return cmd_gfc_rx(cfg, dir, command, out);
    if (s_tx->parsed()) return cmd_gfc_tx(cfg, dir, command, out);
    if (s_rel->parsed()) return cmd_release_rate(cfg, dir, command, out);
    if (s_ch->parsed()) return cmd_channel(cfg, dir, command, out);
    if (s_ber->parsed()) return cmd_ber(cfg, dir, command, out);
    if (s_pbs->parsed()) return cmd_pbs(cfg, dir, command, out);
    if (s_val->parsed()) return cmd_validate(cfg, figure, dir, command, out);
    err << "error: no subcommand selected\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace smc
