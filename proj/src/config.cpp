#include "smc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "smc/errors.hpp"

namespace smc {

namespace {

using nlohmann::json;

constexpr double kMicron = 1e-6;

void reject_unknown(const json& j, const std::string& scope,
                    const std::set<std::string>& allowed) {
  if (!j.is_object())
    throw ConfigError("config section '" + (scope.empty() ? "(root)" : scope) +
                      "' must be an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ConfigError("unknown config key: " + (scope.empty() ? "" : scope + ".") +
                        item.key());
}

double get_number(const json& j, const std::string& scope, const std::string& key,
                  double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number())
    throw ConfigError("config key " + scope + "." + key + " must be a number");
  return v.get<double>();
}

std::uint64_t get_u64(const json& j, const std::string& scope, const std::string& key,
                      std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_unsigned())
    throw ConfigError("config key " + scope + "." + key + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

int get_int(const json& j, const std::string& scope, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer())
    throw ConfigError("config key " + scope + "." + key + " must be an integer");
  return v.get<int>();
}

void parse_spheroid(const json& j, const std::string& scope, SpheroidSpec* spec) {
  reject_unknown(j, scope,
                 {"radius_um", "cell_count", "cell_volume_m3", "degradation_rate_per_s"});
  spec->radius = get_number(j, scope, "radius_um", spec->radius / kMicron) * kMicron;
  spec->cell_count = get_number(j, scope, "cell_count", spec->cell_count);
  spec->cell_volume = get_number(j, scope, "cell_volume_m3", spec->cell_volume);
  spec->degradation_rate =
      get_number(j, scope, "degradation_rate_per_s", spec->degradation_rate);
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.medium.diffusion_coeff = 1e-9;
  c.tx.radius = 275e-6;
  c.tx.cell_count = 24000;
  c.tx.cell_volume = 3.14e-15;
  c.tx.degradation_rate = 0.0;
  c.rx = c.tx;
  c.rx.degradation_rate = 0.01;
  c.separation = 1000e-6;
  c.tx.center = SphericalPoint{c.separation, M_PI / 2.0, 0.0};
  c.rx.center = SphericalPoint{0.0, 0.0, 0.0};
  return c;
}

ExperimentConfig parse_config(const std::string& json_text, const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  reject_unknown(root, "",
                 {"medium", "transmitter", "receiver", "separation_um", "grid", "channel",
                  "ook", "pbs", "output_dir"});

  ExperimentConfig c = default_config();
  if (root.contains("medium")) {
    const json& m = root.at("medium");
    reject_unknown(m, "medium", {"diffusion_m2_s"});
    c.medium.diffusion_coeff =
        get_number(m, "medium", "diffusion_m2_s", c.medium.diffusion_coeff);
  }
  if (root.contains("transmitter")) parse_spheroid(root.at("transmitter"), "transmitter", &c.tx);
  if (root.contains("receiver")) parse_spheroid(root.at("receiver"), "receiver", &c.rx);
  c.separation = get_number(root, "(root)", "separation_um", c.separation / kMicron) * kMicron;
  if (root.contains("grid")) {
    const json& g = root.at("grid");
    reject_unknown(g, "grid", {"dt_s", "duration_s", "oversample", "omega_count", "n_max"});
    c.grid.dt = get_number(g, "grid", "dt_s", c.grid.dt);
    c.grid.duration = get_number(g, "grid", "duration_s", c.grid.duration);
    c.grid.oversample = get_number(g, "grid", "oversample", c.grid.oversample);
    c.grid.omega_count = get_int(g, "grid", "omega_count", c.grid.omega_count);
    c.grid.n_max = get_int(g, "grid", "n_max", c.grid.n_max);
  }
  if (root.contains("channel")) {
    const json& ch = root.at("channel");
    reject_unknown(ch, "channel", {"per_cell_release"});
    c.channel.per_cell_release =
        get_number(ch, "channel", "per_cell_release", c.channel.per_cell_release);
  }
  if (root.contains("ook")) {
    const json& o = root.at("ook");
    reject_unknown(o, "ook", {"slot_s", "per_cell_release", "isi_memory"});
    c.ook.slot = get_number(o, "ook", "slot_s", c.ook.slot);
    c.ook.per_cell_release = get_number(o, "ook", "per_cell_release", c.ook.per_cell_release);
    c.ook.isi_memory = get_int(o, "ook", "isi_memory", c.ook.isi_memory);
  }
  if (root.contains("pbs")) {
    const json& p = root.at("pbs");
    reject_unknown(p, "pbs", {"seed", "particles"});
    c.pbs.seed = get_u64(p, "pbs", "seed", c.pbs.seed);
    c.pbs.particles = get_int(p, "pbs", "particles", c.pbs.particles);
  }
  if (root.contains("output_dir")) {
    if (!root.at("output_dir").is_string())
      throw ConfigError("config key output_dir must be a string");
    c.output_dir = root.at("output_dir").get<std::string>();
  }

  c.tx.center = SphericalPoint{c.separation, M_PI / 2.0, 0.0};
  c.rx.center = SphericalPoint{0.0, 0.0, 0.0};
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

void validate_config(const ExperimentConfig& c) {
  derive_porosity(c.tx, c.medium);  // throws on bad geometry / packing
  derive_porosity(c.rx, c.medium);
  if (c.separation <= c.rx.radius)
    throw ConfigError("separation_um must place the transmitter outside the receiver");
  if (!(c.grid.dt > 0.0)) throw ConfigError("grid.dt_s must be positive");
  if (!(c.grid.duration >= c.grid.dt)) throw ConfigError("grid.duration_s must cover one step");
  if (!(c.grid.oversample >= 1.0)) throw ConfigError("grid.oversample must be >= 1");
  if (c.grid.omega_count < 16) throw ConfigError("grid.omega_count must be >= 16");
  if (c.grid.n_max < 0) throw ConfigError("grid.n_max must be >= 0");
  if (!(c.channel.per_cell_release >= 1.0))
    throw ConfigError("channel.per_cell_release must be >= 1");
  if (!(c.ook.slot > 0.0)) throw ConfigError("ook.slot_s must be positive");
  if (!(c.ook.per_cell_release >= 1.0)) throw ConfigError("ook.per_cell_release must be >= 1");
  if (c.ook.isi_memory < 0) throw ConfigError("ook.isi_memory must be >= 0");
  if (c.pbs.particles < 1) throw ConfigError("pbs.particles must be >= 1");
}

std::string config_to_json(const ExperimentConfig& c) {
  json root;
  root["medium"]["diffusion_m2_s"] = c.medium.diffusion_coeff;
  root["transmitter"] = {{"radius_um", c.tx.radius / kMicron},
                         {"cell_count", c.tx.cell_count},
                         {"cell_volume_m3", c.tx.cell_volume},
                         {"degradation_rate_per_s", c.tx.degradation_rate}};
  root["receiver"] = {{"radius_um", c.rx.radius / kMicron},
                      {"cell_count", c.rx.cell_count},
                      {"cell_volume_m3", c.rx.cell_volume},
                      {"degradation_rate_per_s", c.rx.degradation_rate}};
  root["separation_um"] = c.separation / kMicron;
  root["grid"] = {{"dt_s", c.grid.dt},
                  {"duration_s", c.grid.duration},
                  {"oversample", c.grid.oversample},
                  {"omega_count", c.grid.omega_count},
                  {"n_max", c.grid.n_max}};
  root["channel"] = {{"per_cell_release", c.channel.per_cell_release}};
  root["ook"] = {{"slot_s", c.ook.slot},
                 {"per_cell_release", c.ook.per_cell_release},
                 {"isi_memory", c.ook.isi_memory}};
  root["pbs"] = {{"seed", c.pbs.seed}, {"particles", c.pbs.particles}};
  root["output_dir"] = c.output_dir;
  return root.dump(2);
}

std::string config_hash(const ExperimentConfig& c) {
  const std::string text = config_to_json(c);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace smc
