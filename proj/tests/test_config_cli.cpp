#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "smc/cli.hpp"
#include "smc/config.hpp"
#include "smc/csv.hpp"
#include "smc/errors.hpp"

using namespace smc;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("smc_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_SUITE("config_cli") {

TEST_CASE("defaults describe the reference experiment") {
  const ExperimentConfig c = default_config();
  CHECK(c.medium.diffusion_coeff == 1e-9);
  CHECK(c.tx.radius == 275e-6);
  CHECK(c.tx.cell_count == 24000);
  CHECK(c.tx.cell_volume == 3.14e-15);
  CHECK(c.tx.degradation_rate == 0.0);
  CHECK(c.rx.radius == 275e-6);
  CHECK(c.rx.degradation_rate == 0.01);
  CHECK(c.separation == doctest::Approx(1000e-6).epsilon(1e-15));
  CHECK(c.tx.center.r == c.separation);
  CHECK(c.tx.center.theta == doctest::Approx(M_PI / 2.0));
  CHECK(c.rx.center.r == 0.0);
  CHECK(c.grid.dt == 0.5);
  CHECK(c.ook.slot == 600.0);
  CHECK(c.channel.per_cell_release == 3000.0);
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("canonical JSON round-trips exactly and hashes stably") {
  ExperimentConfig c = default_config();
  c.separation = 1234.5e-6;
  c.pbs.seed = 77;
  c.output_dir = "results";
  const std::string once = config_to_json(c);
  const ExperimentConfig back = parse_config(once, "round-trip");
  CHECK(config_to_json(back) == once);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);
  ExperimentConfig changed = c;
  changed.grid.n_max = 61;
  CHECK(config_hash(changed) != config_hash(c));
}

TEST_CASE("unknown keys are rejected by name") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"zzz_bogus": 1})", "t"),
                       "unknown config key: zzz_bogus", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"grid": {"zzz_bogus": 1}})", "t"),
                       "unknown config key: grid.zzz_bogus", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"transmitter": {"radius": 300}})", "t"),
                       "unknown config key: transmitter.radius", ConfigError);
  CHECK_THROWS_AS(parse_config("{not json", "broken"), ConfigError);
}

TEST_CASE("micrometer keys convert to meters") {
  const ExperimentConfig c = parse_config(
      R"({"transmitter": {"radius_um": 300}, "separation_um": 1500})", "units");
  CHECK(c.tx.radius == doctest::Approx(300e-6).epsilon(1e-15));
  CHECK(c.separation == doctest::Approx(1500e-6).epsilon(1e-15));
  CHECK(c.tx.center.r == doctest::Approx(1500e-6).epsilon(1e-15));
  CHECK(c.rx.radius == 275e-6);  // untouched sections keep defaults
}

TEST_CASE("cross-field validation names the offending constraint") {
  ExperimentConfig c = default_config();
  c.grid.dt = 0.0;
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = default_config();
  c.tx.cell_count = 1e9;  // packing above one
  CHECK_THROWS_AS(validate_config(c), OverpackedSpheroid);
  c = default_config();
  c.separation = 200e-6;  // transmitter center inside the receiver
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"omega_count": 4}})", "t"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"ook": {"isi_memory": -2}})", "t"), ConfigError);
}

TEST_CASE("nine-significant-digit formatting is fixed-width scientific") {
  CHECK(format_sig9(0.13492412840352952) == "1.34924128e-01");
  CHECK(format_sig9(1.0) == "1.00000000e+00");
  CHECK(format_sig9(0.0) == "0.00000000e+00");
  CHECK(format_sig9(-2.5e-7) == "-2.50000000e-07");
}

TEST_CASE("porosity subcommand writes a manifest and sig9 CSV") {
  const fs::path dir = fresh_dir("cli_porosity");
  std::ostringstream out, err;
  const int rc = run_cli({"porosity", "--out", dir.string()}, out, err);
  CHECK(rc == 0);
  CHECK(err.str().empty());
  CHECK(out.str().find("kappa") != std::string::npos);
  CHECK(fs::exists(dir / "porosity.csv"));
  CHECK(fs::exists(dir / "porosity_manifest.json"));

  // Every numeric field uses the standard %.8e form: nine significant digits.
  const std::regex sig9(R"(^-?[0-9]\.[0-9]{8}e[+-][0-9]{2,3}$)");
  std::ifstream csv(dir / "porosity.csv");
  std::string line;
  bool saw_header = false;
  int rows = 0;
  while (std::getline(csv, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      saw_header = true;
      CHECK(line.find("kappa") != std::string::npos);
      continue;
    }
    ++rows;
    std::stringstream fields(line);
    std::string f;
    while (std::getline(fields, f, ',')) CHECK(std::regex_match(f, sig9));
  }
  CHECK(saw_header);
  CHECK(rows > 0);

  // Manifest carries the hash of the effective config (--out folded in) and
  // is timestamp-free, so a rerun reproduces it byte for byte.
  const std::string manifest = slurp(dir / "porosity_manifest.json");
  ExperimentConfig effective = default_config();
  effective.output_dir = dir.string();
  CHECK(manifest.find(config_hash(effective)) != std::string::npos);
  std::ostringstream out2, err2;
  CHECK(run_cli({"porosity", "--out", dir.string()}, out2, err2) == 0);
  CHECK(slurp(dir / "porosity_manifest.json") == manifest);
}

TEST_CASE("output directory precedence: flag beats environment") {
  const fs::path env_dir = fresh_dir("cli_envdir");
  const fs::path flag_dir = fresh_dir("cli_flagdir");
  ::setenv("SMC_OUT_DIR", env_dir.string().c_str(), 1);
  std::ostringstream out, err;
  CHECK(run_cli({"porosity"}, out, err) == 0);
  CHECK(fs::exists(env_dir / "porosity.csv"));
  CHECK_FALSE(fs::exists(flag_dir / "porosity.csv"));
  std::ostringstream out2, err2;
  CHECK(run_cli({"porosity", "--out", flag_dir.string()}, out2, err2) == 0);
  CHECK(fs::exists(flag_dir / "porosity.csv"));
  ::unsetenv("SMC_OUT_DIR");
}

TEST_CASE("config file feeds the CLI and bad inputs fail loudly") {
  const fs::path dir = fresh_dir("cli_config");
  ExperimentConfig c = default_config();
  c.tx.cell_count = 20000;
  {
    std::ofstream f(dir / "exp.json");
    f << config_to_json(c);
  }
  std::ostringstream out, err;
  const int rc = run_cli(
      {"porosity", "--config", (dir / "exp.json").string(), "--out", dir.string()}, out, err);
  CHECK(rc == 0);
  CHECK(out.str().find("transmitter") != std::string::npos);

  std::ostringstream out2, err2;
  CHECK(run_cli({"frobnicate"}, out2, err2) != 0);
  CHECK_FALSE(err2.str().empty());

  std::ostringstream out3, err3;
  CHECK(run_cli({"validate", "fig99", "--out", dir.string()}, out3, err3) != 0);
  CHECK(err3.str().find("fig99") != std::string::npos);
}

}  // TEST_SUITE
