#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace smc {

/// Command-line front end. `args` excludes the program name. Returns the
/// process exit status: 0 on success, nonzero on parse/config/validation
/// failures (the offending key or argument is named on `err`).
///
/// Subcommands: porosity, gfc-rx, gfc-tx, release-rate, channel, ber, pbs,
/// validate <figure_id>. Global flags: --config, --seed, --out, --n-max,
/// --particles, --Ts, --J. Output directory precedence: --out flag, then the
/// config file's output_dir, then $SMC_OUT_DIR, then the working directory.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smc
