#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "heatinv/angles.hpp"
#include "heatinv_app/config.hpp"

namespace heatinv::app {

namespace fs = std::filesystem;

struct Console {
  std::ostream& out;
  std::ostream& err;
};

// Each command writes its artifacts plus manifest.json into `out`, holding an
// advisory lock file for the duration. Errors surface as ConfigError,
// DataError or ConvergenceError; see exit_code().

/// Synthesizes the flux dataset for the config's single noise level.
void cmd_synth(const ExperimentConfig& cfg, const fs::path& out, Console& io);

/// Alternating reconstruction from a dataset CSV (plus its JSON sidecar).
void cmd_invert(const ExperimentConfig& cfg, const fs::path& data, const fs::path& out,
                Console& io);

/// Star-shape recovery from a dataset CSV.
void cmd_shape_fit(const ExperimentConfig& cfg, const fs::path& data, const fs::path& out,
                   Console& io);

/// Zero-free angle intervals.
void cmd_gaps(int b_max, angles::Fraction query, angles::Denominators denominators,
              const fs::path& out, Console& io);

/// synth + invert (e1) or synth + shape-fit (e2, e3, custom shape truth) for
/// every noise level, one subdirectory each, plus summary tables.
void cmd_experiment(const ExperimentConfig& cfg, const fs::path& out, Console& io);

/// Re-executes the steps recorded in a manifest, by default into its own
/// directory.
void cmd_replay(const fs::path& manifest, const std::optional<fs::path>& out, Console& io);

/// 0 success, 2 config error, 3 data error, 4 solver non-convergence, 1 other.
int exit_code(const std::exception& e);

/// $HEATINV_OUTPUT_ROOT/<name>, or ./heatinv-out/<name> when unset.
fs::path default_output(const std::string& name);

}  // namespace heatinv::app
