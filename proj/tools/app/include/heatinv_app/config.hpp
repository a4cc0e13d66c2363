#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "heatinv/forward.hpp"
#include "heatinv/inversion.hpp"
#include "heatinv/solvers.hpp"
#include "heatinv/sources.hpp"

namespace heatinv::app {

/// Invalid or inconsistent run configuration (exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Preset { E1, E2, E3, Custom };

std::string preset_name(Preset p);
Preset preset_from_name(std::string_view name);

struct ShapeSettings {
  std::size_t harmonics = 4;
  double init_radius = 0.4;
  bool q_known = false;
  int max_rounds = 20;
  double tol = 1e-6;
  LMOptions lm;
};

struct Truth {
  std::optional<SpectralSource> p;
  std::optional<StepSource> q;
  std::optional<StarSource> shape;
};

/// Everything a run depends on. The JSON form (see README) lists the same
/// fields; unknown keys are rejected.
struct ExperimentConfig {
  Preset preset = Preset::Custom;
  double T = 1.0;
  double dt = 0.01;
  std::vector<double> angles;  // radians
  std::vector<double> deltas{0.01};
  std::uint64_t seed = 1;
  NoiseModel noise = NoiseModel::Uniform;
  double beta_p = 1e-2;
  double beta_q = 8e-4;
  std::size_t modes = 0;      // N; 0 = default truncation
  double lambda_max = 700.0;  // basis enumeration bound
  int iterations = 10;        // J
  UpdateRule update_rule = UpdateRule::Jacobi;
  bool time_weighted = true;
  Truth truth;
  ShapeSettings shape;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  TimeGrid grid() const { return TimeGrid(T, dt); }
};

/// Defaults for a preset (Custom leaves angles and truth empty).
ExperimentConfig preset_config(Preset preset);

/// Parses a JSON config. The "preset" key (default "custom") selects the base
/// values that the remaining keys override. Parse errors report line and
/// column; field errors name the field.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "config");

/// Fully resolved JSON form; parse_config(to_json(c)) reproduces c exactly.
std::string to_json(const ExperimentConfig& cfg);

std::string update_rule_name(UpdateRule r);
std::string noise_name(NoiseModel n);

}  // namespace heatinv::app
