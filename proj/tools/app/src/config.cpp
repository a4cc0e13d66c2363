#include "heatinv_app/config.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "heatinv/error.hpp"
#include "heatinv/io.hpp"

namespace heatinv::app {

using json = nlohmann::json;

namespace {

[[noreturn]] void field_error(std::string_view source, std::string_view field,
                              std::string_view what) {
  std::ostringstream msg;
  msg << source << ": field '" << field << "': " << what;
  throw ConfigError(msg.str());
}

double number(const json& j, std::string_view source, std::string_view field) {
  if (!j.is_number()) field_error(source, field, "expected a number");
  return j.get<double>();
}

std::uint64_t unsigned_int(const json& j, std::string_view source, std::string_view field) {
  if (!j.is_number_unsigned()) field_error(source, field, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

bool boolean(const json& j, std::string_view source, std::string_view field) {
  if (!j.is_boolean()) field_error(source, field, "expected true or false");
  return j.get<bool>();
}

std::string text(const json& j, std::string_view source, std::string_view field) {
  if (!j.is_string()) field_error(source, field, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, std::string_view source, std::string_view field) {
  if (!j.is_array()) field_error(source, field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], source, std::string(field) + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, std::string_view source,
                std::string_view prefix) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      field_error(source, std::string(prefix) + key, "unknown field");
    }
  }
}

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

StepSource e1_q() { return StepSource({{0.0, 1.0}, {1.0 / 3.0, 1.0}, {2.0 / 3.0, -0.5}}); }

void parse_truth(const json& t, ExperimentConfig& cfg, std::string_view source) {
  if (!t.is_object()) field_error(source, "truth", "expected an object");
  check_keys(t, {"p", "q", "shape"}, source, "truth.");
  try {
    if (t.contains("p")) cfg.truth.p = io::spectral_source_from_json(t["p"].dump());
    if (t.contains("q")) cfg.truth.q = io::step_source_from_json(t["q"].dump());
    if (t.contains("shape")) cfg.truth.shape = io::star_source_from_json(t["shape"].dump());
  } catch (const std::exception& e) {
    throw ConfigError(std::string(source) + ": field 'truth': " + e.what());
  }
}

void parse_shape(const json& s, ShapeSettings& shape, std::string_view source) {
  if (!s.is_object()) field_error(source, "shape_fit", "expected an object");
  check_keys(s,
             {"harmonics", "init_radius", "q_known", "max_rounds", "tol", "mu0", "mu_up",
              "mu_down", "max_iter", "gtol"},
             source, "shape_fit.");
  auto f = [&](const char* key) { return std::string("shape_fit.") + key; };
  if (s.contains("harmonics")) shape.harmonics = unsigned_int(s["harmonics"], source, f("harmonics"));
  if (s.contains("init_radius")) shape.init_radius = number(s["init_radius"], source, f("init_radius"));
  if (s.contains("q_known")) shape.q_known = boolean(s["q_known"], source, f("q_known"));
  if (s.contains("max_rounds")) {
    shape.max_rounds = static_cast<int>(unsigned_int(s["max_rounds"], source, f("max_rounds")));
  }
  if (s.contains("tol")) shape.tol = number(s["tol"], source, f("tol"));
  if (s.contains("mu0")) shape.lm.mu0 = number(s["mu0"], source, f("mu0"));
  if (s.contains("mu_up")) shape.lm.mu_up = number(s["mu_up"], source, f("mu_up"));
  if (s.contains("mu_down")) shape.lm.mu_down = number(s["mu_down"], source, f("mu_down"));
  if (s.contains("max_iter")) {
    shape.lm.max_iter = static_cast<int>(unsigned_int(s["max_iter"], source, f("max_iter")));
  }
  if (s.contains("gtol")) shape.lm.gtol = number(s["gtol"], source, f("gtol"));
}

}  // namespace

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::E1: return "e1";
    case Preset::E2: return "e2";
    case Preset::E3: return "e3";
    case Preset::Custom: return "custom";
  }
  return "custom";
}

Preset preset_from_name(std::string_view name) {
  if (name == "e1") return Preset::E1;
  if (name == "e2") return Preset::E2;
  if (name == "e3") return Preset::E3;
  if (name == "custom") return Preset::Custom;
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected e1, e2, e3 or custom)");
}

std::string update_rule_name(UpdateRule r) {
  return r == UpdateRule::Jacobi ? "jacobi" : "gauss-seidel";
}

std::string noise_name(NoiseModel n) {
  return n == NoiseModel::Uniform ? "uniform" : "clipped-gaussian";
}

ExperimentConfig preset_config(Preset preset) {
  ExperimentConfig cfg;
  cfg.preset = preset;
  if (preset == Preset::Custom) return cfg;
  cfg.angles = {0.0, 13.0 * std::numbers::pi / 32.0};
  cfg.truth.q = e1_q();
  switch (preset) {
    case Preset::E1: {
      SpectralSource p{Eigen::VectorXd(3)};
      p.coeffs << 5.0, 2.0, 1.0;
      p.coeffs /= std::sqrt(30.0);
      cfg.truth.p = p;
      cfg.deltas = {0.01, 0.03, 0.05};
      cfg.modes = 3;
      cfg.lambda_max = 700.0;
      break;
    }
    case Preset::E2:
      cfg.truth.shape = StarSource(0.5, {0.0, 0.2}, {0.0, 0.0});
      cfg.lambda_max = 300.0;
      break;
    case Preset::E3:
      cfg.truth.shape = StarSource(0.25, {0.0, 0.1}, {0.0, 0.0});
      cfg.lambda_max = 300.0;
      break;
    case Preset::Custom:
      break;
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  auto fail = [](std::string_view field, std::string_view what) {
    field_error("config", field, what);
  };
  if (!(T > 0.0)) fail("T", "must be positive");
  if (!(dt > 0.0)) fail("dt", "must be positive");
  try {
    (void)grid();
  } catch (const InvalidArgument&) {
    fail("dt", "T / dt must be an integer");
  }
  if (angles.empty()) fail("angles", "at least one observation angle is required");
  for (double a : angles) {
    if (!std::isfinite(a)) fail("angles", "angles must be finite");
  }
  if (deltas.empty()) fail("deltas", "at least one noise level is required");
  for (double d : deltas) {
    if (!(d >= 0.0 && d < 1.0)) fail("deltas", "noise levels must lie in [0, 1)");
  }
  if (!(beta_p >= 0.0)) fail("beta_p", "must be >= 0");
  if (!(beta_q >= 0.0)) fail("beta_q", "must be >= 0");
  if (!(lambda_max > 0.0)) fail("lambda_max", "must be positive");
  if (iterations < 1) fail("iterations", "must be >= 1");
  if (shape.harmonics < 1) fail("shape_fit.harmonics", "must be >= 1");
  if (!(shape.init_radius > 0.0 && shape.init_radius < 1.0)) {
    fail("shape_fit.init_radius", "must lie in (0, 1)");
  }
  if (shape.max_rounds < 1) fail("shape_fit.max_rounds", "must be >= 1");
  if (!(shape.tol > 0.0)) fail("shape_fit.tol", "must be positive");
  if (!(shape.lm.mu0 > 0.0)) fail("shape_fit.mu0", "must be positive");
  if (!(shape.lm.mu_up > 1.0)) fail("shape_fit.mu_up", "must exceed 1");
  if (!(shape.lm.mu_down > 0.0 && shape.lm.mu_down < 1.0)) {
    fail("shape_fit.mu_down", "must lie in (0, 1)");
  }
  if (shape.lm.max_iter < 1) fail("shape_fit.max_iter", "must be >= 1");
  if (truth.shape && !truth.shape->is_valid()) fail("truth.shape", "radius leaves (0, 1)");
}

ExperimentConfig parse_config(std::string_view text_in, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text_in.begin(), text_in.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(source) + ": " + line_col(text_in, e.byte) +
                      ": malformed JSON");
  }
  if (!doc.is_object()) throw ConfigError(std::string(source) + ": expected a JSON object");
  check_keys(doc,
             {"preset", "T", "dt", "angles", "angles_pi", "delta", "deltas", "seed", "noise",
              "beta_p", "beta_q", "modes", "lambda_max", "iterations", "update_rule",
              "time_weighted", "truth", "shape_fit"},
             source, "");

  Preset preset = Preset::Custom;
  if (doc.contains("preset")) {
    try {
      preset = preset_from_name(text(doc["preset"], source, "preset"));
    } catch (const ConfigError& e) {
      field_error(source, "preset", e.what());
    }
  }
  ExperimentConfig cfg = preset_config(preset);

  if (doc.contains("T")) cfg.T = number(doc["T"], source, "T");
  if (doc.contains("dt")) cfg.dt = number(doc["dt"], source, "dt");
  if (doc.contains("angles") && doc.contains("angles_pi")) {
    field_error(source, "angles_pi", "give either 'angles' or 'angles_pi', not both");
  }
  if (doc.contains("angles")) cfg.angles = numbers(doc["angles"], source, "angles");
  if (doc.contains("angles_pi")) {
    cfg.angles = numbers(doc["angles_pi"], source, "angles_pi");
    for (double& a : cfg.angles) a *= std::numbers::pi;
  }
  if (doc.contains("delta") && doc.contains("deltas")) {
    field_error(source, "deltas", "give either 'delta' or 'deltas', not both");
  }
  if (doc.contains("delta")) cfg.deltas = {number(doc["delta"], source, "delta")};
  if (doc.contains("deltas")) cfg.deltas = numbers(doc["deltas"], source, "deltas");
  if (doc.contains("seed")) cfg.seed = unsigned_int(doc["seed"], source, "seed");
  if (doc.contains("noise")) {
    const auto n = text(doc["noise"], source, "noise");
    if (n == "uniform") {
      cfg.noise = NoiseModel::Uniform;
    } else if (n == "clipped-gaussian") {
      cfg.noise = NoiseModel::ClippedGaussian;
    } else {
      field_error(source, "noise", "expected 'uniform' or 'clipped-gaussian'");
    }
  }
  if (doc.contains("beta_p")) cfg.beta_p = number(doc["beta_p"], source, "beta_p");
  if (doc.contains("beta_q")) cfg.beta_q = number(doc["beta_q"], source, "beta_q");
  if (doc.contains("modes")) cfg.modes = unsigned_int(doc["modes"], source, "modes");
  if (doc.contains("lambda_max")) cfg.lambda_max = number(doc["lambda_max"], source, "lambda_max");
  if (doc.contains("iterations")) {
    cfg.iterations = static_cast<int>(unsigned_int(doc["iterations"], source, "iterations"));
  }
  if (doc.contains("update_rule")) {
    const auto r = text(doc["update_rule"], source, "update_rule");
    if (r == "jacobi") {
      cfg.update_rule = UpdateRule::Jacobi;
    } else if (r == "gauss-seidel") {
      cfg.update_rule = UpdateRule::GaussSeidel;
    } else {
      field_error(source, "update_rule", "expected 'jacobi' or 'gauss-seidel'");
    }
  }
  if (doc.contains("time_weighted")) {
    cfg.time_weighted = boolean(doc["time_weighted"], source, "time_weighted");
  }
  if (doc.contains("truth")) {
    cfg.truth = {};
    parse_truth(doc["truth"], cfg, source);
  }
  if (doc.contains("shape_fit")) parse_shape(doc["shape_fit"], cfg.shape, source);
  return cfg;
}

std::string to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["preset"] = preset_name(cfg.preset);
  doc["T"] = cfg.T;
  doc["dt"] = cfg.dt;
  doc["angles"] = cfg.angles;
  doc["deltas"] = cfg.deltas;
  doc["seed"] = cfg.seed;
  doc["noise"] = noise_name(cfg.noise);
  doc["beta_p"] = cfg.beta_p;
  doc["beta_q"] = cfg.beta_q;
  doc["modes"] = cfg.modes;
  doc["lambda_max"] = cfg.lambda_max;
  doc["iterations"] = cfg.iterations;
  doc["update_rule"] = update_rule_name(cfg.update_rule);
  doc["time_weighted"] = cfg.time_weighted;
  json truth = json::object();
  if (cfg.truth.p) truth["p"] = json::parse(io::to_json(*cfg.truth.p, cfg.lambda_max));
  if (cfg.truth.q) truth["q"] = json::parse(io::to_json(*cfg.truth.q));
  if (cfg.truth.shape) truth["shape"] = json::parse(io::to_json(*cfg.truth.shape));
  doc["truth"] = truth;
  doc["shape_fit"] = {{"harmonics", cfg.shape.harmonics},
                      {"init_radius", cfg.shape.init_radius},
                      {"q_known", cfg.shape.q_known},
                      {"max_rounds", cfg.shape.max_rounds},
                      {"tol", cfg.shape.tol},
                      {"mu0", cfg.shape.lm.mu0},
                      {"mu_up", cfg.shape.lm.mu_up},
                      {"mu_down", cfg.shape.lm.mu_down},
                      {"max_iter", cfg.shape.lm.max_iter},
                      {"gtol", cfg.shape.lm.gtol}};
  return doc.dump(2);
}

}  // namespace heatinv::app
