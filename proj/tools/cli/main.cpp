#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "heatinv/io.hpp"
#include "heatinv/version.hpp"
#include "heatinv_app/commands.hpp"

using namespace heatinv;
using namespace heatinv::app;
using json = nlohmann::json;

namespace {

struct Overrides {
  std::optional<double> T, dt, beta_p, beta_q, lambda_max, init_radius;
  std::vector<double> deltas, angles_pi;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> modes, harmonics;
  std::optional<int> iterations;
  std::optional<std::string> update_rule, noise;
  bool q_known = false;
};

void add_overrides(CLI::App* cmd, Overrides& o, bool shape_flags) {
  cmd->add_option("--T", o.T, "final time");
  cmd->add_option("--dt", o.dt, "sampling step");
  cmd->add_option("--delta", o.deltas, "noise level(s)")->delimiter(',');
  cmd->add_option("--seed", o.seed, "noise seed");
  cmd->add_option("--noise", o.noise, "uniform | clipped-gaussian");
  cmd->add_option("--angles-pi", o.angles_pi, "observation angles in units of pi")->delimiter(',');
  cmd->add_option("--beta-p", o.beta_p, "Tikhonov weight for p");
  cmd->add_option("--beta-q", o.beta_q, "TV weight for q");
  cmd->add_option("--modes", o.modes, "eigenfunction truncation N (0 = automatic)");
  cmd->add_option("--lambda-max", o.lambda_max, "eigenvalue enumeration bound");
  cmd->add_option("--iterations", o.iterations, "alternating iterations J");
  cmd->add_option("--update-rule", o.update_rule, "jacobi | gauss-seidel");
  if (shape_flags) {
    cmd->add_flag("--q-known", o.q_known, "treat the true q as known");
    cmd->add_option("--harmonics", o.harmonics, "radius Fourier harmonics K");
    cmd->add_option("--init-radius", o.init_radius, "initial circle radius");
  }
}

ExperimentConfig build_config(const std::string& preset, const std::string& config_file,
                              const Overrides& o) {
  json doc;
  std::string source = "command line";
  if (!config_file.empty()) {
    try {
      doc = json::parse(io::read_file(config_file));
    } catch (const json::parse_error&) {
      // re-parse below for a located message
      return parse_config(io::read_file(config_file), config_file);
    }
    source = config_file;
  }
  if (!preset.empty()) doc["preset"] = preset;
  if (o.T) doc["T"] = *o.T;
  if (o.dt) doc["dt"] = *o.dt;
  if (!o.deltas.empty()) {
    doc.erase("delta");
    doc["deltas"] = o.deltas;
  }
  if (o.seed) doc["seed"] = *o.seed;
  if (o.noise) doc["noise"] = *o.noise;
  if (!o.angles_pi.empty()) {
    doc.erase("angles");
    doc["angles_pi"] = o.angles_pi;
  }
  if (o.beta_p) doc["beta_p"] = *o.beta_p;
  if (o.beta_q) doc["beta_q"] = *o.beta_q;
  if (o.modes) doc["modes"] = *o.modes;
  if (o.lambda_max) doc["lambda_max"] = *o.lambda_max;
  if (o.iterations) doc["iterations"] = *o.iterations;
  if (o.update_rule) doc["update_rule"] = *o.update_rule;
  if (o.q_known) doc["shape_fit"]["q_known"] = true;
  if (o.harmonics) doc["shape_fit"]["harmonics"] = *o.harmonics;
  if (o.init_radius) doc["shape_fit"]["init_radius"] = *o.init_radius;
  if (doc.is_null()) doc = json::object();
  return parse_config(doc.dump(), source);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous recovery of a separable heat source from boundary flux"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Console io{std::cout, std::cerr};

  Overrides o;
  std::string config_file, out, data, preset, manifest, query = "1/4", denominators = "prime";
  int b_max = 29;

  auto* synth = app.add_subcommand("synth", "generate a synthetic flux dataset");
  auto* invert = app.add_subcommand("invert", "alternating reconstruction of p and q");
  auto* shape = app.add_subcommand("shape-fit", "recover a star-shaped support");
  auto* gaps = app.add_subcommand("gaps", "zero-free angle intervals");
  auto* experiment = app.add_subcommand("experiment", "run a full experiment (synth + recovery)");
  auto* replay = app.add_subcommand("replay", "re-run the steps recorded in a manifest");

  for (auto* cmd : {synth, invert, shape, experiment}) {
    cmd->add_option("--config", config_file, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "output directory");
    add_overrides(cmd, o, cmd == shape || cmd == experiment || cmd == synth);
  }
  synth->add_option("--preset", preset, "e1 | e2 | e3 | custom");
  for (auto* cmd : {invert, shape}) {
    cmd->add_option("--preset", preset, "e1 | e2 | e3 | custom");
    cmd->add_option("--data", data, "flux CSV (with .json sidecar)")->required();
  }
  experiment->add_option("preset", preset, "e1 | e2 | e3 | custom")->required();
  gaps->add_option("--b-max", b_max, "denominator bound (exclusive)");
  gaps->add_option("--query", query, "fraction of pi to bracket, e.g. 1/4");
  gaps->add_option("--denominators", denominators, "prime | all")
      ->check(CLI::IsMember({"prime", "all"}));
  gaps->add_option("--out", out, "output directory");
  replay->add_option("manifest", manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", out, "output directory (default: the manifest's)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gaps) {
      const auto slash = query.find('/');
      if (slash == std::string::npos) throw ConfigError("--query: expected a fraction like 1/4");
      angles::Fraction f{};
      try {
        f = {std::stol(query.substr(0, slash)), std::stol(query.substr(slash + 1))};
      } catch (const std::exception&) {
        throw ConfigError("--query: expected a fraction like 1/4");
      }
      cmd_gaps(b_max, f, denominators == "all" ? angles::Denominators::All
                                               : angles::Denominators::Prime,
               out.empty() ? default_output("gaps") : fs::path(out), io);
    } else if (*replay) {
      cmd_replay(manifest, out.empty() ? std::nullopt : std::optional<fs::path>(out), io);
    } else {
      const auto cfg = build_config(preset, config_file, o);
      if (*synth) {
        cmd_synth(cfg, out.empty() ? default_output("synth") : fs::path(out), io);
      } else if (*invert) {
        cmd_invert(cfg, data, out.empty() ? default_output("invert") : fs::path(out), io);
      } else if (*shape) {
        cmd_shape_fit(cfg, data, out.empty() ? default_output("shape-fit") : fs::path(out), io);
      } else if (*experiment) {
        cmd_experiment(cfg, out.empty() ? default_output(preset_name(cfg.preset)) : fs::path(out),
                       io);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  }
  return 0;
}
