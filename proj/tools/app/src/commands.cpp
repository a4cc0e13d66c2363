#include "heatinv_app/commands.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "heatinv/error.hpp"
#include "heatinv/inversion.hpp"
#include "heatinv/io.hpp"
#include "heatinv/version.hpp"

namespace heatinv::app {

using json = nlohmann::json;

namespace {

constexpr const char* kLockName = ".heatinv.lock";

class OutputLock {
 public:
  explicit OutputLock(const fs::path& dir) : path_(dir / kLockName) {
    fs::create_directories(dir);
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      if (errno == EEXIST) {
        throw ConfigError("output directory " + dir.string() + " is locked by another run (" +
                          path_.string() + ")");
      }
      throw ConfigError("cannot create lock file " + path_.string() + ": " +
                        std::strerror(errno));
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    (void)!::write(fd_, pid.data(), pid.size());
  }
  ~OutputLock() {
    ::close(fd_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

/// Files written into one directory, recorded for the manifest.
struct Artifacts {
  fs::path dir;
  std::vector<std::string> names;

  void write(const std::string& name, std::string_view contents) {
    io::write_file(dir / name, contents);
    add(name);
  }
  void add(const std::string& name) {
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
  }
};

void write_manifest(Artifacts& art, const json& steps, const ExperimentConfig* cfg) {
  json doc;
  doc["tool"] = "heatinv";
  doc["version"] = std::string(kVersion);
  doc["steps"] = steps;
  if (cfg) {
    doc["config"] = json::parse(to_json(*cfg));
    doc["seed"] = cfg->seed;
  }
  auto names = art.names;
  std::sort(names.begin(), names.end());
  doc["artifacts"] = names;
  io::write_file(art.dir / "manifest.json", doc.dump(2) + "\n");
}

std::string format_delta(double delta) {
  std::ostringstream s;
  s << delta;
  return s.str();
}

std::string csv_number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

SpectralSource truth_p(const ExperimentConfig& cfg, const EigenBasis& basis) {
  if (cfg.truth.p) {
    if (cfg.truth.p->size() > basis.size()) {
      throw ConfigError("config: field 'truth.p': more coefficients than basis modes below "
                        "lambda_max");
    }
    return *cfg.truth.p;
  }
  if (cfg.truth.shape) return project_star(*cfg.truth.shape, basis);
  throw ConfigError("config: field 'truth': needs 'p' or 'shape'");
}

std::optional<heatinv::Truth> comparison_truth(const ExperimentConfig& cfg,
                                               const EigenBasis& basis) {
  if (!cfg.truth.q || !(cfg.truth.p || cfg.truth.shape)) return std::nullopt;
  return heatinv::Truth{truth_p(cfg, basis), *cfg.truth.q};
}

void warn_resonance(const std::vector<double>& angles, int k_max, Console& io) {
  k_max = std::max(k_max, 1);
  for (std::size_t a = 0; a < angles.size(); ++a) {
    for (std::size_t b = a + 1; b < angles.size(); ++b) {
      const auto r = angles::is_resonant(angles[a], angles[b], k_max);
      if (r.resonant) {
        io.err << "warning: angles " << angles[a] << " and " << angles[b]
               << " are resonant: " << r.k << " * (theta1 - theta2) = " << r.j
               << " pi; Cos/Sin modes of order " << r.k << " are not separable\n";
      }
    }
  }
}

int max_order(const EigenBasis& basis, std::size_t n) {
  int m = 0;
  for (const auto& p : basis.first(n)) m = std::max(m, p.m);
  return m;
}

std::string q_samples_csv(const StepSource& q, const TimeGrid& grid) {
  std::ostringstream out;
  out << std::setprecision(17) << "t,q\n";
  for (std::size_t i = 0; i <= grid.size(); ++i) out << grid.time(i) << ',' << q(grid.time(i)) << '\n';
  return out.str();
}

// Pipeline stages, shared by the subcommands and experiment.

void synth_step(const ExperimentConfig& cfg, double delta, Artifacts& art, Console& io) {
  if (!cfg.truth.q) throw ConfigError("config: field 'truth.q': required for synthesis");
  const auto basis = enumerate_basis(cfg.lambda_max);
  const auto p = truth_p(cfg, basis);
  const auto data =
      synthesize(p, *cfg.truth.q, cfg.angles, cfg.grid(), basis, delta, cfg.seed, cfg.noise);
  io::save_dataset(art.dir / "flux.csv", data);
  art.add("flux.csv");
  art.add("flux.csv.json");

  json truth;
  truth["p"] = json::parse(io::to_json(p, cfg.lambda_max));
  truth["q"] = json::parse(io::to_json(*cfg.truth.q));
  if (cfg.truth.shape) truth["shape"] = json::parse(io::to_json(*cfg.truth.shape));
  art.write("truth.json", truth.dump(2) + "\n");
  io.out << "synth: " << data.angles.size() << " angles x " << data.grid.size()
         << " samples, delta = " << delta << ", seed = " << cfg.seed << " -> "
         << (art.dir / "flux.csv").string() << '\n';
}

ErrorPair invert_step(const ExperimentConfig& cfg, const FluxDataset& data, Artifacts& art,
                      Console& io) {
  const auto basis = enumerate_basis(cfg.lambda_max);
  AlternatingConfig ac;
  ac.modes = cfg.modes ? cfg.modes : default_truncation(data.grid.step(), data.noise_level, basis);
  ac.beta_p = cfg.beta_p;
  ac.beta_q = cfg.beta_q;
  ac.iterations = cfg.iterations;
  ac.update_rule = cfg.update_rule;
  ac.time_weighted = cfg.time_weighted;
  if (ac.modes > basis.size()) {
    throw ConfigError("config: field 'modes': exceeds the " + std::to_string(basis.size()) +
                      " modes below lambda_max");
  }
  warn_resonance(data.angles, max_order(basis, ac.modes), io);

  const auto truth = comparison_truth(cfg, basis);
  const auto res = alternate(data, ac, basis, truth ? &*truth : nullptr);

  art.write("reconstruction.json", io::to_json(res) + "\n");
  std::ostringstream q_csv, polar;
  io::write_q_csv(q_csv, res.q, res.grid);
  art.write("q.csv", q_csv.str());
  io::write_polar_csv(polar, res.p, basis);
  art.write("p_polar.csv", polar.str());

  std::string gp =
      "set datafile separator ','\n"
      "set multiplot layout 1,2\n"
      "set title 'q(t)'\n"
      "plot 'q.csv' using 1:2 skip 1 with steps title 'recovered'";
  ErrorPair last;
  if (truth) {
    art.write("q_true.csv", q_samples_csv(truth->q.scaled(source_norm(truth->p)), res.grid));
    gp += ", 'q_true.csv' using 1:2 skip 1 with steps title 'true (scaled)'";
    std::ostringstream err;
    err << std::setprecision(17) << "iteration,e_p,e_q\n";
    for (std::size_t j = 0; j < res.errors.size(); ++j) {
      err << j << ',' << res.errors[j].e_p << ',' << res.errors[j].e_q << '\n';
    }
    art.write("errors.csv", err.str());
    last = res.errors.back();
  }
  gp +=
      "\nset title 'p(r, theta)'\n"
      "set size square\n"
      "set view map\n"
      "splot 'p_polar.csv' using ($1*cos($2)):($1*sin($2)):3 skip 1 with points pt 7 ps 0.4 "
      "palette notitle\n"
      "unset multiplot\n";
  art.write("plot.gp", gp);

  io.out << "invert: N = " << res.modes << ", J = " << ac.iterations;
  if (truth) io.out << ", e_p = " << last.e_p << ", e_q = " << last.e_q;
  io.out << '\n';
  if (res.tv_unconverged > 0) {
    io.err << "warning: " << res.tv_unconverged
           << " TV solves stopped at the inner iteration limit\n";
  }
  return last;
}

ShapeFitResult shape_step(const ExperimentConfig& cfg, const FluxDataset& data, Artifacts& art,
                          Console& io) {
  const auto basis = enumerate_basis(cfg.lambda_max);
  ShapeFitConfig sc;
  sc.modes = cfg.modes;
  sc.lm = cfg.shape.lm;
  sc.max_rounds = cfg.shape.max_rounds;
  sc.tol = cfg.shape.tol;
  sc.beta_q = cfg.beta_q;
  sc.time_weighted = cfg.time_weighted;
  std::optional<StepSource> known_q;
  if (cfg.shape.q_known) {
    if (!cfg.truth.q) throw ConfigError("config: field 'shape_fit.q_known': needs 'truth.q'");
    known_q = *cfg.truth.q;
  }
  warn_resonance(data.angles, max_order(basis, cfg.modes ? cfg.modes : basis.size()), io);

  const auto init = StarSource::circle(cfg.shape.init_radius, cfg.shape.harmonics);
  const auto res = shape_fit(data, init, known_q, basis, sc);

  art.write("shape.json", io::to_json(res.shape) + "\n");
  std::ostringstream coeffs;
  coeffs << std::setprecision(17) << "k,cos,sin\n0," << res.shape.a0() << ",0\n";
  for (std::size_t k = 0; k < res.shape.harmonics(); ++k) {
    coeffs << k + 1 << ',' << res.shape.cos_coeffs()[k] << ',' << res.shape.sin_coeffs()[k]
           << '\n';
  }
  art.write("radius_coeffs.csv", coeffs.str());

  std::ostringstream radius;
  radius << std::setprecision(17) << "theta,r_fit" << (cfg.truth.shape ? ",r_true" : "") << '\n';
  for (int k = 0; k <= 360; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 360.0;
    radius << t << ',' << res.shape.radius(t);
    if (cfg.truth.shape) radius << ',' << cfg.truth.shape->radius(t);
    radius << '\n';
  }
  art.write("radius.csv", radius.str());
  std::ostringstream q_csv;
  io::write_q_csv(q_csv, res.q, data.grid);
  art.write("q.csv", q_csv.str());

  json fit;
  fit["rounds"] = res.rounds;
  fit["q_known"] = cfg.shape.q_known;
  fit["residual_norm"] = res.residual_norm;
  fit["relative_residual"] = res.relative_residual;
  const Eigen::VectorXd params = res.shape.params();
  fit["params"] = std::vector<double>(params.data(), params.data() + params.size());
  json reports = json::array();
  for (const auto& r : res.lm_reports) {
    reports.push_back({{"iterations", r.iterations},
                       {"residual_evaluations", r.residual_evaluations},
                       {"converged", r.converged},
                       {"initial_norm", r.initial_norm},
                       {"final_norm", r.final_norm},
                       {"stop_reason", r.stop_reason}});
  }
  fit["lm"] = reports;
  art.write("fit.json", fit.dump(2) + "\n");

  std::ostringstream gp;
  gp << "set datafile separator ','\n"
        "set multiplot layout 1,2\n"
        "set title 'supp p'\n"
        "set polar\nset size square\nset grid polar\nset rrange [0:1]\n"
        "plot 'radius.csv' using 1:2 skip 1 with lines title 'recovered'";
  if (cfg.truth.shape) gp << ", '' using 1:3 skip 1 with lines dt 2 title 'true'";
  gp << ", '-' using 1:2 with points pt 7 title 'observation points'\n";
  for (double a : data.angles) gp << std::setprecision(17) << a << ",1\n";
  gp << "e\nunset polar\nset size nosquare\nset title 'q(t)'\n"
        "plot 'q.csv' using 1:2 skip 1 with steps title 'recovered'\n"
        "unset multiplot\n";
  art.write("plot.gp", gp.str());

  io.out << "shape-fit: rounds = " << res.rounds << ", a0 = " << res.shape.a0();
  if (res.shape.harmonics() >= 2) io.out << ", c2 = " << res.shape.cos_coeffs()[1];
  io.out << ", relative residual = " << res.relative_residual << '\n';
  for (const auto& r : res.lm_reports) {
    if (!r.converged && r.stop_reason == "max_iter") {
      io.err << "warning: LM stopped at max_iter (" << r.iterations << " iterations)\n";
      break;
    }
  }
  return res;
}

// Angles and sampling come from the dataset, not the config.
ExperimentConfig adopt_dataset(ExperimentConfig cfg, const FluxDataset& data) {
  cfg.angles = data.angles;
  cfg.T = data.grid.horizon();
  cfg.dt = data.grid.step();
  cfg.validate();
  return cfg;
}

fs::path resolve(const fs::path& p) {
  std::error_code ec;
  auto abs = fs::weakly_canonical(fs::absolute(p), ec);
  return ec ? fs::absolute(p) : abs;
}

enum class Pipeline { Alternating, Shape };

Pipeline pipeline_for(const ExperimentConfig& cfg) {
  if (cfg.truth.shape) return Pipeline::Shape;
  if (cfg.truth.p) return Pipeline::Alternating;
  throw ConfigError("config: field 'truth': experiment needs 'p' or 'shape'");
}

void run_steps(const json& steps, const ExperimentConfig* cfg, const fs::path& out,
               Console& io);

}  // namespace

void cmd_synth(const ExperimentConfig& cfg, const fs::path& out, Console& io) {
  cfg.validate();
  if (cfg.deltas.size() != 1) {
    throw ConfigError("config: field 'deltas': synth needs exactly one noise level (use --delta)");
  }
  OutputLock lock(out);
  Artifacts art{out, {}};
  synth_step(cfg, cfg.deltas[0], art, io);
  write_manifest(art, json::array({{{"command", "synth"}}}), &cfg);
}

void cmd_invert(const ExperimentConfig& cfg, const fs::path& data_path, const fs::path& out,
                Console& io) {
  const auto data = io::load_dataset(data_path);
  const auto run = adopt_dataset(cfg, data);
  OutputLock lock(out);
  Artifacts art{out, {}};
  invert_step(run, data, art, io);
  write_manifest(art, json::array({{{"command", "invert"}, {"data", resolve(data_path).string()}}}),
                 &run);
}

void cmd_shape_fit(const ExperimentConfig& cfg, const fs::path& data_path, const fs::path& out,
                   Console& io) {
  const auto data = io::load_dataset(data_path);
  const auto run = adopt_dataset(cfg, data);
  OutputLock lock(out);
  Artifacts art{out, {}};
  shape_step(run, data, art, io);
  write_manifest(
      art, json::array({{{"command", "shape-fit"}, {"data", resolve(data_path).string()}}}), &run);
}

void cmd_gaps(int b_max, angles::Fraction query, angles::Denominators denominators,
              const fs::path& out, Console& io) {
  angles::GapReport rep;
  try {
    rep = angles::gap_report(b_max, query, denominators);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  OutputLock lock(out);
  Artifacts art{out, {}};
  std::ostringstream csv;
  angles::write_gap_csv(csv, rep);
  art.write("gaps.csv", csv.str());

  auto frac = [](const angles::Fraction& f) {
    return std::to_string(f.num) + "/" + std::to_string(f.den);
  };
  json summary;
  summary["b_max"] = b_max;
  summary["denominators"] = denominators == angles::Denominators::Prime ? "prime" : "all";
  summary["query"] = frac(rep.query);
  summary["fractions"] = rep.fractions.size();
  if (rep.nearest_below) summary["nearest_below"] = frac(*rep.nearest_below);
  if (rep.nearest_above) summary["nearest_above"] = frac(*rep.nearest_above);
  auto gap_json = [&](const angles::Gap& g) {
    return json{{"left", frac(g.left)},
                {"right", frac(g.right)},
                {"length_pi", g.length_pi()},
                {"length_degrees", g.length_degrees()}};
  };
  summary["gap_below"] = gap_json(rep.gap_below);
  summary["gap_above"] = gap_json(rep.gap_above);
  summary["widest_gap"] = gap_json(rep.widest_gap());
  art.write("gaps.json", summary.dump(2) + "\n");
  art.write("plot.gp",
            "set datafile separator ','\n"
            "set xlabel 'angle / pi'\nset ylabel 'adjacent gap (rad)'\n"
            "plot 'gaps.csv' using 2:4 skip 1 with impulses title 'right gap'\n");

  io.out << std::setprecision(6) << "gaps: b < " << b_max << " ("
         << summary["denominators"].get<std::string>() << " denominators), "
         << rep.fractions.size() << " fractions\n";
  io.out << "  below " << frac(rep.query) << ": (" << frac(rep.gap_below.left) << ", "
         << frac(rep.gap_below.right) << ") pi, " << rep.gap_below.length_pi() << " pi = "
         << rep.gap_below.length_degrees() << " deg\n";
  io.out << "  above " << frac(rep.query) << ": (" << frac(rep.gap_above.left) << ", "
         << frac(rep.gap_above.right) << ") pi, " << rep.gap_above.length_pi() << " pi = "
         << rep.gap_above.length_degrees() << " deg\n";
  write_manifest(art,
                 json::array({{{"command", "gaps"},
                               {"b_max", b_max},
                               {"query", frac(rep.query)},
                               {"denominators", summary["denominators"]}}}),
                 nullptr);
}

void cmd_experiment(const ExperimentConfig& cfg, const fs::path& out, Console& io) {
  cfg.validate();
  const Pipeline pipeline = pipeline_for(cfg);
  OutputLock lock(out);
  Artifacts top{out, {}};

  std::vector<ErrorPair> errors;
  std::ostringstream shapes;
  shapes << std::setprecision(17) << "delta,params,relative_residual,rounds\n";
  for (double delta : cfg.deltas) {
    const std::string name = "delta_" + format_delta(delta);
    fs::create_directories(out / name);
    Artifacts sub{out / name, {}};
    auto single = cfg;
    single.deltas = {delta};
    synth_step(single, delta, sub, io);
    const auto data = io::load_dataset(sub.dir / "flux.csv");
    json steps = json::array({{{"command", "synth"}}});
    if (pipeline == Pipeline::Alternating) {
      errors.push_back(invert_step(single, data, sub, io));
      steps.push_back({{"command", "invert"}, {"data", "flux.csv"}});
    } else {
      const auto res = shape_step(single, data, sub, io);
      shapes << delta << ',';
      const auto params = res.shape.params();
      for (Eigen::Index i = 0; i < params.size(); ++i) shapes << (i ? ";" : "") << params[i];
      shapes << ',' << res.relative_residual << ',' << res.rounds << '\n';
      steps.push_back({{"command", "shape-fit"}, {"data", "flux.csv"}});
    }
    write_manifest(sub, steps, &single);
    top.add(name + "/");
  }

  if (pipeline == Pipeline::Alternating && !errors.empty() && cfg.truth.q) {
    std::ostringstream table, long_form;
    table << "error";
    for (double d : cfg.deltas) table << ',' << format_delta(d);
    table << std::setprecision(17);
    table << "\ne_p";
    for (const auto& e : errors) table << ',' << e.e_p;
    table << "\ne_q";
    for (const auto& e : errors) table << ',' << e.e_q;
    table << '\n';
    top.write("error_table.csv", table.str());
    long_form << std::setprecision(17) << "delta,e_p,e_q\n";
    for (std::size_t i = 0; i < errors.size(); ++i) {
      long_form << format_delta(cfg.deltas[i]) << ',' << errors[i].e_p << ',' << errors[i].e_q << '\n';
    }
    top.write("errors.csv", long_form.str());
    top.write("plot.gp",
              "set datafile separator ','\n"
              "set xlabel 'noise level'\nset ylabel 'error'\n"
              "plot 'errors.csv' using 1:2 skip 1 with linespoints title 'e_p', "
              "'' using 1:3 skip 1 with linespoints title 'e_q'\n");
    io.out << "error table (" << preset_name(cfg.preset) << ")\n" << table.str();
  } else if (pipeline == Pipeline::Shape) {
    top.write("shape_summary.csv", shapes.str());
  }
  write_manifest(top, json::array({{{"command", "experiment"}}}), &cfg);
}

namespace {

void run_steps(const json& steps, const ExperimentConfig* cfg, const fs::path& out,
               Console& io) {
  auto need_cfg = [&]() -> const ExperimentConfig& {
    if (!cfg) throw ConfigError("manifest: step needs a 'config' section");
    return *cfg;
  };
  OutputLock lock(out);
  Artifacts art{out, {}};
  json recorded = json::array();
  for (const auto& step : steps) {
    const std::string command = step.value("command", "");
    auto data_path = [&]() {
      fs::path p = step.value("data", "");
      if (p.empty()) throw ConfigError("manifest: step '" + command + "' has no 'data'");
      return p.is_absolute() ? p : out / p;
    };
    if (command == "synth") {
      need_cfg().validate();
      synth_step(*cfg, cfg->deltas.at(0), art, io);
    } else if (command == "invert") {
      need_cfg();
      const auto data = io::load_dataset(data_path());
      invert_step(adopt_dataset(*cfg, data), data, art, io);
    } else if (command == "shape-fit") {
      need_cfg();
      const auto data = io::load_dataset(data_path());
      shape_step(adopt_dataset(*cfg, data), data, art, io);
    } else {
      throw ConfigError("manifest: cannot replay step '" + command + "' here");
    }
    recorded.push_back(step);
  }
  write_manifest(art, recorded, cfg);
}

}  // namespace

void cmd_replay(const fs::path& manifest, const std::optional<fs::path>& out, Console& io) {
  json doc;
  try {
    doc = json::parse(io::read_file(manifest));
  } catch (const json::exception& e) {
    throw ConfigError("manifest " + manifest.string() + ": " + e.what());
  }
  if (!doc.contains("steps") || !doc["steps"].is_array() || doc["steps"].empty()) {
    throw ConfigError("manifest " + manifest.string() + ": no steps");
  }
  const fs::path dir = out ? *out : manifest.parent_path();
  std::optional<ExperimentConfig> cfg;
  if (doc.contains("config")) cfg = parse_config(doc["config"].dump(), "manifest config");

  const auto& steps = doc["steps"];
  const std::string first = steps[0].value("command", "");
  if (first == "experiment") {
    if (!cfg) throw ConfigError("manifest: experiment step needs a 'config' section");
    cmd_experiment(*cfg, dir, io);
  } else if (first == "gaps") {
    const auto& s = steps[0];
    const std::string q = s.value("query", "1/4");
    const auto slash = q.find('/');
    if (slash == std::string::npos) throw ConfigError("manifest: malformed gaps query '" + q + "'");
    const angles::Fraction query{std::stol(q.substr(0, slash)), std::stol(q.substr(slash + 1))};
    const auto denominators = s.value("denominators", "prime") == "all"
                                  ? angles::Denominators::All
                                  : angles::Denominators::Prime;
    cmd_gaps(s.value("b_max", 29), query, denominators, dir, io);
  } else {
    run_steps(steps, cfg ? &*cfg : nullptr, dir, io);
  }
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidArgument*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  if (dynamic_cast<const ConvergenceError*>(&e)) return 4;
  return 1;
}

fs::path default_output(const std::string& name) {
  const char* root = std::getenv("HEATINV_OUTPUT_ROOT");
  return fs::path(root && *root ? root : "heatinv-out") / name;
}

}  // namespace heatinv::app
