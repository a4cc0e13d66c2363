#include "heatinv/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "heatinv/error.hpp"

namespace heatinv::io {
namespace {

using nlohmann::json;

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string(what) + ": malformed JSON: " + e.what());
  }
}

template <typename T>
T field(const json& doc, const char* key, const char* what) {
  if (!doc.contains(key)) {
    throw DataError(std::string(what) + ": missing field '" + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  double value = 0.0;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || cell.empty()) {
    std::ostringstream msg;
    msg << "dataset CSV row " << row << ", column '" << column << "': cannot parse '" << cell
        << "' as a number";
    throw DataError(msg.str());
  }
  return value;
}

NoiseModel noise_from_string(const std::string& s) {
  if (s == "uniform") return NoiseModel::Uniform;
  if (s == "clipped_gaussian") return NoiseModel::ClippedGaussian;
  throw DataError("dataset sidecar: unknown noise model '" + s + "'");
}

const char* noise_name(NoiseModel n) {
  return n == NoiseModel::Uniform ? "uniform" : "clipped_gaussian";
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

std::string to_json(const StepSource& q) {
  json doc;
  doc["steps"] = json::array();
  for (const auto& s : q.steps()) doc["steps"].push_back({s.onset, s.height});
  if (std::isfinite(q.eta())) doc["eta"] = q.eta();
  return doc.dump(2);
}

std::string to_json(const SpectralSource& p, double lambda_max) {
  json doc;
  doc["coeffs"] = to_std(p.coeffs);
  doc["lambda_max"] = lambda_max;
  return doc.dump(2);
}

std::string to_json(const StarSource& shape) {
  json doc;
  doc["radius_coeffs"] = to_std(shape.params());
  return doc.dump(2);
}

StepSource step_source_from_json(std::string_view text) {
  const json doc = parse(text, "StepSource");
  const auto pairs = field<std::vector<std::vector<double>>>(doc, "steps", "StepSource");
  std::vector<Step> steps;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (pairs[k].size() != 2) {
      throw DataError("StepSource: step " + std::to_string(k + 1) + " is not a [c, q] pair");
    }
    steps.push_back({pairs[k][0], pairs[k][1]});
  }
  if (doc.contains("eta")) return StepSource(std::move(steps), field<double>(doc, "eta", "StepSource"));
  return StepSource(std::move(steps));
}

SpectralSource spectral_source_from_json(std::string_view text, double* lambda_max) {
  const json doc = parse(text, "SpectralSource");
  const auto coeffs = field<std::vector<double>>(doc, "coeffs", "SpectralSource");
  if (lambda_max) {
    *lambda_max = doc.contains("lambda_max") ? field<double>(doc, "lambda_max", "SpectralSource")
                                             : 0.0;
  }
  SpectralSource p{Eigen::Map<const Eigen::VectorXd>(coeffs.data(),
                                                     static_cast<Eigen::Index>(coeffs.size()))};
  return p;
}

StarSource star_source_from_json(std::string_view text) {
  const json doc = parse(text, "StarSource");
  const auto coeffs = field<std::vector<double>>(doc, "radius_coeffs", "StarSource");
  if (coeffs.empty() || coeffs.size() % 2 == 0) {
    throw DataError("StarSource: radius_coeffs must have odd length 1 + 2K");
  }
  return StarSource::from_params(Eigen::Map<const Eigen::VectorXd>(
      coeffs.data(), static_cast<Eigen::Index>(coeffs.size())));
}

void write_dataset_csv(std::ostream& out, const FluxDataset& data) {
  data.validate();
  const auto old_precision = out.precision(17);
  out << 't';
  for (std::size_t l = 0; l < data.angles.size(); ++l) out << ",g_" << l + 1;
  out << '\n';
  for (std::size_t i = 0; i < data.grid.size(); ++i) {
    out << data.grid.time(i + 1);
    for (Eigen::Index l = 0; l < data.values.rows(); ++l) {
      out << ',' << data.values(l, static_cast<Eigen::Index>(i));
    }
    out << '\n';
  }
  out.precision(old_precision);
}

std::string dataset_sidecar_json(const FluxDataset& data) {
  json doc;
  doc["angles"] = data.angles;
  doc["dt"] = data.grid.step();
  doc["T"] = data.grid.horizon();
  doc["delta"] = data.noise_level;
  doc["seed"] = data.seed;
  doc["noise"] = noise_name(data.noise);
  return doc.dump(2);
}

FluxDataset read_dataset(std::istream& csv, std::string_view sidecar_json) {
  const json side = parse(sidecar_json, "dataset sidecar");
  FluxDataset data;
  data.angles = field<std::vector<double>>(side, "angles", "dataset sidecar");
  try {
    data.grid = TimeGrid(field<double>(side, "T", "dataset sidecar"),
                         field<double>(side, "dt", "dataset sidecar"));
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("dataset sidecar: ") + e.what());
  }
  data.noise_level = side.contains("delta") ? field<double>(side, "delta", "dataset sidecar") : 0.0;
  data.seed = side.contains("seed") ? field<std::uint64_t>(side, "seed", "dataset sidecar") : 0;
  if (side.contains("noise")) {
    data.noise = noise_from_string(field<std::string>(side, "noise", "dataset sidecar"));
  }
  if (data.angles.empty()) throw DataError("dataset sidecar: no angles");

  const std::size_t n_angles = data.angles.size();
  std::vector<std::string> expected{"t"};
  for (std::size_t l = 0; l < n_angles; ++l) expected.push_back("g_" + std::to_string(l + 1));

  std::string line;
  if (!std::getline(csv, line)) throw DataError("dataset CSV: empty file");
  const auto header = split_csv(line);
  for (std::size_t c = 0; c < expected.size(); ++c) {
    if (c >= header.size()) {
      throw DataError("dataset CSV header: missing column '" + expected[c] + "'");
    }
    if (header[c] != expected[c]) {
      throw DataError("dataset CSV header: column " + std::to_string(c + 1) + " is '" +
                      header[c] + "', expected '" + expected[c] + "'");
    }
  }
  if (header.size() > expected.size()) {
    throw DataError("dataset CSV header: unexpected extra column '" + header[expected.size()] +
                    "'");
  }

  const std::size_t samples = data.grid.size();
  data.values.resize(static_cast<Eigen::Index>(n_angles), static_cast<Eigen::Index>(samples));
  std::size_t row = 0;
  while (std::getline(csv, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    if (row > samples) {
      throw DataError("dataset CSV row " + std::to_string(row) + ": more rows than T/dt = " +
                      std::to_string(samples));
    }
    const auto cells = split_csv(line);
    if (cells.size() < expected.size()) {
      throw DataError("dataset CSV row " + std::to_string(row) + ": missing column '" +
                      expected[cells.size()] + "'");
    }
    if (cells.size() > expected.size()) {
      throw DataError("dataset CSV row " + std::to_string(row) + ": " +
                      std::to_string(cells.size()) + " columns, expected " +
                      std::to_string(expected.size()));
    }
    const double t = parse_number(cells[0], row, "t");
    if (std::fabs(t - data.grid.time(row)) > 1e-9 * std::max(1.0, data.grid.horizon())) {
      std::ostringstream msg;
      msg << "dataset CSV row " << row << ", column 't': " << t << " is not the grid time "
          << data.grid.time(row);
      throw DataError(msg.str());
    }
    for (std::size_t l = 0; l < n_angles; ++l) {
      data.values(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(row - 1)) =
          parse_number(cells[l + 1], row, expected[l + 1]);
    }
  }
  if (row != samples) {
    throw DataError("dataset CSV: " + std::to_string(row) + " data rows, expected " +
                    std::to_string(samples));
  }
  return data;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p += ".json";
  return p;
}

void save_dataset(const std::filesystem::path& csv_path, const FluxDataset& data) {
  std::ostringstream csv;
  write_dataset_csv(csv, data);
  write_file(csv_path, csv.str());
  write_file(sidecar_path(csv_path), dataset_sidecar_json(data));
}

FluxDataset load_dataset(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw DataError("cannot open dataset " + csv_path.string());
  return read_dataset(in, read_file(sidecar_path(csv_path)));
}

std::string to_json(const ReconstructionResult& result) {
  json doc;
  doc["modes"] = result.modes;
  doc["p_coeffs"] = to_std(result.p.coeffs);
  doc["q_cells"] = to_std(result.q);
  doc["dt"] = result.grid.step();
  doc["T"] = result.grid.horizon();
  doc["objective_trace"] = result.objective_trace();
  json misfit = json::array();
  for (const auto& it : result.iterates) misfit.push_back(it.misfit);
  doc["misfit_trace"] = misfit;
  if (!result.errors.empty()) {
    json errors = json::array();
    for (const auto& e : result.errors) errors.push_back({{"e_p", e.e_p}, {"e_q", e.e_q}});
    doc["errors"] = errors;
  }
  doc["tv_unconverged"] = result.tv_unconverged;
  return doc.dump(2);
}

void write_q_csv(std::ostream& out, const Eigen::VectorXd& q_cells, const TimeGrid& grid) {
  const auto old_precision = out.precision(17);
  const Eigen::VectorXd nodes = cells_to_nodes(q_cells);
  out << "t,q\n";
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    out << grid.time(static_cast<std::size_t>(i)) << ',' << nodes[i] << '\n';
  }
  out.precision(old_precision);
}

void write_polar_csv(std::ostream& out, const SpectralSource& p, const EigenBasis& basis,
                     std::size_t radial, std::size_t angular) {
  const auto old_precision = out.precision(17);
  out << "r,theta,p\n";
  for (std::size_t i = 0; i < radial; ++i) {
    const double r = radial > 1 ? static_cast<double>(i) / static_cast<double>(radial - 1) : 0.0;
    for (std::size_t k = 0; k < angular; ++k) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / angular;
      out << r << ',' << theta << ',' << p.evaluate(basis, r, theta) << '\n';
    }
  }
  out.precision(old_precision);
}

void write_radius_csv(std::ostream& out, const StarSource& shape, std::size_t samples) {
  const auto old_precision = out.precision(17);
  out << "theta,r\n";
  for (std::size_t k = 0; k <= samples; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / samples;
    out << theta << ',' << shape.radius(theta) << '\n';
  }
  out.precision(old_precision);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << contents;
}

}  // namespace heatinv::io
