#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "heatinv/forward.hpp"
#include "heatinv/inversion.hpp"
#include "heatinv/sources.hpp"

/// Text formats. JSON documents are plain objects; CSV files carry a header
/// row and 17 significant digits.
namespace heatinv::io {

// Sources.
//   StepSource:     {"steps": [[c, q], ...], "eta": e}
//   SpectralSource: {"coeffs": [...], "lambda_max": L}
//   StarSource:     {"radius_coeffs": [a0, c1, s1, ..., cK, sK]}
std::string to_json(const StepSource& q);
std::string to_json(const SpectralSource& p, double lambda_max);
std::string to_json(const StarSource& shape);
StepSource step_source_from_json(std::string_view text);
SpectralSource spectral_source_from_json(std::string_view text, double* lambda_max = nullptr);
StarSource star_source_from_json(std::string_view text);

// Flux dataset: CSV "t,g_1,...,g_L" with one row per sample t_i = i dt, and
// a JSON sidecar {"angles", "dt", "T", "delta", "seed", "noise"}.
void write_dataset_csv(std::ostream& out, const FluxDataset& data);
std::string dataset_sidecar_json(const FluxDataset& data);
/// Throws DataError naming the offending row/column.
FluxDataset read_dataset(std::istream& csv, std::string_view sidecar_json);

/// Sidecar path convention: "<csv path>.json".
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);
void save_dataset(const std::filesystem::path& csv_path, const FluxDataset& data);
FluxDataset load_dataset(const std::filesystem::path& csv_path);

// Reconstruction output.
std::string to_json(const ReconstructionResult& result);
/// "t,q" at grid nodes t_0..t_n.
void write_q_csv(std::ostream& out, const Eigen::VectorXd& q_cells, const TimeGrid& grid);
/// "r,theta,p" on a radial x angular polar grid (r_i = i / (radial - 1),
/// theta_k = 2 pi k / angular).
void write_polar_csv(std::ostream& out, const SpectralSource& p, const EigenBasis& basis,
                     std::size_t radial = 64, std::size_t angular = 128);
/// "theta,r" samples of a radius function.
void write_radius_csv(std::ostream& out, const StarSource& shape, std::size_t samples = 360);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace heatinv::io
