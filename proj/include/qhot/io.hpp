#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qhot/analysis.hpp"
#include "qhot/ingest.hpp"
#include "qhot/maxlik.hpp"

// On-disk formats.  All doubles are written with 17 significant digits
// (%.17g) so that write -> read -> write is byte-stable.  Every writer is
// atomic: content goes to a temporary file in the destination directory which
// is then renamed over the target, so failed runs never leave partial files.
// Parse errors throw std::runtime_error naming the file and line.

namespace qhot {

// Writes content atomically (temp file + rename).
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string format_double(double v);  // %.17g

// --- quadrature records: CSV "theta,y", one record per line ---------------
void write_quadrature_csv(const std::filesystem::path& path,
                          std::span<const QuadratureRecord> records);
std::vector<QuadratureRecord> read_quadrature_csv(const std::filesystem::path& path);

// --- raw traces: CSV "t,v" plus a JSON sidecar (same stem, .json) holding
//     sample_period, pulse_period and role ("signal" | "blocked") -----------
void write_raw_trace(const std::filesystem::path& csv_path, const RawTrace& trace);
RawTrace read_raw_trace(const std::filesystem::path& csv_path);

// --- density matrices: JSON {"dim": N, "re": [[..]], "im": [[..]]},
//     row-major --------------------------------------------------------------
nlohmann::json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const nlohmann::json& j);
void write_density_json(const std::filesystem::path& path, const DensityMatrix& rho);
DensityMatrix read_density_json(const std::filesystem::path& path);

// --- Wigner grids: CSV "x,y,w" row-major over (x, y), and JSON
//     {"x_axis": [..], "y_axis": [..], "values": [[..]]} ---------------------
void write_wigner_csv(const std::filesystem::path& path, const WignerGrid& grid);
void write_wigner_json(const std::filesystem::path& path, const WignerGrid& grid);
WignerGrid read_wigner_json(const std::filesystem::path& path);

// --- photon distributions: CSV "n,p" ---------------------------------------
void write_photon_csv(const std::filesystem::path& path, const PhotonDistribution& pn);
PhotonDistribution read_photon_csv(const std::filesystem::path& path);

// --- fit table: CSV "n,p_reconstructed,p_fit" ------------------------------
void write_fit_table_csv(const std::filesystem::path& path, const PhotonDistribution& pn,
                         const FitResult& fit);

// --- calibration: JSON {"delta", "n_blocked", "blocked_mean"} --------------
void write_calibration_json(const std::filesystem::path& path, const CalibrationResult& cal);

// --- reconstruction report: JSON with iteration/convergence info plus the
//     config it ran under ----------------------------------------------------
nlohmann::json report_to_json(const ReconstructionReport& report,
                              const ReconstructionConfig& config);
void write_report_json(const std::filesystem::path& path, const ReconstructionReport& report,
                       const ReconstructionConfig& config);

nlohmann::json fit_to_json(const FitResult& fit);
nlohmann::json negativity_to_json(const NegativityReport& report);

}  // namespace qhot
