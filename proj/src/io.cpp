#include "qhot/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qhot {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double parse_field(const std::string& field, const std::filesystem::path& path, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size())
    throw std::runtime_error(path.string() + ":" + std::to_string(line) +
                             ": malformed number '" + field + "'");
  return v;
}

// Splits a CSV body into rows of doubles, enforcing the header and column
// count.  Line numbers in errors are 1-based including the header.
std::vector<std::vector<double>> parse_csv(const std::filesystem::path& path,
                                           const std::string& expected_header, std::size_t cols) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header)
    throw std::runtime_error(path.string() + ": expected header '" + expected_header + "', got '" +
                             line + "'");
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      row.push_back(parse_field(line.substr(start, comma - start), path, line_no));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (row.size() != cols)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected " + std::to_string(cols) + " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json parse_json_file(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_quadrature_csv(const std::filesystem::path& path,
                          std::span<const QuadratureRecord> records) {
  std::string out = "theta,y\n";
  for (const QuadratureRecord& rec : records)
    out += format_double(rec.theta) + "," + format_double(rec.y) + "\n";
  write_atomic(path, out);
}

std::vector<QuadratureRecord> read_quadrature_csv(const std::filesystem::path& path) {
  const auto rows = parse_csv(path, "theta,y", 2);
  std::vector<QuadratureRecord> records(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) records[i] = {rows[i][0], rows[i][1]};
  return records;
}

void write_raw_trace(const std::filesystem::path& csv_path, const RawTrace& trace) {
  std::string out = "t,v\n";
  for (std::size_t i = 0; i < trace.samples.size(); ++i)
    out += format_double(i * trace.sample_period) + "," + format_double(trace.samples[i]) + "\n";
  write_atomic(csv_path, out);

  nlohmann::json meta{{"sample_period", trace.sample_period},
                      {"pulse_period", trace.pulse_period},
                      {"role", trace.role == TraceRole::Signal ? "signal" : "blocked"}};
  std::filesystem::path side = csv_path;
  side.replace_extension(".json");
  write_atomic(side, meta.dump(2) + "\n");
}

RawTrace read_raw_trace(const std::filesystem::path& csv_path) {
  std::filesystem::path side = csv_path;
  side.replace_extension(".json");
  const nlohmann::json meta = parse_json_file(side);
  RawTrace trace;
  try {
    trace.sample_period = meta.at("sample_period").get<double>();
    trace.pulse_period = meta.at("pulse_period").get<double>();
    const std::string role = meta.at("role").get<std::string>();
    if (role == "signal")
      trace.role = TraceRole::Signal;
    else if (role == "blocked")
      trace.role = TraceRole::Blocked;
    else
      throw std::runtime_error(side.string() + ": unknown role '" + role + "'");
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(side.string() + ": " + e.what());
  }
  const auto rows = parse_csv(csv_path, "t,v", 2);
  trace.samples.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) trace.samples[i] = rows[i][1];
  return trace;
}

nlohmann::json density_to_json(const DensityMatrix& rho) {
  const int dim = rho.dim();
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int a = 0; a < dim; ++a) {
    nlohmann::json row_re = nlohmann::json::array(), row_im = nlohmann::json::array();
    for (int b = 0; b < dim; ++b) {
      row_re.push_back(rho.elem(a, b).real());
      row_im.push_back(rho.elem(a, b).imag());
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  return nlohmann::json{{"dim", dim}, {"re", std::move(re)}, {"im", std::move(im)}};
}

DensityMatrix density_from_json(const nlohmann::json& j) {
  int dim = 0;
  try {
    dim = j.at("dim").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("density matrix json: ") + e.what());
  }
  if (dim < 1) throw std::runtime_error("density matrix json: bad dim");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (!re.is_array() || !im.is_array() || static_cast<int>(re.size()) != dim ||
      static_cast<int>(im.size()) != dim)
    throw std::runtime_error("density matrix json: re/im shape mismatch");
  CMatrix m(dim, dim);
  for (int a = 0; a < dim; ++a) {
    if (static_cast<int>(re[a].size()) != dim || static_cast<int>(im[a].size()) != dim)
      throw std::runtime_error("density matrix json: re/im shape mismatch");
    for (int b = 0; b < dim; ++b)
      m(a, b) = Complex(re[a][b].get<double>(), im[a][b].get<double>());
  }
  return DensityMatrix::from_matrix(m);
}

void write_density_json(const std::filesystem::path& path, const DensityMatrix& rho) {
  write_atomic(path, density_to_json(rho).dump(2) + "\n");
}

DensityMatrix read_density_json(const std::filesystem::path& path) {
  return density_from_json(parse_json_file(path));
}

void write_wigner_csv(const std::filesystem::path& path, const WignerGrid& grid) {
  std::string out = "x,y,w\n";
  for (std::size_t i = 0; i < grid.x_axis.size(); ++i)
    for (std::size_t j = 0; j < grid.y_axis.size(); ++j)
      out += format_double(grid.x_axis[i]) + "," + format_double(grid.y_axis[j]) + "," +
             format_double(grid.values(i, j)) + "\n";
  write_atomic(path, out);
}

void write_wigner_json(const std::filesystem::path& path, const WignerGrid& grid) {
  nlohmann::json values = nlohmann::json::array();
  for (std::size_t i = 0; i < grid.x_axis.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < grid.y_axis.size(); ++j) row.push_back(grid.values(i, j));
    values.push_back(std::move(row));
  }
  const nlohmann::json j{
      {"x_axis", grid.x_axis}, {"y_axis", grid.y_axis}, {"values", std::move(values)}};
  write_atomic(path, j.dump(2) + "\n");
}

WignerGrid read_wigner_json(const std::filesystem::path& path) {
  const nlohmann::json j = parse_json_file(path);
  WignerGrid grid;
  try {
    grid.x_axis = j.at("x_axis").get<std::vector<double>>();
    grid.y_axis = j.at("y_axis").get<std::vector<double>>();
    const auto& values = j.at("values");
    grid.values.resize(grid.x_axis.size(), grid.y_axis.size());
    if (values.size() != grid.x_axis.size())
      throw std::runtime_error(path.string() + ": values shape mismatch");
    for (std::size_t i = 0; i < grid.x_axis.size(); ++i) {
      if (values[i].size() != grid.y_axis.size())
        throw std::runtime_error(path.string() + ": values shape mismatch");
      for (std::size_t jj = 0; jj < grid.y_axis.size(); ++jj)
        grid.values(i, jj) = values[i][jj].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return grid;
}

void write_photon_csv(const std::filesystem::path& path, const PhotonDistribution& pn) {
  std::string out = "n,p\n";
  for (std::size_t n = 0; n < pn.probs.size(); ++n)
    out += std::to_string(n) + "," + format_double(pn.probs[n]) + "\n";
  write_atomic(path, out);
}

PhotonDistribution read_photon_csv(const std::filesystem::path& path) {
  const auto rows = parse_csv(path, "n,p", 2);
  PhotonDistribution pn;
  pn.probs.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i][0] != static_cast<double>(i))
      throw std::runtime_error(path.string() + ": photon indices must run 0,1,2,...");
    pn.probs[i] = rows[i][1];
  }
  return pn;
}

void write_fit_table_csv(const std::filesystem::path& path, const PhotonDistribution& pn,
                         const FitResult& fit) {
  std::string out = "n,p_reconstructed,p_fit\n";
  const std::size_t len = std::max(pn.probs.size(), fit.fitted.size());
  for (std::size_t n = 0; n < len; ++n) {
    const double p = n < pn.probs.size() ? pn.probs[n] : 0.0;
    const double f = n < fit.fitted.size() ? fit.fitted[n] : 0.0;
    out += std::to_string(n) + "," + format_double(p) + "," + format_double(f) + "\n";
  }
  write_atomic(path, out);
}

void write_calibration_json(const std::filesystem::path& path, const CalibrationResult& cal) {
  const nlohmann::json j{{"delta", cal.delta},
                         {"n_blocked", cal.n_samples},
                         {"blocked_mean", cal.blocked_mean},
                         {"low_sample_warning", cal.low_sample_warning}};
  write_atomic(path, j.dump(2) + "\n");
}

nlohmann::json report_to_json(const ReconstructionReport& report,
                              const ReconstructionConfig& config) {
  return nlohmann::json{
      {"iterations", report.iterations},
      {"ll_per_sample", report.ll_per_sample},
      {"converged", report.converged},
      {"stop_reason", report.stop_reason},
      {"total_count", report.total_count},
      {"overflow_count", report.overflow_count},
      {"ll_trace", report.ll_trace},
      {"min_eigenvalue_trace", report.min_eigenvalue_trace},
      {"trace_trace", report.trace_trace},
      {"config",
       {{"dim", config.dim},
        {"n_theta", config.n_theta},
        {"n_x", config.n_x},
        {"x_range", config.x_range},
        {"max_iters", config.max_iters},
        {"ll_tol", config.ll_tol},
        {"phase_averaged_bins", config.phase_averaged_bins}}}};
}

void write_report_json(const std::filesystem::path& path, const ReconstructionReport& report,
                       const ReconstructionConfig& config) {
  write_atomic(path, report_to_json(report, config).dump(2) + "\n");
}

nlohmann::json fit_to_json(const FitResult& fit) {
  return nlohmann::json{
      {"model", fit.model == FitResult::Model::Coherent ? "coherent" : "displaced_fock"},
      {"k", fit.k},
      {"alpha_sq", fit.alpha_sq},
      {"residual", fit.residual},
      {"fitted", fit.fitted}};
}

nlohmann::json negativity_to_json(const NegativityReport& report) {
  return nlohmann::json{{"min_value", report.min_value},
                        {"min_x", report.min_x},
                        {"min_y", report.min_y},
                        {"negative_volume", report.negative_volume}};
}

}  // namespace qhot
