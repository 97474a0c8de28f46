#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "qhot/io.hpp"
#include "qhot/states.hpp"

using namespace qhot;
namespace fs = std::filesystem;

namespace {

fs::path test_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "qhot_io_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace

TEST_CASE("format_double round-trips awkward values exactly") {
  for (double v : {0.1, 1.0 / 3.0, 3.14159265358979323846, -0.0, 1e-300, 5e-324,
                   1.7976931348623157e308, 123456789.12345678}) {
    const std::string s = format_double(v);
    const double back = std::strtod(s.c_str(), nullptr);
    CAPTURE(s);
    CHECK(back == v);
  }
}

TEST_CASE("write_atomic leaves no temporaries and overwrites cleanly") {
  const fs::path p = test_dir() / "atomic.txt";
  write_atomic(p, "first\n");
  CHECK(slurp(p) == "first\n");
  write_atomic(p, "second\n");
  CHECK(slurp(p) == "second\n");
  int leftovers = 0;
  for (const auto& e : fs::directory_iterator(test_dir()))
    if (e.path().extension() == ".tmp") ++leftovers;
  CHECK(leftovers == 0);

  CHECK_THROWS_AS(write_atomic(test_dir() / "no_such_dir" / "x.txt", "y"), std::exception);
}

TEST_CASE("quadrature CSV round-trips byte-for-byte") {
  const fs::path p = test_dir() / "quad.csv";
  const std::vector<QuadratureRecord> recs = {
      {0.0, 0.1}, {1.0 / 3.0, -2.7182818284590452}, {6.28, 1e-17}};
  write_quadrature_csv(p, recs);
  const std::vector<QuadratureRecord> back = read_quadrature_csv(p);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].theta == recs[i].theta);
    CHECK(back[i].y == recs[i].y);
  }
  const std::string first = slurp(p);
  write_quadrature_csv(p, back);
  CHECK(slurp(p) == first);
  CHECK(first.substr(0, 8) == "theta,y\n");
}

TEST_CASE("quadrature CSV reader reports malformed input precisely") {
  const fs::path bad_header = test_dir() / "bad_header.csv";
  spit(bad_header, "a,b\n1,2\n");
  CHECK_THROWS_WITH_AS(static_cast<void>(read_quadrature_csv(bad_header)),
                       doctest::Contains("header"), std::runtime_error);

  const fs::path bad_number = test_dir() / "bad_number.csv";
  spit(bad_number, "theta,y\n0.5,oops\n");
  try {
    static_cast<void>(read_quadrature_csv(bad_number));
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bad_number.csv") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);  // line number of the bad row
  }

  const fs::path missing = test_dir() / "missing_column.csv";
  spit(missing, "theta,y\n0.5\n");
  CHECK_THROWS_AS(static_cast<void>(read_quadrature_csv(missing)), std::runtime_error);

  // Blank lines and CRLF endings are tolerated.
  const fs::path crlf = test_dir() / "crlf.csv";
  spit(crlf, "theta,y\r\n0.5,1.25\r\n\r\n");
  const auto recs = read_quadrature_csv(crlf);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].y == 1.25);
}

TEST_CASE("raw traces round-trip with their JSON sidecar") {
  for (TraceRole role : {TraceRole::Signal, TraceRole::Blocked}) {
    RawTrace t;
    t.sample_period = 0.1;
    t.pulse_period = 24.0;
    t.role = role;
    t.samples = {0.0, -1.5, 2.25, 1e-12};
    const fs::path p = test_dir() / (role == TraceRole::Signal ? "sig.csv" : "blk.csv");
    write_raw_trace(p, t);
    CHECK(fs::exists(fs::path(p).replace_extension(".json")));
    const RawTrace back = read_raw_trace(p);
    CHECK(back.sample_period == t.sample_period);
    CHECK(back.pulse_period == t.pulse_period);
    CHECK(back.role == t.role);
    CHECK(back.samples == t.samples);
  }

  const fs::path orphan = test_dir() / "orphan.csv";
  spit(orphan, "t,v\n0,1\n");
  CHECK_THROWS_AS(static_cast<void>(read_raw_trace(orphan)), std::exception);
}

TEST_CASE("density matrices round-trip through JSON with validation") {
  const DensityMatrix rho = state_to_density(DisplacedFockSpec{Complex(0.8, 0.5), 1}, 12);
  const fs::path p = test_dir() / "rho.json";
  write_density_json(p, rho);
  const DensityMatrix back = read_density_json(p);
  CHECK((back.elems() - rho.elems()).cwiseAbs().maxCoeff() == 0.0);
  const std::string first = slurp(p);
  write_density_json(p, back);
  CHECK(slurp(p) == first);

  // A tampered file with a broken trace must be rejected by the physics
  // validation, not silently accepted.
  nlohmann::json j = density_to_json(rho);
  j["re"][0][0] = 5.0;
  const fs::path tampered = test_dir() / "tampered.json";
  spit(tampered, j.dump());
  CHECK_THROWS_WITH_AS(static_cast<void>(read_density_json(tampered)),
                       doctest::Contains("trace"), std::invalid_argument);

  const fs::path garbage = test_dir() / "garbage.json";
  spit(garbage, "{not json");
  try {
    static_cast<void>(read_density_json(garbage));
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("garbage.json") != std::string::npos);
  }
}

TEST_CASE("wigner grids round-trip through JSON and lay out CSV row-major") {
  WignerGrid grid;
  grid.x_axis = {-1.0, 0.0, 1.0};
  grid.y_axis = {-0.5, 0.5};
  grid.values.resize(3, 2);
  grid.values << 0.1, 0.2, 0.3, -0.4, 0.5, 0.6;

  const fs::path pj = test_dir() / "wigner.json";
  write_wigner_json(pj, grid);
  const WignerGrid back = read_wigner_json(pj);
  CHECK(back.x_axis == grid.x_axis);
  CHECK(back.y_axis == grid.y_axis);
  CHECK((back.values - grid.values).cwiseAbs().maxCoeff() == 0.0);

  const fs::path pc = test_dir() / "wigner.csv";
  write_wigner_csv(pc, grid);
  const std::string csv = slurp(pc);
  CHECK(csv.substr(0, 6) == "x,y,w\n");
  // First two data rows: x fixed, y advancing.
  const std::string expect_row0 = "-1," + format_double(-0.5) + "," + format_double(0.1);
  CHECK(csv.find(expect_row0) != std::string::npos);
}

TEST_CASE("photon distributions round-trip and validate indices") {
  PhotonDistribution pn;
  pn.probs = {0.5, 0.25, 0.125, 0.125};
  const fs::path p = test_dir() / "pn.csv";
  write_photon_csv(p, pn);
  const PhotonDistribution back = read_photon_csv(p);
  CHECK(back.probs == pn.probs);
  CHECK(slurp(p).substr(0, 4) == "n,p\n");

  const fs::path gap = test_dir() / "gap.csv";
  spit(gap, "n,p\n0,0.5\n2,0.5\n");
  CHECK_THROWS_AS(static_cast<void>(read_photon_csv(gap)), std::runtime_error);
}

TEST_CASE("fit tables pair reconstructed and fitted columns") {
  PhotonDistribution pn;
  pn.probs = {0.4, 0.6};
  FitResult fit;
  fit.k = 0;
  fit.alpha_sq = 0.5;
  fit.fitted = {0.45, 0.55};
  const fs::path p = test_dir() / "fit.csv";
  write_fit_table_csv(p, pn, fit);
  const std::string csv = slurp(p);
  CHECK(csv.substr(0, 26) == "n,p_reconstructed,p_fit\n0,");
  CHECK(csv.find("1," + format_double(0.6) + "," + format_double(0.55)) != std::string::npos);
}

TEST_CASE("json summaries carry the analysis fields") {
  CalibrationResult cal;
  cal.delta = 1.5;
  cal.n_samples = 2000;
  cal.blocked_mean = -0.001;
  cal.low_sample_warning = false;
  const fs::path p = test_dir() / "cal.json";
  write_calibration_json(p, cal);
  const nlohmann::json j = nlohmann::json::parse(slurp(p));
  CHECK(j["delta"].get<double>() == 1.5);
  CHECK(j["n_blocked"].get<std::size_t>() == 2000);
  CHECK_FALSE(j["low_sample_warning"].get<bool>());

  ReconstructionReport rep;
  rep.iterations = 3;
  rep.ll_per_sample = -1.25;
  rep.converged = true;
  rep.stop_reason = "ll_tol";
  rep.ll_trace = {-2.0, -1.5, -1.25};
  rep.min_eigenvalue_trace = {0.0, -1e-17, 0.0};
  rep.trace_trace = {1.0, 1.0, 1.0};
  rep.total_count = 100;
  rep.overflow_count = 2;
  const nlohmann::json rj = report_to_json(rep, ReconstructionConfig{});
  CHECK(rj["iterations"].get<int>() == 3);
  CHECK(rj["stop_reason"].get<std::string>() == "ll_tol");
  CHECK(rj["ll_trace"].size() == 3);
  CHECK(rj["trace_trace"].size() == 3);
  CHECK(rj["config"]["dim"].get<int>() == 40);
  CHECK(rj["overflow_count"].get<std::uint64_t>() == 2);

  FitResult fit;
  fit.model = FitResult::Model::DisplacedFock;
  fit.k = 1;
  fit.alpha_sq = 9.03;
  fit.residual = 1e-5;
  const nlohmann::json fj = fit_to_json(fit);
  CHECK(fj["k"].get<int>() == 1);
  CHECK(fj["model"].get<std::string>() == "displaced_fock");
  CHECK(fj["alpha_sq"].get<double>() == 9.03);

  NegativityReport neg;
  neg.min_value = -0.63;
  neg.min_x = 2.15;
  neg.min_y = 2.1;
  neg.negative_volume = 0.21;
  const nlohmann::json nj = negativity_to_json(neg);
  CHECK(nj["min_value"].get<double>() == -0.63);
  CHECK(nj["negative_volume"].get<double>() == 0.21);
}
