// Command-line front end: simulate | ingest | reconstruct | analyze | reproduce.
// Exit codes: 0 success, 1 user/config error, 2 numerical failure
// (non-convergence, physicality violation, failed reproduction check).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qhot/analysis.hpp"
#include "qhot/ingest.hpp"
#include "qhot/io.hpp"
#include "qhot/maxlik.hpp"
#include "qhot/simulate.hpp"
#include "qhot/states.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kTwoPi = 6.2831853071795864769;

// Values shared by the subcommands plus the config-file merge.  Explicit
// command-line flags win over config-file keys, which win over defaults.
struct CommonOpts {
  std::uint64_t seed = 1;
  int dim = 40;
  std::string out;
  std::string config_path;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

template <typename T>
void merge_key(const json& cfg, const char* key, const CLI::Option* opt, T& value) {
  if (opt != nullptr && opt->count() > 0) return;  // explicit flag wins
  if (cfg.contains(key)) {
    try {
      value = cfg.at(key).get<T>();
    } catch (const json::exception& e) {
      throw std::runtime_error(std::string("config key '") + key + "': " + e.what());
    }
  }
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void write_manifest(const fs::path& path, const std::string& command, const json& config,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, std::uint64_t seed,
                    double duration) {
  const json manifest{{"command", command}, {"config", config},   {"inputs", inputs},
                      {"outputs", outputs}, {"seed", seed},       {"version", kVersion},
                      {"duration_seconds", duration}};
  qhot::write_atomic(path, manifest.dump(2) + "\n");
}

fs::path sibling(const fs::path& base, const std::string& suffix) {
  fs::path p = base.parent_path() / base.stem();
  return fs::path(p.string() + suffix);
}

// ---------------------------------------------------------------------------

struct SimulateOpts {
  std::string state;
  int samples = 50000;
  double efficiency = 1.0;
  double phase_start = 0.0;
  double phase_end = kTwoPi;
  bool emit_trace = false;
  double pulse_width = 1.0;
  double pulse_period = 24.0;
  double sample_period = 0.1;
  double noise_floor = 0.0;
};

int run_simulate(const CommonOpts& common, const SimulateOpts& opt, const json& config) {
  Timer timer;
  const qhot::StateSpec spec = qhot::parse_state_spec(opt.state);
  const qhot::DensityMatrix rho = qhot::state_to_density(spec, common.dim);
  const qhot::PhaseSchedule schedule =
      qhot::LinearRamp{opt.phase_start, opt.phase_end, opt.samples};
  const auto records = qhot::sample_quadratures(rho, schedule, common.seed, opt.efficiency);

  const fs::path out(common.out);
  qhot::write_quadrature_csv(out, records);
  std::vector<std::string> outputs{out.string()};

  if (opt.emit_trace) {
    const qhot::PulseShape pulse{opt.pulse_width, 1.0, opt.pulse_period};
    const qhot::TracePair traces =
        qhot::synth_trace(records, pulse, opt.noise_floor, opt.sample_period, common.seed);
    const fs::path sig = sibling(out, "_signal.csv");
    const fs::path blk = sibling(out, "_blocked.csv");
    qhot::write_raw_trace(sig, traces.signal);
    qhot::write_raw_trace(blk, traces.blocked);
    outputs.push_back(sig.string());
    outputs.push_back(blk.string());
  }

  write_manifest(sibling(out, ".manifest.json"), "simulate", config, {}, outputs, common.seed,
                 timer.seconds());
  return 0;
}

struct IngestOpts {
  std::string signal_path;
  std::string blocked_path;
  double window_offset = -1.0;
  double window_length = -1.0;
  bool subtract_median = false;
  double phase_start = 0.0;
  double phase_end = kTwoPi;
};

int run_ingest(const CommonOpts& common, const IngestOpts& opt, const json& config,
               bool window_given) {
  Timer timer;
  const qhot::RawTrace signal = qhot::read_raw_trace(opt.signal_path);
  const qhot::RawTrace blocked = qhot::read_raw_trace(opt.blocked_path);

  std::optional<qhot::IntegrationWindow> window;
  if (window_given) window = qhot::IntegrationWindow{opt.window_offset, opt.window_length};
  const auto signal_integrals = qhot::integrate_pulses(signal, window, opt.subtract_median);
  const auto blocked_integrals = qhot::integrate_pulses(blocked, window, opt.subtract_median);

  const qhot::CalibrationResult cal = qhot::vacuum_calibration(blocked_integrals);
  const auto values = qhot::normalize(signal_integrals, cal.delta);
  const auto phases =
      qhot::assign_phases(values.size(), qhot::PhaseRamp{opt.phase_start, opt.phase_end});
  const auto records = qhot::make_records(phases, values);

  const fs::path out(common.out);
  qhot::write_quadrature_csv(out, records);
  const fs::path cal_path = sibling(out, "_calibration.json");
  qhot::write_calibration_json(cal_path, cal);
  write_manifest(sibling(out, ".manifest.json"), "ingest", config,
                 {opt.signal_path, opt.blocked_path}, {out.string(), cal_path.string()},
                 common.seed, timer.seconds());
  return 0;
}

struct ReconstructOpts {
  std::string in_path;
  int n_theta = 24;
  int n_x = 128;
  double x_range = 8.0;
  int max_iters = 2000;
  double ll_tol = 1e-9;
  bool no_phase_average = false;
};

int run_reconstruct(const CommonOpts& common, const ReconstructOpts& opt, const json& config) {
  Timer timer;
  const auto records = qhot::read_quadrature_csv(opt.in_path);
  qhot::ReconstructionConfig rc;
  rc.dim = common.dim;
  rc.n_theta = opt.n_theta;
  rc.n_x = opt.n_x;
  rc.x_range = opt.x_range;
  rc.max_iters = opt.max_iters;
  rc.ll_tol = opt.ll_tol;
  rc.phase_averaged_bins = !opt.no_phase_average;

  const qhot::BinnedData data = qhot::bin_quadratures(records, rc);
  const qhot::ReconstructionResult result = qhot::maxlik_reconstruct(data, rc);

  const fs::path out(common.out);
  qhot::write_density_json(out, result.rho);
  const fs::path report_path = sibling(out, "_report.json");
  qhot::write_report_json(report_path, result.report, rc);
  write_manifest(sibling(out, ".manifest.json"), "reconstruct", config, {opt.in_path},
                 {out.string(), report_path.string()}, common.seed, timer.seconds());
  if (!result.report.converged) {
    std::fprintf(stderr, "reconstruction stopped on %s after %d iterations\n",
                 result.report.stop_reason.c_str(), result.report.iterations);
    return 2;
  }
  return 0;
}

struct AnalyzeOpts {
  std::string rho_path;
  std::string out_dir;
  int grid_points = 121;
  double grid_span = 4.0;
  int k_max = 5;
};

std::vector<double> centered_axis(double center, double span, int points) {
  std::vector<double> axis(points);
  for (int i = 0; i < points; ++i)
    axis[i] = center - span + 2.0 * span * i / std::max(1, points - 1);
  return axis;
}

int run_analyze(const CommonOpts& common, const AnalyzeOpts& opt, const json& config) {
  Timer timer;
  const qhot::DensityMatrix rho = qhot::read_density_json(opt.rho_path);
  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);

  const qhot::PhotonDistribution pn = qhot::photon_distribution(rho);

  // Center the Wigner grid on the state's displacement <a>.
  qhot::Complex a_mean = 0.0;
  for (int m = 1; m < rho.dim(); ++m)
    a_mean += std::sqrt(static_cast<double>(m)) * rho.elem(m, m - 1);
  const qhot::WignerGrid grid = qhot::wigner_from_density(
      rho, centered_axis(a_mean.real(), opt.grid_span, opt.grid_points),
      centered_axis(a_mean.imag(), opt.grid_span, opt.grid_points));

  const qhot::PoissonDeviation dev = qhot::poisson_deviation(pn);
  const qhot::FitResult fit = qhot::fit_dfs(pn, opt.k_max);
  const qhot::NegativityReport neg = qhot::wigner_negativity(grid);

  qhot::write_photon_csv(dir / "pn.csv", pn);
  qhot::write_wigner_csv(dir / "wigner.csv", grid);
  qhot::write_wigner_json(dir / "wigner.json", grid);
  const json g2_report{{"g2", qhot::g2_zero(pn)},
                       {"g2_as_printed", qhot::g2_as_printed(pn)},
                       {"nbar", dev.nbar_hat},
                       {"tv_to_poisson", dev.tv_distance}};
  qhot::write_atomic(dir / "g2.json", g2_report.dump(2) + "\n");
  qhot::write_atomic(dir / "fit.json", qhot::fit_to_json(fit).dump(2) + "\n");
  qhot::write_fit_table_csv(dir / "fit_table.csv", pn, fit);
  qhot::write_atomic(dir / "negativity.json", qhot::negativity_to_json(neg).dump(2) + "\n");

  write_manifest(dir / "manifest.json", "analyze", config, {opt.rho_path},
                 {(dir / "pn.csv").string(), (dir / "wigner.csv").string(),
                  (dir / "wigner.json").string(), (dir / "g2.json").string(),
                  (dir / "fit.json").string(), (dir / "fit_table.csv").string(),
                  (dir / "negativity.json").string()},
                 common.seed, timer.seconds());
  return 0;
}

struct ReproduceOpts {
  std::string the_case;
  std::string out_dir;
};

struct Check {
  std::string name;
  double measured;
  std::string threshold;
  bool pass;
};

int run_reproduce(const CommonOpts& common, const ReproduceOpts& opt, const json& config) {
  Timer timer;
  qhot::StateSpec spec;
  if (opt.the_case == "coherent5")
    spec = qhot::CoherentSpec{std::sqrt(5.0)};
  else if (opt.the_case == "coherent8")
    spec = qhot::CoherentSpec{std::sqrt(8.0)};
  else if (opt.the_case == "dfs9")
    spec = qhot::DisplacedFockSpec{{2.15, 2.1}, 1};
  else
    throw std::invalid_argument("reproduce: unknown case '" + opt.the_case +
                                "' (coherent5 | coherent8 | dfs9)");

  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);

  const qhot::DensityMatrix truth = qhot::state_to_density(spec, common.dim);
  const auto records = qhot::sample_quadratures(
      truth, qhot::LinearRamp{0.0, kTwoPi, 50000}, common.seed, 1.0);
  qhot::write_quadrature_csv(dir / "quadratures.csv", records);

  qhot::ReconstructionConfig rc;
  rc.dim = common.dim;
  const qhot::BinnedData data = qhot::bin_quadratures(records, rc);
  const qhot::ReconstructionResult result = qhot::maxlik_reconstruct(data, rc);
  qhot::write_density_json(dir / "rho.json", result.rho);
  qhot::write_report_json(dir / "rho_report.json", result.report, rc);

  const qhot::PhotonDistribution pn = qhot::photon_distribution(result.rho);
  qhot::write_photon_csv(dir / "pn.csv", pn);
  const qhot::FitResult fit = qhot::fit_dfs(pn, 5);
  qhot::write_atomic(dir / "fit.json", qhot::fit_to_json(fit).dump(2) + "\n");
  qhot::write_fit_table_csv(dir / "fit_table.csv", pn, fit);

  std::vector<Check> checks;
  const double fid = qhot::fidelity(result.rho, truth);
  if (opt.the_case == "dfs9") {
    const double p8 = pn.probs[8], p9 = pn.probs[9], p10 = pn.probs[10];
    checks.push_back({"pn_local_min_at_9", p9, "p9 < p8 and p9 < p10", p9 < p8 && p9 < p10});
    checks.push_back({"fit_k", static_cast<double>(fit.k), "== 1", fit.k == 1});
    checks.push_back(
        {"fit_alpha_sq", fit.alpha_sq, "in [8, 10]", fit.alpha_sq >= 8.0 && fit.alpha_sq <= 10.0});
    const qhot::WignerGrid grid = qhot::wigner_from_density(
        result.rho, centered_axis(2.15, 4.0, 121), centered_axis(2.1, 4.0, 121));
    qhot::write_wigner_csv(dir / "wigner.csv", grid);
    qhot::write_wigner_json(dir / "wigner.json", grid);
    const qhot::NegativityReport neg = qhot::wigner_negativity(grid);
    qhot::write_atomic(dir / "negativity.json", qhot::negativity_to_json(neg).dump(2) + "\n");
    checks.push_back({"wigner_min", neg.min_value, "< -0.15", neg.min_value < -0.15});
  } else {
    const qhot::PoissonDeviation dev = qhot::poisson_deviation(pn);
    const double g2 = qhot::g2_zero(pn);
    checks.push_back({"fidelity", fid, ">= 0.99", fid >= 0.99});
    checks.push_back({"tv_to_poisson", dev.tv_distance, "< 0.03", dev.tv_distance < 0.03});
    checks.push_back({"g2", g2, "in [0.97, 1.03]", g2 >= 0.97 && g2 <= 1.03});
    checks.push_back({"fit_k", static_cast<double>(fit.k), "== 0", fit.k == 0});
  }

  bool all_pass = true;
  json summary = json::array();
  for (const Check& c : checks) {
    all_pass = all_pass && c.pass;
    summary.push_back(
        {{"check", c.name}, {"measured", c.measured}, {"threshold", c.threshold}, {"pass", c.pass}});
    std::printf("%s %s: %.6g (%s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.measured,
                c.threshold.c_str());
  }
  const json summary_doc{{"case", opt.the_case},
                         {"fidelity", fid},
                         {"converged", result.report.converged},
                         {"iterations", result.report.iterations},
                         {"checks", summary},
                         {"all_pass", all_pass}};
  qhot::write_atomic(dir / "summary.json", summary_doc.dump(2) + "\n");

  write_manifest(dir / "manifest.json", "reproduce", config, {},
                 {(dir / "quadratures.csv").string(), (dir / "rho.json").string(),
                  (dir / "summary.json").string()},
                 common.seed, timer.seconds());
  return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulsed homodyne tomography toolkit: simulate quadrature data, ingest "
               "detector traces, reconstruct density matrices, analyze photon statistics"};
  app.require_subcommand(1);

  CommonOpts common;
  auto* opt_seed = app.add_option("--seed", common.seed, "Random seed (default 1)");
  auto* opt_dim = app.add_option("--dim", common.dim, "Fock-space dimension (default 40)");
  auto* opt_out = app.add_option("--out", common.out, "Output file path");
  app.add_option("--config", common.config_path, "JSON config merged under explicit flags");

  SimulateOpts sim;
  auto* c_sim = app.add_subcommand("simulate", "Sample synthetic quadrature records");
  c_sim->fallthrough();
  auto* o_state = c_sim->add_option("--state", sim.state,
                                    "State spec: coherent:RE[+IMi] | fock:K | "
                                    "dfs:RE[+IMi],K | thermal:NBAR");
  auto* o_samples = c_sim->add_option("--samples", sim.samples, "Number of records (default 50000)");
  auto* o_eff = c_sim->add_option("--efficiency", sim.efficiency, "Detection efficiency (0, 1]");
  auto* o_ps = c_sim->add_option("--phase-start", sim.phase_start, "Phase ramp start (rad)");
  auto* o_pe = c_sim->add_option("--phase-end", sim.phase_end, "Phase ramp end (rad)");
  auto* o_emit = c_sim->add_flag("--emit-trace", sim.emit_trace, "Also write synthetic traces");
  auto* o_pw = c_sim->add_option("--pulse-width", sim.pulse_width, "Trace pulse sigma");
  auto* o_pp = c_sim->add_option("--pulse-period", sim.pulse_period, "Trace pulse period");
  auto* o_sp = c_sim->add_option("--sample-period", sim.sample_period, "Trace sampling period");
  auto* o_nf = c_sim->add_option("--noise-floor", sim.noise_floor, "Trace noise rms");

  IngestOpts ing;
  auto* c_ing = app.add_subcommand("ingest", "Integrate traces into normalized quadratures");
  c_ing->fallthrough();
  auto* o_sig = c_ing->add_option("--signal", ing.signal_path, "Signal trace CSV");
  auto* o_blk = c_ing->add_option("--blocked", ing.blocked_path, "Blocked (vacuum) trace CSV");
  auto* o_wo = c_ing->add_option("--window-offset", ing.window_offset, "Window offset in period");
  auto* o_wl = c_ing->add_option("--window-length", ing.window_length, "Window length");
  auto* o_med = c_ing->add_flag("--subtract-median", ing.subtract_median, "Remove DC offset");
  auto* o_ips = c_ing->add_option("--phase-start", ing.phase_start, "Phase ramp start (rad)");
  auto* o_ipe = c_ing->add_option("--phase-end", ing.phase_end, "Phase ramp end (rad)");

  ReconstructOpts rec;
  auto* c_rec = app.add_subcommand("reconstruct", "Maximum-likelihood density matrix");
  c_rec->fallthrough();
  auto* o_in = c_rec->add_option("--in", rec.in_path, "Quadrature CSV");
  auto* o_nt = c_rec->add_option("--theta-bins", rec.n_theta, "Phase bins (default 24)");
  auto* o_nx = c_rec->add_option("--x-bins", rec.n_x, "Quadrature bins (default 128)");
  auto* o_xr = c_rec->add_option("--x-range", rec.x_range, "Quadrature range (default 8)");
  auto* o_mi = c_rec->add_option("--max-iters", rec.max_iters, "Iteration cap (default 2000)");
  auto* o_tol = c_rec->add_option("--tol", rec.ll_tol, "Per-sample log-likelihood gain stop");
  auto* o_npa =
      c_rec->add_flag("--no-phase-average", rec.no_phase_average, "Bin-center phases only");

  AnalyzeOpts ana;
  auto* c_ana = app.add_subcommand("analyze", "Photon statistics, Wigner grid, model fit");
  c_ana->fallthrough();
  auto* o_rho = c_ana->add_option("--rho", ana.rho_path, "Density matrix JSON");
  auto* o_dir = c_ana->add_option("--out-dir", ana.out_dir, "Output directory");
  auto* o_gp = c_ana->add_option("--grid-points", ana.grid_points, "Wigner grid points per axis");
  auto* o_gs = c_ana->add_option("--grid-span", ana.grid_span, "Wigner half-span around center");
  auto* o_km = c_ana->add_option("--k-max", ana.k_max, "Largest displaced-Fock index to fit");

  ReproduceOpts rep;
  auto* c_rep = app.add_subcommand("reproduce", "End-to-end benchmark cases with checks");
  c_rep->fallthrough();
  auto* o_case =
      c_rep->add_option("--case", rep.the_case, "coherent5 | coherent8 | dfs9")->required();
  auto* o_rdir = c_rep->add_option("--out-dir", rep.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const json config = load_config(common.config_path);
    merge_key(config, "seed", opt_seed, common.seed);
    merge_key(config, "dim", opt_dim, common.dim);
    merge_key(config, "out", opt_out, common.out);

    if (c_sim->parsed()) {
      merge_key(config, "state", o_state, sim.state);
      merge_key(config, "samples", o_samples, sim.samples);
      merge_key(config, "efficiency", o_eff, sim.efficiency);
      merge_key(config, "phase_start", o_ps, sim.phase_start);
      merge_key(config, "phase_end", o_pe, sim.phase_end);
      merge_key(config, "emit_trace", o_emit, sim.emit_trace);
      merge_key(config, "pulse_width", o_pw, sim.pulse_width);
      merge_key(config, "pulse_period", o_pp, sim.pulse_period);
      merge_key(config, "sample_period", o_sp, sim.sample_period);
      merge_key(config, "noise_floor", o_nf, sim.noise_floor);
      if (sim.state.empty()) throw std::invalid_argument("simulate: --state is required");
      if (common.out.empty()) throw std::invalid_argument("simulate: --out is required");
      const json resolved{{"state", sim.state},       {"samples", sim.samples},
                          {"efficiency", sim.efficiency}, {"phase_start", sim.phase_start},
                          {"phase_end", sim.phase_end},   {"emit_trace", sim.emit_trace},
                          {"pulse_width", sim.pulse_width}, {"pulse_period", sim.pulse_period},
                          {"sample_period", sim.sample_period}, {"noise_floor", sim.noise_floor},
                          {"dim", common.dim}};
      return run_simulate(common, sim, resolved);
    }
    if (c_ing->parsed()) {
      merge_key(config, "signal", o_sig, ing.signal_path);
      merge_key(config, "blocked", o_blk, ing.blocked_path);
      merge_key(config, "window_offset", o_wo, ing.window_offset);
      merge_key(config, "window_length", o_wl, ing.window_length);
      merge_key(config, "subtract_median", o_med, ing.subtract_median);
      merge_key(config, "phase_start", o_ips, ing.phase_start);
      merge_key(config, "phase_end", o_ipe, ing.phase_end);
      if (ing.signal_path.empty() || ing.blocked_path.empty())
        throw std::invalid_argument("ingest: --signal and --blocked are required");
      if (common.out.empty()) throw std::invalid_argument("ingest: --out is required");
      const bool window_given = (o_wo->count() > 0 || config.contains("window_offset")) &&
                                (o_wl->count() > 0 || config.contains("window_length"));
      const json resolved{{"signal", ing.signal_path},
                          {"blocked", ing.blocked_path},
                          {"window_offset", ing.window_offset},
                          {"window_length", ing.window_length},
                          {"subtract_median", ing.subtract_median},
                          {"phase_start", ing.phase_start},
                          {"phase_end", ing.phase_end}};
      return run_ingest(common, ing, resolved, window_given);
    }
    if (c_rec->parsed()) {
      merge_key(config, "in", o_in, rec.in_path);
      merge_key(config, "theta_bins", o_nt, rec.n_theta);
      merge_key(config, "x_bins", o_nx, rec.n_x);
      merge_key(config, "x_range", o_xr, rec.x_range);
      merge_key(config, "max_iters", o_mi, rec.max_iters);
      merge_key(config, "tol", o_tol, rec.ll_tol);
      merge_key(config, "no_phase_average", o_npa, rec.no_phase_average);
      if (rec.in_path.empty()) throw std::invalid_argument("reconstruct: --in is required");
      if (common.out.empty()) throw std::invalid_argument("reconstruct: --out is required");
      const json resolved{{"in", rec.in_path},         {"dim", common.dim},
                          {"theta_bins", rec.n_theta}, {"x_bins", rec.n_x},
                          {"x_range", rec.x_range},    {"max_iters", rec.max_iters},
                          {"tol", rec.ll_tol},         {"no_phase_average", rec.no_phase_average}};
      return run_reconstruct(common, rec, resolved);
    }
    if (c_ana->parsed()) {
      merge_key(config, "rho", o_rho, ana.rho_path);
      merge_key(config, "out_dir", o_dir, ana.out_dir);
      merge_key(config, "grid_points", o_gp, ana.grid_points);
      merge_key(config, "grid_span", o_gs, ana.grid_span);
      merge_key(config, "k_max", o_km, ana.k_max);
      if (ana.rho_path.empty() || ana.out_dir.empty())
        throw std::invalid_argument("analyze: --rho and --out-dir are required");
      const json resolved{{"rho", ana.rho_path},
                          {"out_dir", ana.out_dir},
                          {"grid_points", ana.grid_points},
                          {"grid_span", ana.grid_span},
                          {"k_max", ana.k_max}};
      return run_analyze(common, ana, resolved);
    }
    if (c_rep->parsed()) {
      merge_key(config, "case", o_case, rep.the_case);
      merge_key(config, "out_dir", o_rdir, rep.out_dir);
      if (rep.out_dir.empty()) throw std::invalid_argument("reproduce: --out-dir is required");
      const json resolved{
          {"case", rep.the_case}, {"out_dir", rep.out_dir}, {"dim", common.dim}};
      return run_reproduce(common, rep, resolved);
    }
    return 1;
  } catch (const qhot::ZeroProbabilityBin& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    // Physicality violations carry the "density matrix:" prefix and count as
    // numerical failures; everything else is user/config error.
    const std::string what = e.what();
    std::fprintf(stderr, "error: %s\n", what.c_str());
    return what.rfind("density matrix:", 0) == 0 ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
