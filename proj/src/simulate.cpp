#include "qhot/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "qhot/rng.hpp"

namespace qhot {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kWindowSigmas = 8.0;   // sampling window half-width in sigma
constexpr int kMinWindowNodes = 4096;   // lattice nodes per record window

}  // namespace

std::vector<double> schedule_phases(const PhaseSchedule& schedule) {
  if (const auto* ramp = std::get_if<LinearRamp>(&schedule)) {
    if (ramp->n < 0) throw std::invalid_argument("phase schedule: negative count");
    std::vector<double> phases(ramp->n);
    if (ramp->n == 1) {
      phases[0] = ramp->start;
    } else if (ramp->n > 1) {
      const double step = (ramp->end - ramp->start) / (ramp->n - 1);
      for (int i = 0; i < ramp->n; ++i) phases[i] = ramp->start + i * step;
    }
    return phases;
  }
  return std::get<ExplicitPhases>(schedule).phases;
}

DensityMatrix apply_loss(const DensityMatrix& rho, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("apply_loss: efficiency must lie in [0, 1]");
  if (eta == 1.0) return rho;
  const int dim = rho.dim();
  std::vector<double> lg(dim + 1);
  for (int i = 0; i <= dim; ++i) lg[i] = std::lgamma(static_cast<double>(i) + 1.0);
  auto log_binom = [&lg](int n, int k) { return lg[n] - lg[k] - lg[n - k]; };

  const double log_eta = std::log(eta);
  const double log_loss = eta > 0.0 ? std::log1p(-eta) : 0.0;
  CMatrix out = CMatrix::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) {
      Complex acc = 0.0;
      const int j_max = dim - 1 - b;  // b >= a
      for (int j = 0; j <= j_max; ++j) {
        double log_c = 0.5 * (log_binom(a + j, j) + log_binom(b + j, j)) + j * log_loss;
        if (eta > 0.0) log_c += 0.5 * (a + b) * log_eta;
        else if (a + b > 0) continue;  // eta = 0 keeps only the vacuum row/col
        acc += std::exp(log_c) * rho.elem(a + j, b + j);
      }
      out(a, b) = acc;
      out(b, a) = std::conj(acc);
    }
  }
  return DensityMatrix::from_matrix(out);
}

std::vector<QuadratureRecord> sample_quadratures(const DensityMatrix& rho,
                                                 const PhaseSchedule& schedule,
                                                 std::uint64_t seed, double efficiency) {
  if (!(efficiency > 0.0 && efficiency <= 1.0))
    throw std::invalid_argument("sample_quadratures: efficiency must lie in (0, 1]");
  const std::vector<double> phases = schedule_phases(schedule);
  std::vector<QuadratureRecord> records;
  if (phases.empty()) return records;

  const DensityMatrix effective = efficiency < 1.0 ? apply_loss(rho, efficiency) : rho;
  const CMatrix& r = effective.elems();
  const int dim = effective.dim();

  // First and second quadrature moments per phase come from <a>, <a^2>, <n>:
  //   mu(theta)    = sqrt(2) Re(<a> e^{-i theta})
  //   <x^2>(theta) = 1/2 + <n> + Re(<a^2> e^{-2 i theta}).
  Complex a1 = 0.0, a2 = 0.0;
  double nbar = 0.0;
  for (int m = 0; m < dim; ++m) {
    nbar += m * r(m, m).real();
    if (m >= 1) a1 += std::sqrt(static_cast<double>(m)) * r(m, m - 1);
    if (m >= 2) a2 += std::sqrt(m * (m - 1.0)) * r(m, m - 2);
  }
  auto window_of = [&](double theta) {
    const Complex e1 = std::polar(1.0, -theta);
    const double mu = kSqrt2 * (a1 * e1).real();
    const double x2 = 0.5 + nbar + (a2 * e1 * e1).real();
    const double sigma = std::sqrt(std::max(x2 - mu * mu, 1e-12));
    return std::pair<double, double>(mu, sigma);
  };

  // Shared lattice fine enough that every record's [mu-8s, mu+8s] window has
  // at least kMinWindowNodes nodes of its own.
  double lo = 1e300, hi = -1e300, sigma_min = 1e300;
  for (double theta : phases) {
    const auto [mu, sigma] = window_of(theta);
    lo = std::min(lo, mu - kWindowSigmas * sigma);
    hi = std::max(hi, mu + kWindowSigmas * sigma);
    sigma_min = std::min(sigma_min, sigma);
  }
  const double h = 2.0 * kWindowSigmas * sigma_min / kMinWindowNodes;
  const std::int64_t n_nodes = static_cast<std::int64_t>(std::floor((hi - lo) / h)) + 2;
  if (n_nodes > (1 << 22))
    throw std::invalid_argument("sample_quadratures: state too broad for tabulated sampling");

  // Tabulate the phase-independent diagonal sums
  //   B_d(x) = sum_m rho_{m,m+d} psi_m(x) psi_{m+d}(x)
  // so the pdf at any theta is B_0 + sum_d 2 Re(e^{i d theta} B_d).  Columns
  // whose magnitude never exceeds 1e-14 are dropped up front.
  RMatrix b_re(n_nodes, dim), b_im(n_nodes, dim);
  b_re.setZero();
  b_im.setZero();
  {
    std::vector<double> psi(dim);
    for (std::int64_t j = 0; j < n_nodes; ++j) {
      hermite_gauss_all(lo + j * h, psi.data(), dim);
      for (int d = 0; d < dim; ++d) {
        double acc_re = 0.0, acc_im = 0.0;
        for (int m = 0; m + d < dim; ++m) {
          const Complex rho_md = r(m, m + d);
          const double w = psi[m] * psi[m + d];
          acc_re += rho_md.real() * w;
          acc_im += rho_md.imag() * w;
        }
        b_re(j, d) = acc_re;
        b_im(j, d) = acc_im;
      }
    }
  }
  std::vector<int> kept;
  for (int d = 1; d < dim; ++d) {
    if (b_re.col(d).cwiseAbs().maxCoeff() > 1e-14 || b_im.col(d).cwiseAbs().maxCoeff() > 1e-14)
      kept.push_back(d);
  }

  const CounterRng rng(seed, 0);
  std::vector<double> pdf, cdf;
  records.resize(phases.size());
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double theta = phases[i];
    const auto [mu, sigma] = window_of(theta);
    const std::int64_t j0 =
        std::max<std::int64_t>(0, static_cast<std::int64_t>((mu - kWindowSigmas * sigma - lo) / h));
    const std::int64_t j1 = std::min<std::int64_t>(
        n_nodes - 1,
        static_cast<std::int64_t>((mu + kWindowSigmas * sigma - lo) / h) + 1);
    const std::int64_t len = j1 - j0 + 1;
    pdf.assign(len, 0.0);
    cdf.assign(len, 0.0);

    for (std::int64_t j = 0; j < len; ++j) pdf[j] = b_re(j0 + j, 0);
    const Complex rot = std::polar(1.0, theta);
    Complex phase = 1.0;
    std::size_t next = 0;
    for (int d = 1; d < dim && next < kept.size(); ++d) {
      phase *= rot;
      if (kept[next] != d) continue;
      ++next;
      const double c = 2.0 * phase.real(), s = 2.0 * phase.imag();
      const double* col_re = b_re.col(d).data() + j0;
      const double* col_im = b_im.col(d).data() + j0;
      for (std::int64_t j = 0; j < len; ++j) pdf[j] += c * col_re[j] - s * col_im[j];
    }
    for (std::int64_t j = 0; j < len; ++j) pdf[j] = std::max(pdf[j], 0.0);

    for (std::int64_t j = 1; j < len; ++j)
      cdf[j] = cdf[j - 1] + 0.5 * (pdf[j - 1] + pdf[j]) * h;
    const double total = cdf[len - 1];
    double y = mu;
    if (total > 0.0) {
      const double target = rng.uniform(i) * total;
      const auto it = std::upper_bound(cdf.begin(), cdf.end() - 1, target);
      const std::int64_t s_idx = std::max<std::int64_t>(0, (it - cdf.begin()) - 1);
      // Invert the trapezoid CDF exactly: within a segment it is quadratic in
      // the fractional offset t.
      const double p0 = pdf[s_idx], p1 = pdf[s_idx + 1];
      const double rem = target - cdf[s_idx];
      double t;
      if (std::abs(p1 - p0) < 1e-14 * (p0 + p1 + 1e-300)) {
        t = p0 > 0.0 ? rem / (p0 * h) : 0.0;
      } else {
        const double disc = p0 * p0 + 2.0 * (p1 - p0) * rem / h;
        t = (std::sqrt(std::max(disc, 0.0)) - p0) / (p1 - p0);
      }
      y = lo + (j0 + s_idx) * h + h * std::clamp(t, 0.0, 1.0);
    }
    records[i] = {theta, y};
  }
  return records;
}

TracePair synth_trace(const std::vector<QuadratureRecord>& records, const PulseShape& pulse,
                      double noise_floor, double sample_period, std::uint64_t seed) {
  if (records.empty()) throw std::invalid_argument("synth_trace: no records");
  if (!(pulse.width > 0.0)) throw std::invalid_argument("synth_trace: pulse width must be positive");
  if (!(pulse.period >= 6.0 * pulse.width))
    throw std::invalid_argument("synth_trace: period must be at least 6 pulse widths");
  if (!(sample_period > 0.0) || sample_period > pulse.width / 8.0)
    throw std::invalid_argument("synth_trace: need at least 8 samples per pulse width");
  if (noise_floor < 0.0) throw std::invalid_argument("synth_trace: negative noise floor");

  const std::int64_t per_period = std::llround(pulse.period / sample_period);
  const std::int64_t total = per_period * static_cast<std::int64_t>(records.size());

  TracePair out;
  for (RawTrace* trace : {&out.signal, &out.blocked}) {
    trace->sample_period = sample_period;
    trace->pulse_period = pulse.period;
    trace->samples.resize(total);
  }
  out.signal.role = TraceRole::Signal;
  out.blocked.role = TraceRole::Blocked;

  const CounterRng noise_signal(seed, 1);
  const CounterRng vacuum(seed, 2);
  const CounterRng noise_blocked(seed, 3);
  const double inv_2w2 = 1.0 / (2.0 * pulse.width * pulse.width);

  // Blocked-channel vacuum draws, rescaled so the batch's raw second moment is
  // exactly 1/2.  The calibration constant recovered downstream then equals the
  // synthesis proportionality constant and normalization is a clean identity.
  std::vector<double> y_blocked(records.size());
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    y_blocked[i] = vacuum.gaussian(i);
    sum_sq += y_blocked[i] * y_blocked[i];
  }
  if (sum_sq > 0.0) {
    const double scale = std::sqrt(static_cast<double>(records.size()) / (2.0 * sum_sq));
    for (double& v : y_blocked) v *= scale;
  }

  for (std::size_t i = 0; i < records.size(); ++i) {
    const double center = (i + 0.5) * pulse.period;
    const std::int64_t begin = per_period * static_cast<std::int64_t>(i);
    for (std::int64_t j = begin; j < begin + per_period; ++j) {
      const double t = j * sample_period;
      const double g = pulse.amplitude_per_unit_y * std::exp(-(t - center) * (t - center) * inv_2w2);
      out.signal.samples[j] = records[i].y * g + noise_floor * noise_signal.gaussian(j);
      out.blocked.samples[j] = y_blocked[i] * g + noise_floor * noise_blocked.gaussian(j);
    }
  }
  return out;
}

}  // namespace qhot
