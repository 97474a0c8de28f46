#include "qhot/ingest.hpp"

#include <algorithm>
#include <cmath>

namespace qhot {

namespace {

// Trapezoid sum of v[lo..hi] inclusive, spacing h.
double trapezoid(const std::vector<double>& v, std::int64_t lo, std::int64_t hi, double h) {
  double acc = 0.5 * (v[lo] + v[hi]);
  for (std::int64_t j = lo + 1; j < hi; ++j) acc += v[j];
  return acc * h;
}

}  // namespace

std::vector<double> integrate_pulses(const RawTrace& trace,
                                     std::optional<IntegrationWindow> window,
                                     bool subtract_median) {
  if (trace.samples.empty()) throw EmptyInput("integrate_pulses: empty trace");
  if (!(trace.sample_period > 0.0) || !(trace.pulse_period > 0.0))
    throw std::invalid_argument("integrate_pulses: nonpositive period");
  const double h = trace.sample_period;
  const std::int64_t per_period = std::llround(trace.pulse_period / h);
  if (per_period < 4) throw std::invalid_argument("integrate_pulses: fewer than 4 samples per period");
  const std::int64_t n_periods = static_cast<std::int64_t>(trace.samples.size()) / per_period;
  if (n_periods == 0) throw EmptyInput("integrate_pulses: trace shorter than one pulse period");

  std::vector<double> v = trace.samples;
  if (subtract_median) {
    std::vector<double> sorted = v;
    const std::size_t mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
    double median = sorted[mid];
    if (sorted.size() % 2 == 0) {
      // lower-half max completes the even-size median
      const double lower = *std::max_element(sorted.begin(), sorted.begin() + mid);
      median = 0.5 * (median + lower);
    }
    for (double& s : v) s -= median;
  }

  // Window in sample indices [w_lo, w_hi] within each period.
  std::int64_t w_lo, w_hi;
  if (window) {
    if (window->offset < 0.0 || window->length <= 0.0 ||
        window->offset + window->length > trace.pulse_period * (1.0 + 1e-9))
      throw WindowOutsidePeriod("integrate_pulses: window outside pulse period");
    w_lo = std::llround(window->offset / h);
    w_hi = std::min<std::int64_t>(per_period - 1, std::llround((window->offset + window->length) / h));
    if (w_hi <= w_lo) throw WindowOutsidePeriod("integrate_pulses: window narrower than sampling");
  } else {
    // Automatic placement: fold |v| across periods, then put a window of 0.8
    // periods where its integral of the folded profile is largest.
    std::vector<double> folded(per_period, 0.0);
    for (std::int64_t p = 0; p < n_periods; ++p)
      for (std::int64_t k = 0; k < per_period; ++k)
        folded[k] += std::abs(v[p * per_period + k]);
    const std::int64_t w_len = std::max<std::int64_t>(2, std::llround(0.8 * per_period));
    std::int64_t best = 0;
    double best_val = -1.0;
    for (std::int64_t k = 0; k + w_len <= per_period; ++k) {
      const double val = trapezoid(folded, k, k + w_len - 1, h);
      if (val > best_val) {
        best_val = val;
        best = k;
      }
    }
    w_lo = best;
    w_hi = best + w_len - 1;
  }

  std::vector<double> integrals(n_periods);
  for (std::int64_t p = 0; p < n_periods; ++p)
    integrals[p] = trapezoid(v, p * per_period + w_lo, p * per_period + w_hi, h);
  return integrals;
}

CalibrationResult vacuum_calibration(std::span<const double> blocked_integrals) {
  if (blocked_integrals.empty()) throw EmptyData("vacuum_calibration: no blocked pulses");
  double sum = 0.0, sum_sq = 0.0;
  for (double v : blocked_integrals) {
    sum += v;
    sum_sq += v * v;
  }
  const double second_moment = sum_sq / blocked_integrals.size();
  if (!(second_moment > 0.0))
    throw ZeroVariance("vacuum_calibration: blocked pulses carry no signal");
  CalibrationResult cal;
  // Raw second moment, no mean subtraction: the blocked pulses are zero-mean
  // by construction and sqrt(2 <V^2>) is exactly the scale that maps vacuum
  // to variance 1/2.
  cal.delta = std::sqrt(2.0 * second_moment);
  cal.n_samples = blocked_integrals.size();
  cal.blocked_mean = sum / blocked_integrals.size();
  cal.low_sample_warning = blocked_integrals.size() < 1000;
  return cal;
}

std::vector<double> normalize(std::span<const double> integrals, double delta) {
  if (!(delta > 0.0)) throw ZeroVariance("normalize: nonpositive calibration scale");
  std::vector<double> out(integrals.size());
  for (std::size_t i = 0; i < integrals.size(); ++i) out[i] = integrals[i] / delta;
  return out;
}

std::vector<double> assign_phases(std::size_t n_pulses, const PhaseRamp& ramp) {
  std::vector<double> phases(n_pulses);
  if (n_pulses == 1) {
    phases[0] = ramp.start;
  } else if (n_pulses > 1) {
    const double step = (ramp.end - ramp.start) / static_cast<double>(n_pulses - 1);
    for (std::size_t i = 0; i < n_pulses; ++i) phases[i] = ramp.start + i * step;
  }
  return phases;
}

std::vector<QuadratureRecord> make_records(std::span<const double> phases,
                                           std::span<const double> values) {
  if (phases.size() != values.size())
    throw DimensionMismatch("make_records: phase and value counts differ");
  std::vector<QuadratureRecord> records(phases.size());
  for (std::size_t i = 0; i < phases.size(); ++i) records[i] = {phases[i], values[i]};
  return records;
}

}  // namespace qhot
