#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "qhot/ingest.hpp"
#include "qhot/simulate.hpp"
#include "qhot/states.hpp"

using namespace qhot;
using testutil::kPi;

namespace {

RawTrace zero_trace(std::size_t n, double sample_period, double pulse_period) {
  RawTrace t;
  t.sample_period = sample_period;
  t.pulse_period = pulse_period;
  t.role = TraceRole::Signal;
  t.samples.assign(n, 0.0);
  return t;
}

}  // namespace

TEST_CASE("integrate_pulses returns one zero per complete period of a zero trace") {
  const RawTrace t = zero_trace(600, 0.1, 24.0);  // 2.5 periods
  const std::vector<double> v = integrate_pulses(t);
  REQUIRE(v.size() == 2);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == 0.0);
}

TEST_CASE("integrate_pulses recovers the analytic pulse area") {
  const std::vector<QuadratureRecord> recs = {{0.0, 1.0}};
  const PulseShape pulse{1.0, 2.0, 24.0};
  const TracePair pair = synth_trace(recs, pulse, 0.0, 0.1, 1);
  const double area = pulse.amplitude_per_unit_y * pulse.width * std::sqrt(2.0 * kPi);

  const std::vector<double> full =
      integrate_pulses(pair.signal, IntegrationWindow{0.0, 24.0});
  REQUIRE(full.size() == 1);
  CHECK(std::abs(full[0] - area) < 1e-9 * area);

  // The automatic window must find the pulse and lose only Gaussian tails.
  const std::vector<double> auto_win = integrate_pulses(pair.signal);
  REQUIRE(auto_win.size() == 1);
  CHECK(std::abs(auto_win[0] - area) < 1e-9 * area);
}

TEST_CASE("integrate_pulses is linear and proportional to the source quadratures") {
  const DensityMatrix rho = state_to_density(CoherentSpec{Complex(1.5, 0.0)}, 24);
  const auto recs = sample_quadratures(rho, LinearRamp{0.0, 2.0 * kPi, 1000}, 8);
  const PulseShape pulse{1.0, 1.3, 24.0};
  TracePair pair = synth_trace(recs, pulse, 0.0, 0.1, 8);
  const double area = pulse.amplitude_per_unit_y * pulse.width * std::sqrt(2.0 * kPi);

  const std::vector<double> v = integrate_pulses(pair.signal);
  REQUIRE(v.size() == recs.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(recs[i].y) < 1e-3) continue;
    CAPTURE(i);
    CHECK(std::abs(v[i] / recs[i].y - area) < 1e-6 * area);
  }

  RawTrace scaled = pair.signal;
  for (double& s : scaled.samples) s *= 3.7;
  const std::vector<double> vs = integrate_pulses(scaled);
  for (std::size_t i = 0; i < v.size(); ++i)
    CHECK(std::abs(vs[i] - 3.7 * v[i]) <= 1e-12 * std::max(1.0, std::abs(v[i])));
}

TEST_CASE("integrate_pulses median subtraction removes a DC offset") {
  // Alternating +-y pulses make the sample multiset symmetric about the DC
  // level, so the median equals the offset exactly.
  std::vector<QuadratureRecord> recs(40);
  for (int i = 0; i < 40; ++i) recs[i] = {0.0, i % 2 ? 1.3 : -1.3};
  const PulseShape pulse{1.0, 1.0, 24.0};
  TracePair pair = synth_trace(recs, pulse, 0.0, 0.1, 9);
  const std::vector<double> clean = integrate_pulses(pair.signal);

  RawTrace shifted = pair.signal;
  for (double& s : shifted.samples) s += 0.37;
  const std::vector<double> recovered = integrate_pulses(shifted, std::nullopt, true);
  REQUIRE(recovered.size() == clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    CAPTURE(i);
    CHECK(std::abs(recovered[i] - clean[i]) < 1e-9);
  }
}

TEST_CASE("integrate_pulses validates window and geometry") {
  const RawTrace t = zero_trace(480, 0.1, 24.0);
  CHECK_THROWS_AS(static_cast<void>(integrate_pulses(t, IntegrationWindow{-1.0, 5.0})),
                  WindowOutsidePeriod);
  CHECK_THROWS_AS(static_cast<void>(integrate_pulses(t, IntegrationWindow{0.0, 25.0})),
                  WindowOutsidePeriod);
  CHECK_THROWS_AS(static_cast<void>(integrate_pulses(t, IntegrationWindow{20.0, 5.0})),
                  WindowOutsidePeriod);
  CHECK_THROWS_AS(static_cast<void>(integrate_pulses(t, IntegrationWindow{5.0, 0.0})),
                  WindowOutsidePeriod);

  RawTrace empty = zero_trace(0, 0.1, 24.0);
  CHECK_THROWS_AS(static_cast<void>(integrate_pulses(empty)), EmptyInput);
  RawTrace shorter = zero_trace(100, 0.1, 24.0);  // less than one period
  CHECK_THROWS_AS(static_cast<void>(integrate_pulses(shorter)), EmptyInput);
  RawTrace coarse = zero_trace(100, 10.0, 24.0);  // < 4 samples per period
  CHECK_THROWS_AS(static_cast<void>(integrate_pulses(coarse)), std::invalid_argument);
}

TEST_CASE("vacuum_calibration uses the raw second moment") {
  const std::vector<double> alt = {1.0, -1.0, 1.0, -1.0};
  const CalibrationResult cal = vacuum_calibration(alt);
  CHECK(std::abs(cal.delta - std::sqrt(2.0)) < 1e-15);
  CHECK(cal.blocked_mean == 0.0);
  CHECK(cal.n_samples == 4);
  CHECK(cal.low_sample_warning);  // far fewer than 1000 pulses

  // Constant offset c gives sqrt(2) |c| -- no mean subtraction by design.
  const std::vector<double> flat(2000, -0.4);
  const CalibrationResult cal2 = vacuum_calibration(flat);
  CHECK(std::abs(cal2.delta - std::sqrt(2.0) * 0.4) < 1e-13);
  CHECK_FALSE(cal2.low_sample_warning);

  CHECK_THROWS_AS(static_cast<void>(vacuum_calibration(std::vector<double>{})), EmptyData);
  CHECK_THROWS_AS(static_cast<void>(vacuum_calibration(std::vector<double>(10, 0.0))), ZeroVariance);
}

TEST_CASE("normalize divides by delta and rejects nonpositive scales") {
  const std::vector<double> v = {2.0};
  CHECK(normalize(v, 2.0) == std::vector<double>{1.0});
  CHECK(normalize(v, 1.0) == v);

  // The chain is scale-free: rescaling the raw integrals and recalibrating
  // yields identical normalized data.
  std::vector<double> raw = {0.3, -1.2, 0.8, 2.1, -0.4};
  std::vector<double> scaled = raw;
  for (double& x : scaled) x *= 123.4;
  const auto y1 = normalize(raw, vacuum_calibration(raw).delta);
  const auto y2 = normalize(scaled, vacuum_calibration(scaled).delta);
  for (std::size_t i = 0; i < y1.size(); ++i)
    CHECK(std::abs(y1[i] - y2[i]) < 1e-12);

  CHECK_THROWS_AS(static_cast<void>(normalize(v, 0.0)), ZeroVariance);
  CHECK_THROWS_AS(static_cast<void>(normalize(v, -1.0)), ZeroVariance);
}

TEST_CASE("assign_phases ramps inclusively and make_records pairs up") {
  const std::vector<double> five = assign_phases(5, PhaseRamp{0.0, 2.0 * kPi});
  REQUIRE(five.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(std::abs(five[i] - i * kPi / 2.0) < 1e-15);
  CHECK(assign_phases(1, PhaseRamp{0.3, 9.9}) == std::vector<double>{0.3});

  const std::vector<double> values = {0.1, 0.2, 0.3, 0.4, 0.5};
  const auto recs = make_records(five, values);
  REQUIRE(recs.size() == 5);
  CHECK(recs[2].theta == five[2]);
  CHECK(recs[2].y == values[2]);
  CHECK_THROWS_AS(static_cast<void>(make_records(five, std::vector<double>{1.0})), DimensionMismatch);
}

TEST_CASE("full chain is an identity at zero noise") {
  const DensityMatrix rho = state_to_density(CoherentSpec{Complex(std::sqrt(5.0), 0.0)}, 40);
  const int n = 3000;
  const auto src = sample_quadratures(rho, LinearRamp{0.0, 2.0 * kPi, n}, 41);
  const PulseShape pulse{1.0, 1.0, 24.0};
  const TracePair pair = synth_trace(src, pulse, 0.0, 0.1, 41);

  const std::vector<double> v_sig = integrate_pulses(pair.signal);
  const std::vector<double> v_blk = integrate_pulses(pair.blocked);
  const CalibrationResult cal = vacuum_calibration(v_blk);
  CHECK_FALSE(cal.low_sample_warning);
  const std::vector<double> y = normalize(v_sig, cal.delta);
  const auto recs = make_records(assign_phases(n, PhaseRamp{0.0, 2.0 * kPi}), y);

  double rms = 0.0;
  for (int i = 0; i < n; ++i) {
    CHECK(recs[i].theta == src[i].theta);  // same inclusive ramp on both sides
    rms += (recs[i].y - src[i].y) * (recs[i].y - src[i].y);
  }
  rms = std::sqrt(rms / n);
  CHECK(rms < 1e-6);

  const std::vector<double> y0 = normalize(v_blk, cal.delta);
  CHECK(std::abs(testutil::variance_of(y0) - 0.5) < 0.02);
}

TEST_CASE("full chain degrades gracefully at finite noise") {
  const DensityMatrix rho = state_to_density(CoherentSpec{Complex(std::sqrt(5.0), 0.0)}, 40);
  const int n = 3000;
  const auto src = sample_quadratures(rho, LinearRamp{0.0, 2.0 * kPi, n}, 43);
  // Peak-amplitude signal-to-noise of ~100: rms quadrature is sqrt(1/2 + nbar).
  const double noise = std::sqrt(0.5 + 5.0) / 100.0;
  const PulseShape pulse{1.0, 1.0, 24.0};
  const TracePair pair = synth_trace(src, pulse, noise, 0.1, 43);

  const std::vector<double> v_blk = integrate_pulses(pair.blocked);
  const CalibrationResult cal = vacuum_calibration(v_blk);
  const std::vector<double> y = normalize(integrate_pulses(pair.signal), cal.delta);

  double rms = 0.0;
  for (int i = 0; i < n; ++i) rms += (y[i] - src[i].y) * (y[i] - src[i].y);
  rms = std::sqrt(rms / n);
  CHECK(rms < 0.02);

  const std::vector<double> y0 = normalize(v_blk, cal.delta);
  CHECK(std::abs(testutil::variance_of(y0) - 0.5) < 0.02);
}
