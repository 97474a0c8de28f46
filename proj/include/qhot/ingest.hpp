#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qhot/simulate.hpp"

namespace qhot {

struct EmptyInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct EmptyData : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ZeroVariance : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct WindowOutsidePeriod : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Integration window within each pulse period, in trace time units.
struct IntegrationWindow {
  double offset = 0.0;
  double length = 0.0;
};

// Trapezoid-integrates each pulse period over the window.  Without an
// explicit window, the window is chosen automatically: length 0.8 * period,
// centered where the period-folded average |v| has maximal windowed integral.
// subtract_median removes the trace-wide median sample value first (DC
// offset).  Returns one integral per complete period.
std::vector<double> integrate_pulses(const RawTrace& trace,
                                     std::optional<IntegrationWindow> window = std::nullopt,
                                     bool subtract_median = false);

struct CalibrationResult {
  double delta = 0.0;        // vacuum scale: sqrt(2 <V^2>) of blocked integrals
  std::size_t n_samples = 0;
  double blocked_mean = 0.0; // diagnostic; should be ~0
  bool low_sample_warning = false;  // fewer than 1000 blocked pulses
};

// Vacuum calibration from blocked-signal pulse integrals.  delta is the raw
// second moment sqrt(2 * mean(V^2)) (no mean subtraction), chosen so that
// normalized vacuum data has variance exactly 1/2.  Throws EmptyData on no
// input and ZeroVariance when the second moment vanishes.
CalibrationResult vacuum_calibration(std::span<const double> blocked_integrals);

// Y_i = V_i / delta.
std::vector<double> normalize(std::span<const double> integrals, double delta);

// Inclusive linear phase ramp over n pulses: n = 1 yields {start}; n > 1
// spaces phases evenly including both endpoints.
struct PhaseRamp {
  double start = 0.0;
  double end = 0.0;
};
std::vector<double> assign_phases(std::size_t n_pulses, const PhaseRamp& ramp);

// Pairs phases with normalized values; sizes must match.
std::vector<QuadratureRecord> make_records(std::span<const double> phases,
                                           std::span<const double> values);

}  // namespace qhot
