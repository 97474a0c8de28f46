#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "qhot/states.hpp"

namespace qhot {

// One measurement: local-oscillator phase and normalized quadrature value
// (vacuum variance 1/2 convention).
struct QuadratureRecord {
  double theta;
  double y;
};

// Phase schedule for a pulse train: either a linear ramp sampled inclusively
// at both ends (n = 1 yields {start}) or an explicit list.
struct LinearRamp {
  double start = 0.0;
  double end = 0.0;
  int n = 0;
};
struct ExplicitPhases {
  std::vector<double> phases;
};
using PhaseSchedule = std::variant<LinearRamp, ExplicitPhases>;

std::vector<double> schedule_phases(const PhaseSchedule& schedule);

// Draws one quadrature sample per scheduled phase from pr(y|theta) of rho,
// optionally through a loss channel of the given efficiency (applied to rho
// before sampling).  Inverse-CDF on a tabulated pdf: the pdf is tabulated on
// a lattice fine enough that every record's window [mu-8sigma, mu+8sigma]
// contains at least 4096 nodes, and inversion is exact for the resulting
// piecewise-linear density.  Identical inputs and seed give identical output.
std::vector<QuadratureRecord> sample_quadratures(const DensityMatrix& rho,
                                                 const PhaseSchedule& schedule,
                                                 std::uint64_t seed,
                                                 double efficiency = 1.0);

// Photon-loss channel with transmission eta in [0, 1]:
//   rho'_{ab} = sum_j sqrt(binom(a+j,j) binom(b+j,j)) eta^{(a+b)/2} (1-eta)^j rho_{a+j,b+j}.
// eta = 1 returns rho unchanged.
DensityMatrix apply_loss(const DensityMatrix& rho, double eta);

// ---------------------------------------------------------------------------
// Synthetic detector traces

enum class TraceRole { Signal, Blocked };

// Uniformly sampled detector output: one Gaussian pulse per period, pulse
// area proportional to the quadrature value.
struct RawTrace {
  double sample_period = 0.0;
  double pulse_period = 0.0;
  TraceRole role = TraceRole::Signal;
  std::vector<double> samples;
};

struct PulseShape {
  double width = 1.0;              // Gaussian sigma of the envelope
  double amplitude_per_unit_y = 1.0;
  double period = 10.0;            // pulse repetition period
};

struct TracePair {
  RawTrace signal;
  RawTrace blocked;
};

// Renders the records as a signal trace (pulse area = amplitude_per_unit_y *
// sqrt(2 pi) * width per unit y) plus a paired local-oscillator-only trace
// whose pulse values are vacuum draws, both with additive Gaussian noise of
// rms noise_floor per sample.  Requires width < period/6 and sample_period
// small enough for at least 8 samples per width.
TracePair synth_trace(const std::vector<QuadratureRecord>& records, const PulseShape& pulse,
                      double noise_floor, double sample_period, std::uint64_t seed);

}  // namespace qhot
