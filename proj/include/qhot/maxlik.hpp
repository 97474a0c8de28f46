#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qhot/simulate.hpp"

namespace qhot {

// A data bin with nonzero count was assigned (numerically) zero probability.
struct ZeroProbabilityBin : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ReconstructionConfig {
  int dim = 40;
  int n_theta = 24;        // phase bins over [0, 2pi)
  int n_x = 128;           // quadrature bins over [-x_range, x_range]
  double x_range = 8.0;
  int max_iters = 2000;
  double ll_tol = 1e-9;    // stop when per-sample log-likelihood gain < this
  // Average the POVM phase factor analytically across each phase bin
  // (element (m,n) picks up sinc((m-n) * dtheta / 2)).  Keeps the binned
  // forward model exact for phases uniform within a bin; disabling falls back
  // to bin-center phases.
  bool phase_averaged_bins = true;
  bool track_min_eigenvalue = true;
};

// Histogram of quadrature records on the (theta, x) grid.  counts is row-major
// [theta][x].  Records with |y| > x_range are excluded but counted.
struct BinnedData {
  int n_theta = 0;
  int n_x = 0;
  double x_range = 0.0;
  std::vector<double> counts;
  std::uint64_t total_count = 0;     // in-range records
  std::uint64_t overflow_count = 0;  // dropped |y| > x_range records

  double theta_width() const;
  double x_width() const;
  double theta_center(int j) const;
  double x_center(int b) const;
  double count(int j, int b) const { return counts[static_cast<std::size_t>(j) * n_x + b]; }
};

BinnedData bin_quadratures(std::span<const QuadratureRecord> records,
                           const ReconstructionConfig& config);

// Projective POVM element for quadrature bin [x_lo, x_hi] at phase theta:
//   Pi_mn = e^{i (m-n) theta} \int_{x_lo}^{x_hi} psi_m psi_n dx.
// The integral is Gauss-Legendre with node doubling (8 -> 256) until the
// elementwise change is below 1e-10.
CMatrix povm_element(double theta, double x_lo, double x_hi, int dim);

// Total log-likelihood  sum_b count_b ln p_b  with p_b = Tr(rho Pi_b) / n_theta
// (each phase bin carries measure 1/n_theta for a uniform schedule, so the p_b
// over the full partition sum to ~1).  phase_averaged selects the same POVM
// convention as the reconstruction.
double log_likelihood(const DensityMatrix& rho, const BinnedData& data,
                      bool phase_averaged = true);

struct ReconstructionReport {
  int iterations = 0;              // R rho R updates applied
  double ll_per_sample = 0.0;      // log-likelihood of the returned rho / N
  bool converged = false;          // stopped on ll_tol (vs hitting max_iters)
  std::string stop_reason;         // "ll_tol" or "max_iters"
  std::vector<double> ll_trace;    // per-sample log-likelihood per iteration
  std::vector<double> min_eigenvalue_trace;  // if tracked
  std::vector<double> trace_trace;           // trace of iterate after each update
  std::uint64_t total_count = 0;
  std::uint64_t overflow_count = 0;
};

struct ReconstructionResult {
  DensityMatrix rho;
  ReconstructionReport report;
};

// Iterative maximum-likelihood reconstruction (expectation-maximization style
// R rho R fixed point): starting from the maximally mixed state,
//   R(rho) = sum_b (count_b / p_b) Pi_b,   rho <- normalize(R rho R),
// with Hermitian symmetrization every step.  Monotone in log-likelihood and
// positive by construction.  Throws ZeroProbabilityBin if a bin with data
// ever receives zero probability, and EmptyData when the histogram is empty.
ReconstructionResult maxlik_reconstruct(const BinnedData& data,
                                        const ReconstructionConfig& config);

}  // namespace qhot
