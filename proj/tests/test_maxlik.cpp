#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "qhot/analysis.hpp"
#include "qhot/ingest.hpp"
#include "qhot/maxlik.hpp"
#include "qhot/simulate.hpp"
#include "qhot/states.hpp"

using namespace qhot;
using testutil::kPi;

TEST_CASE("bin_quadratures places records on the (theta, x) grid") {
  ReconstructionConfig config;
  config.n_theta = 12;
  config.n_x = 16;
  config.x_range = 8.0;

  std::vector<QuadratureRecord> recs;
  const double tw = 2.0 * kPi / 12.0, xw = 16.0 / 16.0;
  for (int j = 0; j < 12; ++j)
    for (int b = 0; b < 16; ++b)
      recs.push_back({(j + 0.5) * tw, -8.0 + (b + 0.5) * xw});
  const BinnedData data = bin_quadratures(recs, config);
  CHECK(data.n_theta == 12);
  CHECK(data.n_x == 16);
  CHECK(data.total_count == recs.size());
  CHECK(data.overflow_count == 0);
  for (int j = 0; j < 12; ++j)
    for (int b = 0; b < 16; ++b)
      CHECK(data.count(j, b) == 1.0);
  CHECK(std::abs(data.theta_width() - tw) < 1e-15);
  CHECK(std::abs(data.x_width() - xw) < 1e-15);
  CHECK(std::abs(data.theta_center(3) - 3.5 * tw) < 1e-14);
  CHECK(std::abs(data.x_center(0) - (-7.5)) < 1e-14);
}

TEST_CASE("bin_quadratures wraps phases and counts overflow") {
  ReconstructionConfig config;
  config.n_theta = 8;
  config.n_x = 4;
  config.x_range = 2.0;
  const std::vector<QuadratureRecord> recs = {
      {2.0 * kPi, 0.1},    // wraps to the first phase bin
      {-0.1, 0.1},         // wraps to the last phase bin
      {0.0, 2.5},          // overflow high
      {0.0, -2.5},         // overflow low
      {0.0, 2.0},          // exactly on the top edge: kept in the last bin
  };
  const BinnedData data = bin_quadratures(recs, config);
  CHECK(data.total_count == 3);
  CHECK(data.overflow_count == 2);
  CHECK(data.count(0, 2) == 1.0);
  CHECK(data.count(7, 2) == 1.0);
  CHECK(data.count(0, 3) == 1.0);
}

TEST_CASE("bin_quadratures is uniform for uniform input") {
  ReconstructionConfig config;
  config.n_theta = 12;
  config.n_x = 16;
  config.x_range = 8.0;
  std::mt19937 gen(12345);
  std::uniform_real_distribution<double> u_theta(0.0, 2.0 * kPi), u_x(-8.0, 8.0);
  std::vector<QuadratureRecord> recs(20000);
  for (auto& r : recs) r = {u_theta(gen), u_x(gen)};
  const BinnedData data = bin_quadratures(recs, config);
  const double expected = 20000.0 / (12 * 16);
  double chi2 = 0.0;
  for (int j = 0; j < 12; ++j)
    for (int b = 0; b < 16; ++b)
      chi2 += (data.count(j, b) - expected) * (data.count(j, b) - expected) / expected;
  CHECK(chi2 < testutil::chi2_quantile_999(12 * 16 - 1));
}

TEST_CASE("povm_element is Hermitian, positive, and locally the projector density") {
  const int dim = 12;
  const double theta = 0.9;
  const CMatrix narrow = povm_element(theta, 0.7, 0.7001, dim);
  CHECK((narrow - narrow.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(narrow, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
  for (int m = 0; m < dim; ++m) {
    for (int n = 0; n < dim; ++n) {
      const Complex want = std::polar(hermite_gauss(m, 0.70005) * hermite_gauss(n, 0.70005) * 1e-4,
                                      (m - n) * theta);
      CHECK(std::abs(narrow(m, n) - want) < 1e-12);
    }
  }
}

TEST_CASE("povm elements over a partition resolve the identity") {
  const int dim = 16;
  const int n_bins = 32;
  CMatrix total = CMatrix::Zero(dim, dim);
  for (int b = 0; b < n_bins; ++b) {
    const double lo = -8.0 + 16.0 * b / n_bins;
    const double hi = -8.0 + 16.0 * (b + 1) / n_bins;
    total += povm_element(1.3, lo, hi, dim);
  }
  CHECK((total - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("povm expectation equals the integrated quadrature pdf") {
  const DensityMatrix rho = state_to_density(DisplacedFockSpec{Complex(1.0, 0.5), 1}, 24);
  const double theta = 0.9, lo = 0.3, hi = 0.8;
  const CMatrix pi = povm_element(theta, lo, hi, 24);
  const double got = (rho.elems() * pi).trace().real();
  const double want = testutil::simpson(
      [&](double x) { return quadrature_pdf(rho, theta, x); }, lo, hi, 201);
  CHECK(std::abs(got - want) < 1e-9);
}

TEST_CASE("log_likelihood matches a hand-computed histogram") {
  // Vacuum state, a single phase bin, two quadrature bins: the probabilities
  // are Gaussian integrals of psi_0^2 over each half of the x range.
  ReconstructionConfig config;
  config.dim = 2;
  config.n_theta = 1;
  config.n_x = 2;
  config.x_range = 8.0;
  std::vector<QuadratureRecord> recs;
  for (int i = 0; i < 3; ++i) recs.push_back({0.1, -0.5});
  for (int i = 0; i < 5; ++i) recs.push_back({0.1, 0.5});
  const BinnedData data = bin_quadratures(recs, config);

  CMatrix vac = CMatrix::Zero(2, 2);
  vac(0, 0) = 1.0;
  const DensityMatrix rho = DensityMatrix::from_matrix(vac);
  const double p_lo = testutil::simpson(
      [](double x) { return hermite_gauss(0, x) * hermite_gauss(0, x); }, -8.0, 0.0, 2001);
  const double want = 3.0 * std::log(p_lo) + 5.0 * std::log(1.0 - p_lo);
  CHECK(std::abs(log_likelihood(rho, data, false) - want) < 1e-9);

  const BinnedData empty = bin_quadratures({}, config);
  CHECK_THROWS_AS(static_cast<void>(log_likelihood(rho, empty, false)), EmptyData);
}

TEST_CASE("maxlik_reconstruct recovers a displaced Fock state") {
  const StateSpec spec = DisplacedFockSpec{Complex(0.8, 0.5), 1};
  const DensityMatrix truth = state_to_density(spec, 12);
  const auto recs = sample_quadratures(truth, LinearRamp{0.0, 2.0 * kPi, 20000}, 314);

  ReconstructionConfig config;
  config.dim = 12;
  config.n_x = 96;
  config.x_range = 6.0;
  const BinnedData data = bin_quadratures(recs, config);
  const ReconstructionResult res = maxlik_reconstruct(data, config);

  CHECK(res.report.total_count == data.total_count);
  CHECK(res.report.iterations > 0);
  CHECK(res.report.ll_trace.size() > 1);
  if (res.report.converged) CHECK(res.report.stop_reason == "ll_tol");

  // Expectation-maximization guarantees: monotone likelihood, physical iterates.
  for (std::size_t i = 1; i < res.report.ll_trace.size(); ++i)
    CHECK(res.report.ll_trace[i] >= res.report.ll_trace[i - 1] - 1e-12);
  for (double t : res.report.trace_trace) CHECK(std::abs(t - 1.0) < 1e-9);
  for (double e : res.report.min_eigenvalue_trace) CHECK(e >= -1e-9);

  CHECK(fidelity(res.rho, truth) >= 0.98);
}

TEST_CASE("maxlik_reconstruct is covariant under a phase-bin rotation") {
  const DensityMatrix truth = state_to_density(CoherentSpec{Complex(1.0, 0.3)}, 10);
  const auto recs = sample_quadratures(truth, LinearRamp{0.0, 2.0 * kPi, 20000}, 271);
  ReconstructionConfig config;
  config.dim = 10;
  config.n_x = 64;
  config.x_range = 6.0;
  const BinnedData data = bin_quadratures(recs, config);

  // Shift the histogram by exactly one phase bin; the reconstruction must
  // follow by conjugation with the number-operator phase.
  BinnedData shifted = data;
  for (int j = 0; j < config.n_theta; ++j)
    for (int b = 0; b < config.n_x; ++b)
      shifted.counts[static_cast<std::size_t>((j + 1) % config.n_theta) * config.n_x + b] =
          data.count(j, b);

  const ReconstructionResult a = maxlik_reconstruct(data, config);
  const ReconstructionResult b = maxlik_reconstruct(shifted, config);
  const double dtheta = 2.0 * kPi / config.n_theta;
  CMatrix rotated(10, 10);
  for (int m = 0; m < 10; ++m)
    for (int n = 0; n < 10; ++n)
      rotated(m, n) = std::polar(1.0, (m - n) * dtheta) * a.rho.elem(m, n);
  CHECK((b.rho.elems() - rotated).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(std::abs(a.report.ll_per_sample - b.report.ll_per_sample) < 1e-10);
}

TEST_CASE("reconstruction error shrinks with more data") {
  struct Case {
    StateSpec spec;
    int dim;
  };
  const Case cases[] = {
      {CoherentSpec{Complex(1.2, 0.0)}, 16},
      {DisplacedFockSpec{Complex(1.0, 0.6), 1}, 16},
      {ThermalSpec{0.6}, 16},
  };
  ReconstructionConfig config;
  config.dim = 16;
  config.n_x = 96;
  config.x_range = 6.5;
  std::uint64_t seed = 6000;
  for (const Case& c : cases) {
    const DensityMatrix truth = state_to_density(c.spec, c.dim);
    const auto big = sample_quadratures(truth, LinearRamp{0.0, 2.0 * kPi, 200000}, seed++);
    const std::vector<QuadratureRecord> small(big.begin(), big.begin() + 20000);
    const ReconstructionResult r_small = maxlik_reconstruct(bin_quadratures(small, config), config);
    const ReconstructionResult r_big = maxlik_reconstruct(bin_quadratures(big, config), config);
    const double d_small = testutil::trace_distance(r_small.rho.elems(), truth.elems());
    const double d_big = testutil::trace_distance(r_big.rho.elems(), truth.elems());
    CAPTURE(format_state_spec(c.spec));
    CAPTURE(d_small);
    CAPTURE(d_big);
    CHECK(d_big < d_small);
  }
}

TEST_CASE("maxlik_reconstruct validates geometry and rejects empty data") {
  ReconstructionConfig config;
  config.dim = 8;
  const BinnedData empty = bin_quadratures({}, config);
  CHECK_THROWS_AS(static_cast<void>(maxlik_reconstruct(empty, config)), EmptyData);

  const std::vector<QuadratureRecord> recs = {{0.0, 0.5}};
  const BinnedData data = bin_quadratures(recs, config);
  ReconstructionConfig other = config;
  other.n_x = 64;
  CHECK_THROWS_AS(static_cast<void>(maxlik_reconstruct(data, other)), DimensionMismatch);

  ReconstructionConfig bad = config;
  bad.dim = 1;
  CHECK_THROWS_AS(static_cast<void>(bin_quadratures(recs, bad)), std::invalid_argument);
  bad = config;
  bad.x_range = -1.0;
  CHECK_THROWS_AS(static_cast<void>(bin_quadratures(recs, bad)), std::invalid_argument);
}

TEST_CASE("max_iters = 0 returns the maximally mixed starting point") {
  const std::vector<QuadratureRecord> recs = {{0.0, 0.5}, {1.0, -0.4}};
  ReconstructionConfig config;
  config.dim = 6;
  config.max_iters = 0;
  const BinnedData data = bin_quadratures(recs, config);
  const ReconstructionResult res = maxlik_reconstruct(data, config);
  CHECK(res.report.iterations == 0);
  CHECK(res.report.stop_reason == "max_iters");
  CHECK_FALSE(res.report.converged);
  CHECK((res.rho.elems() - CMatrix::Identity(6, 6) / 6.0).cwiseAbs().maxCoeff() < 1e-15);
}
