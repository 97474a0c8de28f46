#pragma once

// Shared numeric helpers for the test binaries: frozen reference constants,
// independent quadrature, and statistical gates.  Everything here is
// deliberately written from first principles (no calls into the library's
// integration or special-function code) so it can serve as a cross-check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace testutil {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoOverPi = 0.63661977236758134308;
inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kPiQuarterInv = 0.75112554446494248286;  // pi^{-1/4}
inline constexpr double kOneMinusInvE = 0.63212055882855767840;  // 1 - 1/e

// chi-square 0.999 quantile via the Wilson-Hilferty cube approximation.
// Within ~0.2% of the exact quantile for dof >= 30 (dof 36: 68.08 vs 67.985
// exact; dof 191: 257.17 vs 257.135 exact), which is ample for a gate that a
// correct sampler fails with probability 1e-3.
inline double chi2_quantile_999(int dof) {
  const double z = 3.0902323061678136;  // Phi^{-1}(0.999)
  const double a = 2.0 / (9.0 * dof);
  const double c = 1.0 - a + z * std::sqrt(a);
  return dof * c * c * c;
}

// Composite Simpson rule on [a, b] with n nodes (n odd, uniform grid).
template <typename F>
double simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / (n - 1);
  double acc = f(a) + f(b);
  for (int i = 1; i < n - 1; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// Trace distance (1/2)||A - B||_1 for Hermitian matrices.
inline double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a - b, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// Reference Poisson pmf, written directly (not via the library).
inline double poisson_ref(double nbar, int n) {
  if (nbar == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-nbar + n * std::log(nbar) - std::lgamma(n + 1.0));
}

// Sample mean and (population) variance.
inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

}  // namespace testutil
