#include "qhot/fock.hpp"

#include <cmath>
#include <vector>

namespace qhot {

namespace {

constexpr double kLogPi = 1.1447298858494001741;  // ln(pi)
// Rescaling threshold for the Hermite recurrence: binary powers keep the
// rescale itself exact.
constexpr double kRescaleAt = 0x1p500;
constexpr double kRescaleFactor = 0x1p-500;
constexpr double kRescaleLog = 500 * 0.69314718055994530942;

void check_order(int n, const char* what) {
  if (n < 0 || n > kMaxOrder) throw OrderOutOfRange(std::string(what) + ": order out of range");
}

}  // namespace

double hermite_gauss(int n, double x) {
  check_order(n, "hermite_gauss");
  // Recurrence on h_k = psi_k(x) / exp(log_norm + shift), starting from
  // h_0 = 1 with log_norm = -x^2/2 - ln(pi)/4.  The h_k grow roughly like
  // exp(x^2/2) at large |x|, hence the periodic rescale with shift tracking.
  const double log_norm = -0.5 * x * x - 0.25 * kLogPi;
  double shift = 0.0;
  double h_prev = 0.0;
  double h = 1.0;
  for (int k = 0; k < n; ++k) {
    const double h_next =
        x * std::sqrt(2.0 / (k + 1)) * h - std::sqrt(static_cast<double>(k) / (k + 1)) * h_prev;
    h_prev = h;
    h = h_next;
    if (std::abs(h) > kRescaleAt) {
      h *= kRescaleFactor;
      h_prev *= kRescaleFactor;
      shift += kRescaleLog;
    }
  }
  return h * std::exp(log_norm + shift);
}

void hermite_gauss_all(double x, double* out, int len) {
  check_order(len > 0 ? len - 1 : 0, "hermite_gauss_all");
  if (len <= 0) return;
  const double log_norm = -0.5 * x * x - 0.25 * kLogPi;
  double shift = 0.0;
  double h_prev = 0.0;
  double h = 1.0;
  out[0] = std::exp(log_norm);
  for (int k = 0; k + 1 < len; ++k) {
    const double h_next =
        x * std::sqrt(2.0 / (k + 1)) * h - std::sqrt(static_cast<double>(k) / (k + 1)) * h_prev;
    h_prev = h;
    h = h_next;
    if (std::abs(h) > kRescaleAt) {
      h *= kRescaleFactor;
      h_prev *= kRescaleFactor;
      shift += kRescaleLog;
    }
    out[k + 1] = h * std::exp(log_norm + shift);
  }
}

double laguerre(int k, double x) {
  check_order(k, "laguerre");
  if (k == 0) return 1.0;
  double p_prev = 1.0;
  double p = 1.0 - x;
  for (int m = 1; m < k; ++m) {
    const double p_next = ((2 * m + 1 - x) * p - m * p_prev) / (m + 1);
    p_prev = p;
    p = p_next;
  }
  return p;
}

double assoc_laguerre(int k, double a, double x) {
  check_order(k, "assoc_laguerre");
  if (k == 0) return 1.0;
  double p_prev = 1.0;
  double p = 1.0 + a - x;
  for (int m = 1; m < k; ++m) {
    const double p_next = ((2 * m + 1 + a - x) * p - (m + a) * p_prev) / (m + 1);
    p_prev = p;
    p = p_next;
  }
  return p;
}

FockVector::FockVector(CVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw std::invalid_argument("FockVector: empty amplitude vector");
  const double norm = amps_.norm();
  if (!(norm > 1e-150)) throw std::invalid_argument("FockVector: zero-norm amplitude vector");
  amps_ /= norm;
}

DensityMatrix DensityMatrix::from_matrix(const CMatrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw std::invalid_argument("density matrix: not a nonempty square matrix");
  const double herm_err = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > kHermitianTol)
    throw std::invalid_argument("density matrix: hermiticity violated (max |M - M^dag| = " +
                                std::to_string(herm_err) + ")");
  CMatrix h = 0.5 * (m + m.adjoint().eval());
  const double tr = h.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol)
    throw std::invalid_argument("density matrix: trace-one violated (trace = " +
                                std::to_string(tr) + ")");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -kEigenvalueTol)
    throw std::invalid_argument("density matrix: positivity violated (min eigenvalue = " +
                                std::to_string(min_eig) + ")");
  return DensityMatrix(std::move(h), min_eig);
}

DensityMatrix DensityMatrix::pure(const FockVector& v) {
  CMatrix m = v.amps() * v.amps().adjoint();
  return DensityMatrix(std::move(m), 0.0);
}

CMatrix displacement_matrix(Complex alpha, int dim) {
  if (dim < 1 || dim > kMaxOrder)
    throw std::invalid_argument("displacement_matrix: dim out of range");
  if (alpha == Complex(0.0, 0.0)) return CMatrix::Identity(dim, dim);

  const double b2 = std::norm(alpha);
  const double log_abs = 0.5 * std::log(b2);
  const double arg = std::arg(alpha);
  std::vector<double> lg(dim + 1);
  for (int i = 0; i <= dim; ++i) lg[i] = std::lgamma(static_cast<double>(i) + 1.0);

  // <m|D(alpha)|n> for m >= n:  sqrt(n!/m!) alpha^{m-n} e^{-|a|^2/2} L_n^{(m-n)}(|a|^2)
  // and for m < n:              sqrt(m!/n!) (-conj(alpha))^{n-m} e^{-|a|^2/2} L_m^{(n-m)}(|a|^2).
  // Powers and factorial ratios combine in log space to dodge overflow.
  CMatrix d(dim, dim);
  for (int m = 0; m < dim; ++m) {
    for (int n = 0; n < dim; ++n) {
      if (m >= n) {
        const int diff = m - n;
        const double log_mag = 0.5 * (lg[n] - lg[m]) + diff * log_abs - 0.5 * b2;
        const double lag = assoc_laguerre(n, static_cast<double>(diff), b2);
        d(m, n) = std::polar(std::exp(log_mag), diff * arg) * lag;
      } else {
        const int diff = n - m;
        const double log_mag = 0.5 * (lg[m] - lg[n]) + diff * log_abs - 0.5 * b2;
        const double lag = assoc_laguerre(m, static_cast<double>(diff), b2);
        const double sign = (diff % 2 == 0) ? 1.0 : -1.0;
        d(m, n) = sign * std::polar(std::exp(log_mag), -diff * arg) * lag;
      }
    }
  }
  return d;
}

CMatrix annihilation_matrix(int dim) {
  if (dim < 1) throw std::invalid_argument("annihilation_matrix: dim out of range");
  CMatrix a = CMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

}  // namespace qhot
