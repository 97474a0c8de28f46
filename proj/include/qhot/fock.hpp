#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace qhot {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Polynomial/wavefunction order outside the supported range.
struct OrderOutOfRange : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Two objects that must share a Fock-space dimension do not.
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kMaxOrder = 512;          // max n for hermite_gauss / laguerre
inline constexpr double kHermitianTol = 1e-10; // |M - M^dag| allowed on input
inline constexpr double kTraceTol = 1e-9;      // |tr - 1| allowed
inline constexpr double kEigenvalueTol = 1e-9; // most negative eigenvalue allowed

// Harmonic-oscillator position eigenfunction psi_n(x) with unit-free
// normalization \int psi_n psi_m dx = delta_nm and vacuum variance 1/2:
//   psi_n(x) = (2^n n! sqrt(pi))^{-1/2} H_n(x) exp(-x^2/2).
// Evaluated through the normalized three-term recurrence
//   psi_{n+1} = x sqrt(2/(n+1)) psi_n - sqrt(n/(n+1)) psi_{n-1}
// with the exponential factor carried in log space and periodic rescaling, so
// large |x| and large n neither overflow nor underflow prematurely.
double hermite_gauss(int n, double x);

// Fills out[0..len-1] with psi_0(x) .. psi_{len-1}(x) in one recurrence pass.
void hermite_gauss_all(double x, double* out, int len);

// Laguerre polynomial L_k(x) by the stable three-term recurrence.
double laguerre(int k, double x);

// Associated Laguerre L_k^{(a)}(x), a >= 0 integer-or-real, same recurrence.
double assoc_laguerre(int k, double a, double x);

// Normalized pure state in the number basis.
class FockVector {
 public:
  // Normalizes the given amplitudes; throws std::invalid_argument on an empty
  // or zero vector.
  explicit FockVector(CVector amplitudes);

  int dim() const { return static_cast<int>(amps_.size()); }
  const CVector& amps() const { return amps_; }
  Complex amp(int n) const { return amps_(n); }

 private:
  CVector amps_;
};

// Density matrix in the truncated number basis.  Construction validates the
// physicality contract: Hermitian within kHermitianTol (then symmetrized
// exactly), trace within kTraceTol of one, and no eigenvalue below
// -kEigenvalueTol.  Violations throw std::invalid_argument with a message
// naming the broken property.
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(const CMatrix& m);
  static DensityMatrix pure(const FockVector& v);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& elems() const { return m_; }
  Complex elem(int a, int b) const { return m_(a, b); }

  // Smallest eigenvalue, computed once during validation.
  double min_eigenvalue() const { return min_eig_; }

 private:
  DensityMatrix(CMatrix m, double min_eig) : m_(std::move(m)), min_eig_(min_eig) {}
  CMatrix m_;
  double min_eig_;
};

// Matrix elements <m|D(alpha)|n> of the displacement operator
// D(alpha) = exp(alpha a^dag - alpha^* a) on the truncated basis, via the
// associated-Laguerre closed form with log-factorial prefactors.  Rows/cols
// near the truncation edge are only accurate while |alpha|^2 is comfortably
// below dim; callers pick dim accordingly.
CMatrix displacement_matrix(Complex alpha, int dim);

// Truncated annihilation operator: a|n> = sqrt(n)|n-1>.
CMatrix annihilation_matrix(int dim);

}  // namespace qhot
