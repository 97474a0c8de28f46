#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qhot/fock.hpp"

namespace qhot {

// Requested Fock cutoff leaves more than the allowed trailing probability.
struct TruncationTooSmall : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Distribution has no usable photon content (e.g. <n> = 0 in a g2 ratio).
struct DegenerateDistribution : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kTruncationLeakTol = 1e-6;  // allowed trailing mass
inline constexpr double kClampThreshold = 1e-9;     // negative-prob clamp limit

// ---------------------------------------------------------------------------
// State specifications

struct CoherentSpec {
  Complex alpha;
};
struct FockSpec {
  int k = 0;
};
struct DisplacedFockSpec {
  Complex alpha;
  int k = 0;
};
struct ThermalSpec {
  double nbar = 0.0;
};

using StateSpec = std::variant<CoherentSpec, FockSpec, DisplacedFockSpec, ThermalSpec>;

// Text grammar used by the command line:
//   coherent:RE[+IMi]   e.g.  coherent:2.236  |  coherent:2.15+2.1i
//   fock:K              e.g.  fock:1
//   dfs:RE[+IMi],K      e.g.  dfs:2.15+2.1i,1
//   thermal:NBAR        e.g.  thermal:0.5
// parse throws std::invalid_argument on malformed text; format(parse(s))
// round-trips the value (not necessarily the spelling).
StateSpec parse_state_spec(std::string_view text);
std::string format_state_spec(const StateSpec& spec);

// ---------------------------------------------------------------------------
// Result containers

// Photon-number probabilities p_0..p_{dim-1}.  Entries are >= 0 and sum to at
// most 1 + 1e-9 (truncated states sum to slightly less than one).  Negative
// round-off up to kClampThreshold is clamped to zero at the source, with the
// clamped weight recorded.
struct PhotonDistribution {
  std::vector<double> probs;
  double clamped_weight = 0.0;  // total magnitude clamped away
  int clamp_count = 0;
};

// Wigner function sampled on a rectangular grid; values(i, j) = W(x_i, y_j)
// in the convention integrating to one over the phase plane (d^2beta), with
// minimum possible value -2/pi.
struct WignerGrid {
  std::vector<double> x_axis;
  std::vector<double> y_axis;
  RMatrix values;
};

// ---------------------------------------------------------------------------
// Reference distributions and Wigner forms

// Poisson photon distribution of a coherent state with mean nbar.
double poisson_pn(double nbar, int n);

// Photon distribution of the displaced Fock state D(alpha)|k>: depends on
// alpha only through u = |alpha|^2.  Evaluated by the finite interference sum
//   p_n = e^{-u} u^{n-k} (k!/n!) [ sum_{i=0}^{min(k,n)} binom(n,i) (-u)^{k-i}
//                                  sqrt-free combinatorial weight ]^2
// carried in log space (log-sum-exp over signed terms) so large u and n stay
// finite.  Equals |<n|D(alpha)|k>|^2, which the tests verify independently.
double dfs_pn(double alpha_sq, int k, int n);
double dfs_pn(Complex alpha, int k, int n);

// Closed-form Wigner function of D(alpha)|k>:
//   W(beta) = (2/pi) (-1)^k exp(-2|beta-alpha|^2) L_k(4|beta-alpha|^2).
double dfs_wigner(Complex alpha, int k, Complex beta);

// ---------------------------------------------------------------------------
// Constructors and derived quantities

// Builds the density matrix of the given state at Fock cutoff dim.  Throws
// TruncationTooSmall if the trailing probability beyond the cutoff exceeds
// kTruncationLeakTol.
DensityMatrix state_to_density(const StateSpec& spec, int dim);

// Pure-state amplitudes for the pure members of StateSpec (coherent, Fock,
// displaced Fock); throws std::invalid_argument for thermal.
FockVector state_to_fock(const StateSpec& spec, int dim);

// Diagonal of rho as a photon distribution (with negative-round-off clamping).
PhotonDistribution photon_distribution(const DensityMatrix& rho);

// Wigner function of rho evaluated on the tensor grid x_axis x y_axis via the
// displaced-parity kernel in the number basis.  Axes must be finite and
// strictly ascending.
WignerGrid wigner_from_density(const DensityMatrix& rho, std::vector<double> x_axis,
                               std::vector<double> y_axis);

// Single-point Wigner evaluation (the kernel behind wigner_from_density).
double wigner_point(const DensityMatrix& rho, Complex beta);

// Quadrature pdf pr(x|theta) = u^dag rho u with u_n = psi_n(x) e^{i n theta};
// real and nonnegative for a valid rho (tiny negative round-off clamped).
double quadrature_pdf(const DensityMatrix& rho, double theta, double x);

// Second-order coherence at zero delay from a photon distribution.
//   g2_zero:       (<n^2> - <n>) / <n>^2   (standard normally-ordered form)
//   g2_as_printed: (<n^2> - <n>^2) / <n>^2 (variance-over-mean-squared form)
// Moments are normalized by the distribution's own total mass so a uniform
// truncation deficit cancels.  Throws DegenerateDistribution when <n> < 1e-9.
double g2_zero(const PhotonDistribution& pn);
double g2_as_printed(const PhotonDistribution& pn);

// Mean photon number, normalized by total mass like the g2 moments.
double mean_photon_number(const PhotonDistribution& pn);

}  // namespace qhot
