#pragma once

#include <string>
#include <vector>

#include "qhot/ingest.hpp"  // EmptyData
#include "qhot/states.hpp"

namespace qhot {

// Uhlmann fidelity F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2,
// the squared-overlap convention: for pure sigma = |psi><psi| this reduces to
// <psi|rho|psi>.  Symmetric in its arguments; clamped to [0, 1] against
// round-off.  The matrix square roots limit the achievable accuracy to about
// sqrt(machine epsilon) (~1e-8) when either state is nearly singular.
// Throws DimensionMismatch on unequal dimensions.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

struct PoissonDeviation {
  double nbar_hat = 0.0;     // mean of the input distribution
  double tv_distance = 0.0;  // total variation to Poisson(nbar_hat)
};

// Total variation distance between pn and the Poisson law with the same mean.
// The Poisson tail beyond the truncated support counts toward the distance.
PoissonDeviation poisson_deviation(const PhotonDistribution& pn);

struct FitResult {
  enum class Model { Coherent, DisplacedFock };
  Model model = Model::Coherent;   // Coherent when k = 0
  int k = 0;
  double alpha_sq = 0.0;           // fitted |alpha|^2 (= nbar for k = 0)
  double residual = 0.0;           // sum of squared probability residuals
  std::vector<double> fitted;      // model p_n over the input support
};

// Fits a displaced-Fock photon distribution to pn: for each k in 0..k_max,
// minimizes sum_n (pn_n - dfs_pn(u, k, n))^2 over u = |alpha|^2 by
// golden-section search on [max(0, nbar-k-3 sqrt(nbar)), nbar+3 sqrt(nbar)]
// to tolerance 1e-8 in u; ties in residual within 1e-12 break toward smaller
// k.  k = 0 is the coherent (Poisson) model.
FitResult fit_dfs(const PhotonDistribution& pn, int k_max);

struct NegativityReport {
  double min_value = 0.0;
  double min_x = 0.0;
  double min_y = 0.0;
  double negative_volume = 0.0;  // integral of |W| over W < 0 cells
};

// Scans a Wigner grid for its minimum and integrates the negative part with
// trapezoid cell weights.  Throws EmptyData on an empty grid.
NegativityReport wigner_negativity(const WignerGrid& grid);

}  // namespace qhot
