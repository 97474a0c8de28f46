#include "qhot/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "qhot/ingest.hpp"

namespace qhot {

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim())
    throw DimensionMismatch("fidelity: dimension mismatch");
  // (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 via two Hermitian eigensolves;
  // eigenvalues clamped at zero against round-off.
  Eigen::SelfAdjointEigenSolver<CMatrix> es_rho(rho.elems());
  RVector d = es_rho.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const CMatrix sqrt_rho =
      es_rho.eigenvectors() * d.asDiagonal() * es_rho.eigenvectors().adjoint();
  const CMatrix inner = sqrt_rho * sigma.elems() * sqrt_rho;
  Eigen::SelfAdjointEigenSolver<CMatrix> es_inner(0.5 * (inner + inner.adjoint().eval()));
  const double root_sum = es_inner.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

PoissonDeviation poisson_deviation(const PhotonDistribution& pn) {
  PoissonDeviation dev;
  dev.nbar_hat = mean_photon_number(pn);
  double acc = 0.0, q_mass = 0.0;
  for (std::size_t n = 0; n < pn.probs.size(); ++n) {
    const double q = poisson_pn(dev.nbar_hat, static_cast<int>(n));
    acc += std::abs(pn.probs[n] - q);
    q_mass += q;
  }
  // The reference Poisson mass beyond the truncated support counts in full.
  acc += std::max(0.0, 1.0 - q_mass);
  dev.tv_distance = 0.5 * acc;
  return dev;
}

namespace {

double dfs_residual(const PhotonDistribution& pn, double u, int k) {
  double acc = 0.0;
  for (std::size_t n = 0; n < pn.probs.size(); ++n) {
    const double d = pn.probs[n] - dfs_pn(u, k, static_cast<int>(n));
    acc += d * d;
  }
  return acc;
}

// Golden-section minimum of the residual over u in [lo, hi], to 1e-8 in u.
double golden_min(const PhotonDistribution& pn, int k, double lo, double hi) {
  constexpr double inv_phi = 0.61803398874989484820;
  if (hi - lo < 1e-10) return 0.5 * (lo + hi);
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = dfs_residual(pn, c, k);
  double fd = dfs_residual(pn, d, k);
  while (b - a > 1e-8) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = dfs_residual(pn, c, k);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = dfs_residual(pn, d, k);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

FitResult fit_dfs(const PhotonDistribution& pn, int k_max) {
  if (k_max < 0) throw std::invalid_argument("fit_dfs: negative k_max");
  const double nbar = mean_photon_number(pn);
  const double spread = 3.0 * std::sqrt(std::max(nbar, 0.0));

  FitResult best;
  bool have_best = false;
  for (int k = 0; k <= k_max; ++k) {
    const double lo = std::max(0.0, nbar - k - spread);
    const double hi = std::max(lo, nbar + spread);
    const double u = golden_min(pn, k, lo, hi);
    const double res = dfs_residual(pn, u, k);
    // Strict improvement beyond 1e-12 required, so ties resolve to smaller k.
    if (!have_best || res < best.residual - 1e-12) {
      best.k = k;
      best.alpha_sq = u;
      best.residual = res;
      have_best = true;
    }
  }
  best.model = best.k == 0 ? FitResult::Model::Coherent : FitResult::Model::DisplacedFock;
  best.fitted.resize(pn.probs.size());
  for (std::size_t n = 0; n < pn.probs.size(); ++n)
    best.fitted[n] = dfs_pn(best.alpha_sq, best.k, static_cast<int>(n));
  return best;
}

NegativityReport wigner_negativity(const WignerGrid& grid) {
  const std::size_t nx = grid.x_axis.size(), ny = grid.y_axis.size();
  if (nx == 0 || ny == 0 || grid.values.size() == 0)
    throw EmptyData("wigner_negativity: empty grid");

  auto axis_weight = [](const std::vector<double>& axis, std::size_t i) {
    if (axis.size() < 2) return 0.0;
    if (i == 0) return 0.5 * (axis[1] - axis[0]);
    if (i + 1 == axis.size()) return 0.5 * (axis[i] - axis[i - 1]);
    return 0.5 * (axis[i + 1] - axis[i - 1]);
  };

  NegativityReport rep;
  rep.min_value = grid.values(0, 0);
  rep.min_x = grid.x_axis[0];
  rep.min_y = grid.y_axis[0];
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const double w = grid.values(i, j);
      if (w < rep.min_value) {
        rep.min_value = w;
        rep.min_x = grid.x_axis[i];
        rep.min_y = grid.y_axis[j];
      }
      if (w < 0.0) rep.negative_volume += -w * axis_weight(grid.x_axis, i) * axis_weight(grid.y_axis, j);
    }
  }
  return rep;
}

}  // namespace qhot
