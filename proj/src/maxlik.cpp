#include "qhot/maxlik.hpp"

#include <algorithm>
#include <cmath>

#include "qhot/gauss_legendre.hpp"
#include "qhot/ingest.hpp"

namespace qhot {

namespace {

constexpr double kTwoPi = 6.2831853071795864769;
constexpr double kOverlapTol = 1e-10;  // adaptive bin-integral convergence
constexpr double kMinProb = 1e-300;    // below this a populated bin is "zero"

void check_config(const ReconstructionConfig& c) {
  if (c.dim < 2 || c.dim > kMaxOrder)
    throw std::invalid_argument("reconstruction: dim out of range");
  if (c.n_theta < 1 || c.n_x < 2 || !(c.x_range > 0.0))
    throw std::invalid_argument("reconstruction: bad binning geometry");
  if (c.max_iters < 0 || !(c.ll_tol >= 0.0))
    throw std::invalid_argument("reconstruction: bad stopping parameters");
}

// \int_{x_lo}^{x_hi} psi_m psi_n dx for all m, n < dim: Gauss-Legendre with
// node doubling until the matrix stops changing.
RMatrix bin_overlap(double x_lo, double x_hi, int dim) {
  const double mid = 0.5 * (x_lo + x_hi);
  const double half = 0.5 * (x_hi - x_lo);
  RMatrix prev;
  std::vector<double> psi(dim);
  for (int order = 8; order <= 256; order *= 2) {
    const GaussLegendreRule& rule = gauss_legendre(order);
    RMatrix m = RMatrix::Zero(dim, dim);
    for (int i = 0; i < order; ++i) {
      hermite_gauss_all(mid + half * rule.nodes[i], psi.data(), dim);
      const double w = half * rule.weights[i];
      for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) m(a, b) += w * psi[a] * psi[b];
    }
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < a; ++b) m(a, b) = m(b, a);
    if (prev.size() > 0 && (m - prev).cwiseAbs().maxCoeff() < kOverlapTol) return m;
    prev = std::move(m);
  }
  return prev;
}

// Shared forward-model tables for one binning geometry.
struct ForwardModel {
  int dim = 0;
  int n_theta = 0;
  int n_x = 0;
  RMatrix istack;              // n_x rows, dim^2 cols: row b = vec(I_b)
  RMatrix sinc;                // phase-average factors (all ones if disabled)
  std::vector<CVector> phases; // phases[j](n) = e^{i n theta_j}
};

ForwardModel build_model(const BinnedData& data, int dim, bool phase_averaged) {
  ForwardModel fm;
  fm.dim = dim;
  fm.n_theta = data.n_theta;
  fm.n_x = data.n_x;
  fm.istack.resize(data.n_x, dim * dim);
  const double xw = data.x_width();
  for (int b = 0; b < data.n_x; ++b) {
    const double lo = -data.x_range + b * xw;
    const RMatrix ib = bin_overlap(lo, lo + xw, dim);
    fm.istack.row(b) = Eigen::Map<const RVector>(ib.data(), dim * dim);
  }
  fm.sinc = RMatrix::Ones(dim, dim);
  if (phase_averaged) {
    const double half_dtheta = 0.5 * data.theta_width();
    for (int m = 0; m < dim; ++m)
      for (int n = 0; n < dim; ++n) {
        const double z = (m - n) * half_dtheta;
        fm.sinc(m, n) = std::abs(z) < 1e-12 ? 1.0 : std::sin(z) / z;
      }
  }
  fm.phases.resize(data.n_theta);
  for (int j = 0; j < data.n_theta; ++j) {
    fm.phases[j].resize(dim);
    const Complex rot = std::polar(1.0, data.theta_center(j));
    Complex p = 1.0;
    for (int n = 0; n < dim; ++n, p *= rot) fm.phases[j](n) = p;
  }
  return fm;
}

// Bin probabilities for one phase row: p_b = Tr(rho Pi(theta_j, b)) / n_theta.
// The trace reduces to a real contraction of vec(M_j) with the bin integrals,
// where M_j(m,n) = Re(rho_mn e^{i(n-m)theta_j}) * sinc_mn.
void phase_row_probs(const ForwardModel& fm, const CMatrix& rho, int j, RMatrix& m_scratch,
                     RVector& out) {
  const CVector& z = fm.phases[j];
  for (int mm = 0; mm < fm.dim; ++mm)
    for (int nn = 0; nn < fm.dim; ++nn) {
      const Complex v = rho(mm, nn) * z(nn) * std::conj(z(mm));
      m_scratch(mm, nn) = v.real() * fm.sinc(mm, nn);
    }
  out.noalias() =
      fm.istack * Eigen::Map<const RVector>(m_scratch.data(), fm.dim * fm.dim) / fm.n_theta;
}

double model_log_likelihood(const ForwardModel& fm, const BinnedData& data, const CMatrix& rho,
                            RMatrix& m_scratch, RVector& pr_scratch,
                            RMatrix* weights /* n_x x n_theta, may be null */) {
  double ll = 0.0;
  for (int j = 0; j < fm.n_theta; ++j) {
    phase_row_probs(fm, rho, j, m_scratch, pr_scratch);
    for (int b = 0; b < fm.n_x; ++b) {
      const double count = data.count(j, b);
      if (count <= 0.0) {
        if (weights) (*weights)(b, j) = 0.0;
        continue;
      }
      const double p = pr_scratch(b);
      if (!(p > kMinProb))
        throw ZeroProbabilityBin("bin at theta = " + std::to_string(data.theta_center(j)) +
                                 ", x = " + std::to_string(data.x_center(b)) +
                                 " has data but zero probability");
      ll += count * std::log(p);
      if (weights) (*weights)(b, j) = count / (p * fm.n_theta);
    }
  }
  return ll;
}

}  // namespace

double BinnedData::theta_width() const { return kTwoPi / n_theta; }
double BinnedData::x_width() const { return 2.0 * x_range / n_x; }
double BinnedData::theta_center(int j) const { return (j + 0.5) * theta_width(); }
double BinnedData::x_center(int b) const { return -x_range + (b + 0.5) * x_width(); }

BinnedData bin_quadratures(std::span<const QuadratureRecord> records,
                           const ReconstructionConfig& config) {
  check_config(config);
  BinnedData data;
  data.n_theta = config.n_theta;
  data.n_x = config.n_x;
  data.x_range = config.x_range;
  data.counts.assign(static_cast<std::size_t>(config.n_theta) * config.n_x, 0.0);
  const double tw = data.theta_width();
  const double xw = data.x_width();
  for (const QuadratureRecord& rec : records) {
    if (std::abs(rec.y) > config.x_range) {
      ++data.overflow_count;
      continue;
    }
    double t = std::fmod(rec.theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    const int j = std::min(static_cast<int>(t / tw), config.n_theta - 1);
    const int b = std::min(static_cast<int>((rec.y + config.x_range) / xw), config.n_x - 1);
    data.counts[static_cast<std::size_t>(j) * config.n_x + b] += 1.0;
    ++data.total_count;
  }
  return data;
}

CMatrix povm_element(double theta, double x_lo, double x_hi, int dim) {
  if (!(x_hi > x_lo)) throw std::invalid_argument("povm_element: empty bin");
  if (dim < 1 || dim > kMaxOrder) throw std::invalid_argument("povm_element: dim out of range");
  const RMatrix ib = bin_overlap(x_lo, x_hi, dim);
  CMatrix pi(dim, dim);
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) pi(m, n) = std::polar(ib(m, n), (m - n) * theta);
  return pi;
}

double log_likelihood(const DensityMatrix& rho, const BinnedData& data, bool phase_averaged) {
  if (data.total_count == 0) throw EmptyData("log_likelihood: empty histogram");
  const ForwardModel fm = build_model(data, rho.dim(), phase_averaged);
  RMatrix m_scratch(rho.dim(), rho.dim());
  RVector pr_scratch(data.n_x);
  return model_log_likelihood(fm, data, rho.elems(), m_scratch, pr_scratch, nullptr);
}

ReconstructionResult maxlik_reconstruct(const BinnedData& data,
                                        const ReconstructionConfig& config) {
  check_config(config);
  if (data.total_count == 0) throw EmptyData("maxlik_reconstruct: empty histogram");
  if (data.n_theta != config.n_theta || data.n_x != config.n_x ||
      data.x_range != config.x_range)
    throw DimensionMismatch("maxlik_reconstruct: histogram geometry does not match config");

  const int dim = config.dim;
  const double n_samples = static_cast<double>(data.total_count);
  const ForwardModel fm = build_model(data, dim, config.phase_averaged_bins);

  CMatrix rho = CMatrix::Identity(dim, dim) / dim;
  RMatrix m_scratch(dim, dim);
  RVector pr_scratch(data.n_x);
  RMatrix weights(data.n_x, data.n_theta);
  RVector s_vec(dim * dim);
  CMatrix r_op(dim, dim);

  ReconstructionReport report;
  report.total_count = data.total_count;
  report.overflow_count = data.overflow_count;

  int iter = 0;
  for (;; ++iter) {
    const double ll =
        model_log_likelihood(fm, data, rho, m_scratch, pr_scratch, &weights) / n_samples;
    report.ll_trace.push_back(ll);
    if (iter > 0 && ll - report.ll_trace[iter - 1] < config.ll_tol) {
      report.converged = true;
      report.stop_reason = "ll_tol";
      break;
    }
    if (iter == config.max_iters) {
      report.stop_reason = "max_iters";
      break;
    }

    // R = sum_{j,b} (count/(p n_theta)) Pi_jb, assembled per phase row from
    // S_j = sum_b w_jb I_b and the phase rank-one structure, then the
    // phase-average factors applied once at the end.
    r_op.setZero();
    for (int j = 0; j < fm.n_theta; ++j) {
      s_vec.noalias() = fm.istack.transpose() * weights.col(j);
      const Eigen::Map<const RMatrix> s_mat(s_vec.data(), dim, dim);
      const CVector& z = fm.phases[j];
      for (int m = 0; m < dim; ++m)
        for (int n = 0; n < dim; ++n)
          r_op(m, n) += z(m) * std::conj(z(n)) * s_mat(m, n);
    }
    r_op.array() *= fm.sinc.array();

    CMatrix next = r_op * rho * r_op;
    next = 0.5 * (next + next.adjoint().eval());
    const double tr = next.trace().real();
    if (!(tr > 0.0)) throw ZeroProbabilityBin("maxlik_reconstruct: update lost all probability");
    rho = next / tr;
    report.trace_trace.push_back(rho.trace().real());

    if (config.track_min_eigenvalue) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
      report.min_eigenvalue_trace.push_back(es.eigenvalues().minCoeff());
    }
  }

  report.iterations = iter;
  report.ll_per_sample = report.ll_trace.back();
  return ReconstructionResult{DensityMatrix::from_matrix(rho), std::move(report)};
}

}  // namespace qhot
