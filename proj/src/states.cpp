#include "qhot/states.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace qhot {

namespace {

constexpr double kTwoOverPi = 0.63661977236758134308;

double parse_double(std::string_view text, const char* what) {
  std::string buf(text);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty())
    throw std::invalid_argument(std::string(what) + ": cannot parse number '" + buf + "'");
  return v;
}

// "RE", "RE+IMi", "RE-IMi", "IMi", "i", "-i" -> complex value.
Complex parse_complex(std::string_view text, const char* what) {
  if (text.empty()) throw std::invalid_argument(std::string(what) + ": empty amplitude");
  if (text.back() != 'i') return Complex(parse_double(text, what), 0.0);
  std::string_view body = text.substr(0, text.size() - 1);
  // Split at the last '+'/'-' that is not a leading sign or an exponent sign.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string_view::npos) {
    // Purely imaginary: "2.1i", "i", "-i".
    if (body.empty()) return Complex(0.0, 1.0);
    if (body == "-") return Complex(0.0, -1.0);
    if (body == "+") return Complex(0.0, 1.0);
    return Complex(0.0, parse_double(body, what));
  }
  const double re = parse_double(body.substr(0, split), what);
  std::string_view im_part = body.substr(split);
  double im;
  if (im_part == "+")
    im = 1.0;
  else if (im_part == "-")
    im = -1.0;
  else
    im = parse_double(im_part, what);
  return Complex(re, im);
}

int parse_int(std::string_view text, const char* what) {
  std::string buf(text);
  char* end = nullptr;
  const long v = std::strtol(buf.c_str(), &end, 10);
  if (end != buf.c_str() + buf.size() || buf.empty())
    throw std::invalid_argument(std::string(what) + ": cannot parse integer '" + buf + "'");
  if (v < 0 || v > kMaxOrder)
    throw std::invalid_argument(std::string(what) + ": index out of range");
  return static_cast<int>(v);
}

std::string format_double_17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_complex(Complex z) {
  std::string s = format_double_17(z.real());
  if (z.imag() != 0.0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%+.17g", z.imag());
    s += buf;
    s += 'i';
  }
  return s;
}

std::vector<double> log_factorials(int up_to) {
  std::vector<double> lg(up_to + 1);
  for (int i = 0; i <= up_to; ++i) lg[i] = std::lgamma(static_cast<double>(i) + 1.0);
  return lg;
}

}  // namespace

StateSpec parse_state_spec(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("state spec: expected 'kind:args' in '" + std::string(text) + "'");
  const std::string_view kind = text.substr(0, colon);
  const std::string_view args = text.substr(colon + 1);
  if (kind == "coherent") return CoherentSpec{parse_complex(args, "coherent amplitude")};
  if (kind == "fock") return FockSpec{parse_int(args, "fock index")};
  if (kind == "thermal") {
    const double nbar = parse_double(args, "thermal occupation");
    if (nbar < 0.0 || !std::isfinite(nbar))
      throw std::invalid_argument("thermal occupation: must be finite and nonnegative");
    return ThermalSpec{nbar};
  }
  if (kind == "dfs") {
    const auto comma = args.rfind(',');
    if (comma == std::string_view::npos)
      throw std::invalid_argument("dfs spec: expected 'dfs:amplitude,k'");
    return DisplacedFockSpec{parse_complex(args.substr(0, comma), "dfs amplitude"),
                             parse_int(args.substr(comma + 1), "dfs index")};
  }
  throw std::invalid_argument("state spec: unknown kind '" + std::string(kind) + "'");
}

std::string format_state_spec(const StateSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CoherentSpec>)
          return "coherent:" + format_complex(s.alpha);
        else if constexpr (std::is_same_v<T, FockSpec>)
          return "fock:" + std::to_string(s.k);
        else if constexpr (std::is_same_v<T, DisplacedFockSpec>)
          return "dfs:" + format_complex(s.alpha) + "," + std::to_string(s.k);
        else
          return "thermal:" + format_double_17(s.nbar);
      },
      spec);
}

double poisson_pn(double nbar, int n) {
  if (n < 0) throw std::invalid_argument("poisson_pn: negative n");
  if (!(nbar >= 0.0) || !std::isfinite(nbar))
    throw std::invalid_argument("poisson_pn: nbar must be finite and nonnegative");
  if (nbar == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-nbar + n * std::log(nbar) - std::lgamma(static_cast<double>(n) + 1.0));
}

double dfs_pn(double alpha_sq, int k, int n) {
  if (n < 0) throw std::invalid_argument("dfs_pn: negative n");
  if (k < 0 || k > kMaxOrder) throw OrderOutOfRange("dfs_pn: k out of range");
  if (!(alpha_sq >= 0.0) || !std::isfinite(alpha_sq))
    throw std::invalid_argument("dfs_pn: |alpha|^2 must be finite and nonnegative");
  const double u = alpha_sq;
  if (u == 0.0) return n == k ? 1.0 : 0.0;

  // Interference sum over m (terms with m > n vanish through the 1/(n-m)!
  // factor, so the sum is bounded by min(k, n)).  Signed terms are combined
  // in log space relative to the largest to keep big u and n finite.
  const int m_max = std::min(k, n);
  const double log_u = std::log(u);
  const double lg_n = std::lgamma(n + 1.0);
  const double lg_k = std::lgamma(k + 1.0);
  double peak = -1e300;
  std::vector<double> term_log(m_max + 1);
  for (int m = 0; m <= m_max; ++m) {
    term_log[m] = lg_n + lg_k + (k - m) * log_u - std::lgamma(m + 1.0) -
                  std::lgamma(k - m + 1.0) - std::lgamma(n - m + 1.0);
    peak = std::max(peak, term_log[m]);
  }
  double acc = 0.0;
  for (int m = 0; m <= m_max; ++m) {
    const double t = std::exp(term_log[m] - peak);
    acc += (m % 2 == 0) ? t : -t;
  }
  if (acc == 0.0) return 0.0;
  const double log_p = -u + (n - k) * log_u - lg_n - lg_k + 2.0 * (peak + std::log(std::abs(acc)));
  return std::exp(log_p);
}

double dfs_pn(Complex alpha, int k, int n) { return dfs_pn(std::norm(alpha), k, n); }

double dfs_wigner(Complex alpha, int k, Complex beta) {
  if (k < 0 || k > kMaxOrder) throw OrderOutOfRange("dfs_wigner: k out of range");
  const double t = 4.0 * std::norm(beta - alpha);
  // Fold exp(-t/2) into the Laguerre recurrence: the recurrence is linear, so
  // scaling the initial values scales every term, and the product never
  // overflows even where L_k(t) alone would.
  double p_prev = std::exp(-0.5 * t);
  if (k == 0) return kTwoOverPi * p_prev;
  double p = (1.0 - t) * p_prev;
  for (int m = 1; m < k; ++m) {
    const double p_next = ((2 * m + 1 - t) * p - m * p_prev) / (m + 1);
    p_prev = p;
    p = p_next;
  }
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return kTwoOverPi * sign * p;
}

FockVector state_to_fock(const StateSpec& spec, int dim) {
  if (dim < 1 || dim > kMaxOrder) throw std::invalid_argument("state_to_fock: dim out of range");
  if (std::holds_alternative<ThermalSpec>(spec))
    throw std::invalid_argument("state_to_fock: thermal states are mixed");

  CVector c = CVector::Zero(dim);
  if (const auto* fock = std::get_if<FockSpec>(&spec)) {
    if (fock->k >= dim)
      throw TruncationTooSmall("fock state |" + std::to_string(fock->k) +
                               "> lies outside dimension " + std::to_string(dim));
    c(fock->k) = 1.0;
    return FockVector(std::move(c));
  }

  if (const auto* coh = std::get_if<CoherentSpec>(&spec)) {
    const Complex alpha = coh->alpha;
    const double u = std::norm(alpha);
    if (u == 0.0) {
      c(0) = 1.0;
      return FockVector(std::move(c));
    }
    const double log_abs = 0.5 * std::log(u);
    const double arg = std::arg(alpha);
    double mass = 0.0;
    for (int n = 0; n < dim; ++n) {
      const double log_mag = n * log_abs - 0.5 * u - 0.5 * std::lgamma(n + 1.0);
      c(n) = std::polar(std::exp(log_mag), n * arg);
      mass += std::norm(c(n));
    }
    if (1.0 - mass > kTruncationLeakTol)
      throw TruncationTooSmall("coherent state leaves " + std::to_string(1.0 - mass) +
                               " probability beyond dimension " + std::to_string(dim));
    return FockVector(std::move(c));
  }

  const auto& dfs = std::get<DisplacedFockSpec>(spec);
  if (dfs.k >= dim)
    throw TruncationTooSmall("displaced fock index " + std::to_string(dfs.k) +
                             " lies outside dimension " + std::to_string(dim));
  // Column k of the displacement matrix; each element is exact, truncation
  // only costs trailing mass.
  const CMatrix d = displacement_matrix(dfs.alpha, dim);
  c = d.col(dfs.k);
  const double mass = c.squaredNorm();
  if (1.0 - mass > kTruncationLeakTol)
    throw TruncationTooSmall("displaced fock state leaves " + std::to_string(1.0 - mass) +
                             " probability beyond dimension " + std::to_string(dim));
  return FockVector(std::move(c));
}

DensityMatrix state_to_density(const StateSpec& spec, int dim) {
  if (const auto* th = std::get_if<ThermalSpec>(&spec)) {
    if (dim < 1 || dim > kMaxOrder)
      throw std::invalid_argument("state_to_density: dim out of range");
    const double nbar = th->nbar;
    CMatrix m = CMatrix::Zero(dim, dim);
    if (nbar == 0.0) {
      m(0, 0) = 1.0;
      return DensityMatrix::from_matrix(m);
    }
    const double log_ratio = std::log(nbar / (1.0 + nbar));
    const double tail = std::exp(dim * log_ratio);  // (nbar/(1+nbar))^dim
    if (tail > kTruncationLeakTol)
      throw TruncationTooSmall("thermal state leaves " + std::to_string(tail) +
                               " probability beyond dimension " + std::to_string(dim));
    double mass = 0.0;
    for (int n = 0; n < dim; ++n) {
      const double p = std::exp(n * log_ratio) / (1.0 + nbar);
      m(n, n) = p;
      mass += p;
    }
    m /= mass;  // reabsorb the (tiny) truncated tail
    return DensityMatrix::from_matrix(m);
  }
  return DensityMatrix::pure(state_to_fock(spec, dim));
}

PhotonDistribution photon_distribution(const DensityMatrix& rho) {
  PhotonDistribution pn;
  pn.probs.resize(rho.dim());
  for (int n = 0; n < rho.dim(); ++n) {
    double p = rho.elem(n, n).real();
    if (p < 0.0) {
      if (p < -kClampThreshold)
        throw std::invalid_argument("photon_distribution: diagonal below clamp threshold");
      pn.clamped_weight += -p;
      pn.clamp_count += 1;
      p = 0.0;
    }
    pn.probs[n] = p;
  }
  return pn;
}

double wigner_point(const DensityMatrix& rho, Complex beta) {
  const auto lg = log_factorials(rho.dim());
  const int dim = rho.dim();
  const CMatrix& r = rho.elems();
  const double b2 = std::norm(beta);

  if (b2 == 0.0) {
    // Only the diagonal parity sum survives at the origin.
    double s = 0.0, sign = 1.0;
    for (int m = 0; m < dim; ++m, sign = -sign) s += sign * r(m, m).real();
    return kTwoOverPi * s;
  }

  // Displaced-parity kernel, diagonal-by-diagonal:
  //   W = (2/pi) sum_m (-1)^m [rho_mm B_m^(0)
  //                            + sum_{d>=1} 2 Re(rho_{m,m+d} e^{i d phi}) B_m^(d)]
  // with B_m^(d) = exp(d ln|2b| - 2|b|^2 + (lg m! - lg (m+d)!)/2) L_m^(d)(4|b|^2).
  // The B are bounded by one, and the three-term Laguerre recurrence maps onto
  // them with square-root ratio factors, so no term over- or underflows.
  const double u = 4.0 * b2;
  const double log_2b = 0.5 * std::log(u);
  const double phi = std::arg(beta);
  const Complex rot = std::polar(1.0, phi);
  Complex phase = 1.0;  // e^{i d phi}
  double w = 0.0;
  for (int d = 0; d < dim; ++d) {
    if (d > 0) phase *= rot;
    double b = std::exp(d * log_2b - 2.0 * b2 - 0.5 * lg[d]);  // B_0^(d)
    double b_prev = 0.0;
    double sign = 1.0;
    for (int m = 0; m + d < dim; ++m, sign = -sign) {
      if (d == 0) {
        w += sign * r(m, m).real() * b;
      } else {
        const Complex rho_md = r(m, m + d);
        w += sign * 2.0 * (rho_md.real() * phase.real() - rho_md.imag() * phase.imag()) * b;
      }
      const double r1 = std::sqrt((m + 1.0) / (m + 1.0 + d));
      const double r2 =
          (m > 0) ? std::sqrt(m * (m + 1.0) / ((m + static_cast<double>(d)) * (m + 1.0 + d)))
                  : 0.0;
      const double b_next =
          ((2.0 * m + d + 1.0 - u) * r1 * b - (m + static_cast<double>(d)) * r2 * b_prev) /
          (m + 1.0);
      b_prev = b;
      b = b_next;
    }
  }
  return kTwoOverPi * w;
}

WignerGrid wigner_from_density(const DensityMatrix& rho, std::vector<double> x_axis,
                               std::vector<double> y_axis) {
  auto check_axis = [](const std::vector<double>& axis, const char* name) {
    if (axis.empty()) throw std::invalid_argument(std::string("wigner grid: empty ") + name);
    for (std::size_t i = 0; i < axis.size(); ++i) {
      if (!std::isfinite(axis[i]))
        throw std::invalid_argument(std::string("wigner grid: non-finite ") + name);
      if (i > 0 && !(axis[i] > axis[i - 1]))
        throw std::invalid_argument(std::string("wigner grid: ") + name +
                                    " not strictly ascending");
    }
  };
  check_axis(x_axis, "x axis");
  check_axis(y_axis, "y axis");

  WignerGrid grid;
  grid.values.resize(x_axis.size(), y_axis.size());
  for (std::size_t i = 0; i < x_axis.size(); ++i)
    for (std::size_t j = 0; j < y_axis.size(); ++j)
      grid.values(i, j) = wigner_point(rho, Complex(x_axis[i], y_axis[j]));
  grid.x_axis = std::move(x_axis);
  grid.y_axis = std::move(y_axis);
  return grid;
}

double quadrature_pdf(const DensityMatrix& rho, double theta, double x) {
  const int dim = rho.dim();
  std::vector<double> psi(dim);
  hermite_gauss_all(x, psi.data(), dim);
  CVector z(dim);
  const Complex rot = std::polar(1.0, theta);
  Complex phase = 1.0;
  for (int n = 0; n < dim; ++n, phase *= rot) z(n) = psi[n] * phase;
  const double p = z.dot(rho.elems() * z).real();
  return p < 0.0 ? 0.0 : p;  // clamp numerical round-off
}

namespace {

struct Moments {
  double total, n1, n2;
};

Moments normalized_moments(const PhotonDistribution& pn) {
  double total = 0.0, n1 = 0.0, n2 = 0.0;
  for (std::size_t n = 0; n < pn.probs.size(); ++n) {
    total += pn.probs[n];
    n1 += static_cast<double>(n) * pn.probs[n];
    n2 += static_cast<double>(n) * static_cast<double>(n) * pn.probs[n];
  }
  if (!(total > 0.0))
    throw DegenerateDistribution("photon distribution: empty or zero total mass");
  return {total, n1 / total, n2 / total};
}

}  // namespace

double mean_photon_number(const PhotonDistribution& pn) { return normalized_moments(pn).n1; }

double g2_zero(const PhotonDistribution& pn) {
  const Moments m = normalized_moments(pn);
  if (m.n1 < 1e-9)
    throw DegenerateDistribution("g2: mean photon number vanishes");
  return (m.n2 - m.n1) / (m.n1 * m.n1);
}

double g2_as_printed(const PhotonDistribution& pn) {
  const Moments m = normalized_moments(pn);
  if (m.n1 < 1e-9)
    throw DegenerateDistribution("g2: mean photon number vanishes");
  return (m.n2 - m.n1 * m.n1) / (m.n1 * m.n1);
}

}  // namespace qhot
