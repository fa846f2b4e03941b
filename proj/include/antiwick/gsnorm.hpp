#pragma once

// Numerical regularity classifiers for Gaussian sums: Gelfand-Shilov seminorm
// constants, the holomorphic-extension bound, the strip integral defining the
// intermediate space, the Gaussian derivative (Hermite) bound, and Gevrey order
// fits. Everything is an estimate over finite probe ranges; none of it proves
// membership.

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "antiwick/analytic.hpp"
#include "antiwick/core.hpp"

namespace aw {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct WeightParams {
  double lambda = 0.5;
  double mu = 0.5;
  double A = 1.0;

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("WeightParams: lambda must be positive");
    if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("WeightParams: mu must lie in (0, 1)");
    if (!(A > 0.0) || !std::isfinite(A)) throw std::invalid_argument("WeightParams: A must be positive and finite");
  }
};

/// phi(x) = (lambda / 2) sum_j |x_j / A|^{1/lambda}
inline double phi_weight(std::span<const double> x, const WeightParams& w) {
  w.validate();
  double s = 0.0;
  for (double xj : x) s += std::pow(std::abs(xj / w.A), 1.0 / w.lambda);
  return 0.5 * w.lambda * s;
}

/// psi(y) = 2 (1 - mu) sum_j |A y_j|^{1/(1 - mu)}
inline double psi_weight(std::span<const double> y, const WeightParams& w) {
  w.validate();
  double s = 0.0;
  for (double yj : y) s += std::pow(std::abs(w.A * yj), 1.0 / (1.0 - w.mu));
  return 2.0 * (1.0 - w.mu) * s;
}

inline double phi_weight(double x, const WeightParams& w) { return phi_weight(std::span<const double>(&x, 1), w); }
inline double psi_weight(double y, const WeightParams& w) { return psi_weight(std::span<const double>(&y, 1), w); }

namespace detail {

inline double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

// True when the a <= 0 part of f makes x^alpha f(x) unbounded on the real line.
inline bool axis_unbounded(const AxisFactor& f, int alpha) {
  std::vector<complex> poly;  // coefficients in z of the a == 0 part
  for (const auto& t : f.terms()) {
    if (t.a < 0.0) return true;
    if (t.a > 0.0) continue;
    if (poly.size() < static_cast<std::size_t>(t.p) + 1) poly.resize(static_cast<std::size_t>(t.p) + 1);
    // (z - b)^p = sum_k C(p, k) z^k (-b)^{p-k}
    double binom = 1.0;
    for (int k = 0; k <= t.p; ++k) {
      if (k > 0) binom = binom * (t.p - k + 1) / k;
      poly[static_cast<std::size_t>(k)] += t.c * binom * std::pow(-t.b, t.p - k);
    }
  }
  double scale = 0.0;
  for (const auto& c : poly) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return false;
  for (std::size_t k = 1; k < poly.size(); ++k)
    if (std::abs(poly[k]) > 1e-14 * scale) return true;
  return alpha > 0 && std::abs(poly[0]) > 0.0;
}

// Golden-section maximisation of a unimodal-near-the-bracket function.
template <typename Fn>
double golden_max(Fn&& fn, double lo, double hi, int iterations = 60) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = fn(c), fd = fn(d);
  double best = std::max({fn(lo), fn(hi), fc, fd});
  for (int i = 0; i < iterations; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = fn(d);
    }
    best = std::max({best, fc, fd});
  }
  return best;
}

// log sup_x |x|^alpha |f(x)| for alpha = 0..alpha_max, over a dense grid on a
// range that contains every stationary point of every term, refined by golden
// section around the best node. Beyond the range each term is monotonically
// decreasing, so its contribution is bounded by its value at the boundary; the
// range is widened until that bound sits far below the sup.
inline std::vector<double> axis_log_sups(const AxisFactor& f, int alpha_max) {
  std::vector<double> out(static_cast<std::size_t>(alpha_max) + 1, -kInf);
  if (f.empty()) return out;
  for (int al = 0; al <= alpha_max; ++al)
    if (axis_unbounded(f, al)) out[static_cast<std::size_t>(al)] = kInf;

  double reach = 0.0, step = kInf;
  bool decaying = false;
  for (const auto& t : f.terms()) {
    if (t.a <= 0.0) continue;
    decaying = true;
    const double stat = std::sqrt((alpha_max + t.p + 1.0) / (2.0 * t.a));
    reach = std::max(reach, std::abs(t.b) + stat + std::sqrt(50.0 / t.a));
    step = std::min(step, 0.125 / std::sqrt(t.a * (1.0 + alpha_max + t.p + f.max_power())));
  }
  if (!decaying) {
    // only a constant remains (bounded case)
    for (int al = 0; al <= alpha_max; ++al)
      if (out[static_cast<std::size_t>(al)] != kInf) out[static_cast<std::size_t>(al)] = f.log_abs(0.0);
    return out;
  }

  for (int attempt = 0; attempt < 6; ++attempt) {
    const int count = std::clamp(static_cast<int>(2.0 * reach / step) + 1, 2001, 400001);
    const double dx = 2.0 * reach / (count - 1);
    std::vector<double> lg(static_cast<std::size_t>(count)), lx(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const double x = -reach + i * dx;
      lg[static_cast<std::size_t>(i)] = f.log_abs(x);
      lx[static_cast<std::size_t>(i)] = std::log(std::abs(x));
    }
    bool tails_ok = true;
    for (int al = 0; al <= alpha_max; ++al) {
      if (out[static_cast<std::size_t>(al)] == kInf) continue;
      auto val = [&](int i) {
        const double l = lg[static_cast<std::size_t>(i)];
        if (l == -kInf) return -kInf;
        return al == 0 ? l : l + al * lx[static_cast<std::size_t>(i)];
      };
      int best = 0;
      for (int i = 1; i < count; ++i)
        if (val(i) > val(best)) best = i;
      double sup = val(best);
      if (sup == -kInf) {
        out[static_cast<std::size_t>(al)] = -kInf;
        continue;
      }
      const double lo = -reach + std::max(0, best - 1) * dx;
      const double hi = -reach + std::min(count - 1, best + 1) * dx;
      sup = std::max(sup, golden_max(
                              [&](double x) {
                                const double l = f.log_abs(x);
                                return al == 0 ? l : l + al * std::log(std::abs(x));
                              },
                              lo, hi));
      out[static_cast<std::size_t>(al)] = sup;
      // boundary bound: sum of term magnitudes at +-reach
      for (double edge : {-reach, reach}) {
        double tb = -kInf;
        for (const auto& t : f.terms()) {
          if (t.a <= 0.0) continue;
          const double s = std::abs(edge - t.b);
          const double lt = std::log(std::abs(t.c)) + t.p * std::log(s) - t.a * s * s + al * std::log(std::abs(edge));
          tb = std::max(tb, lt);
        }
        if (tb + std::log(static_cast<double>(f.terms().size())) > sup - 20.0) tails_ok = false;
      }
    }
    if (tails_ok) break;
    reach *= 1.5;
  }
  return out;
}

}  // namespace detail

/// Gelfand-Shilov constant estimate for |x^alpha d^beta u| <= A^{|alpha|+|beta|} (alpha!)^lambda (beta!)^mu.
struct GSEstimate {
  double lambda = 0.0;
  double mu = 0.0;
  double A_est = 0.0;    // max over probed (alpha, beta) != 0; +inf when a seminorm is unbounded
  double K_bound = 0.0;  // 2^{d lambda} (1 - 2^{-(1-mu)})^{-d}, the holomorphic bound prefactor implied by A
  int max_alpha = 0;
  int max_beta = 0;
  std::vector<double> A_by_order;  // A over orders <= r per axis, r = 1..max(max_alpha, max_beta)

  bool unbounded() const { return std::isinf(A_est); }
  /// Relative change of A between probe order `r1` and the full range.
  double drift_since(int r1) const {
    if (A_by_order.empty() || r1 < 1) return kInf;
    const double a1 = A_by_order[static_cast<std::size_t>(std::min<int>(r1, static_cast<int>(A_by_order.size())) - 1)];
    return std::abs(A_est - a1) / a1;
  }
};

/// Probes (alpha, beta) up to the given per-axis orders. Derivatives come from
/// the symbolic closure of the Gaussian sum. Supports one-dimensional inputs and
/// single tensor products in higher dimension.
inline GSEstimate gs_constant(const AnalyticGaussianSum& u, double lambda, double mu, int max_alpha,
                              int max_beta) {
  if (!(lambda > 0.0) || !(mu > 0.0)) throw std::invalid_argument("gs_constant: lambda and mu must be positive");
  if (max_alpha < 0 || max_beta < 0 || max_alpha > 40 || max_beta > 40)
    throw std::invalid_argument("gs_constant: probe orders must lie in [0, 40]");
  if (max_alpha + max_beta == 0) throw std::invalid_argument("gs_constant: at least one probe order must be positive");
  const int d = u.dim();
  if (u.products().size() > 1 && d > 1)
    throw std::invalid_argument("gs_constant: multi-dimensional inputs must be a single tensor product");

  GSEstimate est;
  est.lambda = lambda;
  est.mu = mu;
  est.max_alpha = max_alpha;
  est.max_beta = max_beta;
  est.K_bound = std::pow(2.0, d * lambda) * std::pow(1.0 / (1.0 - std::pow(2.0, -(1.0 - mu))), d);
  const int rmax = std::max(max_alpha, max_beta);
  est.A_by_order.assign(static_cast<std::size_t>(rmax), 0.0);
  if (u.empty()) return est;

  // logs[axis][beta][alpha] = log sup |x^alpha d^beta f_axis|
  std::vector<std::vector<std::vector<double>>> logs(static_cast<std::size_t>(d));
  double log_coeff = 0.0;
  if (d == 1) {
    AxisFactor f;
    for (const auto& p : u.products()) f = f + p.axes[0].scaled(p.coeff);
    AxisFactor g = f;
    for (int b = 0; b <= max_beta; ++b) {
      logs[0].push_back(detail::axis_log_sups(g, max_alpha));
      g = g.derivative();
    }
  } else {
    const auto& p = u.products().front();
    log_coeff = std::log(std::abs(p.coeff));
    for (int a = 0; a < d; ++a) {
      AxisFactor g = p.axes[static_cast<std::size_t>(a)];
      for (int b = 0; b <= max_beta; ++b) {
        logs[static_cast<std::size_t>(a)].push_back(detail::axis_log_sups(g, max_alpha));
        g = g.derivative();
      }
    }
  }

  std::size_t combos = 1;
  for (int a = 0; a < d; ++a) combos *= static_cast<std::size_t>((max_alpha + 1) * (max_beta + 1));
  if (combos > 20'000'000) throw std::invalid_argument("gs_constant: too many multi-indices for the probe range");

  // enumerate (alpha, beta) multi-indices as a mixed-radix counter
  std::vector<int> al(static_cast<std::size_t>(d), 0), be(static_cast<std::size_t>(d), 0);
  double best = 0.0;
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t rem = c;
    int total = 0, order = 0;
    double lsup = log_coeff, lfac = 0.0;
    for (int a = 0; a < d; ++a) {
      al[static_cast<std::size_t>(a)] = static_cast<int>(rem % static_cast<std::size_t>(max_alpha + 1));
      rem /= static_cast<std::size_t>(max_alpha + 1);
      be[static_cast<std::size_t>(a)] = static_cast<int>(rem % static_cast<std::size_t>(max_beta + 1));
      rem /= static_cast<std::size_t>(max_beta + 1);
      const int ai = al[static_cast<std::size_t>(a)], bi = be[static_cast<std::size_t>(a)];
      total += ai + bi;
      order = std::max({order, ai, bi});
      lsup += logs[static_cast<std::size_t>(a)][static_cast<std::size_t>(bi)][static_cast<std::size_t>(ai)];
      lfac += lambda * detail::log_factorial(ai) + mu * detail::log_factorial(bi);
    }
    if (total == 0 || lsup == -kInf) continue;
    const double A = lsup == kInf ? kInf : std::exp((lsup - lfac) / total);
    best = std::max(best, A);
    for (int r = std::max(order, 1); r <= rmax; ++r)
      est.A_by_order[static_cast<std::size_t>(r - 1)] = std::max(est.A_by_order[static_cast<std::size_t>(r - 1)], A);
  }
  est.A_est = best;
  return est;
}

struct HoloCheck {
  double K_est = 0.0;        // max of exp(phi(x)) |u(x + i y)| exp(-psi(y)) on the rectangle
  double K_est_grown = 0.0;  // same on the rectangle scaled by `growth`
  bool ok = false;           // both finite and K_est_grown <= 1.1 K_est
};

namespace detail {

// max over the rectangle of phi(x) + log|f(x+iy)| - psi(y) for one axis.
inline double axis_holo_log(const AxisFactor& f, const WeightParams& w, std::pair<double, double> xr,
                            std::pair<double, double> yr, int points) {
  double best = -kInf;
  for (int i = 0; i < points; ++i) {
    const double x = xr.first + (xr.second - xr.first) * i / (points - 1);
    const double ph = phi_weight(x, w);
    for (int j = 0; j < points; ++j) {
      const double y = yr.first + (yr.second - yr.first) * j / (points - 1);
      const double v = ph + f.log_abs(complex(x, y)) - psi_weight(y, w);
      if (std::isnan(v)) return kInf;
      best = std::max(best, v);
    }
  }
  return best;
}

}  // namespace detail

/// Empirical prefactor of  exp(phi(x)) |u(x+iy)| <= K exp(psi(y))  on a
/// rectangle, plus the same on the rectangle grown by `growth` about its centre.
inline HoloCheck holo_bound_check(const AnalyticGaussianSum& u, const WeightParams& w,
                                  std::pair<double, double> x_range, std::pair<double, double> y_range,
                                  int points = 161, double growth = 2.0) {
  w.validate();
  if (u.dim() > 1 && u.products().size() > 1)
    throw std::invalid_argument("holo_bound_check: multi-dimensional inputs must be a single tensor product");
  auto grow = [&](std::pair<double, double> r) {
    const double c = 0.5 * (r.first + r.second), h = 0.5 * (r.second - r.first) * growth;
    return std::pair<double, double>{c - h, c + h};
  };
  auto logK = [&](std::pair<double, double> xr, std::pair<double, double> yr) {
    if (u.empty()) return -kInf;
    if (u.dim() == 1) {
      AxisFactor f;
      for (const auto& p : u.products()) f = f + p.axes[0].scaled(p.coeff);
      return detail::axis_holo_log(f, w, xr, yr, points);
    }
    const auto& p = u.products().front();
    double s = std::log(std::abs(p.coeff));
    for (const auto& f : p.axes) s += detail::axis_holo_log(f, w, xr, yr, points);
    return s;
  };
  HoloCheck out;
  out.K_est = std::exp(logK(x_range, y_range));
  out.K_est_grown = std::exp(logK(grow(x_range), grow(y_range)));
  out.ok = std::isfinite(out.K_est) && std::isfinite(out.K_est_grown) && out.K_est_grown <= 1.1 * out.K_est;
  return out;
}

struct EspaceNorm {
  double value = 0.0;       // quadrature over |Im z| <= Y (upper bound when multi-dimensional)
  double tail_bound = 0.0;  // analytic bound on the part with |Im z| > Y
  bool divergent = false;
  bool upper_bound = false;
};

/// The strip integral diverges unless every width satisfies 0 < a < 2 pi.
inline bool e_space_divergent(const AnalyticGaussianSum& u) {
  if (u.empty()) return false;
  return !u.is_decaying() || u.max_width() >= 2.0 * pi;
}

namespace detail {

// One-dimensional  int int exp(-2 pi y^2) (1+|x|)^m |f(x+iy)| dx dy  over the
// strip, trapezoid in y, grid nodes in x; plus the |y| > Y tail bound.
inline std::pair<double, double> axis_e_space(const AxisFactor& f, int m, double Y, const Grid& g, int y_nodes) {
  const double dy = 2.0 * Y / (y_nodes - 1);
  const double hx = g.spacing();
  std::vector<double> rows(static_cast<std::size_t>(y_nodes));
  for (int j = 0; j < y_nodes; ++j) {
    const double y = -Y + j * dy;
    std::vector<double> cols(static_cast<std::size_t>(g.points));
    for (int i = 0; i < g.points; ++i) {
      const double x = g.node(i);
      const double l = -2.0 * pi * y * y + m * std::log1p(std::abs(x)) + f.log_abs(complex(x, y));
      cols[static_cast<std::size_t>(i)] = l == -kInf ? 0.0 : std::exp(l);
    }
    const double wy = (j == 0 || j == y_nodes - 1) ? 0.5 * dy : dy;
    rows[static_cast<std::size_t>(j)] = wy * hx * pairwise_sum<double>(cols);
  }
  const double strip = pairwise_sum<double>(rows);

  // |c| (|x-b| + |y|)^p exp(-a (x-b)^2 + a y^2) with (s+t)^p <= 2^{p-1}(s^p + t^p)
  double tail = 0.0;
  for (const auto& t : f.terms()) {
    const double c = 2.0 * pi - t.a;
    auto Ix = [&](int q) {
      std::vector<double> v(static_cast<std::size_t>(g.points));
      for (int i = 0; i < g.points; ++i) {
        const double x = g.node(i), s = std::abs(x - t.b);
        v[static_cast<std::size_t>(i)] = std::pow(1.0 + std::abs(x), m) * std::pow(s, q) * std::exp(-t.a * s * s);
      }
      return hx * pairwise_sum<double>(v);
    };
    auto Jy = [&](int q) {  // 2 int_Y^inf y^q exp(-c y^2) dy
      const double s = 0.5 * (q + 1);
      return boost::math::tgamma(s, c * Y * Y) / std::pow(c, s);
    };
    const double mag = std::abs(t.c);
    if (t.p == 0)
      tail += mag * Ix(0) * Jy(0);
    else
      tail += mag * std::pow(2.0, t.p - 1) * (Ix(t.p) * Jy(0) + Ix(0) * Jy(t.p));
  }
  return {strip, tail};
}

}  // namespace detail

/// int exp(-2 pi |Im z|^2) (1 + |Re z|)^m |u(z)| dz over the strip |Im z_j| <= Y,
/// with x on the nodes of `g` (one axis of it per coordinate).
inline EspaceNorm e_space_norm(const AnalyticGaussianSum& u, int m, double Y, const Grid& g, int y_nodes = 64) {
  if (m < 0 || m > 16) throw std::invalid_argument("e_space_norm: m must lie in [0, 16]");
  if (!(Y > 0.0) || y_nodes < 3) throw std::invalid_argument("e_space_norm: bad strip parameters");
  if (u.dim() != g.dim) throw std::invalid_argument("e_space_norm: dimension mismatch");
  EspaceNorm out;
  if (u.empty()) return out;
  if (e_space_divergent(u)) {
    out.value = kInf;
    out.tail_bound = kInf;
    out.divergent = true;
    return out;
  }
  const Grid axis{1, g.points, g.half_extent};
  if (u.dim() == 1) {
    AxisFactor f;
    for (const auto& p : u.products()) f = f + p.axes[0].scaled(p.coeff);
    std::tie(out.value, out.tail_bound) = detail::axis_e_space(f, m, Y, axis, y_nodes);
    return out;
  }
  // (1 + |x|) <= prod_j (1 + |x_j|) and the triangle inequality over products.
  out.upper_bound = true;
  for (const auto& p : u.products()) {
    double strip = std::abs(p.coeff), full = std::abs(p.coeff);
    for (const auto& f : p.axes) {
      const auto [s, t] = detail::axis_e_space(f, m, Y, axis, y_nodes);
      strip *= s;
      full *= s + t;
    }
    out.value += strip;
    out.tail_bound += full - strip;
  }
  return out;
}

/// Right-hand side of  |d^m/dx^m exp(-x^2/2)| <= sqrt(2) (2 pi)^{1/4} sqrt(m!) (m+1)^{1/4}.
inline double hermite_bound(int m) {
  return std::sqrt(2.0) * std::pow(2.0 * pi, 0.25) * std::exp(0.5 * detail::log_factorial(m)) *
         std::pow(m + 1.0, 0.25);
}

/// Per-order results of the scaled recurrence g_m = f_m / sqrt(m!),
/// f_m = d^m/dx^m exp(-x^2/2).
struct HermiteScan {
  std::vector<double> scaled_sup;      // sup |g_m| on [-sqrt(2m)-5, sqrt(2m)+5]
  std::vector<double> scaled_norm_sq;  // int g_m^2 dx = ||f_m||^2 / m!

  double log_sup(int m) const { return std::log(scaled_sup[static_cast<std::size_t>(m)]) + 0.5 * detail::log_factorial(m); }
  double log_norm_sq(int m) const {
    return std::log(scaled_norm_sq[static_cast<std::size_t>(m)]) + detail::log_factorial(m);
  }
  /// hermite_bound(m) / sup |f_m|, evaluated without forming m!.
  double margin(int m) const {
    return std::sqrt(2.0) * std::pow(2.0 * pi, 0.25) * std::pow(m + 1.0, 0.25) / scaled_sup[static_cast<std::size_t>(m)];
  }
};

namespace detail {

// g_0..g_mmax at x via g_{k+1} = (-x g_k - sqrt(k) g_{k-1}) / sqrt(k+1).
inline void scaled_hermite_row(double x, int mmax, std::vector<double>& g) {
  g.assign(static_cast<std::size_t>(mmax) + 1, 0.0);
  g[0] = std::exp(-0.5 * x * x);
  if (mmax >= 1) g[1] = -x * g[0];
  for (int k = 1; k < mmax; ++k)
    g[static_cast<std::size_t>(k) + 1] =
        (-x * g[static_cast<std::size_t>(k)] - std::sqrt(static_cast<double>(k)) * g[static_cast<std::size_t>(k) - 1]) /
        std::sqrt(k + 1.0);
}

}  // namespace detail

inline HermiteScan hermite_scan(int mmax, double dx = 1e-3) {
  if (mmax < 0 || mmax > 200) throw std::invalid_argument("hermite_scan: order must lie in [0, 200]");
  const double reach = std::sqrt(2.0 * mmax) + 5.0;
  const double norm_reach = std::sqrt(2.0 * mmax + 1.0) + 10.0;
  const int count = static_cast<int>(2.0 * norm_reach / dx) + 1;
  HermiteScan out;
  out.scaled_sup.assign(static_cast<std::size_t>(mmax) + 1, 0.0);
  std::vector<double> best_x(static_cast<std::size_t>(mmax) + 1, 0.0);
  std::vector<std::vector<double>> sq(static_cast<std::size_t>(mmax) + 1, std::vector<double>(static_cast<std::size_t>(count)));
  std::vector<double> g;
  for (int i = 0; i < count; ++i) {
    const double x = -norm_reach + i * dx;
    detail::scaled_hermite_row(x, mmax, g);
    for (int m = 0; m <= mmax; ++m) {
      const double v = g[static_cast<std::size_t>(m)];
      sq[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] = v * v;
      const double lim = std::sqrt(2.0 * m) + 5.0;
      if (std::abs(x) <= lim && std::abs(v) > out.scaled_sup[static_cast<std::size_t>(m)]) {
        out.scaled_sup[static_cast<std::size_t>(m)] = std::abs(v);
        best_x[static_cast<std::size_t>(m)] = x;
      }
    }
  }
  (void)reach;
  out.scaled_norm_sq.resize(static_cast<std::size_t>(mmax) + 1);
  for (int m = 0; m <= mmax; ++m) {
    out.scaled_norm_sq[static_cast<std::size_t>(m)] = dx * pairwise_sum<double>(sq[static_cast<std::size_t>(m)]);
    const double x0 = best_x[static_cast<std::size_t>(m)];
    const double refined = detail::golden_max(
        [&](double x) {
          std::vector<double> r;
          detail::scaled_hermite_row(x, m, r);
          return std::abs(r[static_cast<std::size_t>(m)]);
        },
        x0 - dx, x0 + dx, 40);
    out.scaled_sup[static_cast<std::size_t>(m)] = std::max(out.scaled_sup[static_cast<std::size_t>(m)], refined);
  }
  return out;
}

/// sup_x |d^m/dx^m exp(-x^2/2)|
inline double hermite_sup(int m) {
  const auto scan = hermite_scan(m);
  return std::exp(scan.log_sup(m));
}

/// hermite_bound(m) / hermite_sup(m); the derivative bound holds when this is >= 1.
inline double hermite_bound_margin(int m) { return hermite_scan(m).margin(m); }

/// Slack of the two elementary inequalities behind the holomorphic bound, in
/// log form (non-negative when they hold):
///   sup_k x^k / k! >= exp(x/2) / 2
///   sum_k (x^k / k!)^nu <= C exp(2 nu x),  C = sum_k 2^{-k nu}
struct ProofChainSlack {
  double sup_ratio = kInf;
  double series = kInf;
};

inline ProofChainSlack proof_chain_slack(double x, double nu) {
  if (!(x > 0.0) || !(nu > 0.0)) throw std::invalid_argument("proof_chain_slack: x and nu must be positive");
  ProofChainSlack s;
  const double lx = std::log(x);
  double lsup = 0.0;  // k = 0 term
  for (int k : {static_cast<int>(std::floor(x)), static_cast<int>(std::ceil(x))})
    lsup = std::max(lsup, k * lx - detail::log_factorial(k));
  s.sup_ratio = lsup - (0.5 * x - std::log(2.0));

  // log-sum-exp over k until the terms are negligible
  const int kmax = static_cast<int>(x + 60.0 + 10.0 * std::sqrt(x + 1.0));
  double top = -kInf;
  std::vector<double> logs;
  for (int k = 0; k <= kmax; ++k) {
    const double l = nu * (k * lx - detail::log_factorial(k));
    logs.push_back(l);
    top = std::max(top, l);
  }
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - top);
  const double lsum = top + std::log(acc);
  const double lC = -std::log1p(-std::pow(2.0, -nu));
  s.series = lC + 2.0 * nu * x - lsum;
  return s;
}

/// Fit of  log sup |d^m u| = log K + m log C + s log m!  over m = 2..m_max.
struct GevreyEstimate {
  double s_est = 0.0;
  double C_est = 0.0;
  double K_est = 0.0;
  double fit_residual = 0.0;  // sqrt(sum r^2 / sum (y - mean y)^2)
  bool degenerate = false;
  std::vector<double> log_sups;  // index m
};

namespace detail {

// Least squares for y ~ c0 + c1 t1 + c2 t2 via the 3x3 normal equations.
inline std::array<double, 3> fit3(std::span<const double> t1, std::span<const double> t2, std::span<const double> y) {
  double M[3][4] = {};
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double row[3] = {1.0, t1[i], t2[i]};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) M[r][c] += row[r] * row[c];
      M[r][3] += row[r] * y[i];
    }
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
    for (int k = 0; k < 4; ++k) std::swap(M[c][k], M[piv][k]);
    if (M[c][c] == 0.0) throw numerical_error("fit3: singular normal equations");
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = M[r][c] / M[c][c];
      for (int k = c; k < 4; ++k) M[r][k] -= f * M[c][k];
    }
  }
  return {M[0][3] / M[0][0], M[1][3] / M[1][1], M[2][3] / M[2][2]};
}

}  // namespace detail

/// Gevrey order estimate along `axis`. Multi-dimensional inputs must be a single
/// tensor product, for which the sup factorises over axes.
inline GevreyEstimate gevrey_order_estimate(const AnalyticGaussianSum& u, int m_max, int axis = 0) {
  if (m_max < 2 || m_max > 60) throw std::invalid_argument("gevrey_order_estimate: m_max must lie in [2, 60]");
  if (axis < 0 || axis >= u.dim()) throw std::invalid_argument("gevrey_order_estimate: bad axis");
  if (u.dim() > 1 && u.products().size() > 1)
    throw std::invalid_argument("gevrey_order_estimate: multi-dimensional inputs must be a single tensor product");
  GevreyEstimate est;
  est.log_sups.assign(static_cast<std::size_t>(m_max) + 1, -kInf);
  if (u.empty()) {
    est.degenerate = true;
    return est;
  }
  AxisFactor f;
  double log_rest = 0.0;
  if (u.dim() == 1) {
    for (const auto& p : u.products()) f = f + p.axes[0].scaled(p.coeff);
  } else {
    const auto& p = u.products().front();
    f = p.axes[static_cast<std::size_t>(axis)];
    log_rest = std::log(std::abs(p.coeff));
    for (int a = 0; a < u.dim(); ++a)
      if (a != axis) log_rest += detail::axis_log_sups(p.axes[static_cast<std::size_t>(a)], 0)[0];
  }
  AxisFactor g = f;
  for (int m = 0; m <= m_max; ++m) {
    est.log_sups[static_cast<std::size_t>(m)] = detail::axis_log_sups(g, 0)[0] + log_rest;
    g = g.derivative();
  }
  std::vector<double> t1, t2, y;
  for (int m = 2; m <= m_max; ++m) {
    const double l = est.log_sups[static_cast<std::size_t>(m)];
    if (!std::isfinite(l)) {
      est.degenerate = true;
      return est;
    }
    t1.push_back(m);
    t2.push_back(detail::log_factorial(m));
    y.push_back(l);
  }
  if (y.size() < 4) {
    est.degenerate = true;
    return est;
  }
  const auto c = detail::fit3(t1, t2, y);
  est.K_est = std::exp(c[0]);
  est.C_est = std::exp(c[1]);
  est.s_est = c[2];
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - (c[0] + c[1] * t1[i] + c[2] * t2[i]);
    ss_res += r * r;
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  est.fit_residual = ss_tot > 0.0 ? std::sqrt(ss_res / ss_tot) : 0.0;
  return est;
}

}  // namespace aw
