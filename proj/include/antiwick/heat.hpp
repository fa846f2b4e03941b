#pragma once

// The smoothing semigroup S = exp(Delta / 8 pi) and its two inverses.
//
//   (S f)^(xi) = exp(-pi |xi|^2 / 2) f^(xi)
//   S f        = 2^{d/2} f * exp(-2 pi |.|^2)

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "antiwick/analytic.hpp"
#include "antiwick/core.hpp"
#include "antiwick/gsnorm.hpp"
#include "antiwick/parallel.hpp"

namespace aw {

namespace detail {

// Applies a per-node multiplier m(|xi|^2) on the dual grid.
template <typename Fn>
SampledField fourier_multiply(const SampledField& f, Fn&& m) {
  SampledField spec = fourier(f);
  const Grid& dg = spec.grid;
  std::vector<double> xi2(static_cast<std::size_t>(dg.points));
  for (int k = 0; k < dg.points; ++k) xi2[static_cast<std::size_t>(k)] = dg.node(k) * dg.node(k);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto idx = dg.unflatten(i);
    double r2 = 0.0;
    for (int k : idx) r2 += xi2[static_cast<std::size_t>(k)];
    spec[i] *= m(r2);
  }
  SampledField out = inverse_fourier(spec);
  out.grid = f.grid;
  return out;
}

}  // namespace detail

/// S f via the Fourier multiplier exp(-pi |xi|^2 / 2).
inline SampledField smooth(const SampledField& f) {
  return detail::fourier_multiply(f, [](double r2) { return std::exp(-0.5 * pi * r2); });
}

/// S f as the non-periodic convolution 2^{d/2} f * exp(-2 pi |.|^2), applied
/// axis by axis on the grid nodes. Unlike smooth(), nothing wraps around the
/// box, so a field that has not decayed inside the box shows up here.
inline SampledField smooth_convolution(const SampledField& f) {
  const Grid& g = f.grid;
  const int N = g.points;
  const double h = g.spacing();
  // exp(-2 pi s^2) < 1e-35 beyond 3.6
  const int reach = std::min(N - 1, static_cast<int>(std::ceil(3.6 / h)));
  std::vector<double> k(static_cast<std::size_t>(2 * reach + 1));
  for (int s = -reach; s <= reach; ++s)
    k[static_cast<std::size_t>(s + reach)] = std::sqrt(2.0) * h * std::exp(-2.0 * pi * (s * h) * (s * h));

  std::vector<complex> cur = f.values, next(cur.size());
  const std::size_t total = cur.size();
  for (int axis = 0; axis < g.dim; ++axis) {
    std::size_t stride = 1;
    for (int a = g.dim - 1; a > axis; --a) stride *= static_cast<std::size_t>(N);
    const std::size_t lines = total / static_cast<std::size_t>(N);
    parallel_for(0, lines, [&](std::size_t line) {
      const std::size_t outer = line / stride, inner = line % stride;
      const std::size_t base = outer * stride * static_cast<std::size_t>(N) + inner;
      for (int i = 0; i < N; ++i) {
        complex acc{0.0, 0.0};
        const int lo = std::max(0, i - reach), hi = std::min(N - 1, i + reach);
        for (int j = lo; j <= hi; ++j)
          acc += k[static_cast<std::size_t>(i - j + reach)] * cur[base + static_cast<std::size_t>(j) * stride];
        next[base + static_cast<std::size_t>(i) * stride] = acc;
      }
    });
    std::swap(cur, next);
  }
  return SampledField(g, std::move(cur));
}

namespace detail {

// S applied to c (z - b)^p exp(-a (z - b)^2) for a > 0, through
//   t^p = p!/2^p sum_j H_{p-2j}(t) / (j! (p-2j)!),  H_k(sqrt(a) x) g = (-sqrt(a))^{-k} d^k g,
// and S d^k g = d^k S g with S exp(-a x^2) = sqrt(a'/a) exp(-a' x^2), a' = 2 pi a / (2 pi + a).
inline AxisFactor smooth_term(const GaussTerm& t) {
  if (t.a < 0.0) throw std::invalid_argument("smooth_analytic: growing Gaussian terms have no smoothing");
  if (t.a == 0.0) {
    // heat flow of a polynomial: x^p -> sum_j (1/8pi)^j p! / (j! (p-2j)!) x^{p-2j}
    std::vector<GaussTerm> out;
    for (int j = 0; 2 * j <= t.p; ++j) {
      const double lc = -j * std::log(8.0 * pi) + std::lgamma(t.p + 1.0) - std::lgamma(j + 1.0) -
                        std::lgamma(t.p - 2 * j + 1.0);
      out.push_back({t.c * std::exp(lc), t.p - 2 * j, 0.0, t.b});
    }
    return AxisFactor(std::move(out));
  }
  const double ap = 2.0 * pi * t.a / (2.0 * pi + t.a);
  const AxisFactor sg = AxisFactor::gaussian(ap, t.b, std::sqrt(ap / t.a));
  AxisFactor out;
  const double sa = std::sqrt(t.a);
  for (int j = 0; 2 * j <= t.p; ++j) {
    const int k = t.p - 2 * j;
    const double lc = std::lgamma(t.p + 1.0) - t.p * std::log(2.0) - std::lgamma(j + 1.0) - std::lgamma(k + 1.0) -
                      0.5 * t.p * std::log(t.a) - k * std::log(sa);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    out = out + sg.derivative(k).scaled(t.c * sign * std::exp(lc));
  }
  return out;
}

}  // namespace detail

/// Closed-form S u for a Gaussian sum (the kernel factorises over axes).
inline AnalyticGaussianSum smooth_analytic(const AnalyticGaussianSum& u) {
  AnalyticGaussianSum out(u.dim());
  for (const auto& p : u.products()) {
    TensorProduct q{p.coeff, {}};
    for (const auto& f : p.axes) {
      AxisFactor s;
      for (const auto& t : f.terms()) s = s + detail::smooth_term(t);
      q.axes.push_back(std::move(s));
    }
    out.add(std::move(q));
  }
  return out;
}

enum class DesmoothMethod { fourier_regularized, complex_shift };

inline std::string to_string(DesmoothMethod m) {
  return m == DesmoothMethod::fourier_regularized ? "fourier-regularized" : "complex-shift";
}

inline DesmoothMethod parse_desmooth_method(const std::string& s) {
  if (s == "fourier-regularized" || s == "fourier") return DesmoothMethod::fourier_regularized;
  if (s == "complex-shift" || s == "complex") return DesmoothMethod::complex_shift;
  throw std::invalid_argument("unknown desmoothing method '" + s + "'");
}

struct DesmoothReport {
  SampledField result;
  DesmoothMethod method = DesmoothMethod::complex_shift;
  // fourier-regularized
  double rel_threshold = 0.0;
  double cutoff_frequency = std::numeric_limits<double>::infinity();  // smallest |xi| dropped
  double kept_fraction = 1.0;
  // complex-shift
  double strip_halfwidth = 0.0;
  int y_nodes = 0;
  /// sup |smooth_convolution(result) - input|, recomputed.
  double residual = 0.0;
};

/// sup |S Phi - u| with S the non-periodic convolution.
inline double smoothing_residual(const SampledField& phi, const SampledField& u) {
  return sup_distance(smooth_convolution(phi), u);
}

/// Phi^ = exp(pi |xi|^2 / 2) u^ where |u^| >= rel_threshold max |u^|, zero elsewhere.
inline DesmoothReport desmooth_fourier(const SampledField& u, double rel_threshold = 1e-12) {
  if (!(rel_threshold > 0.0 && rel_threshold < 1.0))
    throw std::invalid_argument("desmooth_fourier: threshold must lie in (0, 1)");
  DesmoothReport rep;
  rep.method = DesmoothMethod::fourier_regularized;
  rep.rel_threshold = rel_threshold;

  SampledField spec = fourier(u);
  const Grid& dg = spec.grid;
  const double top = max_abs(spec);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto idx = dg.unflatten(i);
    double r2 = 0.0;
    for (int k : idx) r2 += dg.node(k) * dg.node(k);
    if (top > 0.0 && std::abs(spec[i]) >= rel_threshold * top) {
      spec[i] *= std::exp(0.5 * pi * r2);
      ++kept;
    } else {
      if (top > 0.0) rep.cutoff_frequency = std::min(rep.cutoff_frequency, std::sqrt(r2));
      spec[i] = 0.0;
    }
  }
  rep.kept_fraction = static_cast<double>(kept) / static_cast<double>(spec.size());
  rep.result = inverse_fourier(spec);
  rep.result.grid = u.grid;
  rep.residual = smoothing_residual(rep.result, u);
  return rep;
}

/// Complex-shift inverse: per tensor product and axis,
///   kappa(xi) = sqrt(2) int int f(x + i y) exp(-2 pi (y^2 + i x xi)) dx dy,
/// trapezoid over |y| <= Y, then Phi = inverse Fourier of kappa.
inline DesmoothReport desmooth_complex(const AnalyticGaussianSum& u, const Grid& g, double strip_halfwidth = 3.0,
                                       int y_nodes = 64) {
  if (u.dim() != g.dim) throw std::invalid_argument("desmooth_complex: dimension mismatch");
  if (!(strip_halfwidth > 0.0) || y_nodes < 3)
    throw std::invalid_argument("desmooth_complex: strip half-width must be positive and y_nodes >= 3");
  if (e_space_divergent(u))
    throw numerical_error("desmooth_complex: input outside the strip space (some width a <= 0 or a >= 2 pi)");

  DesmoothReport rep;
  rep.method = DesmoothMethod::complex_shift;
  rep.strip_halfwidth = strip_halfwidth;
  rep.y_nodes = y_nodes;

  const Grid axis{1, g.points, g.half_extent};
  const double dy = 2.0 * strip_halfwidth / (y_nodes - 1);

  auto axis_inverse = [&](const AxisFactor& f) {
    const auto one = AnalyticGaussianSum::from_axis(f);
    std::vector<std::vector<complex>> parts(static_cast<std::size_t>(y_nodes));
    parallel_for(0, static_cast<std::size_t>(y_nodes), [&](std::size_t j) {
      const double y = -strip_halfwidth + static_cast<double>(j) * dy;
      const double w = (j == 0 || j + 1 == static_cast<std::size_t>(y_nodes)) ? 0.5 * dy : dy;
      SampledField s = sample_weighted(one, axis, std::span<const double>(&y, 1), -2.0 * pi * y * y);
      SampledField fs = fourier(s);
      for (auto& v : fs.values) v *= std::sqrt(2.0) * w;
      parts[j] = std::move(fs.values);
    });
    SampledField kappa(axis.dual());
    std::vector<complex> col(static_cast<std::size_t>(y_nodes));
    for (std::size_t k = 0; k < kappa.size(); ++k) {
      for (std::size_t j = 0; j < parts.size(); ++j) col[j] = parts[j][k];
      kappa[k] = pairwise_sum<complex>(col);
    }
    SampledField phi = inverse_fourier(kappa);
    phi.grid = axis;
    return phi.values;
  };

  SampledField phi(g);
  for (const auto& p : u.products()) {
    std::vector<std::vector<complex>> ax;
    for (const auto& f : p.axes) ax.push_back(axis_inverse(f));
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const auto idx = g.unflatten(i);
      complex v = p.coeff;
      for (int a = 0; a < g.dim; ++a)
        v *= ax[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
      phi[i] += v;
    }
  }
  rep.result = std::move(phi);
  if (!all_finite(rep.result)) throw numerical_error("desmooth_complex: non-finite result");
  rep.residual = smoothing_residual(rep.result, sample(u, g));
  return rep;
}

}  // namespace aw
