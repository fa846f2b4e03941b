#pragma once

// Entire functions of the form  sum_k c_k (z - b_k)^p_k exp(-a_k (z - b_k)^2)
// per axis, and finite sums of tensor products of such axis factors. These are
// evaluated at complex arguments, which is what the strip constructions need.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "antiwick/core.hpp"

namespace aw {

/// c (z - b)^p exp(-a (z - b)^2). Negative or zero widths are representable
/// (polynomials, growing Gaussians) but rejected by every operation that needs
/// decay along the real axis.
struct GaussTerm {
  complex c{1.0, 0.0};
  int p = 0;
  double a = 1.0;
  double b = 0.0;
};

// Exponents above this are treated as overflow in strip evaluations.
inline constexpr double kLogOverflowGuard = 700.0;

class AxisFactor {
 public:
  AxisFactor() = default;
  explicit AxisFactor(std::vector<GaussTerm> terms) : terms_(std::move(terms)) { normalize(); }

  static AxisFactor gaussian(double a, double b = 0.0, complex c = 1.0, int p = 0) {
    return AxisFactor({GaussTerm{c, p, a, b}});
  }

  const std::vector<GaussTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  complex operator()(complex z) const { return evaluate_scaled(z, 0.0); }

  /// value * exp(log_offset), combining exponents before exponentiation so that
  /// large growth of a term against a small weight never overflows.
  complex evaluate_scaled(complex z, double log_offset) const {
    complex sum{0.0, 0.0};
    for (const auto& t : terms_) sum += term_scaled(t, z, log_offset);
    return sum;
  }

  /// log |f(z)|; -inf where f vanishes.
  double log_abs(complex z) const {
    double top = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, double>> parts;  // (log magnitude, phase)
    parts.reserve(terms_.size());
    for (const auto& t : terms_) {
      const complex s = z - t.b;
      if (t.c == 0.0 || (t.p > 0 && s == 0.0)) continue;
      const complex e = -t.a * s * s;
      double lm = e.real() + std::log(std::abs(t.c));
      double ph = e.imag() + std::arg(t.c);
      if (t.p > 0) {
        lm += t.p * std::log(std::abs(s));
        ph += t.p * std::arg(s);
      }
      parts.emplace_back(lm, ph);
      top = std::max(top, lm);
    }
    if (parts.empty()) return -std::numeric_limits<double>::infinity();
    complex acc{0.0, 0.0};
    for (const auto& [lm, ph] : parts) acc += std::polar(std::exp(lm - top), ph);
    const double m = std::abs(acc);
    return m == 0.0 ? -std::numeric_limits<double>::infinity() : top + std::log(m);
  }

  /// Largest real exponent of any term at z (log of the term magnitude).
  double max_term_log(complex z, double log_offset = 0.0) const {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) {
      const complex s = z - t.b;
      if (t.c == 0.0 || (t.p > 0 && s == 0.0)) continue;
      double lm = (-t.a * s * s).real() + std::log(std::abs(t.c)) + log_offset;
      if (t.p > 0) lm += t.p * std::log(std::abs(s));
      top = std::max(top, lm);
    }
    return top;
  }

  AxisFactor derivative() const {
    std::vector<GaussTerm> out;
    out.reserve(2 * terms_.size());
    for (const auto& t : terms_) {
      if (t.p > 0) out.push_back({t.c * static_cast<double>(t.p), t.p - 1, t.a, t.b});
      if (t.a != 0.0) out.push_back({-2.0 * t.a * t.c, t.p + 1, t.a, t.b});
    }
    return AxisFactor(std::move(out));
  }

  AxisFactor derivative(int order) const {
    AxisFactor f = *this;
    for (int k = 0; k < order; ++k) f = f.derivative();
    return f;
  }

  /// z * f(z), using z = (z - b) + b.
  AxisFactor times_coordinate() const {
    std::vector<GaussTerm> out;
    out.reserve(2 * terms_.size());
    for (const auto& t : terms_) {
      out.push_back({t.c, t.p + 1, t.a, t.b});
      if (t.b != 0.0) out.push_back({t.c * t.b, t.p, t.a, t.b});
    }
    return AxisFactor(std::move(out));
  }

  AxisFactor scaled(complex s) const {
    auto out = terms_;
    for (auto& t : out) t.c *= s;
    return AxisFactor(std::move(out));
  }

  friend AxisFactor operator+(const AxisFactor& f, const AxisFactor& g) {
    auto out = f.terms_;
    out.insert(out.end(), g.terms_.begin(), g.terms_.end());
    return AxisFactor(std::move(out));
  }

  double min_width() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) m = std::min(m, t.a);
    return m;
  }
  double max_width() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) m = std::max(m, t.a);
    return m;
  }
  int max_power() const {
    int m = 0;
    for (const auto& t : terms_) m = std::max(m, t.p);
    return m;
  }

 private:
  static complex term_scaled(const GaussTerm& t, complex z, double log_offset) {
    if (t.c == 0.0) return 0.0;
    const complex s = z - t.b;
    complex e = -t.a * s * s + log_offset;
    if (t.p > 0) {
      if (s == 0.0) return 0.0;
      e += static_cast<double>(t.p) * std::log(s);
    }
    return t.c * std::exp(e);
  }

  void normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const GaussTerm& x, const GaussTerm& y) {
      return std::tie(x.a, x.b, x.p) < std::tie(y.a, y.b, y.p);
    });
    std::vector<GaussTerm> merged;
    for (const auto& t : terms_) {
      if (!merged.empty() && merged.back().a == t.a && merged.back().b == t.b &&
          merged.back().p == t.p) {
        merged.back().c += t.c;
      } else {
        merged.push_back(t);
      }
    }
    std::erase_if(merged, [](const GaussTerm& t) { return t.c == 0.0; });
    terms_ = std::move(merged);
  }

  std::vector<GaussTerm> terms_;
};

/// coeff * prod_i axes[i](z_i)
struct TensorProduct {
  complex coeff{1.0, 0.0};
  std::vector<AxisFactor> axes;
};

class AnalyticGaussianSum {
 public:
  AnalyticGaussianSum() = default;
  explicit AnalyticGaussianSum(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("AnalyticGaussianSum: dimension must be positive");
  }
  AnalyticGaussianSum(int dim, std::vector<TensorProduct> products) : dim_(dim) {
    for (auto& p : products) add(std::move(p));
  }

  /// One-dimensional function from a single axis factor.
  static AnalyticGaussianSum from_axis(AxisFactor f) {
    AnalyticGaussianSum u(1);
    u.add(TensorProduct{1.0, {std::move(f)}});
    return u;
  }

  static AnalyticGaussianSum product(std::vector<AxisFactor> axes, complex coeff = 1.0) {
    AnalyticGaussianSum u(static_cast<int>(axes.size()));
    u.add(TensorProduct{coeff, std::move(axes)});
    return u;
  }

  /// coeff * exp(-a |z - center|^2); center defaults to the origin.
  static AnalyticGaussianSum gaussian(int dim, double a, std::vector<double> center = {},
                                      complex coeff = 1.0) {
    if (center.empty()) center.assign(static_cast<std::size_t>(dim), 0.0);
    if (static_cast<int>(center.size()) != dim)
      throw std::invalid_argument("gaussian: center dimension mismatch");
    std::vector<AxisFactor> axes;
    for (int i = 0; i < dim; ++i) axes.push_back(AxisFactor::gaussian(a, center[static_cast<std::size_t>(i)]));
    return product(std::move(axes), coeff);
  }

  int dim() const { return dim_; }
  const std::vector<TensorProduct>& products() const { return products_; }
  bool empty() const { return products_.empty(); }

  void add(TensorProduct p) {
    if (static_cast<int>(p.axes.size()) != dim_)
      throw std::invalid_argument("AnalyticGaussianSum: product dimension mismatch");
    if (p.coeff == 0.0) return;
    for (const auto& f : p.axes)
      if (f.empty()) return;
    products_.push_back(std::move(p));
  }

  complex operator()(std::span<const complex> z) const {
    if (static_cast<int>(z.size()) != dim_)
      throw std::invalid_argument("AnalyticGaussianSum: argument dimension mismatch");
    complex sum{0.0, 0.0};
    for (const auto& p : products_) {
      complex v = p.coeff;
      for (int i = 0; i < dim_; ++i) v *= p.axes[static_cast<std::size_t>(i)](z[static_cast<std::size_t>(i)]);
      sum += v;
    }
    return sum;
  }
  complex operator()(complex z) const { return (*this)(std::span<const complex>(&z, 1)); }

  AnalyticGaussianSum derivative(int axis, int order = 1) const {
    AnalyticGaussianSum out(dim_);
    for (const auto& p : products_) {
      TensorProduct q = p;
      q.axes[static_cast<std::size_t>(axis)] = q.axes[static_cast<std::size_t>(axis)].derivative(order);
      out.add(std::move(q));
    }
    return out;
  }

  AnalyticGaussianSum times_coordinate(int axis) const {
    AnalyticGaussianSum out(dim_);
    for (const auto& p : products_) {
      TensorProduct q = p;
      q.axes[static_cast<std::size_t>(axis)] = q.axes[static_cast<std::size_t>(axis)].times_coordinate();
      out.add(std::move(q));
    }
    return out;
  }

  AnalyticGaussianSum scaled(complex s) const {
    AnalyticGaussianSum out(dim_);
    for (auto p : products_) {
      p.coeff *= s;
      out.add(std::move(p));
    }
    return out;
  }

  friend AnalyticGaussianSum operator+(const AnalyticGaussianSum& u, const AnalyticGaussianSum& v) {
    if (u.dim_ != v.dim_) throw std::invalid_argument("AnalyticGaussianSum: dimension mismatch");
    AnalyticGaussianSum out = u;
    for (const auto& p : v.products_) out.add(p);
    return out;
  }

  /// Every term decays along the real axis (a > 0).
  bool is_decaying() const {
    for (const auto& p : products_)
      for (const auto& f : p.axes)
        if (!(f.min_width() > 0.0)) return false;
    return true;
  }

  /// Largest width over all terms and axes; -inf for the zero function.
  double max_width() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& p : products_)
      for (const auto& f : p.axes) m = std::max(m, f.max_width());
    return m;
  }
  double min_width() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : products_)
      for (const auto& f : p.axes) m = std::min(m, f.min_width());
    return m;
  }

 private:
  int dim_ = 1;
  std::vector<TensorProduct> products_;
};

namespace detail {

// Per-axis samples of f(x_j + i y) * exp(log_offset) on the 1-d nodes of g.
inline std::vector<complex> axis_samples(const AxisFactor& f, const Grid& g, double y,
                                         double log_offset) {
  std::vector<complex> v(static_cast<std::size_t>(g.points));
  for (int j = 0; j < g.points; ++j) {
    const complex z(g.node(j), y);
    if (f.max_term_log(z, log_offset) > kLogOverflowGuard)
      throw numerical_error("strip evaluation overflow at Im z = " + std::to_string(y));
    v[static_cast<std::size_t>(j)] = f.evaluate_scaled(z, log_offset);
  }
  return v;
}

}  // namespace detail

/// u(x_j + i y) * exp(log_weight) on every node; the weight is folded into the
/// term exponents (spread evenly over the axes) before exponentiation.
inline SampledField sample_weighted(const AnalyticGaussianSum& u, const Grid& g,
                                    std::span<const double> y, double log_weight) {
  if (u.dim() != g.dim) throw std::invalid_argument("sample: dimension mismatch");
  if (!y.empty() && static_cast<int>(y.size()) != g.dim)
    throw std::invalid_argument("sample: imaginary shift dimension mismatch");
  SampledField out(g);
  const double per_axis = log_weight / g.dim;
  for (const auto& p : u.products()) {
    std::vector<std::vector<complex>> axis_vals;
    for (int a = 0; a < g.dim; ++a) {
      const double ya = y.empty() ? 0.0 : y[static_cast<std::size_t>(a)];
      axis_vals.push_back(detail::axis_samples(p.axes[static_cast<std::size_t>(a)], g, ya, per_axis));
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto idx = g.unflatten(i);
      complex v = p.coeff;
      for (int a = 0; a < g.dim; ++a)
        v *= axis_vals[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
      out[i] += v;
    }
  }
  return out;
}

/// values[j] = u(x_j + i y). An empty y means the real axis.
inline SampledField sample(const AnalyticGaussianSum& u, const Grid& g,
                           std::span<const double> y = {}) {
  return sample_weighted(u, g, y, 0.0);
}

}  // namespace aw
