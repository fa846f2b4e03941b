#pragma once

// JSON mini-format for analytic objects, so Gaussian sums and operators built
// from them never need to be shipped as sampled binaries.
//
//   {"kind": "gaussian-sum", "dim": 2,
//    "constant": [re, im],                                   optional
//    "gaussians": [{"a": 3.14, "center": [0, 0], "coeff": [1, 0]}],
//    "products": [{"coeff": [re, im],
//                  "axes": [[{"c": [re, im], "p": 0, "a": 1.0, "b": 0.0}], ...]}]}
//
// "gaussians" is shorthand for isotropic products. An operator spec is either
// {"kind": "antiwick-symbol", <gaussian-sum keys>} (the anti-Wick symbol F,
// sampled on the phase grid), {"kind": "coherent", "terms": [...]}, a bare
// coherent list, or the path of a field / kernel manifest.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "antiwick/analytic.hpp"
#include "antiwick/field_io.hpp"
#include "antiwick/quantize.hpp"

namespace aw::io {

namespace detail {

inline complex complex_from(const json& j, complex fallback = 1.0) {
  if (j.is_null()) return fallback;
  if (j.is_number()) return complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2) return complex(j[0].get<double>(), j[1].get<double>());
  throw format_error("expected a number or [re, im]");
}

inline json complex_to(complex c) { return json::array({c.real(), c.imag()}); }

}  // namespace detail

inline AnalyticGaussianSum gaussian_sum_from_json(const json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    if (dim < 1 || dim > 4) throw format_error("gaussian sum: dim must lie in [1, 4]");
    AnalyticGaussianSum u(dim);
    if (j.contains("constant")) {
      std::vector<AxisFactor> axes(static_cast<std::size_t>(dim), AxisFactor::gaussian(0.0));
      u.add(TensorProduct{detail::complex_from(j["constant"]), std::move(axes)});
    }
    for (const auto& g : j.value("gaussians", json::array())) {
      std::vector<double> center = g.value("center", std::vector<double>{});
      u = u + AnalyticGaussianSum::gaussian(dim, g.at("a").get<double>(), center,
                                            detail::complex_from(g.value("coeff", json())));
    }
    for (const auto& p : j.value("products", json::array())) {
      TensorProduct t{detail::complex_from(p.value("coeff", json())), {}};
      const auto& axes = p.at("axes");
      if (static_cast<int>(axes.size()) != dim) throw format_error("gaussian sum: product needs one factor per axis");
      for (const auto& ax : axes) {
        std::vector<GaussTerm> terms;
        for (const auto& term : ax)
          terms.push_back({detail::complex_from(term.value("c", json())), term.value("p", 0), term.at("a").get<double>(),
                           term.value("b", 0.0)});
        for (const auto& term : terms)
          if (term.p < 0) throw format_error("gaussian sum: negative power");
        t.axes.emplace_back(std::move(terms));
      }
      u.add(std::move(t));
    }
    return u;
  } catch (const json::exception& e) {
    throw format_error(std::string("gaussian sum: ") + e.what());
  }
}

inline json gaussian_sum_to_json(const AnalyticGaussianSum& u) {
  json products = json::array();
  for (const auto& p : u.products()) {
    json axes = json::array();
    for (const auto& f : p.axes) {
      json terms = json::array();
      for (const auto& t : f.terms()) terms.push_back({{"c", detail::complex_to(t.c)}, {"p", t.p}, {"a", t.a}, {"b", t.b}});
      axes.push_back(terms);
    }
    products.push_back({{"coeff", detail::complex_to(p.coeff)}, {"axes", axes}});
  }
  return {{"kind", "gaussian-sum"}, {"dim", u.dim()}, {"products", products}};
}

inline AnalyticGaussianSum read_gaussian_sum(const fs::path& p) { return gaussian_sum_from_json(detail::read_json(p)); }

struct LoadedOperator {
  OperatorRep op;
  std::optional<Grid> phase;  // implied by sampled inputs
  std::string kind;
};

/// Reads an operator from a spec or manifest. Analytic anti-Wick symbols are
/// sampled on `phase`, which they require.
inline LoadedOperator load_operator(const fs::path& p, const std::optional<Grid>& phase) {
  const json j = detail::read_json(p);
  if (j.is_array()) return {OperatorRep{coherent_from_json(j)}, std::nullopt, "coherent"};
  const std::string kind = j.value("kind", "");
  if (kind == "coherent") return {OperatorRep{coherent_from_json(j.at("terms"))}, std::nullopt, kind};
  if (kind == "dense-kernel") {
    DenseKernel k = read_kernel(p);
    const Grid ph = phase_grid_of(k.grid);
    return {OperatorRep{std::move(k)}, ph, kind};
  }
  if (kind == "field") {
    SampledField f = read_field(p);
    const Grid g = f.grid;
    return {OperatorRep{AntiWickFromSymbol{std::move(f)}}, g, kind};
  }
  if (kind == "antiwick-symbol") {
    if (!phase) throw format_error(p.string() + ": analytic symbol needs a phase grid");
    const auto F = gaussian_sum_from_json(j);
    if (F.dim() != phase->dim) throw format_error(p.string() + ": symbol dimension does not match the phase grid");
    return {OperatorRep{AntiWickFromSymbol{sample(F, *phase)}}, std::nullopt, kind};
  }
  throw format_error(p.string() + ": unknown operator kind '" + kind + "'");
}

}  // namespace aw::io
