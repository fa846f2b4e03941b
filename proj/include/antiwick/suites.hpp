#pragma once

// The verification suites behind `antiwick check <suite>`. Each returns a JSON
// report {suite, params, values, pass}; the acceptance binary reuses them.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "antiwick/gsnorm.hpp"
#include "antiwick/heat.hpp"
#include "antiwick/pairing.hpp"
#include "antiwick/spec_io.hpp"

namespace aw::suites {

using io::json;

/// Non-finite doubles as strings, since JSON has no infinity.
inline json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline json num(complex z) { return json::array({num(z.real()), num(z.imag())}); }

inline json to_json(const DesmoothReport& r) {
  json j = {{"method", to_string(r.method)}, {"residual", num(r.residual)}};
  if (r.method == DesmoothMethod::fourier_regularized) {
    j["rel_threshold"] = num(r.rel_threshold);
    j["cutoff_frequency"] = num(r.cutoff_frequency);
    j["kept_fraction"] = num(r.kept_fraction);
  } else {
    j["strip_halfwidth"] = num(r.strip_halfwidth);
    j["y_nodes"] = r.y_nodes;
  }
  return j;
}

inline json to_json(const PairingResult& r) {
  return {{"value", num(r.value)},
          {"method", to_string(r.method)},
          {"residual", num(r.residual)},
          {"quadrature_error_estimate", num(r.quadrature_error_estimate)},
          {"flagged", r.flagged}};
}

inline json to_json(const GSEstimate& e) {
  json by = json::array();
  for (double a : e.A_by_order) by.push_back(num(a));
  return {{"lambda", e.lambda},         {"mu", e.mu},
          {"A_est", num(e.A_est)},      {"K_bound", num(e.K_bound)},
          {"max_alpha", e.max_alpha},   {"max_beta", e.max_beta},
          {"A_by_order", by},           {"unbounded", e.unbounded()}};
}

struct Report {
  json body;
  bool pass = false;
};

inline Report finish(const std::string& suite, json params, json values, bool pass) {
  return {{{"suite", suite}, {"params", std::move(params)}, {"values", std::move(values)}, {"pass", pass}}, pass};
}

// ---------------------------------------------------------------------------

inline Report hermite_bound(int mmax = 200) {
  const auto scan = hermite_scan(mmax);
  json margins = json::array();
  double min_margin = kInf;
  int argmin = 0;
  for (int m = 0; m <= mmax; ++m) {
    const double g = scan.margin(m);
    margins.push_back(num(g));
    if (g < min_margin) {
      min_margin = g;
      argmin = m;
    }
  }
  // ||f_m||^2 <= sqrt(2 pi) m!, in log form
  const int norm_max = std::min(mmax, 60);
  double worst_norm = -kInf;
  for (int m = 0; m <= norm_max; ++m)
    worst_norm = std::max(worst_norm, scan.log_norm_sq(m) - 0.5 * std::log(2.0 * pi) - std::lgamma(m + 1.0));
  double sup_slack = kInf, series_slack = kInf;
  for (double nu : {0.3, 0.5, 0.55, 0.9}) {
    for (int i = 0; i <= 120; ++i) {
      const auto s = proof_chain_slack(std::pow(10.0, -3.0 + 6.0 * i / 120.0), nu);
      sup_slack = std::min(sup_slack, s.sup_ratio);
      series_slack = std::min(series_slack, s.series);
    }
  }
  const bool pass = min_margin >= 1.0 && worst_norm <= 0.0 && sup_slack >= 0.0 && series_slack >= 0.0;
  return finish("hermite-bound", {{"mmax", mmax}, {"norm_mmax", norm_max}},
                {{"min_margin", num(min_margin)},
                 {"argmin_margin", argmin},
                 {"margins", margins},
                 {"max_log_norm_ratio", num(worst_norm)},
                 {"proof_chain_sup_slack", num(sup_slack)},
                 {"proof_chain_series_slack", num(series_slack)}},
                pass);
}

namespace detail {

struct Member {
  std::string name;
  AnalyticGaussianSum u;
};

inline std::vector<Member> test_family() {
  return {{"exp(-pi z^2)", AnalyticGaussianSum::gaussian(1, pi)},
          {"exp(-2 (z-0.5)^2)", AnalyticGaussianSum::gaussian(1, 2.0, {0.5})},
          {"z exp(-3 z^2)", AnalyticGaussianSum::from_axis(AxisFactor::gaussian(3.0, 0.0, 1.0, 1))}};
}

}  // namespace detail

inline Report gs_constant_suite() {
  json members = json::array();
  bool pass = true;
  for (const auto& [name, u] : detail::test_family()) {
    const auto e10 = gs_constant(u, 0.5, 0.5, 10, 10);
    const auto e20 = gs_constant(u, 0.5, 0.5, 20, 20);
    const auto loose = gs_constant(u, 1.0, 1.0, 10, 10);
    const double drift = std::abs(e20.A_est - e10.A_est) / e10.A_est;
    const bool ok = std::isfinite(e20.A_est) && drift < 0.25 && loose.A_est <= e10.A_est;
    pass = pass && ok;
    members.push_back({{"u", name},
                       {"orders_10", to_json(e10)},
                       {"orders_20", to_json(e20)},
                       {"A_est_lambda_mu_1", num(loose.A_est)},
                       {"drift", num(drift)},
                       {"ok", ok}});
  }
  const auto one = gs_constant(AnalyticGaussianSum::gaussian(1, 0.0), 0.5, 0.5, 4, 4);
  pass = pass && one.unbounded();
  return finish("gs-constant", {{"lambda", 0.5}, {"mu", 0.5}, {"orders", {10, 20}}, {"stabilisation_tol", 0.25}},
                {{"members", members}, {"constant_one_unbounded", one.unbounded()}}, pass);
}

inline Report holo_bound_suite(double mu = 0.45, double lambda = 0.5) {
  json members = json::array();
  bool pass = true;
  const std::pair<double, double> xr{-3.0, 3.0}, yr{-3.0, 3.0};
  for (const auto& [name, u] : detail::test_family()) {
    const auto e = gs_constant(u, lambda, mu, 10, 10);
    const WeightParams w{lambda, mu, e.A_est};
    const auto h = holo_bound_check(u, w, xr, yr);
    pass = pass && h.ok;
    members.push_back({{"u", name},
                       {"A", num(e.A_est)},
                       {"K_est", num(h.K_est)},
                       {"K_est_grown", num(h.K_est_grown)},
                       {"ok", h.ok}});
  }
  const auto grow = holo_bound_check(AnalyticGaussianSum::gaussian(1, -1.0), WeightParams{lambda, mu, 2.0}, xr, yr);
  pass = pass && !grow.ok;
  return finish("holo-bound",
                {{"lambda", lambda}, {"mu", mu}, {"x_range", {xr.first, xr.second}}, {"y_range", {yr.first, yr.second}},
                 {"growth", 2.0}},
                {{"members", members}, {"exp(+z^2)_ok", grow.ok}}, pass);
}

inline Report e_space_suite() {
  const Grid g{1, 256, 8.0};
  json members = json::array();
  bool pass = true;
  for (double a : {0.5, 2.0, pi, 5.0, 6.0}) {
    for (int m : {0, 4}) {
      const auto e = e_space_norm(AnalyticGaussianSum::gaussian(1, a), m, 3.0, g);
      const bool ok = !e.divergent && std::isfinite(e.value) && std::isfinite(e.tail_bound);
      pass = pass && ok;
      members.push_back({{"a", a}, {"m", m}, {"value", num(e.value)}, {"tail_bound", num(e.tail_bound)}, {"ok", ok}});
    }
  }
  const auto bad = e_space_norm(AnalyticGaussianSum::gaussian(1, 2.0 * pi + 0.1), 0, 3.0, g);
  const auto y3 = e_space_norm(AnalyticGaussianSum::gaussian(1, pi), 0, 3.0, g);
  const auto y4 = e_space_norm(AnalyticGaussianSum::gaussian(1, pi), 0, 4.0, g);
  const double change = std::abs(y3.value - y4.value) / y4.value;
  pass = pass && bad.divergent && change < 0.01;
  return finish("e-space", {{"N", g.points}, {"L", g.half_extent}, {"Y", 3.0}},
                {{"members", members},
                 {"divergent_at_2pi_plus_0.1", bad.divergent},
                 {"strip_change_Y3_Y4", num(change)}},
                pass);
}

inline Report gevrey_suite(int m_max = 40) {
  const std::vector<detail::Member> fs = {
      {"exp(-pi x^2)", AnalyticGaussianSum::gaussian(1, pi)},
      {"exp(-3 (x-0.5)^2) + 0.5 (x+1)^2 exp(-(x+1)^2)",
       AnalyticGaussianSum::from_axis(AxisFactor({{1.0, 0, 3.0, 0.5}, {0.5, 2, 1.0, -1.0}}))},
      {"x^3 exp(-5 x^2) - 2i exp(-0.7 (x-1)^2)",
       AnalyticGaussianSum::from_axis(AxisFactor({{1.0, 3, 5.0, 0.0}, {complex(0.0, -2.0), 0, 0.7, 1.0}}))}};
  json members = json::array();
  bool pass = true;
  for (const auto& [name, f] : fs) {
    const auto e = gevrey_order_estimate(smooth_analytic(f), m_max);
    const bool ok = !e.degenerate && e.s_est <= 0.6 && e.fit_residual < 0.05;
    pass = pass && ok;
    members.push_back({{"f", name},
                       {"s_est", num(e.s_est)},
                       {"C_est", num(e.C_est)},
                       {"K_est", num(e.K_est)},
                       {"fit_residual", num(e.fit_residual)},
                       {"ok", ok}});
  }
  return finish("gevrey", {{"m_max", m_max}, {"s_max", 0.6}, {"residual_max", 0.05}}, {{"members", members}}, pass);
}

/// Strip and grid used for the closed-form inverse of exp(-a z^2). Narrow
/// inverses (a close to 2 pi) need a finer grid and a strip that reaches the
/// wider spectrum.
struct StripSetup {
  Grid grid;
  double Y;
  int y_nodes;
};

inline StripSetup strip_setup_for(double a) {
  if (a <= 4.0 + 1e-12) return {Grid{1, 256, 8.0}, 3.0, 64};
  return {Grid{1, 512, 4.0}, 12.0, 160};
}

inline Report heat_roundtrip_suite() {
  json members = json::array();
  bool pass = true;
  for (double a : {2.0, pi, 4.0, 6.0}) {
    const auto s = strip_setup_for(a);
    const double aphi = 1.0 / (1.0 / a - 1.0 / (2.0 * pi));
    const auto phi_exact = sample(AnalyticGaussianSum::gaussian(1, aphi, {}, std::sqrt(aphi / a)), s.grid);
    const auto rep = desmooth_complex(AnalyticGaussianSum::gaussian(1, a), s.grid, s.Y, s.y_nodes);
    const double err = sup_distance(rep.result, phi_exact);
    const bool ok = err < 1e-6 && rep.residual < 1e-6;
    pass = pass && ok;
    members.push_back({{"a", a},
                       {"N", s.grid.points},
                       {"L", s.grid.half_extent},
                       {"Y", s.Y},
                       {"y_nodes", s.y_nodes},
                       {"phi_error", num(err)},
                       {"residual", num(rep.residual)},
                       {"ok", ok}});
  }
  const Grid g{1, 256, 8.0};
  const auto f = sample(AnalyticGaussianSum::gaussian(1, pi), g);
  const double agree = sup_distance(smooth(f), smooth_convolution(f));
  const auto back = desmooth_fourier(smooth(f));
  const double roundtrip = sup_distance(back.result, f);
  pass = pass && agree < 1e-10 && roundtrip < 1e-8;
  return finish("heat-roundtrip", {{"widths", {2.0, pi, 4.0, 6.0}}, {"tol", 1e-6}},
                {{"members", members},
                 {"multiplier_vs_convolution", num(agree)},
                 {"fourier_roundtrip_error", num(roundtrip)}},
                pass);
}

struct PairingFamilies {
  std::vector<detail::Member> symbols;
  std::vector<detail::Member> tests;
};

inline PairingFamilies default_pairing_families() {
  return {{{"exp(-pi |X|^2)", AnalyticGaussianSum::gaussian(2, pi)},
           {"2 exp(-0.8 |X-(0.5,-0.3)|^2) + exp(-2 |X-(-1,0.5)|^2)",
            AnalyticGaussianSum::gaussian(2, 0.8, {0.5, -0.3}, 2.0) + AnalyticGaussianSum::gaussian(2, 2.0, {-1.0, 0.5})},
           {"x exp(-1.2 x^2) exp(-0.6 (xi-0.2)^2)",
            AnalyticGaussianSum::product({AxisFactor::gaussian(1.2, 0.0, 1.0, 1), AxisFactor::gaussian(0.6, 0.2)})}},
          {{"exp(-pi |X|^2)", AnalyticGaussianSum::gaussian(2, pi)},
           {"exp(-2 |X-(0.3,-0.2)|^2)", AnalyticGaussianSum::gaussian(2, 2.0, {0.3, -0.2})},
           {"exp(-4 (x-0.1)^2) (xi+0.4) exp(-2.5 (xi+0.4)^2)",
            AnalyticGaussianSum::product({AxisFactor::gaussian(4.0, 0.1), AxisFactor::gaussian(2.5, -0.4, 1.0, 1)})}}};
}

/// Assembled anti-Wick operators paired with test functions, against direct
/// quadrature of int F u. Passing `tests` replaces the test family. A test
/// function the inverse cannot handle (outside the strip space, or a flagged
/// residual) fails the suite: the numerical flag.
inline Report pairing_consistency_suite(const PairingParams& params = {},
                                        std::optional<std::vector<detail::Member>> tests = std::nullopt,
                                        const Grid& phase = Grid{2, 256, 8.0}) {
  auto fam = default_pairing_families();
  if (tests) fam.tests = std::move(*tests);
  json rows = json::array();
  bool pass = true;
  double worst = 0.0;
  for (const auto& [fname, Fa] : fam.symbols) {
    const auto F = sample(Fa, phase);
    const OperatorRep A{assemble_antiwick(AntiWickFromSymbol{F}, doubled_grid(phase))};
    for (const auto& [uname, u] : fam.tests) {
      json row = {{"F", fname}, {"u", uname}};
      const complex ref = antiwick_pair_reference(F, u);
      row["reference"] = num(ref);
      try {
        const auto r = antiwick_pair(A, u, phase, params);
        const double rel = std::abs(r.value - ref) / (1.0 + std::abs(ref));
        const bool ok = rel < 1e-3 && !r.flagged;
        worst = std::max(worst, rel);
        row["result"] = to_json(r);
        row["relative_error"] = num(rel);
        row["ok"] = ok;
        pass = pass && ok;
      } catch (const numerical_error& e) {
        row["error"] = e.what();
        row["ok"] = false;
        pass = false;
      }
      rows.push_back(std::move(row));
    }
  }
  return finish("pairing-consistency",
                {{"N", phase.points},
                 {"L", phase.half_extent},
                 {"method", to_string(params.method)},
                 {"tol", 1e-3},
                 {"flag_residual", params.flag_residual}},
                {{"pairs", rows}, {"max_relative_error", num(worst)}}, pass);
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"hermite-bound", "gs-constant",    "holo-bound",         "e-space",
                                                 "gevrey",        "heat-roundtrip", "pairing-consistency"};
  return names;
}

}  // namespace aw::suites
