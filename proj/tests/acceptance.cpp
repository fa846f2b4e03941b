// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Library checks run in process; the pipeline and determinism criteria drive
// the antiwick executable.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "antiwick/field_io.hpp"
#include "antiwick/pairing.hpp"
#include "antiwick/quantize.hpp"
#include "antiwick/suites.hpp"

using namespace aw;
namespace fs = std::filesystem;
using io::json;

namespace {

int failures = 0;

void report(const char* id, bool pass, const std::string& what) {
  std::printf("%s %s  %s\n", id, pass ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double rel_l2(const SampledField& a, const SampledField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

SampledField constant_symbol(const Grid& g, complex c) {
  SampledField s(g);
  for (auto& v : s.values) v = c;
  return s;
}

const Grid kPhase{2, 256, 8.0};

void a1() {
  const Grid pos = doubled_grid(kPhase);
  const auto K = assemble_antiwick(AntiWickFromSymbol{constant_symbol(kPhase, 1.0)}, pos);
  const std::vector<AnalyticGaussianSum> vs = {
      AnalyticGaussianSum::gaussian(1, 1.0, {0.7}),
      AnalyticGaussianSum::gaussian(1, pi),
      AnalyticGaussianSum::gaussian(1, 5.0, {-0.5}, complex(0.0, 2.0)),
      AnalyticGaussianSum::gaussian(1, 2.0, {0.3}) + AnalyticGaussianSum::gaussian(1, 0.8, {-1.0}, -0.5),
      AnalyticGaussianSum::from_axis(AxisFactor({{1.0, 1, 2.0, 0.0}, {complex(0.5, 0.5), 2, 3.0, 0.4}}))};
  double worst = 0.0;
  for (const auto& v : vs) {
    const auto f = sample(v, pos);
    worst = std::max(worst, rel_l2(apply(K, f), f));
  }
  report("A1", worst < 1e-4, "resolution of identity: max relative L2 error " + fmt(worst) + " (tol 1e-4)");
}

void a2() {
  const auto F = sample(AnalyticGaussianSum::gaussian(2, pi), kPhase);
  const auto via_kernel = weyl_from_kernel(assemble_antiwick(AntiWickFromSymbol{F}, doubled_grid(kPhase)));
  const auto via_heat = smooth(F);
  double err = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const auto idx = kPhase.unflatten(i);
    if (std::abs(kPhase.node(idx[0])) <= 0.5 * kPhase.half_extent &&
        std::abs(kPhase.node(idx[1])) <= 0.5 * kPhase.half_extent)
      err = std::max(err, std::abs(via_kernel[i] - via_heat[i]));
  }
  report("A2", err < 1e-3, "Weyl symbol of assembled operator vs smooth(F): interior sup error " + fmt(err) +
                               " (tol 1e-3)");
}

void a3() {
  const Grid kg = doubled_grid(kPhase);
  const std::vector<std::pair<AnalyticGaussianSum, AnalyticGaussianSum>> pairs = {
      {AnalyticGaussianSum::gaussian(1, 1.7, {0.3}),
       AnalyticGaussianSum::from_axis(AxisFactor::gaussian(2.4, -0.2, complex(0.5, 1.0), 1))},
      {AnalyticGaussianSum::gaussian(1, pi), AnalyticGaussianSum::gaussian(1, pi)},
      {AnalyticGaussianSum::gaussian(1, 0.9, {-1.0}, complex(0.0, 1.0)), AnalyticGaussianSum::gaussian(1, 3.0, {0.8})}};
  double worst = 0.0;
  for (const auto& [ua, ub] : pairs) {
    const auto a = sample(ua, kg);
    const auto b = sample(ub, kg);
    DenseKernel K(kg);
    for (std::size_t u = 0; u < K.rows(); ++u)
      for (std::size_t v = 0; v < K.rows(); ++v) K.at(u, v) = a[u] * std::conj(b[v]);
    const auto back = kernel_from_weyl(weyl_from_kernel(K));
    for (std::size_t i = 0; i < K.matrix.size(); ++i) worst = std::max(worst, std::abs(back.matrix[i] - K.matrix[i]));
  }
  report("A3", worst < 1e-10, "kernel -> Weyl -> kernel on rank-one Gaussian kernels: sup error " + fmt(worst) +
                                  " (tol 1e-10)");
}

void a4() {
  const auto r = suites::heat_roundtrip_suite();
  double phi = 0.0, res = 0.0;
  bool ok = true;
  for (const auto& m : r.body["values"]["members"]) {
    phi = std::max(phi, m["phi_error"].get<double>());
    res = std::max(res, m["residual"].get<double>());
    ok = ok && m["ok"].get<bool>();
  }
  report("A4", ok, "strip inverse of exp(-a z^2), a in {2, pi, 4, 6}: max phi error " + fmt(phi) +
                       ", max smoothing residual " + fmt(res) + " (tol 1e-6)");
}

// --- executable driven -----------------------------------------------------

int run_cli(const fs::path& cwd, const std::string& args) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" ANTIWICK_CLI "' " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const std::string kSpecs = ANTIWICK_SPECS;

void a5(const fs::path& work) {
  fs::create_directories(work);
  const int family = run_cli(work, "--out family check pairing-consistency");
  double worst = -1.0;
  try {
    worst = io::detail::read_json(work / "family" / "check_pairing-consistency.json")["values"]["max_relative_error"]
                .get<double>();
  } catch (const std::exception&) {
  }
  const int wide = run_cli(work, "--out wide check pairing-consistency --test-function '" + kSpecs + "/gauss_a7_2d.json'");
  const int pair = run_cli(work, "--out pair pair --operator '" + kSpecs + "/constant_one.json' --test-function '" +
                                     kSpecs + "/gauss_a7_2d.json'");
  report("A5", family == 0 && worst >= 0.0 && worst < 1e-3 && wide == 1 && pair == 1,
         "3x3 pairing family: exit " + std::to_string(family) + ", max relative error " + fmt(worst) +
             " (tol 1e-3); width a = 7: check exit " + std::to_string(wide) + ", pair exit " + std::to_string(pair) +
             " (expect 1)");
}

void a6() {
  const auto r = suites::hermite_bound(200);
  const auto& v = r.body["values"];
  report("A6", r.pass, "Gaussian derivative bound, m <= 200: min margin " + fmt(v["min_margin"].get<double>()) +
                           " (>= 1); max log(||f_m||^2 / sqrt(2 pi) m!) for m <= 60: " +
                           fmt(v["max_log_norm_ratio"].get<double>()) + " (<= 0)");
}

void a7() {
  const auto r = suites::gevrey_suite(40);
  double s = 0.0, res = 0.0;
  for (const auto& m : r.body["values"]["members"]) {
    s = std::max(s, m["s_est"].get<double>());
    res = std::max(res, m["fit_residual"].get<double>());
  }
  report("A7", r.pass, "Gevrey order of 3 smoothed Gaussian sums: max s_est " + fmt(s) + " (<= 0.6), max fit residual " +
                           fmt(res) + " (< 0.05)");
}

void a8() {
  const auto h = suites::holo_bound_suite(0.45);
  double drift = 0.0;
  for (const auto& m : h.body["values"]["members"])
    drift = std::max(drift, std::abs(m["K_est_grown"].get<double>() / m["K_est"].get<double>() - 1.0));
  const auto e = suites::e_space_suite();
  report("A8", h.pass && e.pass,
         "holomorphic bound at mu = 0.45: " + std::string(h.pass ? "ok" : "not ok") + ", max K_est growth drift " +
             fmt(drift) + " (<= 0.1); strip norm finite for a < 2 pi: " + (e.pass ? "yes" : "no") +
             ", a = 2 pi + 0.1 divergent: " + (e.body["values"]["divergent_at_2pi_plus_0.1"].get<bool>() ? "yes" : "no"));
}

// Everything the executable can produce, into `root`, with relative paths so
// the two runs are interchangeable.
void full_run(const fs::path& root) {
  fs::create_directories(root);
  const std::string s = kSpecs + "/";
  run_cli(root, "--out sample sample --spec '" + s + "gauss_pi_1d.json'");
  run_cli(root, "--out smooth smooth --input sample/field.json --csv");
  run_cli(root, "--out desmooth desmooth --input smooth/smoothed.json --reference sample/field.json");
  run_cli(root, "--out strip desmooth --method complex-shift --spec '" + s + "gauss_pi_1d.json'");
  run_cli(root, "--out assemble antiwick-assemble --symbol '" + s + "gauss_pi_2d.json' --points 64 --extent 4");
  run_cli(root, "--out weyl weyl-from-kernel --kernel assemble/kernel.json");
  run_cli(root, "--out kernel kernel-from-weyl --symbol weyl/weyl_symbol.json");
  run_cli(root, "--out pair pair --operator '" + s + "coherent_pair.json' --test-function '" + s + "mixed_product_2d.json'");
  for (const auto& suite : suites::suite_names()) run_cli(root, "--out check-" + suite + " check " + suite);
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream is(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    std::string body = ss.str();
    if (e.path().filename() == "run_manifest.json") {
      json j = json::parse(body);
      j.erase("wall_time");
      body = j.dump();
    }
    files[fs::relative(e.path(), root).string()] = std::move(body);
  }
  return files;
}

void a9(const fs::path& work) {
  full_run(work / "first");
  full_run(work / "second");
  const auto a = snapshot(work / "first");
  const auto b = snapshot(work / "second");
  std::size_t same = 0;
  std::string diff;
  for (const auto& [k, v] : a) {
    const auto it = b.find(k);
    if (it != b.end() && it->second == v)
      ++same;
    else if (diff.empty())
      diff = k;
  }
  const bool ok = a.size() == b.size() && same == a.size() && a.size() >= 40;
  report("A9", ok, "two full runs: " + std::to_string(same) + " of " + std::to_string(a.size()) +
                       " output files byte-identical (manifest wall_time excluded)" +
                       (diff.empty() ? "" : ", first difference " + diff));
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "antiwick_acceptance";
  fs::remove_all(work);
  const std::vector<std::pair<const char*, void (*)()>> lib = {{"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}};
  for (const auto& [id, f] : lib) {
    try {
      f();
    } catch (const std::exception& e) {
      report(id, false, std::string("exception: ") + e.what());
    }
  }
  try {
    a5(work / "a5");
  } catch (const std::exception& e) {
    report("A5", false, std::string("exception: ") + e.what());
  }
  for (const auto& [id, f] : std::vector<std::pair<const char*, void (*)()>>{{"A6", a6}, {"A7", a7}, {"A8", a8}}) {
    try {
      f();
    } catch (const std::exception& e) {
      report(id, false, std::string("exception: ") + e.what());
    }
  }
  try {
    a9(work / "a9");
  } catch (const std::exception& e) {
    report("A9", false, std::string("exception: ") + e.what());
  }
  std::printf("%d of 9 criteria failed\n", failures);
  fs::remove_all(work);
  return failures == 0 ? 0 : 1;
}
