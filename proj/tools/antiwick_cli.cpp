// antiwick: command-line front end.
//
// Exit status: 0 pass, 1 numerical flag (large residual, divergence, failed
// check), 2 usage or input error. Every run writes run_manifest.json into the
// output directory (--out, else $ANTIWICK_OUT_DIR, else the current directory).

#include <fftw3.h>
#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "antiwick/field_io.hpp"
#include "antiwick/heat.hpp"
#include "antiwick/pairing.hpp"
#include "antiwick/parallel.hpp"
#include "antiwick/quantize.hpp"
#include "antiwick/spec_io.hpp"
#include "antiwick/suites.hpp"

namespace {

using aw::io::json;
namespace fs = std::filesystem;

enum Exit { kPass = 0, kFlag = 1, kUsage = 2 };

std::string sha256_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw aw::io::format_error("cannot read " + p.string());
  const std::string data((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

// Collects what a command read and wrote, for the manifest.
struct Run {
  std::string command;
  json parameters = json::object();
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  fs::path out_dir;

  fs::path out(const std::string& name) const { return out_dir / name; }
  void wrote(const std::vector<fs::path>& ps) { outputs.insert(outputs.end(), ps.begin(), ps.end()); }
  void wrote(const fs::path& p) { outputs.push_back(p); }
  void write_json(const std::string& name, const json& j) {
    const fs::path p = out(name);
    std::ofstream os(p, std::ios::trunc);
    if (!os) throw aw::io::format_error("cannot write " + p.string());
    os << j.dump(2) << '\n';
    wrote(p);
  }
};

void write_manifest(const Run& run, double wall) {
  json in = json::array(), out = json::array();
  for (const auto& p : run.inputs) {
    const auto kind = aw::io::detail::read_json(p);
    in.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
    // a manifest's payload is an input too
    if (kind.is_object() && kind.contains("data")) {
      const fs::path bin = p.parent_path() / kind["data"].get<std::string>();
      in.push_back({{"path", bin.string()}, {"sha256", sha256_file(bin)}});
    }
  }
  for (const auto& p : run.outputs) out.push_back({{"path", p.filename().string()}, {"sha256", sha256_file(p)}});
  json m;
  m["command"] = run.command;
  m["parameters"] = run.parameters;
  m["inputs"] = in;
  m["outputs"] = out;
  m["versions"] = {{"antiwick", ANTIWICK_VERSION}, {"fftw", std::string(fftw_version)}, {"cli11", CLI11_VERSION}};
  m["wall_time"] = wall;
  std::ofstream os(run.out("run_manifest.json"), std::ios::trunc);
  os << m.dump(2) << '\n';
}

aw::Grid phase_from_flags(int dim, int points, double extent) {
  return aw::make_grid(dim, points, extent);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weyl / anti-Wick symbol calculus on discretised phase space"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ANTIWICK_VERSION));

  std::string out_dir;
  int threads = 1;
  app.add_option("--out", out_dir, "output directory (default $ANTIWICK_OUT_DIR or .)");
  app.add_option("--threads", threads, "parallelism hint")->check(CLI::Range(1, 256));

  // sample
  auto* sa = app.add_subcommand("sample", "sample a gaussian-sum spec into a stored field");
  std::string sample_spec;
  int sample_points = 256;
  double sample_extent = 8.0;
  sa->add_option("--spec", sample_spec, "gaussian-sum spec")->required()->check(CLI::ExistingFile);
  sa->add_option("--points", sample_points, "grid nodes per axis");
  sa->add_option("--extent", sample_extent, "grid half extent");

  // weyl-from-kernel
  auto* wfk = app.add_subcommand("weyl-from-kernel", "Weyl symbol of a dense kernel on its doubled grid");
  std::string kernel_path;
  bool csv = false;
  wfk->add_option("--kernel", kernel_path, "kernel manifest")->required()->check(CLI::ExistingFile);
  wfk->add_flag("--csv", csv, "also write CSV");

  // kernel-from-weyl
  auto* kfw = app.add_subcommand("kernel-from-weyl", "dense kernel of a sampled Weyl symbol");
  std::string symbol_path;
  kfw->add_option("--symbol", symbol_path, "field manifest on a phase grid with N = 4 L^2")
      ->required()
      ->check(CLI::ExistingFile);

  // antiwick-assemble
  auto* asm_ = app.add_subcommand("antiwick-assemble", "kernel of the operator with a given anti-Wick symbol");
  int points = 256, pos_points = 0;
  double extent = 8.0;
  asm_->add_option("--symbol", symbol_path, "field manifest or antiwick-symbol spec")->required()->check(CLI::ExistingFile);
  asm_->add_option("--points", points, "phase grid nodes per axis for analytic symbols");
  asm_->add_option("--extent", extent, "phase grid half extent for analytic symbols");
  asm_->add_option("--position-points", pos_points, "position grid nodes (default: doubled grid)");

  // smooth
  auto* sm = app.add_subcommand("smooth", "apply exp(Laplacian / 8 pi) to a field");
  std::string input_path, smooth_method = "multiplier";
  sm->add_option("--input", input_path, "field manifest")->required()->check(CLI::ExistingFile);
  sm->add_option("--method", smooth_method, "multiplier or convolution")
      ->check(CLI::IsMember({"multiplier", "convolution"}));
  sm->add_flag("--csv", csv, "also write CSV");

  // desmooth
  auto* ds = app.add_subcommand("desmooth", "invert the smoothing");
  std::string spec_path, method = "fourier-regularized", reference_path;
  double threshold = 1e-12, strip = 3.0, flag = 1e-4;
  int ynodes = 64;
  auto* ds_in = ds->add_option("--input", input_path, "field manifest (fourier-regularized)")->check(CLI::ExistingFile);
  auto* ds_spec = ds->add_option("--spec", spec_path, "gaussian-sum spec (complex-shift)")->check(CLI::ExistingFile);
  ds_in->excludes(ds_spec);
  ds->add_option("--method", method, "fourier-regularized or complex-shift")
      ->check(CLI::IsMember({"fourier-regularized", "complex-shift"}));
  ds->add_option("--threshold", threshold, "relative spectral threshold");
  ds->add_option("--strip", strip, "strip half width Y");
  ds->add_option("--ynodes", ynodes, "strip quadrature nodes");
  ds->add_option("--points", points, "grid nodes per axis for --spec");
  ds->add_option("--extent", extent, "grid half extent for --spec");
  ds->add_option("--reference", reference_path, "field to compare the result against")->check(CLI::ExistingFile);
  ds->add_option("--flag-residual", flag, "residual above which the run is flagged");
  ds->add_flag("--csv", csv, "also write CSV");

  // pair
  auto* pr = app.add_subcommand("pair", "evaluate the anti-Wick symbol on a test function");
  std::string operator_path, test_path;
  pr->add_option("--operator", operator_path, "operator spec or manifest")->required()->check(CLI::ExistingFile);
  pr->add_option("--test-function", test_path, "gaussian-sum spec on phase space")->required()->check(CLI::ExistingFile);
  pr->add_option("--method", method, "complex-shift or fourier-regularized")
      ->check(CLI::IsMember({"fourier-regularized", "complex-shift"}));
  pr->add_option("--points", points, "phase grid nodes per axis when the operator does not fix it");
  pr->add_option("--extent", extent, "phase grid half extent when the operator does not fix it");
  pr->add_option("--threshold", threshold, "relative spectral threshold (fourier-regularized)");
  pr->add_option("--strip", strip, "strip half width Y (complex-shift)");
  pr->add_option("--ynodes", ynodes, "strip quadrature nodes (complex-shift)");
  pr->add_option("--flag-residual", flag, "residual above which the pairing is flagged");

  // check
  auto* ck = app.add_subcommand("check", "run a verification suite");
  std::string suite;
  int mmax = 200;
  std::string check_method = "complex-shift";
  ck->add_option("suite", suite, "suite name")->required()->check(CLI::IsMember(aw::suites::suite_names()));
  ck->add_option("--mmax", mmax, "largest derivative order (hermite-bound)")->check(CLI::Range(0, 200));
  ck->add_option("--method", check_method, "desmoothing method (pairing-consistency)")
      ->check(CLI::IsMember({"fourier-regularized", "complex-shift"}));
  ck->add_option("--test-function", test_path, "replace the test family (pairing-consistency)")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  aw::set_thread_hint(threads);
  Run run;
  if (out_dir.empty()) {
    const char* env = std::getenv("ANTIWICK_OUT_DIR");
    out_dir = env ? env : ".";
  }
  run.out_dir = out_dir;
  int status = kPass;

  try {
    fs::create_directories(run.out_dir);
    if (*sa) {
      run.command = "sample";
      run.parameters = {{"spec", sample_spec}, {"points", sample_points}, {"extent", sample_extent}};
      run.inputs.push_back(sample_spec);
      const auto u = aw::io::read_gaussian_sum(sample_spec);
      run.wrote(aw::io::write_field(aw::sample(u, aw::make_grid(u.dim(), sample_points, sample_extent)),
                                    run.out("field.json")));
    } else if (*wfk) {
      run.command = "weyl-from-kernel";
      run.parameters = {{"kernel", kernel_path}};
      run.inputs.push_back(kernel_path);
      const auto sigma = aw::weyl_from_kernel(aw::io::read_kernel(kernel_path));
      run.wrote(aw::io::write_field(sigma, run.out("weyl_symbol.json")));
      if (csv) {
        aw::io::write_csv(sigma, run.out("weyl_symbol.csv"));
        run.wrote(run.out("weyl_symbol.csv"));
      }
    } else if (*kfw) {
      run.command = "kernel-from-weyl";
      run.parameters = {{"symbol", symbol_path}};
      run.inputs.push_back(symbol_path);
      run.wrote(aw::io::write_kernel(aw::kernel_from_weyl(aw::io::read_field(symbol_path)), run.out("kernel.json")));
    } else if (*asm_) {
      run.command = "antiwick-assemble";
      run.inputs.push_back(symbol_path);
      const auto j = aw::io::detail::read_json(symbol_path);
      aw::SampledField F;
      if (j.value("kind", "field") == "field") {
        F = aw::io::read_field(symbol_path);
      } else {
        const auto spec = aw::io::gaussian_sum_from_json(j);
        F = aw::sample(spec, aw::make_grid(spec.dim(), points, extent));
      }
      aw::Grid pos = aw::doubled_grid(F.grid);
      if (pos_points > 0) pos = aw::Grid{F.grid.dim / 2, pos_points, F.grid.half_extent};
      run.parameters = {{"symbol", symbol_path},
                        {"phase_points", F.grid.points},
                        {"phase_extent", F.grid.half_extent},
                        {"position_points", pos.points}};
      run.wrote(aw::io::write_kernel(aw::assemble_antiwick(aw::AntiWickFromSymbol{F}, pos), run.out("kernel.json")));
    } else if (*sm) {
      run.command = "smooth";
      run.parameters = {{"input", input_path}, {"method", smooth_method}};
      run.inputs.push_back(input_path);
      const auto f = aw::io::read_field(input_path);
      const auto s = smooth_method == "multiplier" ? aw::smooth(f) : aw::smooth_convolution(f);
      run.wrote(aw::io::write_field(s, run.out("smoothed.json")));
      if (csv) {
        aw::io::write_csv(s, run.out("smoothed.csv"));
        run.wrote(run.out("smoothed.csv"));
      }
    } else if (*ds) {
      run.command = "desmooth";
      const auto m = aw::parse_desmooth_method(method);
      aw::DesmoothReport rep;
      if (m == aw::DesmoothMethod::fourier_regularized) {
        if (input_path.empty()) throw std::invalid_argument("desmooth: fourier-regularized needs --input");
        run.inputs.push_back(input_path);
        rep = aw::desmooth_fourier(aw::io::read_field(input_path), threshold);
      } else {
        if (spec_path.empty()) throw std::invalid_argument("desmooth: complex-shift needs --spec");
        run.inputs.push_back(spec_path);
        const auto u = aw::io::read_gaussian_sum(spec_path);
        rep = aw::desmooth_complex(u, aw::make_grid(u.dim(), points, extent), strip, ynodes);
      }
      run.parameters = {{"input", input_path.empty() ? spec_path : input_path},
                        {"method", method},
                        {"threshold", threshold},
                        {"strip", strip},
                        {"ynodes", ynodes},
                        {"flag_residual", flag}};
      json report = aw::suites::to_json(rep);
      if (!reference_path.empty()) {
        run.inputs.push_back(reference_path);
        report["roundtrip_error"] = aw::suites::num(aw::sup_distance(rep.result, aw::io::read_field(reference_path)));
      }
      const bool flagged = !(rep.residual <= flag);
      report["flagged"] = flagged;
      run.wrote(aw::io::write_field(rep.result, run.out("desmoothed.json")));
      if (csv) {
        aw::io::write_csv(rep.result, run.out("desmoothed.csv"));
        run.wrote(run.out("desmoothed.csv"));
      }
      run.write_json("desmooth_report.json", report);
      std::cout << report.dump() << '\n';
      if (flagged) status = kFlag;
    } else if (*pr) {
      run.command = "pair";
      run.inputs = {operator_path, test_path};
      const auto u = aw::io::read_gaussian_sum(test_path);
      std::optional<aw::Grid> phase = phase_from_flags(u.dim(), points, extent);
      auto loaded = aw::io::load_operator(operator_path, phase);
      if (loaded.phase) phase = loaded.phase;
      aw::PairingParams p;
      p.method = aw::parse_desmooth_method(method == "fourier-regularized" && !pr->count("--method") ? "complex-shift"
                                                                                                        : method);
      p.rel_threshold = threshold;
      p.strip_halfwidth = strip;
      p.y_nodes = ynodes;
      p.flag_residual = flag;
      run.parameters = {{"operator", operator_path},
                        {"operator_kind", loaded.kind},
                        {"test_function", test_path},
                        {"method", aw::to_string(p.method)},
                        {"points", phase->points},
                        {"extent", phase->half_extent},
                        {"threshold", threshold},
                        {"strip", strip},
                        {"ynodes", ynodes},
                        {"flag_residual", flag}};
      json report;
      try {
        const auto r = aw::antiwick_pair(loaded.op, u, *phase, p);
        report = aw::suites::to_json(r);
        if (r.flagged) status = kFlag;
      } catch (const aw::numerical_error& e) {
        report = {{"method", aw::to_string(p.method)}, {"error", e.what()}, {"flagged", true}};
        status = kFlag;
      }
      run.write_json("pairing.json", report);
      std::cout << report.dump() << '\n';
    } else if (*ck) {
      run.command = "check " + suite;
      run.parameters = {{"suite", suite}};
      aw::suites::Report rep;
      if (suite == "hermite-bound") {
        run.parameters["mmax"] = mmax;
        rep = aw::suites::hermite_bound(mmax);
      } else if (suite == "gs-constant") {
        rep = aw::suites::gs_constant_suite();
      } else if (suite == "holo-bound") {
        rep = aw::suites::holo_bound_suite();
      } else if (suite == "e-space") {
        rep = aw::suites::e_space_suite();
      } else if (suite == "gevrey") {
        rep = aw::suites::gevrey_suite();
      } else if (suite == "heat-roundtrip") {
        rep = aw::suites::heat_roundtrip_suite();
      } else {
        aw::PairingParams p;
        p.method = aw::parse_desmooth_method(check_method);
        run.parameters["method"] = check_method;
        std::optional<std::vector<aw::suites::detail::Member>> tests;
        if (!test_path.empty()) {
          run.inputs.push_back(test_path);
          run.parameters["test_function"] = test_path;
          tests = std::vector<aw::suites::detail::Member>{{test_path, aw::io::read_gaussian_sum(test_path)}};
        }
        rep = aw::suites::pairing_consistency_suite(p, tests);
      }
      run.write_json("check_" + suite + ".json", rep.body);
      std::cout << suite << ": " << (rep.pass ? "pass" : "FAIL") << '\n';
      if (!rep.pass) status = kFlag;
    }
  } catch (const aw::numerical_error& e) {
    std::cerr << "numerical flag: " << e.what() << '\n';
    status = kFlag;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(run, wall);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return status;
}
