#pragma once

// On-disk formats.
//
//   field manifest   {"kind":"field","dim","N","L","layout":"row-major",
//                     "dtype":"complex128-le","data":"<file next to manifest>"}
//   kernel manifest  same keys with "kind":"dense-kernel" and "shape":[N^n, N^n]
//   coherent combo   [{"c_re","c_im","X":[...],"Y":[...]}, ...]
//
// Binary payloads are interleaved little-endian (re, im) doubles.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <string>
#include <vector>

#include "antiwick/core.hpp"
#include "antiwick/quantize.hpp"
#include "json.hpp"

namespace aw::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

class format_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

inline void write_payload(const fs::path& p, const std::vector<complex>& v) {
  std::vector<std::uint64_t> raw(2 * v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double re = v[i].real(), im = v[i].imag();
    std::memcpy(&raw[2 * i], &re, 8);
    std::memcpy(&raw[2 * i + 1], &im, 8);
    raw[2 * i] = to_le(raw[2 * i]);
    raw[2 * i + 1] = to_le(raw[2 * i + 1]);
  }
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw format_error("cannot write " + p.string());
  os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 8));
}

inline std::vector<complex> read_payload(const fs::path& p, std::size_t count) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw format_error("cannot read " + p.string());
  std::vector<std::uint64_t> raw(2 * count);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 8));
  if (static_cast<std::size_t>(is.gcount()) != raw.size() * 8) throw format_error(p.string() + ": payload too short");
  if (is.peek() != std::char_traits<char>::eof()) throw format_error(p.string() + ": payload too long");
  std::vector<complex> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    double re, im;
    const std::uint64_t a = to_le(raw[2 * i]), b = to_le(raw[2 * i + 1]);
    std::memcpy(&re, &a, 8);
    std::memcpy(&im, &b, 8);
    v[i] = complex(re, im);
  }
  return v;
}

inline json read_json(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw format_error("cannot read " + p.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw format_error(p.string() + ": " + e.what());
  }
}

inline void write_json(const fs::path& p, const json& j) {
  std::ofstream os(p, std::ios::trunc);
  if (!os) throw format_error("cannot write " + p.string());
  os << j.dump(2) << '\n';
}

inline Grid grid_from(const json& j) {
  try {
    return make_grid(j.at("dim").get<int>(), j.at("N").get<int>(), j.at("L").get<double>());
  } catch (const json::exception& e) {
    throw format_error(std::string("manifest: ") + e.what());
  }
}

inline void check_layout(const json& j) {
  if (j.value("layout", "row-major") != "row-major") throw format_error("manifest: unsupported layout");
  if (j.value("dtype", "complex128-le") != "complex128-le") throw format_error("manifest: unsupported dtype");
}

inline fs::path payload_path(const fs::path& manifest) {
  fs::path p = manifest;
  p.replace_extension(".bin");
  return p;
}

}  // namespace detail

/// Writes `<stem>.json` and `<stem>.bin`; returns the paths written.
inline std::vector<fs::path> write_field(const SampledField& f, const fs::path& manifest) {
  const fs::path bin = detail::payload_path(manifest);
  json j = {{"kind", "field"},           {"dim", f.grid.dim},     {"N", f.grid.points}, {"L", f.grid.half_extent},
            {"layout", "row-major"}, {"dtype", "complex128-le"}, {"data", bin.filename().string()}};
  detail::write_payload(bin, f.values);
  detail::write_json(manifest, j);
  return {manifest, bin};
}

inline SampledField read_field(const fs::path& manifest) {
  const json j = detail::read_json(manifest);
  if (j.value("kind", "field") != "field") throw format_error(manifest.string() + ": not a field manifest");
  detail::check_layout(j);
  const Grid g = detail::grid_from(j);
  const fs::path bin = manifest.parent_path() / j.at("data").get<std::string>();
  return SampledField(g, detail::read_payload(bin, g.size()));
}

inline std::vector<fs::path> write_kernel(const DenseKernel& k, const fs::path& manifest) {
  const fs::path bin = detail::payload_path(manifest);
  const auto M = k.rows();
  json j = {{"kind", "dense-kernel"},
            {"dim", k.grid.dim},
            {"N", k.grid.points},
            {"L", k.grid.half_extent},
            {"shape", {M, M}},
            {"layout", "row-major"},
            {"dtype", "complex128-le"},
            {"data", bin.filename().string()}};
  detail::write_payload(bin, k.matrix);
  detail::write_json(manifest, j);
  return {manifest, bin};
}

inline DenseKernel read_kernel(const fs::path& manifest) {
  const json j = detail::read_json(manifest);
  if (j.value("kind", "") != "dense-kernel") throw format_error(manifest.string() + ": not a kernel manifest");
  detail::check_layout(j);
  const Grid g = detail::grid_from(j);
  DenseKernel k(g);
  const auto shape = j.at("shape").get<std::vector<std::size_t>>();
  if (shape.size() != 2 || shape[0] != k.rows() || shape[1] != k.rows())
    throw format_error(manifest.string() + ": shape does not match grid");
  k.matrix = detail::read_payload(manifest.parent_path() / j.at("data").get<std::string>(), k.matrix.size());
  return k;
}

inline json coherent_to_json(const CoherentCombo& c) {
  json arr = json::array();
  for (const auto& t : c.terms) arr.push_back({{"c_re", t.c.real()}, {"c_im", t.c.imag()}, {"X", t.X}, {"Y", t.Y}});
  return arr;
}

inline CoherentCombo coherent_from_json(const json& arr) {
  if (!arr.is_array() || arr.empty()) throw format_error("coherent combination: expected a non-empty list");
  CoherentCombo c;
  try {
    for (const auto& e : arr) {
      CoherentTerm t{complex(e.value("c_re", 0.0), e.value("c_im", 0.0)), e.at("X").get<std::vector<double>>(),
                     e.at("Y").get<std::vector<double>>()};
      if (t.X.size() != t.Y.size() || t.X.empty() || t.X.size() % 2 != 0)
        throw format_error("coherent combination: X and Y need the same even length");
      c.terms.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw format_error(std::string("coherent combination: ") + e.what());
  }
  c.n = static_cast<int>(c.terms.front().X.size() / 2);
  for (const auto& t : c.terms)
    if (static_cast<int>(t.X.size()) != 2 * c.n) throw format_error("coherent combination: mixed dimensions");
  return c;
}

inline void write_coherent(const CoherentCombo& c, const fs::path& p) { detail::write_json(p, coherent_to_json(c)); }
inline CoherentCombo read_coherent(const fs::path& p) { return coherent_from_json(detail::read_json(p)); }

/// Columns x[, y], re, im with full precision; one- and two-dimensional fields.
inline void write_csv(const SampledField& f, const fs::path& p) {
  const Grid& g = f.grid;
  if (g.dim > 2) throw std::invalid_argument("write_csv: only dimensions 1 and 2");
  std::ofstream os(p, std::ios::trunc);
  if (!os) throw format_error("cannot write " + p.string());
  os << std::setprecision(17);
  os << (g.dim == 1 ? "x,re,im\n" : "x,y,re,im\n");
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = g.unflatten(i);
    for (int j : idx) os << g.node(j) << ',';
    os << f[i].real() << ',' << f[i].imag() << '\n';
  }
}

}  // namespace aw::io
