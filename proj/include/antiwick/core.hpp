#pragma once

// Uniform centered grids, sampled complex fields, and the continuous-convention
// Fourier transform  u^(xi) = int u(x) exp(-2 i pi x.xi) dx  on them.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace aw {

using complex = std::complex<double>;
using std::numbers::pi;

/// Raised when a computation leaves its numerically meaningful regime
/// (overflowing strip evaluation, divergent strip integral, ...).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform grid over [-L, L)^dim with `points` nodes per axis.
struct Grid {
  int dim = 1;
  int points = 8;
  double half_extent = 1.0;

  double spacing() const { return 2.0 * half_extent / points; }
  double node(int j) const { return -half_extent + j * spacing(); }
  double cell_volume() const { return std::pow(spacing(), dim); }

  std::size_t size() const {
    std::size_t n = 1;
    for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(points);
    return n;
  }

  /// Grid carrying the transform of a field on this grid: spacing 1/(2L),
  /// half extent N/(4L).
  Grid dual() const { return Grid{dim, points, points / (4.0 * half_extent)}; }

  /// Per-axis node indices of a flat row-major index (last axis fastest).
  std::vector<int> unflatten(std::size_t flat) const {
    std::vector<int> idx(static_cast<std::size_t>(dim));
    for (int a = dim - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(points));
      flat /= static_cast<std::size_t>(points);
    }
    return idx;
  }

  std::size_t flatten(std::span<const int> idx) const {
    std::size_t flat = 0;
    for (int i : idx) flat = flat * static_cast<std::size_t>(points) + static_cast<std::size_t>(i);
    return flat;
  }
};

inline bool same_grid(const Grid& a, const Grid& b) {
  return a.dim == b.dim && a.points == b.points &&
         std::abs(a.half_extent - b.half_extent) <= 1e-12 * std::max(a.half_extent, b.half_extent);
}

inline std::string describe(const Grid& g) {
  std::ostringstream os;
  os << "Grid(dim=" << g.dim << ", N=" << g.points << ", L=" << g.half_extent << ")";
  return os.str();
}

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!same_grid(a, b))
    throw std::invalid_argument(std::string(where) + ": grid mismatch " + describe(a) + " vs " +
                                describe(b));
}

inline Grid make_grid(int dim, int points, double half_extent) {
  if (dim != 1 && dim != 2 && dim != 4)
    throw std::invalid_argument("make_grid: dimension must be 1, 2 or 4");
  if (points < 8 || points % 2 != 0)
    throw std::invalid_argument("make_grid: points per axis must be even and >= 8");
  if (!(half_extent > 0.0) || !std::isfinite(half_extent))
    throw std::invalid_argument("make_grid: half extent must be positive");
  return Grid{dim, points, half_extent};
}

/// Complex samples on every node of a grid, row-major.
struct SampledField {
  Grid grid;
  std::vector<complex> values;

  SampledField() = default;
  explicit SampledField(const Grid& g) : grid(g), values(g.size()) {}
  SampledField(const Grid& g, std::vector<complex> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
      throw std::invalid_argument("SampledField: value count does not match grid");
  }

  std::size_t size() const { return values.size(); }
  complex& operator[](std::size_t i) { return values[i]; }
  const complex& operator[](std::size_t i) const { return values[i]; }
};

inline SampledField operator+(const SampledField& f, const SampledField& g) {
  require_same_grid(f.grid, g.grid, "operator+");
  SampledField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] + g[i];
  return out;
}

inline SampledField operator-(const SampledField& f, const SampledField& g) {
  require_same_grid(f.grid, g.grid, "operator-");
  SampledField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] - g[i];
  return out;
}

inline SampledField operator*(complex s, const SampledField& f) {
  SampledField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = s * f[i];
  return out;
}

inline SampledField conj(const SampledField& f) {
  SampledField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::conj(f[i]);
  return out;
}

inline double max_abs(const SampledField& f) {
  double m = 0.0;
  for (const auto& v : f.values) m = std::max(m, std::abs(v));
  return m;
}

inline double sup_distance(const SampledField& f, const SampledField& g) {
  require_same_grid(f.grid, g.grid, "sup_distance");
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
  return m;
}

inline bool all_finite(const SampledField& f) {
  return std::all_of(f.values.begin(), f.values.end(), [](const complex& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

/// Largest magnitude on the outermost layer of nodes (any axis index 0 or N-1).
/// Transforms treat fields as periodic; a large value here means the field has
/// not decayed inside the box.
inline double boundary_magnitude(const SampledField& f) {
  const Grid& g = f.grid;
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = g.unflatten(i);
    const bool edge = std::any_of(idx.begin(), idx.end(),
                                  [&](int j) { return j == 0 || j == g.points - 1; });
    if (edge) m = std::max(m, std::abs(f[i]));
  }
  return m;
}

// Pairwise (tree) summation; fixed association order for a given length.
template <typename T>
T pairwise_sum(std::span<const T> xs) {
  if (xs.empty()) return T{};
  if (xs.size() <= 16) {
    T s{};
    for (const auto& x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// Quadrature of int f(x) conj(g(x)) dx on the common grid.
inline complex inner(const SampledField& f, const SampledField& g) {
  require_same_grid(f.grid, g.grid, "inner");
  std::vector<complex> prod(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * std::conj(g[i]);
  return pairwise_sum<complex>(prod) * f.grid.cell_volume();
}

/// Plain Riemann sum  int f dx  with the pairwise reduction order.
inline complex integrate(const SampledField& f) {
  return pairwise_sum<complex>(f.values) * f.grid.cell_volume();
}

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Unnormalised multi-dimensional DFT in place; sign = FFTW_FORWARD (-1) or
// FFTW_BACKWARD (+1). Buffers come from fftw_malloc so the plan, and therefore
// the rounding, does not depend on the caller's allocation alignment.
inline void dft_inplace(std::span<complex> data, std::span<const int> dims, int sign) {
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  if (total != data.size()) throw std::invalid_argument("dft_inplace: shape mismatch");
  if (total == 0) return;

  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
  if (!buf) throw std::bad_alloc();
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, sign, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < total; ++i) {
    buf[i][0] = data[i].real();
    buf[i][1] = data[i].imag();
  }
  fftw_execute(plan);
  for (std::size_t i = 0; i < total; ++i) data[i] = complex(buf[i][0], buf[i][1]);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
}

// Shared body of fourier / inverse_fourier. With x_j = -L + j h and
// xi_k = -K + k/(N h), K = 1/(2h):
//   exp(-+2 i pi x_j xi_k) = (-1)^(N/2) (-1)^j (-1)^k exp(-+2 i pi j k / N)
// per axis, so the transform is a DFT with checkerboard sign flips.
inline SampledField centered_transform(const SampledField& f, int sign) {
  const Grid& g = f.grid;
  SampledField out(g.dual());
  out.values = f.values;
  std::vector<int> dims(static_cast<std::size_t>(g.dim), g.points);

  auto checkerboard = [&](std::vector<complex>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto idx = g.unflatten(i);
      int parity = 0;
      for (int j : idx) parity += j;
      if (parity & 1) v[i] = -v[i];
    }
  };
  checkerboard(out.values);
  dft_inplace(out.values, dims, sign);
  checkerboard(out.values);

  double scale = g.cell_volume();
  if ((g.points / 2) % 2 != 0 && (g.dim % 2) != 0) scale = -scale;
  for (auto& v : out.values) v *= scale;
  return out;
}

}  // namespace detail

/// Continuous Fourier transform with the 2 pi convention, sampled on grid.dual().
inline SampledField fourier(const SampledField& f) {
  return detail::centered_transform(f, FFTW_FORWARD);
}

/// Inverse of fourier(): kernel exp(+2 i pi x.xi), volume weight of the
/// frequency grid. inverse_fourier(fourier(f)) == f up to rounding.
inline SampledField inverse_fourier(const SampledField& f) {
  return detail::centered_transform(f, FFTW_BACKWARD);
}

}  // namespace aw
