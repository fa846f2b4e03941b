#pragma once

// Coherent states, anti-Wick operator assembly and the kernel <-> Weyl symbol
// transforms, for operators acting on functions of n = 1 or 2 variables.
//
// Layout conventions
//   * A phase-space grid has dimension 2n; flat indices list the n position
//     axes first, then the n frequency axes.
//   * Weyl transforms need the frequency axes to be the Fourier dual of the
//     position axes, i.e. N = 4 L^2, and work with kernels sampled on the
//     doubled grid (2N nodes over the same box) so that x +- t/2 and (x+y)/2
//     land on nodes.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <variant>
#include <vector>

#include "antiwick/core.hpp"
#include "antiwick/parallel.hpp"

namespace aw {

/// Kernel matrix K(x_u, x_v) on a position grid; (Af)(x_u) = sum_v K[u,v] f(x_v) h^n.
struct DenseKernel {
  Grid grid;
  std::vector<complex> matrix;

  DenseKernel() = default;
  explicit DenseKernel(const Grid& g) : grid(g), matrix(g.size() * g.size()) {}

  std::size_t rows() const { return grid.size(); }
  complex& at(std::size_t u, std::size_t v) { return matrix[u * rows() + v]; }
  const complex& at(std::size_t u, std::size_t v) const { return matrix[u * rows() + v]; }
};

struct CoherentTerm {
  complex c{1.0, 0.0};
  std::vector<double> X;  // (x, xi), length 2n
  std::vector<double> Y;
};

/// sum_j c_j |Psi_{X_j}><Psi_{Y_j}|
struct CoherentCombo {
  int n = 1;
  std::vector<CoherentTerm> terms;
};

/// Operator given by its anti-Wick symbol F sampled on a phase grid.
struct AntiWickFromSymbol {
  SampledField symbol;
};

using OperatorRep = std::variant<DenseKernel, CoherentCombo, AntiWickFromSymbol>;

/// Position grid on which kernels must be sampled for the Weyl transforms of
/// fields on `phase`.
inline Grid doubled_grid(const Grid& phase) {
  if (phase.dim % 2 != 0) throw std::invalid_argument("doubled_grid: phase grid must have even dimension");
  return Grid{phase.dim / 2, 2 * phase.points, phase.half_extent};
}

/// Phase grid matching a kernel sampled on a doubled grid.
inline Grid phase_grid_of(const Grid& kernel_grid) {
  if (kernel_grid.points % 4 != 0)
    throw std::invalid_argument("phase_grid_of: kernel grid is not a doubled grid (N not divisible by 4)");
  return Grid{2 * kernel_grid.dim, kernel_grid.points / 2, kernel_grid.half_extent};
}

/// The frequency axes of the phase grid coincide with the dual of its position axes.
inline bool is_self_dual(const Grid& phase) {
  const double dual_extent = phase.points / (4.0 * phase.half_extent);
  return std::abs(dual_extent - phase.half_extent) <= 1e-12 * phase.half_extent;
}

inline void require_self_dual(const Grid& phase, const char* where) {
  if (!is_self_dual(phase))
    throw std::invalid_argument(std::string(where) +
                                ": phase grid needs N = 4 L^2 so that frequency and position axes are dual, got " +
                                describe(phase));
}

namespace detail {

inline constexpr double kGaussWindow = 4.9;  // exp(-pi 4.9^2) ~ 1e-33

inline double psi0_axis(double s) { return std::pow(2.0, 0.25) * std::exp(-pi * s * s); }

// Strides for a row-major tensor with `n` axes of extent `extent`.
inline std::vector<std::size_t> strides(int n, std::size_t extent) {
  std::vector<std::size_t> s(static_cast<std::size_t>(n));
  std::size_t acc = 1;
  for (int a = n - 1; a >= 0; --a) {
    s[static_cast<std::size_t>(a)] = acc;
    acc *= extent;
  }
  return s;
}

inline std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace detail

/// Psi_X(u) = 2^{n/4} exp(-pi |u - x|^2) exp(2 i pi (u - x/2).xi), X = (x, xi).
inline SampledField coherent_state(std::span<const double> X, const Grid& g) {
  if (static_cast<int>(X.size()) != 2 * g.dim)
    throw std::invalid_argument("coherent_state: phase point must have 2n coordinates");
  const int n = g.dim;
  std::vector<std::vector<complex>> axis(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const double x = X[static_cast<std::size_t>(a)];
    const double xi = X[static_cast<std::size_t>(a + n)];
    auto& v = axis[static_cast<std::size_t>(a)];
    v.resize(static_cast<std::size_t>(g.points));
    for (int j = 0; j < g.points; ++j) {
      const double u = g.node(j);
      v[static_cast<std::size_t>(j)] = detail::psi0_axis(u - x) * std::polar(1.0, 2.0 * pi * (u - 0.5 * x) * xi);
    }
  }
  SampledField out(g);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto idx = g.unflatten(i);
    complex v = 1.0;
    for (int a = 0; a < n; ++a) v *= axis[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
    out[i] = v;
  }
  return out;
}

/// I / h^n on the grid.
inline DenseKernel identity_kernel(const Grid& g) {
  DenseKernel k(g);
  const double d = 1.0 / g.cell_volume();
  for (std::size_t u = 0; u < k.rows(); ++u) k.at(u, u) = d;
  return k;
}

/// matrix[u,v] = sum_j c_j Psi_{X_j}(x_u) conj(Psi_{Y_j}(x_v))
inline DenseKernel kernel_from_coherent(const CoherentCombo& c, const Grid& g) {
  if (c.n != g.dim) throw std::invalid_argument("kernel_from_coherent: dimension mismatch");
  DenseKernel k(g);
  const std::size_t M = k.rows();
  for (const auto& t : c.terms) {
    const auto left = coherent_state(t.X, g);
    const auto right = coherent_state(t.Y, g);
    for (std::size_t u = 0; u < M; ++u) {
      const complex lu = t.c * left[u];
      if (lu == 0.0) continue;
      for (std::size_t v = 0; v < M; ++v) k.at(u, v) += lu * std::conj(right[v]);
    }
  }
  return k;
}

/// Quadrature of  K(u, v) = int F(X) Psi_X(u) conj(Psi_X(v)) dX  over the
/// phase grid of F (no (2 pi)^{-n} factor: F = 1 gives the identity).
///
/// With Psi_X(u) conj(Psi_X(v)) = Psi_0(u-x) Psi_0(v-x) exp(2 i pi (u-v).xi),
/// the frequency sum is done once per (x, u-v) and the x sum per kernel entry.
/// The position grid must share the box of the phase grid and have an integer
/// multiple of its node count per axis.
inline DenseKernel assemble_antiwick(const AntiWickFromSymbol& F, const Grid& pos) {
  const Grid& ph = F.symbol.grid;
  const int n = pos.dim;
  if (ph.dim != 2 * n) throw std::invalid_argument("assemble_antiwick: symbol must live on a 2n-dimensional grid");
  if (std::abs(ph.half_extent - pos.half_extent) > 1e-12 * ph.half_extent)
    throw std::invalid_argument("assemble_antiwick: position and phase grids must cover the same box");
  if (pos.points % ph.points != 0)
    throw std::invalid_argument("assemble_antiwick: position node count must be a multiple of the phase node count");

  const std::size_t Np = static_cast<std::size_t>(ph.points);
  const std::size_t Nq = static_cast<std::size_t>(pos.points);
  const std::size_t span_m = 2 * Nq - 1;  // differences u - v in (-Nq, Nq)
  const double hp = ph.spacing();
  const double hq = pos.spacing();

  // E[m][k] = exp(2 i pi (m - Nq + 1) hq xi_k) * dxi
  std::vector<complex> E(span_m * Np);
  for (std::size_t m = 0; m < span_m; ++m) {
    const double t = (static_cast<double>(m) - static_cast<double>(Nq - 1)) * hq;
    for (std::size_t k = 0; k < Np; ++k) E[m * Np + k] = std::polar(hp, 2.0 * pi * t * ph.node(static_cast<int>(k)));
  }

  const std::size_t nx = detail::ipow(Np, n);    // phase position nodes
  const std::size_t nxi = detail::ipow(Np, n);   // phase frequency nodes
  const std::size_t ng = detail::ipow(span_m, n);

  // G[x][m] = sum_xi F(x, xi) exp(2 i pi t_m . xi) dxi^n, contracted axis by axis.
  std::vector<complex> G(nx * ng);
  parallel_for(0, nx, [&](std::size_t x) {
    std::vector<complex> cur(F.symbol.values.begin() + static_cast<std::ptrdiff_t>(x * nxi),
                             F.symbol.values.begin() + static_cast<std::ptrdiff_t>((x + 1) * nxi));
    // shape evolves from [Np]^n to [span_m]^n, contracting the leading axes one at a time
    std::vector<std::size_t> shape(static_cast<std::size_t>(n), Np);
    for (int a = 0; a < n; ++a) {
      std::size_t before = 1, after = 1;
      for (int b = 0; b < a; ++b) before *= shape[static_cast<std::size_t>(b)];
      for (int b = a + 1; b < n; ++b) after *= shape[static_cast<std::size_t>(b)];
      std::vector<complex> next(before * span_m * after);
      for (std::size_t i = 0; i < before; ++i)
        for (std::size_t m = 0; m < span_m; ++m)
          for (std::size_t j = 0; j < after; ++j) {
            complex s{0.0, 0.0};
            for (std::size_t k = 0; k < Np; ++k) s += E[m * Np + k] * cur[(i * Np + k) * after + j];
            next[(i * span_m + m) * after + j] = s;
          }
      cur.swap(next);
      shape[static_cast<std::size_t>(a)] = span_m;
    }
    std::copy(cur.begin(), cur.end(), G.begin() + static_cast<std::ptrdiff_t>(x * ng));
  });

  // Per-axis Psi_0(y_u - x_j) tables.
  std::vector<double> w(Nq * Np);
  for (std::size_t u = 0; u < Nq; ++u)
    for (std::size_t j = 0; j < Np; ++j)
      w[u * Np + j] = detail::psi0_axis(pos.node(static_cast<int>(u)) - ph.node(static_cast<int>(j)));

  DenseKernel K(pos);
  const std::size_t M = K.rows();
  const double dx = std::pow(hp, n);
  const auto mstr = detail::strides(n, span_m);
  const auto un = static_cast<std::size_t>(n);
  std::vector<std::size_t> vidx(M * un), xidx(nx * un);
  for (std::size_t v = 0; v < M; ++v) {
    const auto vi = pos.unflatten(v);
    for (std::size_t a = 0; a < un; ++a) vidx[v * un + a] = static_cast<std::size_t>(vi[a]);
  }
  for (std::size_t x = 0; x < nx; ++x) {
    std::size_t rem = x;
    for (int a = n - 1; a >= 0; --a) {
      xidx[x * un + static_cast<std::size_t>(a)] = rem % Np;
      rem /= Np;
    }
  }
  // Psi_0 factors below exp(-pi kGaussWindow^2) are skipped.
  auto near = [&](std::size_t q, std::size_t j) {
    return std::abs(pos.node(static_cast<int>(q)) - ph.node(static_cast<int>(j))) <= detail::kGaussWindow;
  };
  parallel_for(0, M, [&](std::size_t u) {
    const std::size_t* ui = &vidx[u * un];
    for (std::size_t x = 0; x < nx; ++x) {
      const std::size_t* xj = &xidx[x * un];
      double wu = dx;
      bool inside = true;
      for (std::size_t a = 0; a < un; ++a) {
        inside = inside && near(ui[a], xj[a]);
        wu *= w[ui[a] * Np + xj[a]];
      }
      if (!inside) continue;
      const complex* Gx = G.data() + x * ng;
      for (std::size_t v = 0; v < M; ++v) {
        const std::size_t* vi = &vidx[v * un];
        double wv = wu;
        std::size_t moff = 0;
        bool vin = true;
        for (std::size_t a = 0; a < un && vin; ++a) {
          vin = near(vi[a], xj[a]);
          wv *= w[vi[a] * Np + xj[a]];
          moff += (ui[a] + (Nq - 1) - vi[a]) * mstr[a];
        }
        if (vin) K.at(u, v) += wv * Gx[moff];
      }
    }
  });
  return K;
}

/// sigma(x, xi) = int exp(-2 i pi t.xi) K(x + t/2, x - t/2) dt, for K sampled on
/// the doubled grid of the returned phase grid. Kernel entries outside the box
/// count as zero.
inline SampledField weyl_from_kernel(const DenseKernel& K) {
  const Grid& kg = K.grid;
  if (kg.points % 4 != 0) throw std::invalid_argument("weyl_from_kernel: kernel not on a doubled grid");
  const Grid ph = phase_grid_of(kg);
  require_self_dual(ph, "weyl_from_kernel");
  const int n = kg.dim;
  const int N = ph.points;
  const Grid tgrid{n, N, ph.half_extent};
  const std::size_t nx = tgrid.size();

  SampledField sigma(ph);
  parallel_for(0, nx, [&](std::size_t x) {
    const auto j = tgrid.unflatten(x);
    SampledField slice(tgrid);
    for (std::size_t m = 0; m < nx; ++m) {
      const auto mi = tgrid.unflatten(m);
      std::vector<int> ap(static_cast<std::size_t>(n)), am(static_cast<std::size_t>(n));
      bool inside = true;
      for (int a = 0; a < n; ++a) {
        const int off = mi[static_cast<std::size_t>(a)] - N / 2;
        ap[static_cast<std::size_t>(a)] = 2 * j[static_cast<std::size_t>(a)] + off;
        am[static_cast<std::size_t>(a)] = 2 * j[static_cast<std::size_t>(a)] - off;
        if (ap[static_cast<std::size_t>(a)] < 0 || ap[static_cast<std::size_t>(a)] >= kg.points ||
            am[static_cast<std::size_t>(a)] < 0 || am[static_cast<std::size_t>(a)] >= kg.points)
          inside = false;
      }
      if (inside) slice[m] = K.at(kg.flatten(ap), kg.flatten(am));
    }
    const auto spec = fourier(slice);
    std::copy(spec.values.begin(), spec.values.end(),
              sigma.values.begin() + static_cast<std::ptrdiff_t>(x * nx));
  });
  return sigma;
}

/// K(y_a, y_b) = int exp(2 i pi (y_a - y_b).xi) sigma((y_a + y_b)/2, xi) dxi on
/// the doubled grid. Midpoints between phase nodes use trigonometric
/// interpolation of sigma in x; separations |y_a - y_b| >= L per axis, which the
/// frequency grid cannot resolve, are set to zero. weyl_from_kernel of the
/// result returns sigma exactly.
inline DenseKernel kernel_from_weyl(const SampledField& sigma) {
  const Grid& ph = sigma.grid;
  require_self_dual(ph, "kernel_from_weyl");
  const int n = ph.dim / 2;
  const int N = ph.points;
  const double L = ph.half_extent;
  const Grid xgrid{n, N, L};                 // phase position axes
  const Grid fine{n, 4 * N, L};              // quarter-step midpoints
  const Grid kg{n, 2 * N, L};
  const std::size_t nx = xgrid.size();
  const std::size_t nfine = fine.size();

  // sigma_up[s][k]: trigonometric interpolation along x onto the quarter grid.
  std::vector<complex> up(nfine * nx);
  const Grid fine_dual = fine.dual();
  parallel_for(0, nx, [&](std::size_t k) {
    SampledField col(xgrid);
    for (std::size_t x = 0; x < nx; ++x) col[x] = sigma[x * nx + k];
    const auto spec = fourier(col);
    SampledField padded(fine_dual);
    for (std::size_t q = 0; q < nx; ++q) {
      auto qi = xgrid.unflatten(q);
      for (auto& c : qi) c += 3 * N / 2;
      padded[fine_dual.flatten(qi)] = spec[q];
    }
    const auto interp = inverse_fourier(padded);
    for (std::size_t s = 0; s < nfine; ++s) up[s * nx + k] = interp[s];
  });

  // For each midpoint s = a + b: H_s(d) = sum_k exp(2 i pi d (h/2) xi_k) sigma_up(s, k) dxi^n,
  // a zero-padded inverse DFT of length 2N per axis times exp(-i pi d / 2).
  DenseKernel K(kg);
  const double dxi = std::pow(ph.spacing(), n);
  const std::vector<int> dims(static_cast<std::size_t>(n), 2 * N);
  const Grid dgrid{n, 2 * N, L};
  parallel_for(0, nfine, [&](std::size_t s) {
    const auto si = fine.unflatten(s);
    // skip midpoints that no (a, b) pair in range reaches
    for (int a = 0; a < n; ++a)
      if (si[static_cast<std::size_t>(a)] > 4 * N - 2) return;
    std::vector<complex> buf(dgrid.size());
    for (std::size_t k = 0; k < nx; ++k) {
      const auto ki = xgrid.unflatten(k);
      buf[dgrid.flatten(ki)] = up[s * nx + k];
    }
    detail::dft_inplace(buf, dims, FFTW_BACKWARD);
    // enumerate d with d_a = s_a mod 2, -N <= d_a < N, a = (s+d)/2, b = (s-d)/2 in range
    std::vector<int> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      const int sa = si[static_cast<std::size_t>(a)];
      int dlo = std::max(-N, sa - 2 * (2 * N - 1));  // b = (s-d)/2 <= 2N-1
      dlo = std::max(dlo, -sa);                      // b >= 0 ... a >= 0 via d >= -s
      int dhi = std::min(N - 1, sa);                 // b >= 0
      dhi = std::min(dhi, 2 * (2 * N - 1) - sa);     // a <= 2N-1
      if (((dlo - sa) % 2 + 2) % 2 != 0) ++dlo;
      lo[static_cast<std::size_t>(a)] = dlo;
      hi[static_cast<std::size_t>(a)] = dhi;
      if (dlo > dhi) return;
    }
    std::vector<int> d = lo;
    while (true) {
      std::vector<int> ai(static_cast<std::size_t>(n)), bi(static_cast<std::size_t>(n)), di(static_cast<std::size_t>(n));
      double phase_turns = 0.0;
      for (int a = 0; a < n; ++a) {
        const int sa = si[static_cast<std::size_t>(a)];
        const int da = d[static_cast<std::size_t>(a)];
        ai[static_cast<std::size_t>(a)] = (sa + da) / 2;
        bi[static_cast<std::size_t>(a)] = (sa - da) / 2;
        di[static_cast<std::size_t>(a)] = ((da % (2 * N)) + 2 * N) % (2 * N);
        phase_turns -= 0.25 * da;
      }
      // exp(-i pi d/2) = exp(2 i pi * (-d/4)); reduce the turn count exactly
      const double frac = phase_turns - std::floor(phase_turns);
      const complex ph4 = std::polar(1.0, 2.0 * pi * frac);
      K.at(kg.flatten(ai), kg.flatten(bi)) = ph4 * dxi * buf[dgrid.flatten(di)];
      int a = n - 1;
      for (; a >= 0; --a) {
        d[static_cast<std::size_t>(a)] += 2;
        if (d[static_cast<std::size_t>(a)] <= hi[static_cast<std::size_t>(a)]) break;
        d[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)];
      }
      if (a < 0) break;
    }
  });
  return K;
}

/// (Af)(x_u) = sum_v K[u, v] f(x_v) h^n
inline SampledField apply(const DenseKernel& K, const SampledField& f) {
  require_same_grid(K.grid, f.grid, "apply");
  SampledField out(f.grid);
  const std::size_t M = K.rows();
  const double hv = f.grid.cell_volume();
  parallel_for(0, M, [&](std::size_t u) {
    std::vector<complex> row(M);
    for (std::size_t v = 0; v < M; ++v) row[v] = K.at(u, v) * f[v];
    out[u] = pairwise_sum<complex>(row) * hv;
  });
  return out;
}

/// sum_j c_j Psi_{X_j} <f, Psi_{Y_j}>, without forming a kernel.
inline SampledField apply(const CoherentCombo& c, const SampledField& f) {
  if (c.n != f.grid.dim) throw std::invalid_argument("apply: coherent combination dimension mismatch");
  SampledField out(f.grid);
  for (const auto& t : c.terms) {
    const complex coef = t.c * inner(f, coherent_state(t.Y, f.grid));
    const auto psi = coherent_state(t.X, f.grid);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += coef * psi[i];
  }
  return out;
}

inline SampledField apply(const AntiWickFromSymbol& F, const SampledField& f) {
  return apply(assemble_antiwick(F, f.grid), f);
}

inline SampledField apply(const OperatorRep& A, const SampledField& f) {
  return std::visit([&](const auto& op) { return apply(op, f); }, A);
}

}  // namespace aw
