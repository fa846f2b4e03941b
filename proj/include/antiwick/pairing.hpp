#pragma once

// <T(A), u> = <sigma_Weyl(A), Phi> with S Phi = u: the anti-Wick symbol of A
// evaluated as a functional on test functions that the smoothing semigroup can
// be inverted on.

#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "antiwick/analytic.hpp"
#include "antiwick/core.hpp"
#include "antiwick/gsnorm.hpp"
#include "antiwick/heat.hpp"
#include "antiwick/quantize.hpp"

namespace aw {

/// Weyl symbol of A on `phase`. Coherent combinations are densified on the
/// doubled grid first; anti-Wick symbols are smoothed.
inline SampledField weyl_symbol(const OperatorRep& A, const Grid& phase) {
  return std::visit(
      [&](const auto& op) -> SampledField {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, DenseKernel>) {
          require_same_grid(op.grid, doubled_grid(phase), "weyl_symbol");
          return weyl_from_kernel(op);
        } else if constexpr (std::is_same_v<T, CoherentCombo>) {
          if (2 * op.n != phase.dim) throw std::invalid_argument("weyl_symbol: coherent combination dimension mismatch");
          return weyl_from_kernel(kernel_from_coherent(op, doubled_grid(phase)));
        } else {
          require_same_grid(op.symbol.grid, phase, "weyl_symbol");
          return smooth(op.symbol);
        }
      },
      A);
}

struct PairingParams {
  DesmoothMethod method = DesmoothMethod::complex_shift;
  double rel_threshold = 1e-12;  // fourier-regularized
  double strip_halfwidth = 3.0;  // complex-shift
  int y_nodes = 64;
  double flag_residual = 1e-4;
};

struct PairingResult {
  complex value{0.0, 0.0};
  DesmoothMethod method = DesmoothMethod::complex_shift;
  double residual = 0.0;
  double quadrature_error_estimate = 0.0;
  bool flagged = false;
};

namespace detail {

// Bilinear quadrature of sigma * Phi, with an error estimate from the same
// sum on every other node plus the mass left on the box boundary.
inline std::pair<complex, double> bilinear_with_estimate(const SampledField& sigma, const SampledField& phi) {
  const complex value = inner(sigma, conj(phi));
  const Grid& g = sigma.grid;
  SampledField prod(g);
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = sigma[i] * phi[i];
  std::vector<complex> coarse;
  for (std::size_t i = 0; i < prod.size(); ++i) {
    const auto idx = g.unflatten(i);
    bool even = true;
    for (int j : idx) even = even && (j % 2 == 0);
    if (even) coarse.push_back(prod[i]);
  }
  const complex vc = pairwise_sum<complex>(coarse) * g.cell_volume() * std::pow(2.0, g.dim);
  const double est = std::abs(value - vc) + boundary_magnitude(prod) * std::pow(2.0 * g.half_extent, g.dim);
  return {value, est};
}

inline PairingResult finish_pairing(const SampledField& sigma, const DesmoothReport& rep, const PairingParams& p) {
  PairingResult r;
  r.method = rep.method;
  r.residual = rep.residual;
  std::tie(r.value, r.quadrature_error_estimate) = bilinear_with_estimate(sigma, rep.result);
  r.flagged = !(rep.residual <= p.flag_residual);
  return r;
}

}  // namespace detail

/// Evaluates <T(A), u> on `phase`. Throws numerical_error when u lies outside
/// the strip space and the complex-shift method is requested; a large
/// desmoothing residual only sets `flagged`.
inline PairingResult antiwick_pair(const OperatorRep& A, const AnalyticGaussianSum& u, const Grid& phase,
                                   const PairingParams& p = {}) {
  if (u.dim() != phase.dim) throw std::invalid_argument("antiwick_pair: test function dimension mismatch");
  const SampledField sigma = weyl_symbol(A, phase);
  const DesmoothReport rep = p.method == DesmoothMethod::complex_shift
                                 ? desmooth_complex(u, phase, p.strip_halfwidth, p.y_nodes)
                                 : desmooth_fourier(sample(u, phase), p.rel_threshold);
  return detail::finish_pairing(sigma, rep, p);
}

/// Sampled test functions only admit the regularized Fourier inverse.
inline PairingResult antiwick_pair(const OperatorRep& A, const SampledField& u, const PairingParams& p = {}) {
  const SampledField sigma = weyl_symbol(A, u.grid);
  return detail::finish_pairing(sigma, desmooth_fourier(u, p.rel_threshold), p);
}

/// int F(X) u(X) dX on the grid of F.
inline complex antiwick_pair_reference(const SampledField& F, const AnalyticGaussianSum& u) {
  if (u.dim() != F.grid.dim) throw std::invalid_argument("antiwick_pair_reference: dimension mismatch");
  return inner(F, conj(sample(u, F.grid)));
}

}  // namespace aw
