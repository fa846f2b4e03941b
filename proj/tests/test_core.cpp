#include <gtest/gtest.h>

#include <cmath>

#include "antiwick/analytic.hpp"
#include "antiwick/core.hpp"

using namespace aw;

namespace {

SampledField gaussian_field(const Grid& g, double a, double shift = 0.0) {
  return sample(AnalyticGaussianSum::gaussian(g.dim, a, std::vector<double>(static_cast<std::size_t>(g.dim), shift)), g);
}

}  // namespace

TEST(Grid, NodesAndDual) {
  const Grid g = make_grid(1, 256, 8.0);
  EXPECT_DOUBLE_EQ(g.spacing(), 1.0 / 16.0);
  EXPECT_DOUBLE_EQ(g.node(0), -8.0);
  EXPECT_DOUBLE_EQ(g.node(128), 0.0);
  const Grid d = g.dual();
  EXPECT_DOUBLE_EQ(d.half_extent, 8.0);
  EXPECT_DOUBLE_EQ(d.spacing(), 1.0 / 16.0);
}

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(make_grid(3, 64, 1.0), std::invalid_argument);
  EXPECT_THROW(make_grid(1, 63, 1.0), std::invalid_argument);
  EXPECT_THROW(make_grid(1, 4, 1.0), std::invalid_argument);
  EXPECT_THROW(make_grid(1, 64, -1.0), std::invalid_argument);
}

TEST(Grid, FlattenRoundTrip) {
  const Grid g{2, 8, 1.0};
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.flatten(g.unflatten(i)), i);
  EXPECT_EQ(g.unflatten(9)[0], 1);
  EXPECT_EQ(g.unflatten(9)[1], 1);
}

// exp(-pi x^2) is its own transform under the 2 pi convention.
TEST(Fourier, StandardGaussianIsFixed) {
  // the dual box (half extent N / 4L) must also hold the Gaussian
  for (auto [N, L] : {std::pair{64, 4.0}, std::pair{256, 8.0}, std::pair{250, 8.0}}) {
    const Grid g{1, N, L};
    const auto f = gaussian_field(g, pi);
    const auto F = fourier(f);
    const auto expect = gaussian_field(F.grid, pi);
    EXPECT_LT(sup_distance(F, expect), 1e-12) << "N=" << N;
  }
}

TEST(Fourier, WidthAndShift) {
  const Grid g{1, 256, 8.0};
  const double a = 3.0, b = 0.75;
  const auto F = fourier(gaussian_field(g, a, b));
  double err = 0.0;
  for (int k = 0; k < F.grid.points; ++k) {
    const double xi = F.grid.node(k);
    const complex expect = std::sqrt(pi / a) * std::exp(-pi * pi * xi * xi / a) * std::polar(1.0, -2.0 * pi * b * xi);
    err = std::max(err, std::abs(F[static_cast<std::size_t>(k)] - expect));
  }
  EXPECT_LT(err, 1e-12);
}

TEST(Fourier, InverseRoundTripTwoDimensional) {
  const Grid g{2, 32, 3.0};
  SampledField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = complex(std::sin(0.3 * i), std::cos(0.7 * i));
  const auto back = inverse_fourier(fourier(f));
  EXPECT_TRUE(same_grid(back.grid, g));
  EXPECT_LT(sup_distance(back, f), 1e-12);
}

TEST(Fourier, PlancherelAndOddHalfCount) {
  // N/2 odd exercises the sign correction
  const Grid g{1, 50, 5.0};
  const auto f = gaussian_field(g, 2.0, 0.3);
  const auto F = fourier(f);
  EXPECT_NEAR(std::abs(inner(f, f) - inner(F, F)), 0.0, 1e-12);
  const complex at0 = F[25];
  EXPECT_NEAR(at0.real(), std::sqrt(pi / 2.0), 1e-12);
}

TEST(Reductions, InnerIsSesquilinear) {
  const Grid g{1, 128, 6.0};
  const auto f = gaussian_field(g, pi);
  SampledField if_ = complex(0.0, 1.0) * f;
  EXPECT_NEAR(std::abs(inner(if_, f) - complex(0.0, 1.0) * inner(f, f)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(inner(f, if_) + complex(0.0, 1.0) * inner(f, f)), 0.0, 1e-14);
  EXPECT_NEAR(inner(f, f).real(), std::sqrt(0.5), 1e-12);
}

TEST(Reductions, PairwiseSumIsOrderFixed) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + i);
  const double a = pairwise_sum<double>(v);
  const double b = pairwise_sum<double>(v);
  EXPECT_EQ(a, b);
  EXPECT_NEAR(a, 7.485470860550345, 1e-12);
}

TEST(Fields, BoundaryAndFinite) {
  const Grid g{2, 16, 2.0};
  SampledField f(g);
  EXPECT_EQ(boundary_magnitude(f), 0.0);
  f[0] = 3.0;
  EXPECT_EQ(boundary_magnitude(f), 3.0);
  EXPECT_TRUE(all_finite(f));
  f[5] = complex(std::nan(""), 0.0);
  EXPECT_FALSE(all_finite(f));
}

TEST(Analytic, DerivativeMatchesFiniteDifference) {
  const auto f = AxisFactor({{1.0, 2, 1.3, 0.4}, {complex(0.0, 2.0), 0, 0.7, -1.0}});
  const auto df = f.derivative();
  for (double x : {-1.7, -0.2, 0.5, 2.1}) {
    const double h = 1e-5;
    const complex fd = (f(x + h) - f(x - h)) / (2.0 * h);
    EXPECT_NEAR(std::abs(fd - df(x)), 0.0, 1e-8);
  }
}

TEST(Analytic, TimesCoordinateAndLogAbs) {
  const auto f = AxisFactor::gaussian(2.0, 0.5, 1.5);
  const auto zf = f.times_coordinate();
  const complex z(0.3, -0.8);
  EXPECT_NEAR(std::abs(zf(z) - z * f(z)), 0.0, 1e-14);
  EXPECT_NEAR(f.log_abs(z), std::log(std::abs(f(z))), 1e-13);
  // far out the direct value underflows but the log form does not
  EXPECT_NEAR(f.log_abs(40.0), std::log(1.5) - 2.0 * 39.5 * 39.5, 1e-9);
}

TEST(Analytic, StripOverflowIsRejected) {
  const auto u = AnalyticGaussianSum::gaussian(1, 2.0);
  const Grid g{1, 64, 4.0};
  const double y = 30.0;
  EXPECT_THROW(sample(u, g, std::span<const double>(&y, 1)), numerical_error);
  // with the strip weight folded in the same point is fine
  EXPECT_NO_THROW(sample_weighted(u, g, std::span<const double>(&y, 1), -2.0 * pi * y * y));
}

TEST(Analytic, ZeroFunctionAndMerging) {
  AnalyticGaussianSum z(2);
  EXPECT_TRUE(z.empty());
  const auto f = AxisFactor({{1.0, 0, 1.0, 0.0}, {-1.0, 0, 1.0, 0.0}});
  EXPECT_TRUE(f.empty());
}
