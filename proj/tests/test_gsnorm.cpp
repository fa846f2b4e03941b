#include <gtest/gtest.h>

#include <cmath>

#include "antiwick/gsnorm.hpp"
#include "antiwick/heat.hpp"

using namespace aw;

namespace {

// Independent oracle for exp(-pi x^2): d^b exp(-a x^2) = (-sqrt a)^b H_b(sqrt(a) x) exp(-a x^2)
// with physicists' Hermite polynomials from their three-term recurrence,
// scanned on a fine grid.
double oracle_A(double lambda, double mu, int orders) {
  const double a = pi;
  const int M = 40001;
  const double R = 8.0, dx = 2.0 * R / (M - 1);
  double best = 0.0;
  for (int b = 0; b <= orders; ++b) {
    for (int al = 0; al <= orders; ++al) {
      if (al + b == 0) continue;
      double lsup = -1e300;
      for (int i = 0; i < M; ++i) {
        const double x = -R + i * dx, t = std::sqrt(a) * x;
        double h0 = 1.0, h1 = 2.0 * t;
        double hb = b == 0 ? h0 : h1;
        for (int k = 1; k < b; ++k) {
          const double h2 = 2.0 * t * h1 - 2.0 * k * h0;
          h0 = h1;
          h1 = h2;
          hb = h2;
        }
        if (hb == 0.0 || (al > 0 && x == 0.0)) continue;
        const double l = al * std::log(std::abs(x)) + 0.5 * b * std::log(a) + std::log(std::abs(hb)) - a * x * x;
        lsup = std::max(lsup, l);
      }
      const double lfac = lambda * std::lgamma(al + 1.0) + mu * std::lgamma(b + 1.0);
      best = std::max(best, std::exp((lsup - lfac) / (al + b)));
    }
  }
  return best;
}

}  // namespace

TEST(Weights, ClosedForms) {
  EXPECT_DOUBLE_EQ(phi_weight(1.0, WeightParams{0.5, 0.5, 1.0}), 0.25);
  EXPECT_DOUBLE_EQ(psi_weight(1.0, WeightParams{0.5, 0.25, 1.0}), 1.5);
  EXPECT_EQ(phi_weight(0.0, WeightParams{0.7, 0.3, 2.0}), 0.0);
  const std::vector<double> x{1.0, -2.0};
  EXPECT_NEAR(phi_weight(x, WeightParams{1.0, 0.5, 2.0}), 0.5 * (0.5 + 1.0), 1e-15);
}

TEST(Weights, Validation) {
  EXPECT_THROW(phi_weight(1.0, WeightParams{0.0, 0.5, 1.0}), std::invalid_argument);
  EXPECT_THROW(psi_weight(1.0, WeightParams{0.5, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(psi_weight(1.0, WeightParams{0.5, 0.5, -1.0}), std::invalid_argument);
}

TEST(GsConstant, MatchesHermiteOracle) {
  const auto u = AnalyticGaussianSum::gaussian(1, pi);
  const auto est = gs_constant(u, 0.5, 0.5, 10, 10);
  EXPECT_NEAR(est.A_est, oracle_A(0.5, 0.5, 10), 1e-6 * est.A_est);
}

TEST(GsConstant, StabilisesWithOrder) {
  const auto u = AnalyticGaussianSum::gaussian(1, pi);
  const auto a10 = gs_constant(u, 0.5, 0.5, 10, 10);
  const auto a20 = gs_constant(u, 0.5, 0.5, 20, 20);
  ASSERT_TRUE(std::isfinite(a10.A_est));
  EXPECT_LT(std::abs(a20.A_est - a10.A_est), 0.25 * a10.A_est);
  EXPECT_LT(a20.drift_since(10), 0.25);
  // recorded per range and nondecreasing
  for (std::size_t r = 1; r < a20.A_by_order.size(); ++r) EXPECT_GE(a20.A_by_order[r], a20.A_by_order[r - 1]);
  EXPECT_DOUBLE_EQ(a20.A_by_order.back(), a20.A_est);
  EXPECT_NEAR(a20.A_by_order[9], a10.A_est, 1e-12 * a10.A_est);
}

TEST(GsConstant, ConstantIsUnbounded) {
  const auto one = AnalyticGaussianSum::gaussian(1, 0.0);
  const auto est = gs_constant(one, 0.5, 0.5, 4, 4);
  EXPECT_TRUE(est.unbounded());
}

TEST(GsConstant, MonotoneInExponents) {
  const auto u = AnalyticGaussianSum::gaussian(1, pi);
  const double half = gs_constant(u, 0.5, 0.5, 10, 10).A_est;
  EXPECT_LE(gs_constant(u, 1.0, 1.0, 10, 10).A_est, half);
  EXPECT_LE(gs_constant(u, 1.0, 0.5, 10, 10).A_est, half);
  EXPECT_LE(gs_constant(u, 0.5, 0.7, 10, 10).A_est, half);
}

TEST(GsConstant, TensorProductFactorises) {
  // for a product the two-axis probe contains the one-axis probes
  const auto u1 = AnalyticGaussianSum::gaussian(1, pi);
  const auto u2 = AnalyticGaussianSum::gaussian(2, pi);
  const double a1 = gs_constant(u1, 0.5, 0.5, 6, 6).A_est;
  const double a2 = gs_constant(u2, 0.5, 0.5, 6, 6).A_est;
  EXPECT_GE(a2, a1 * (1.0 - 1e-12));
  EXPECT_THROW(gs_constant(u2 + AnalyticGaussianSum::gaussian(2, 1.0), 0.5, 0.5, 4, 4), std::invalid_argument);
  EXPECT_THROW(gs_constant(u1, 0.5, 0.5, 41, 2), std::invalid_argument);
}

TEST(HoloBound, GaussianMemberIsStable) {
  const auto u = AnalyticGaussianSum::gaussian(1, pi);
  const auto est = gs_constant(u, 0.5, 0.45, 10, 10);
  const WeightParams w{0.5, 0.45, est.A_est};
  const auto h = holo_bound_check(u, w, {-3.0, 3.0}, {-3.0, 3.0});
  EXPECT_TRUE(h.ok);
  EXPECT_NEAR(h.K_est, 1.0, 1e-12);  // attained at the origin
}

TEST(HoloBound, GrowingGaussianFails) {
  const auto u = AnalyticGaussianSum::gaussian(1, -1.0);
  const auto h = holo_bound_check(u, WeightParams{0.5, 0.45, 2.0}, {-3.0, 3.0}, {-1.0, 1.0});
  EXPECT_FALSE(h.ok);
}

TEST(HoloBound, RealSliceMatchesOneDimensionalScan) {
  const auto u = AnalyticGaussianSum::from_axis(AxisFactor::gaussian(2.0, 0.3, 1.0, 2));
  const WeightParams w{0.5, 0.45, 1.5};
  const auto h = holo_bound_check(u, w, {-4.0, 4.0}, {0.0, 0.0}, 801);
  double best = 0.0;
  for (int i = 0; i <= 800; ++i) {
    const double x = -4.0 + 8.0 * i / 800.0;
    best = std::max(best, std::exp(phi_weight(x, w)) * std::abs(u(complex(x, 0.0))));
  }
  EXPECT_NEAR(h.K_est, best, 1e-12 * best);
}

TEST(ESpace, StandardGaussianClosedForm) {
  // int exp(-pi x^2) dx * int exp(-pi y^2) dy = 1
  const auto u = AnalyticGaussianSum::gaussian(1, pi);
  const Grid g{1, 256, 8.0};
  const auto e3 = e_space_norm(u, 0, 3.0, g);
  const auto e4 = e_space_norm(u, 0, 4.0, g);
  EXPECT_FALSE(e3.divergent);
  EXPECT_NEAR(e3.value, 1.0, 1e-10);
  EXPECT_LT(std::abs(e3.value - e4.value), 0.01 * e4.value);
  EXPECT_LT(e3.tail_bound, 1e-10);
  EXPECT_GT(e3.tail_bound, 0.0);
}

TEST(ESpace, DivergenceThreshold) {
  const Grid g{1, 128, 6.0};
  EXPECT_TRUE(e_space_norm(AnalyticGaussianSum::gaussian(1, 2.0 * pi + 0.1), 0, 3.0, g).divergent);
  EXPECT_TRUE(e_space_norm(AnalyticGaussianSum::gaussian(1, -0.5), 0, 3.0, g).divergent);
  for (double a : {0.5, 2.0, 6.0}) {
    const auto e = e_space_norm(AnalyticGaussianSum::gaussian(1, a), 2, 3.0, g);
    EXPECT_FALSE(e.divergent);
    EXPECT_TRUE(std::isfinite(e.value));
  }
  EXPECT_EQ(e_space_norm(AnalyticGaussianSum(1), 0, 3.0, g).value, 0.0);
}

TEST(ESpace, MultiDimensionalIsUpperBound) {
  const Grid g{2, 64, 5.0};
  const auto e = e_space_norm(AnalyticGaussianSum::gaussian(2, pi), 0, 3.0, g);
  EXPECT_TRUE(e.upper_bound);
  EXPECT_NEAR(e.value, 1.0, 1e-8);  // the bound is exact for one product
}

TEST(Hermite, LowOrders) {
  EXPECT_NEAR(hermite_sup(0), 1.0, 1e-12);
  EXPECT_NEAR(hermite_bound(0), 2.2390, 1e-4);
  EXPECT_NEAR(hermite_bound_margin(0), hermite_bound(0), 1e-10);
  EXPECT_NEAR(hermite_sup(1), std::exp(-0.5), 1e-12);
  EXPECT_GT(hermite_bound_margin(1), 1.0);
}

TEST(Hermite, MarginsUpToSixty) {
  const auto scan = hermite_scan(60);
  for (int m = 0; m <= 60; ++m) EXPECT_GE(scan.margin(m), 1.0) << "m=" << m;
}

TEST(Hermite, NormsAgainstClosedForms) {
  const auto scan = hermite_scan(4);
  EXPECT_NEAR(scan.scaled_norm_sq[0], std::sqrt(pi), 1e-10);
  EXPECT_NEAR(scan.scaled_norm_sq[1], std::sqrt(pi) / 2.0, 1e-10);
  // f_2 = (x^2 - 1) e^{-x^2/2}: int = 3 sqrt(pi)/4, divided by 2!
  EXPECT_NEAR(scan.scaled_norm_sq[2], 3.0 * std::sqrt(pi) / 8.0, 1e-10);
}

TEST(ProofChain, SlackNonNegative) {
  for (double nu : {0.3, 0.55, 0.9}) {
    for (int i = 0; i <= 60; ++i) {
      const double x = std::pow(10.0, -3.0 + 6.0 * i / 60.0);
      const auto s = proof_chain_slack(x, nu);
      EXPECT_GE(s.sup_ratio, 0.0) << x;
      EXPECT_GE(s.series, 0.0) << x << " nu=" << nu;
    }
  }
}

TEST(Gevrey, GaussianIsHalf) {
  const auto e = gevrey_order_estimate(AnalyticGaussianSum::gaussian(1, 0.25), 40);
  EXPECT_FALSE(e.degenerate);
  EXPECT_LE(e.s_est, 0.6);
  EXPECT_GT(e.s_est, 0.4);
  EXPECT_LT(e.fit_residual, 0.05);
}

TEST(Gevrey, ScaleInvariantSlope) {
  const auto u = AnalyticGaussianSum::gaussian(1, 1.3);
  const auto a = gevrey_order_estimate(u, 30);
  const auto b = gevrey_order_estimate(u.scaled(17.0), 30);
  EXPECT_NEAR(a.s_est, b.s_est, 1e-9);
  EXPECT_NEAR(b.K_est / a.K_est, 17.0, 1e-6);
}

TEST(Gevrey, SmoothedSumsAreHalf) {
  const auto f = AnalyticGaussianSum::from_axis(AxisFactor({{1.0, 0, 3.0, 0.5}, {0.5, 2, 1.0, -1.0}}));
  const auto e = gevrey_order_estimate(smooth_analytic(f), 40);
  EXPECT_LE(e.s_est, 0.6);
  EXPECT_LT(e.fit_residual, 0.05);
}

TEST(Gevrey, PolynomialsAreDegenerate) {
  EXPECT_TRUE(gevrey_order_estimate(AnalyticGaussianSum::gaussian(1, 0.0), 10).degenerate);
  EXPECT_TRUE(gevrey_order_estimate(AnalyticGaussianSum::from_axis(AxisFactor({{1.0, 3, 0.0, 0.0}})), 10).degenerate);
  EXPECT_THROW(gevrey_order_estimate(AnalyticGaussianSum::gaussian(1, 1.0), 61), std::invalid_argument);
}
