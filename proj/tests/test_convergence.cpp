#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "moebius/convergence.hpp"

using namespace moebius;

namespace {

const double kR = 18 / (2 * std::numbers::pi);

SweepResult synthetic(double power, double scale) {
  SweepResult s;
  s.K = 1;
  s.N = 1;
  for (double a : geometric_grid(0.01, 1.0, 9)) {
    SweepPoint p;
    p.a = a;
    p.effective = {1.0 + scale * std::pow(a, power)};
    p.galerkin = {1.0};
    p.ratio = {scale * std::pow(a, power - 2)};
    s.points.push_back(p);
  }
  return s;
}

}  // namespace

TEST(Convergence, SyntheticRateIsRecovered) {
  EXPECT_NEAR(fit_rate(synthetic(3.0, 0.5), 1, 0.0, 1.0), 3.0, 1e-6);
  // slope is invariant under rescaling the differences
  EXPECT_NEAR(fit_rate(synthetic(3.0, 7.0), 1, 0.0, 1.0), fit_rate(synthetic(3.0, 0.5), 1, 0.0, 1.0), 1e-9);
  EXPECT_NEAR(log_log_slope({1, 2, 4, 8}, {3, 12, 48, 192}), 2.0, 1e-12);
}

TEST(Convergence, FitNeedsFourPoints) {
  EXPECT_THROW(fit_rate(synthetic(2.0, 1.0), 1, 0.5, 1.0), input_error);
  EXPECT_THROW(log_log_slope({1, 2, 3}, {1, 2, 3}), input_error);
  EXPECT_THROW(fit_rate(synthetic(2.0, 1.0), 2, 0.0, 1.0), input_error);
}

TEST(Convergence, Grids) {
  const auto g = geometric_grid(0.05, 0.5, 5);
  EXPECT_DOUBLE_EQ(g.front(), 0.05);
  EXPECT_DOUBLE_EQ(g.back(), 0.5);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], std::pow(10.0, 0.25), 1e-12);
  const auto u = uniform_grid(0.01, 1.5, 150);
  EXPECT_EQ(u.size(), 150u);
  EXPECT_DOUBLE_EQ(u.back(), 1.5);
  EXPECT_THROW(geometric_grid(0.0, 1.0, 4), input_error);
  EXPECT_THROW(uniform_grid(1.0, 0.5, 4), input_error);
}

TEST(Convergence, SweepValidatesInput) {
  EXPECT_THROW(eigenvalue_sweep(kR, {0.1, 0.2}, 30, 20), input_error);
  EXPECT_THROW(eigenvalue_sweep(kR, {0.1, 2.0}, 5, 20), input_error);
  EXPECT_THROW(eigenvalue_sweep(kR, {0.2, 0.1}, 5, 20), input_error);
  EXPECT_THROW(eigenvalue_sweep(kR, {}, 5, 20), input_error);
  EXPECT_THROW(eigenvector_sweep(kR, {0.1, 1.0}, 5, 6), capacity_error);
}

TEST(Convergence, ThreadCountDoesNotChangeResults) {
  const auto g = uniform_grid(0.05, 1.5, 7);
  SweepOptions one, many;
  many.threads = 3;
  const auto a = eigenvalue_sweep(kR, g, 8, 40, one), b = eigenvalue_sweep(kR, g, 8, 40, many);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(a.points[i].a, b.points[i].a);
    EXPECT_EQ(a.points[i].galerkin, b.points[i].galerkin);
    EXPECT_EQ(a.points[i].ratio, b.points[i].ratio);
  }
}

TEST(Convergence, EffectiveOperatorOracle) {
  SweepOptions o;
  o.geometry = GeometryMode::flat_with_Veff;
  const auto g = geometric_grid(0.01, 1.5, 5);
  const auto vec = eigenvector_sweep(kR, g, 5, 72, o);
  for (const auto& pt : vec.points)
    for (double d : pt.distance) EXPECT_LT(d, 1e-9) << "a=" << pt.a;
  const auto val = eigenvalue_sweep(kR, g, 20, 72, o);
  for (const auto& pt : val.points)
    for (std::size_t n = 0; n < 20; ++n) EXPECT_LT(std::abs(pt.effective[n] - pt.galerkin[n]), 1e-9 * pt.effective[n]);
}

TEST(Convergence, SubspaceDistanceIgnoresSignAndRotation) {
  std::vector<double> x1 = {1, 0, 0}, x2 = {0, 1, 0};
  std::vector<double> y1 = {0, -1, 0}, y2 = {1, 0, 0};
  std::vector<std::span<const double>> X = {x1, x2};
  EXPECT_NEAR(detail::subspace_distance(X, {y1, y2}, {0, 0}), 0.0, 1e-15);
  std::vector<double> neg = {-1, 0, 0};
  std::vector<std::span<const double>> X1 = {neg};
  EXPECT_NEAR(detail::subspace_distance(X1, {x1}, {0}), 0.0, 1e-15);
  // a unit vector with 1e-6 of its norm outside the basis
  const double c = std::sqrt(1 - 1e-6);
  std::vector<double> yt = {c, 0, 0};
  std::vector<std::span<const double>> X2 = {x1};
  EXPECT_NEAR(detail::subspace_distance(X2, {yt}, {1e-6}), std::sqrt((1 - c) * (1 - c) + 1e-6), 1e-15);
}

TEST(Convergence, GroundStateSanityBound) {
  const auto g = uniform_grid(0.1, 1.5, 5);
  const auto sw = eigenvalue_sweep(kR, g, 1, 40);
  for (const auto& pt : sw.points) {
    const StripParams p(pt.a, kR);
    double gap = 0;
    for (int i = 0; i <= 64; ++i)
      for (int j = -8; j <= 8; ++j) {
        const double s = p.length() * i / 64.0;
        gap = std::max(gap, std::abs(potential_Va(p, s, j / 8.0) - potential_Veff(p, s)));
      }
    EXPECT_GE(pt.galerkin[0], pt.effective[0] - 1 / (8 * kR * kR) - gap);
  }
}

TEST(Convergence, RatiosAreRobustToDiscretisation) {
  const auto g = geometric_grid(0.05, 1.0, 4);
  const auto base = eigenvalue_sweep(kR, g, 10, 72);
  SweepOptions fine;
  fine.s_points = 2 * (4 * 30 + 32);
  fine.u_points = 2 * (2 * 4 + 16);
  const auto refined = eigenvalue_sweep(kR, g, 10, 72, fine);
  const auto bigger = eigenvalue_sweep(kR, g, 10, 82);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t n = 0; n < 10; ++n) {
      const double r = base.points[i].ratio[n];
      EXPECT_LT(std::abs(refined.points[i].ratio[n] - r), 1e-4 * r) << "a=" << g[i] << " n=" << n + 1;
      EXPECT_LT(std::abs(bigger.points[i].ratio[n] - r), 1e-4 * r) << "a=" << g[i] << " n=" << n + 1;
    }
}

TEST(Convergence, GroundStateRatioStaysBounded) {
  const auto sw = eigenvalue_sweep(kR, geometric_grid(0.01, 1.5, 8), 1, 72);
  for (const auto& pt : sw.points) {
    EXPECT_TRUE(std::isfinite(pt.ratio[0]));
    EXPECT_GT(pt.ratio[0], 0.0);
    EXPECT_LT(pt.ratio[0], 0.01);
  }
}
