#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "moebius/quadrature.hpp"

using namespace moebius;

TEST(Quadrature, GaussLegendreIntegratesPolynomialsExactly) {
  for (std::size_t n : {1u, 2u, 5u, 16u, 40u}) {
    const auto gl = gauss_legendre(n);
    for (std::size_t p = 0; p < 2 * n; ++p) {
      double sum = 0;
      for (std::size_t i = 0; i < n; ++i) sum += gl.weights[i] * std::pow(gl.nodes[i], static_cast<double>(p));
      EXPECT_NEAR(sum, p % 2 ? 0.0 : 2.0 / (p + 1.0), 1e-14) << "order " << n << " degree " << p;
    }
  }
}

TEST(Quadrature, GaussLegendreKnownNodes) {
  const auto gl = gauss_legendre(3);
  EXPECT_NEAR(gl.nodes[0], -std::sqrt(0.6), 2e-16);
  EXPECT_EQ(gl.nodes[1], 0.0);
  EXPECT_NEAR(gl.weights[0], 5.0 / 9.0, 1e-15);
  EXPECT_NEAR(gl.weights[1], 8.0 / 9.0, 1e-15);
  const auto g5 = gauss_legendre(5);
  EXPECT_NEAR(g5.nodes[4], std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0, 1e-15);
  EXPECT_THROW(gauss_legendre(0), input_error);
}

TEST(Quadrature, TrapezoidIsExactForTrigonometricPolynomials) {
  const double R = 2.1;
  const double L = 2 * std::numbers::pi * R;
  const auto g = make_grid(L, default_s_points(10), 4);
  for (int k = 0; k <= 10; ++k) {
    const double v = integrate_2d(g, [&](double s, double) { return std::pow(std::cos(k * s / (2 * R)), 2); });
    EXPECT_NEAR(v, 2.0 * (k == 0 ? L : L / 2), 1e-12);
  }
}

TEST(Quadrature, TensorRule) {
  const auto g = make_grid(3.0, 8, 6);
  EXPECT_EQ(g.size(), 48u);
  const double v = integrate_2d(g, [](double, double u) { return u * u; });
  EXPECT_NEAR(v, 3.0 * 2.0 / 3.0, 1e-14);
}

TEST(Quadrature, RejectsBadInput) {
  EXPECT_THROW(make_grid(0.0, 4, 4), input_error);
  EXPECT_THROW(make_grid(1.0, 0, 4), input_error);
  const auto g = make_grid(1.0, 4, 4);
  EXPECT_THROW(integrate_2d(g, [](double, double) { return NAN; }), input_error);
}
