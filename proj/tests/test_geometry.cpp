#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "moebius/geometry.hpp"

using namespace moebius;

namespace {

const StripParams kStrip = StripParams::from_circumference(0.75, 13.2);

double fd1(auto f, double x, double h) { return (f(x + h) - f(x - h)) / (2 * h); }
double fd2(auto f, double x, double h) { return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h); }

}  // namespace

TEST(Geometry, ParamsValidateAndConvert) {
  EXPECT_THROW(StripParams(0.0, 1.0), input_error);
  EXPECT_THROW(StripParams(-1.0, 1.0), input_error);
  EXPECT_THROW(StripParams(1.0, NAN), input_error);
  EXPECT_THROW(StripParams(1.0, 0.0), input_error);
  EXPECT_DOUBLE_EQ(kStrip.R, 13.2 / (2 * std::numbers::pi));
  EXPECT_DOUBLE_EQ(kStrip.length(), 13.2);
  EXPECT_DOUBLE_EQ(StripParams(0.5, 3.0).transverse_ground_energy(), std::numbers::pi * std::numbers::pi);
}

TEST(Geometry, JacobianDerivativesMatchFiniteDifferences) {
  for (double s : {0.0, 0.7, 3.1, 6.6, 11.0})
    for (double t : {-0.7, -0.2, 0.0, 0.4, 0.75}) {
      const auto d = jacobian_f_derivatives(kStrip, s, t);
      auto fs = [&](double x) { return jacobian_f(kStrip, x, t); };
      auto ft = [&](double x) { return jacobian_f(kStrip, s, x); };
      EXPECT_NEAR(d.f, jacobian_f(kStrip, s, t), 1e-15);
      EXPECT_NEAR(d.ds, fd1(fs, s, 1e-5), 1e-9);
      EXPECT_NEAR(d.dt, fd1(ft, t, 1e-5), 1e-9);
      EXPECT_NEAR(d.dss, fd2(fs, s, 1e-4), 1e-6);
      EXPECT_NEAR(d.dtt, fd2(ft, t, 1e-4), 1e-6);
    }
}

TEST(Geometry, JacobianIsSpeedOfTheEmbedding) {
  // f = |d_s L| and the ruling d_t L has unit length
  for (double s : {0.3, 2.0, 9.0})
    for (double t : {-0.5, 0.0, 0.6}) {
      double ds2 = 0, dt2 = 0;
      for (int k = 0; k < 3; ++k) {
        const double a = (embed(kStrip, s + 1e-6, t)[k] - embed(kStrip, s - 1e-6, t)[k]) / 2e-6;
        const double b = (embed(kStrip, s, t + 1e-6)[k] - embed(kStrip, s, t - 1e-6)[k]) / 2e-6;
        ds2 += a * a;
        dt2 += b * b;
      }
      EXPECT_NEAR(std::sqrt(ds2), jacobian_f(kStrip, s, t), 1e-8);
      EXPECT_NEAR(std::sqrt(dt2), 1.0, 1e-8);
    }
}

TEST(Geometry, AxisValues) {
  const double R = kStrip.R;
  for (double s : {0.0, 1.0, 5.0, 12.0}) {
    const auto d = jacobian_f_derivatives(kStrip, s, 0.0);
    EXPECT_DOUBLE_EQ(d.f, 1.0);
    EXPECT_NEAR(d.dt, -std::cos(s / (2 * R)) / R, 1e-15);
    EXPECT_NEAR(d.dtt, 1.0 / (4 * R * R), 1e-15);
    EXPECT_NEAR(d.ds, 0.0, 1e-15);
  }
}

TEST(Geometry, PotentialMatchesFiniteDifferenceFormula) {
  // V_a rebuilt from finite differences of f alone
  for (double s : {0.4, 4.0, 10.0})
    for (double u : {-0.9, 0.0, 0.5}) {
      const double t = kStrip.a * u;
      auto fs = [&](double x) { return jacobian_f(kStrip, x, t); };
      auto ft = [&](double x) { return jacobian_f(kStrip, s, x); };
      const double f = jacobian_f(kStrip, s, t);
      const double v = -1.25 * std::pow(fd1(fs, s, 1e-5), 2) / std::pow(f, 4) + 0.5 * fd2(fs, s, 1e-4) / std::pow(f, 3) -
                       0.25 * std::pow(fd1(ft, t, 1e-5), 2) / (f * f) + 0.5 * fd2(ft, t, 1e-4) / f;
      EXPECT_NEAR(potential_Va(kStrip, s, u), v, 1e-6);
    }
}

TEST(Geometry, PotentialTendsToEffectiveOne) {
  for (double s : {0.0, 3.0, 7.0}) {
    const StripParams thin(1e-5, kStrip.R);
    EXPECT_NEAR(potential_Va(thin, s, 0.3), potential_Veff(thin, s), 1e-5);
  }
}

TEST(Geometry, CurvaturesAndFermiIdentity) {
  const double R = kStrip.R;
  for (double s : {0.0, 2.0, 6.6, 13.2}) {
    const auto c = curvatures(kStrip, s);
    EXPECT_NEAR(c.gauss_on_axis, -1.0 / (4 * R * R), 1e-15);
    EXPECT_NEAR(c.geodesic, std::cos(s / (2 * R)) / R, 1e-15);
    EXPECT_NEAR(potential_Veff(kStrip, s), -0.25 * c.geodesic * c.geodesic - 0.5 * c.gauss_on_axis, 1e-16);
  }
  EXPECT_NEAR(curvatures(kStrip, 0).geodesic, -curvatures(kStrip, kStrip.length()).geodesic, 1e-15);
}

TEST(Geometry, TwistedIdentification) {
  const double L = kStrip.length();
  for (double s : {-20.0, -1.0, 0.0, 3.0, 13.2, 14.0, 30.0}) {
    const SurfacePoint c = canonical_point(kStrip, s, 0.3);
    EXPECT_GE(c.s, 0.0);
    EXPECT_LT(c.s, L);
    const auto e0 = embed(kStrip, s, 0.3), e1 = embed(kStrip, c.s, c.t);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(e0[k], e1[k], 1e-12);
    EXPECT_NEAR(jacobian_f(kStrip, s, 0.3), jacobian_f(kStrip, c.s, c.t), 1e-14);
  }
  EXPECT_DOUBLE_EQ(canonical_point(kStrip, L + 1.0, 0.3).t, -0.3);
  EXPECT_DOUBLE_EQ(canonical_point(kStrip, 2 * L + 1.0, 0.3).t, 0.3);
}

TEST(Geometry, EmbeddedOnlyForNarrowStrips) {
  EXPECT_TRUE(StripParams(0.5, 1.0).embedded());
  EXPECT_FALSE(StripParams(1.5, 1.0).embedded());
}
