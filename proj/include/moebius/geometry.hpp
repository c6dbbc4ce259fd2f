#pragma once

// Closed-form geometry of the Moebius strip built along a circle of radius R
// with half-width a, parametrised by arc length s along the centre circle and
// the signed distance t along the ruling.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "moebius/error.hpp"

namespace moebius {

struct StripParams {
  double a = 0.0;  // half-width
  double R = 0.0;  // radius of the centre circle

  StripParams() = default;
  StripParams(double half_width, double radius) : a(half_width), R(radius) {
    if (!(std::isfinite(a) && a > 0.0)) throw input_error("half-width a must be positive, got " + std::to_string(a));
    if (!(std::isfinite(R) && R > 0.0)) throw input_error("radius R must be positive, got " + std::to_string(R));
  }

  static StripParams from_circumference(double half_width, double circumference) {
    return {half_width, circumference / (2.0 * std::numbers::pi)};
  }

  double length() const { return 2.0 * std::numbers::pi * R; }
  /// Lowest transverse energy (pi / 2a)^2.
  double transverse_ground_energy() const {
    const double k = std::numbers::pi / (2.0 * a);
    return k * k;
  }
  /// Embedded (non self-intersecting) only when a < R; everything here also works when immersed.
  bool embedded() const { return a < R; }
};

struct SurfacePoint {
  double s = 0.0;
  double t = 0.0;
};

/// Canonical representative in [0, 2 pi R) x (-a, a): moving s by one period
/// flips the transverse coordinate, since (s + 2 pi R, t) and (s, -t) are the same point.
inline SurfacePoint canonical_point(const StripParams& p, double s, double t) {
  const double period = p.length();
  const double turns = std::floor(s / period);
  double sw = s - turns * period;
  if (sw >= period) sw -= period;
  const bool odd = static_cast<long long>(turns) % 2 != 0;
  return {sw, odd ? -t : t};
}

inline std::array<double, 3> embed(const StripParams& p, double s, double t) {
  const double half = s / (2.0 * p.R);
  const double radial = p.R - t * std::cos(half);
  return {radial * std::cos(s / p.R), radial * std::sin(s / p.R), -t * std::sin(half)};
}

/// Metric Jacobian f with G = diag(f^2, 1).
inline double jacobian_f(const StripParams& p, double s, double t) {
  const double c = std::cos(s / (2.0 * p.R));
  const double radial = 1.0 - t * c / p.R;
  const double twist = t / (2.0 * p.R);
  return std::sqrt(radial * radial + twist * twist);
}

struct JacobianDerivatives {
  double f = 0.0;
  double ds = 0.0;
  double dt = 0.0;
  double dss = 0.0;
  double dtt = 0.0;
};

/// f and its first and second partial derivatives in s and t, from the
/// closed-form derivatives of g = f^2 and f = sqrt(g).
inline JacobianDerivatives jacobian_f_derivatives(const StripParams& p, double s, double t) {
  const double R = p.R;
  const double R2 = R * R;
  const double c = std::cos(s / (2.0 * R));
  const double sn = std::sin(s / (2.0 * R));
  const double A = 1.0 - t * c / R;

  const double g = A * A + t * t / (4.0 * R2);
  const double g_s = A * t * sn / R2;
  const double g_ss = (t / R2) * (t * sn * sn / (2.0 * R2) + A * c / (2.0 * R));
  const double g_t = -2.0 * A * c / R + t / (2.0 * R2);
  const double g_tt = 2.0 * c * c / R2 + 1.0 / (2.0 * R2);

  JacobianDerivatives d;
  d.f = std::sqrt(g);
  const double f3 = d.f * d.f * d.f;
  d.ds = g_s / (2.0 * d.f);
  d.dt = g_t / (2.0 * d.f);
  d.dss = g_ss / (2.0 * d.f) - g_s * g_s / (4.0 * f3);
  d.dtt = g_tt / (2.0 * d.f) - g_t * g_t / (4.0 * f3);
  return d;
}

/// Effective geometric potential -cos(s/R) / (8 R^2); independent of t.
inline double potential_Veff(const StripParams& p, double s) {
  return -std::cos(s / p.R) / (8.0 * p.R * p.R);
}

/// Potential V_a of the operator on the rescaled rectangle, u in [-1, 1].
///
/// Written in terms of f at (s, a u): since d/du f_a = a f_t and d2/du2 f_a = a^2 f_tt,
/// the a^-2 factors cancel and no division by a occurs.
inline double potential_Va(const StripParams& p, double s, double u) {
  const JacobianDerivatives d = jacobian_f_derivatives(p, s, p.a * u);
  const double f2 = d.f * d.f;
  return -1.25 * d.ds * d.ds / (f2 * f2) + 0.5 * d.dss / (f2 * d.f) - 0.25 * d.dt * d.dt / f2 + 0.5 * d.dtt / d.f;
}

struct Curvatures {
  double gauss_on_axis = 0.0;  // K(s, 0) = -f_tt / f
  double geodesic = 0.0;       // kappa_g of the centre circle; jumps sign across the seam
};

inline Curvatures curvatures(const StripParams& p, double s) {
  const JacobianDerivatives d = jacobian_f_derivatives(p, s, 0.0);
  return {-d.dtt / d.f, std::cos(s / (2.0 * p.R)) / p.R};
}

}  // namespace moebius
