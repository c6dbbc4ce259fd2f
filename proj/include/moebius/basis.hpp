#pragma once

// Real orthonormal eigenbasis of the flat strip with the twisted seam,
// expressed on the rescaled rectangle (0, 2 pi R) x (-1, 1).
//
//   harmonic 0 : (2 pi R)^(-1/2)
//   harmonic k : (pi R)^(-1/2) cos(k s / 2R)  or  (pi R)^(-1/2) sin(k s / 2R)
// times the transverse factor cos(n pi u / 2) (n odd) or sin(n pi u / 2) (n even).
// A product satisfies the seam rule Psi(0, u) = Psi(2 pi R, -u) iff k + n is odd.

#include <cmath>
#include <compare>
#include <numbers>
#include <string>

#include "moebius/error.hpp"
#include "moebius/geometry.hpp"

namespace moebius {

enum class Trig { cos, sin };

struct BasisFunction {
  int harmonic = 0;  // k >= 0, in units of 1/(2R)
  Trig trig = Trig::cos;
  int n = 1;  // transverse index >= 1

  auto operator<=>(const BasisFunction&) const = default;

  /// Flat-strip eigenvalue (k/2R)^2 + (n pi / 2a)^2.
  double flat_eigenvalue(const StripParams& p) const {
    const double kl = harmonic / (2.0 * p.R);
    const double kt = n * std::numbers::pi / (2.0 * p.a);
    return kl * kl + kt * kt;
  }

  /// Transverse kinetic factor (n pi / 2)^2, i.e. -d2/du2 eigenvalue.
  double transverse_eigenvalue() const {
    const double kt = n * std::numbers::pi / 2.0;
    return kt * kt;
  }

  double wavenumber(double R) const { return harmonic / (2.0 * R); }

  double longitudinal(double R, double s) const {
    if (harmonic == 0) return 1.0 / std::sqrt(2.0 * std::numbers::pi * R);
    const double x = wavenumber(R) * s;
    return (trig == Trig::cos ? std::cos(x) : std::sin(x)) / std::sqrt(std::numbers::pi * R);
  }

  double longitudinal_d1(double R, double s) const {
    if (harmonic == 0) return 0.0;
    const double k = wavenumber(R);
    const double x = k * s;
    return k * (trig == Trig::cos ? -std::sin(x) : std::cos(x)) / std::sqrt(std::numbers::pi * R);
  }

  double longitudinal_d2(double R, double s) const {
    const double k = wavenumber(R);
    return -k * k * longitudinal(R, s);
  }

  double transverse(double u) const {
    const double x = n * std::numbers::pi * u / 2.0;
    return n % 2 == 1 ? std::cos(x) : std::sin(x);
  }

  double operator()(double R, double s, double u) const { return longitudinal(R, s) * transverse(u); }
};

inline void require_seam_parity(int harmonic, int n) {
  if (n < 1) throw input_error("transverse index n must be positive, got " + std::to_string(n));
  if ((harmonic + n) % 2 == 0)
    throw input_error("mode (m=" + std::to_string(harmonic) + ", n=" + std::to_string(n) +
                      ") violates the twisted seam condition: m + n must be odd");
}

}  // namespace moebius
