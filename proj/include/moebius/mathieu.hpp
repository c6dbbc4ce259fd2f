#pragma once

// Integral-order Mathieu functions ce_m, se_m and their characteristic values
// a_m(q), b_m(q) for the equation y'' + (mu - 2 q cos 2 eta) y = 0.
//
// Each of the four symmetry classes reduces to a symmetric tridiagonal
// eigenproblem for the Fourier coefficients:
//   ce, even m : cos(2k eta),      diag (0, 4, 16, ...),   coupling (sqrt2 q, q, q, ...)
//   ce, odd m  : cos((2k+1) eta),  diag (1+q, 9, 25, ...), coupling q
//   se, odd m  : sin((2k+1) eta),  diag (1-q, 9, 25, ...), coupling q
//   se, even m : sin((2k+2) eta),  diag (4, 16, 36, ...),  coupling q
// The sqrt2 on the first ce-even coupling symmetrises the recurrence; the
// symmetrised eigenvector has unit Euclidean norm exactly when the function
// has L2(-pi, pi) norm sqrt(pi).

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "moebius/error.hpp"
#include "moebius/linalg.hpp"

namespace moebius {

enum class MathieuKind { ce, se };

enum class SymmetryClass { ce_even, ce_odd, se_odd, se_even };

inline constexpr std::size_t kMathieuDefaultTruncation = 64;
inline constexpr double kMathieuStabilityTol = 1e-13;
inline constexpr double kMathieuCoefficientCutoff = 1e-16;

/// Knobs of the recurrence construction. Only the verification suite changes these,
/// to confirm that a corrupted recurrence is detected.
struct RecurrenceOptions {
  double ce_even_coupling_scale = std::numbers::sqrt2;
};

inline SymmetryClass symmetry_class(MathieuKind kind, int m) {
  if (kind == MathieuKind::ce) {
    if (m < 0) throw input_error("ce_m requires m >= 0, got " + std::to_string(m));
    return m % 2 == 0 ? SymmetryClass::ce_even : SymmetryClass::ce_odd;
  }
  if (m < 1) throw input_error("se_m requires m >= 1, got " + std::to_string(m));
  return m % 2 == 0 ? SymmetryClass::se_even : SymmetryClass::se_odd;
}

inline int first_harmonic(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::ce_even: return 0;
    case SymmetryClass::ce_odd: return 1;
    case SymmetryClass::se_odd: return 1;
    case SymmetryClass::se_even: return 2;
  }
  return 0;
}

inline TridiagonalSymmetric recurrence_matrix(SymmetryClass c, double q, std::size_t size,
                                              const RecurrenceOptions& opts = {}) {
  TridiagonalSymmetric t;
  t.diagonal.resize(size);
  t.offdiagonal.assign(size > 0 ? size - 1 : 0, q);
  const int h0 = first_harmonic(c);
  for (std::size_t k = 0; k < size; ++k) {
    const double h = h0 + 2.0 * static_cast<double>(k);
    t.diagonal[k] = h * h;
  }
  if (size == 0) return t;
  if (c == SymmetryClass::ce_odd) t.diagonal[0] += q;
  if (c == SymmetryClass::se_odd) t.diagonal[0] -= q;
  if (c == SymmetryClass::ce_even && size > 1) t.offdiagonal[0] = opts.ce_even_coupling_scale * q;
  return t;
}

/// Characteristic values a_0..a_max and b_1..b_max at one q.
struct CharacteristicTable {
  double q = 0.0;
  std::vector<double> a;  // a[m], m = 0..max_order
  std::vector<double> b;  // b[m], m = 1..max_order; b[0] is NaN

  int max_order() const { return static_cast<int>(a.size()) - 1; }
};

namespace detail {

inline CharacteristicTable char_values_at(double q, int max_order, std::size_t size, const RecurrenceOptions& opts) {
  CharacteristicTable t;
  t.q = q;
  t.a.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
  t.b.assign(static_cast<std::size_t>(max_order) + 1, std::numeric_limits<double>::quiet_NaN());
  const std::size_t per_class = static_cast<std::size_t>(max_order) / 2 + 1;
  for (SymmetryClass c : {SymmetryClass::ce_even, SymmetryClass::ce_odd, SymmetryClass::se_odd, SymmetryClass::se_even}) {
    const auto values = eig_tridiagonal(recurrence_matrix(c, q, size, opts), per_class);
    const bool is_ce = c == SymmetryClass::ce_even || c == SymmetryClass::ce_odd;
    for (std::size_t k = 0; k < per_class; ++k) {
      const int m = first_harmonic(c) + 2 * static_cast<int>(k);
      if (m > max_order) break;
      (is_ce ? t.a : t.b)[static_cast<std::size_t>(m)] = values[k];
    }
  }
  return t;
}

inline bool stable_under_doubling(const std::vector<double>& x, const std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) && std::isnan(y[i])) continue;
    if (std::abs(x[i] - y[i]) > kMathieuStabilityTol * std::max(1.0, std::abs(y[i]))) return false;
  }
  return true;
}

inline std::size_t initial_truncation(int max_order) {
  return std::max(kMathieuDefaultTruncation, static_cast<std::size_t>(max_order) / 2 + 16);
}

}  // namespace detail

/// Truncation starts at 64 recurrence terms per class and doubles until the
/// requested values change by less than 1e-13 (relative to max(1, |value|)).
inline CharacteristicTable char_values(double q, int max_order, const RecurrenceOptions& opts = {}) {
  if (max_order < 0) throw input_error("max_order must be non-negative, got " + std::to_string(max_order));
  if (!std::isfinite(q)) throw input_error("Mathieu parameter q must be finite");
  std::size_t size = detail::initial_truncation(max_order);
  CharacteristicTable prev = detail::char_values_at(q, max_order, size, opts);
  for (int doubling = 0; doubling < 6; ++doubling) {
    size *= 2;
    CharacteristicTable next = detail::char_values_at(q, max_order, size, opts);
    if (detail::stable_under_doubling(prev.a, next.a) && detail::stable_under_doubling(prev.b, next.b)) return next;
    prev = std::move(next);
  }
  throw numerical_error("Mathieu characteristic values at q=" + std::to_string(q) +
                        " did not stabilise under truncation doubling up to order " + std::to_string(size));
}

/// A normalised Mathieu function: sum_k coefficients[k] * trig((first_harmonic + 2k) eta),
/// with trig = cos for ce and sin for se, and integral over (-pi, pi) of its square equal to pi.
/// Sign convention: the coefficient on harmonic m is positive, which matches the q -> 0 limit
/// cos(m eta) / sin(m eta) (and ce_0 -> 1/sqrt2).
class MathieuFunction {
 public:
  MathieuFunction() = default;
  MathieuFunction(MathieuKind kind, int order, double q, double value, int first_harmonic, std::vector<double> coefficients)
      : kind_(kind), order_(order), q_(q), value_(value), first_harmonic_(first_harmonic), coefficients_(std::move(coefficients)) {}

  MathieuKind kind() const { return kind_; }
  int order() const { return order_; }
  double q() const { return q_; }
  /// Characteristic value a_m(q) or b_m(q).
  double characteristic_value() const { return value_; }
  int first_harmonic() const { return first_harmonic_; }
  int harmonic(std::size_t k) const { return first_harmonic_ + 2 * static_cast<int>(k); }
  const std::vector<double>& coefficients() const { return coefficients_; }

  double operator()(double eta) const { return sum(eta, 0); }
  double derivative(double eta) const { return sum(eta, 1); }
  double second_derivative(double eta) const { return sum(eta, 2); }

 private:
  double sum(double eta, int order) const {
    double total = 0.0;
    for (std::size_t k = 0; k < coefficients_.size(); ++k) {
      const double h = harmonic(k);
      const double c = std::cos(h * eta);
      const double s = std::sin(h * eta);
      double term = 0.0;
      if (kind_ == MathieuKind::ce) {
        term = order == 0 ? c : order == 1 ? -h * s : -h * h * c;
      } else {
        term = order == 0 ? s : order == 1 ? h * c : -h * h * s;
      }
      total += coefficients_[k] * term;
    }
    return total;
  }

  MathieuKind kind_ = MathieuKind::ce;
  int order_ = 0;
  double q_ = 0.0;
  double value_ = 0.0;
  int first_harmonic_ = 0;
  std::vector<double> coefficients_;
};

inline MathieuFunction mathieu_function(MathieuKind kind, int m, double q, const RecurrenceOptions& opts = {}) {
  if (!std::isfinite(q)) throw input_error("Mathieu parameter q must be finite");
  const SymmetryClass cls = symmetry_class(kind, m);
  const int h0 = first_harmonic(cls);
  const std::size_t index = static_cast<std::size_t>((m - h0) / 2);
  std::size_t size = std::max(kMathieuDefaultTruncation, index + 32);

  for (int doubling = 0; doubling < 7; ++doubling, size *= 2) {
    const EigenDecomposition dec = eig_tridiagonal_vectors(recurrence_matrix(cls, q, size, opts));
    std::vector<double> coef(dec.vector(index).begin(), dec.vector(index).end());
    if (std::abs(coef.back()) > kMathieuCoefficientCutoff || std::abs(coef[size - 2]) > kMathieuCoefficientCutoff) continue;

    if (coef[index] < 0)
      for (double& c : coef) c = -c;
    if (cls == SymmetryClass::ce_even) coef[0] /= opts.ce_even_coupling_scale;
    std::size_t keep = coef.size();
    while (keep > index + 1 && std::abs(coef[keep - 1]) < kMathieuCoefficientCutoff) --keep;
    coef.resize(keep);
    return MathieuFunction(kind, m, q, dec.values[index], h0, std::move(coef));
  }
  throw numerical_error("Fourier coefficients of Mathieu function of order " + std::to_string(m) +
                        " at q=" + std::to_string(q) + " did not decay within the truncation limit");
}

/// Fourier coefficients with their harmonic layout (first harmonic and stride 2).
struct FourierSeries {
  MathieuKind kind = MathieuKind::ce;
  int first_harmonic = 0;
  int stride = 2;
  std::vector<double> coefficients;
};

inline FourierSeries fourier_coefficients(MathieuKind kind, int m, double q) {
  const MathieuFunction fn = mathieu_function(kind, m, q);
  return {kind, fn.first_harmonic(), 2, fn.coefficients()};
}

inline double eval(MathieuKind kind, int m, double q, double eta) { return mathieu_function(kind, m, q)(eta); }

}  // namespace moebius
