#pragma once

// Dense and tridiagonal real symmetric eigensolvers: Householder reduction
// to tridiagonal form followed by the implicit-shift QL iteration. Both paths
// share the same QL kernel.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "moebius/error.hpp"

namespace moebius {

/// Real symmetric matrix; only the lower triangle is stored (packed, row by row).
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t order) : order_(order), data_(order * (order + 1) / 2, 0.0) {}

  std::size_t order() const { return order_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[index(i, j)]; }

  std::span<const double> packed() const { return data_; }

  /// Row-major dense copy.
  std::vector<double> dense() const {
    std::vector<double> out(order_ * order_);
    for (std::size_t i = 0; i < order_; ++i)
      for (std::size_t j = 0; j < order_; ++j) out[i * order_ + j] = (*this)(i, j);
    return out;
  }

  double frobenius_norm() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < order_; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = (*this)(i, j);
        sum += (i == j ? 1.0 : 2.0) * v * v;
      }
    return std::sqrt(sum);
  }

  std::vector<double> multiply(std::span<const double> x) const {
    std::vector<double> y(order_, 0.0);
    for (std::size_t i = 0; i < order_; ++i)
      for (std::size_t j = 0; j < order_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

 private:
  static std::size_t tri(std::size_t i, std::size_t j) { return i * (i + 1) / 2 + j; }
  std::size_t index(std::size_t i, std::size_t j) const { return i >= j ? tri(i, j) : tri(j, i); }

  std::size_t order_ = 0;
  std::vector<double> data_;
};

struct TridiagonalSymmetric {
  std::vector<double> diagonal;
  std::vector<double> offdiagonal;  // offdiagonal[i] couples rows i and i+1

  std::size_t order() const { return diagonal.size(); }

  SymmetricMatrix densify() const {
    SymmetricMatrix m(order());
    for (std::size_t i = 0; i < order(); ++i) m(i, i) = diagonal[i];
    for (std::size_t i = 0; i + 1 < order(); ++i) m(i + 1, i) = offdiagonal[i];
    return m;
  }
};

struct EigenDecomposition {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // column-major, order x order; empty when not requested
  std::size_t order = 0;

  bool has_vectors() const { return !vectors.empty(); }
  std::span<const double> vector(std::size_t k) const { return std::span<const double>(vectors).subspan(k * order, order); }
};

inline constexpr int kMaxQlIterations = 60;

namespace detail {

// Implicit QL on the tridiagonal (d, e) with e[0] unused on entry as in the
// EISPACK convention after tred2: e[i] couples rows i-1 and i. If `z` is
// non-empty it holds a row-major order x order matrix whose columns are rotated
// along, turning the reduction basis into eigenvectors.
inline void tql(std::vector<double>& d, std::vector<double>& e, std::vector<double>* z) {
  const std::size_t n = d.size();
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double shift_total = 0.0;
  double tst1 = 0.0;
  const double eps = std::ldexp(1.0, -52);
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;

    if (m > l) {
      int iter = 0;
      do {
        if (++iter > kMaxQlIterations)
          throw numerical_error("QL iteration did not converge within " + std::to_string(kMaxQlIterations) +
                                " sweeps for eigenvalue " + std::to_string(l) + " of a matrix of order " +
                                std::to_string(n));
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        shift_total += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          if (z) {
            auto& v = *z;
            for (std::size_t k = 0; k < n; ++k) {
              const double vk1 = v[k * n + ii + 1];
              v[k * n + ii + 1] = s * v[k * n + ii] + c * vk1;
              v[k * n + ii] = c * v[k * n + ii] - s * vk1;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += shift_total;
    e[l] = 0.0;
  }
}

// Householder reduction of the row-major symmetric matrix `v` to tridiagonal
// form; on exit `v` holds the orthogonal transformation.
inline void tred(std::vector<double>& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = d.size();
  for (std::size_t j = 0; j < n; ++j) d[j] = v[(n - 1) * n + j];

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v[(i - 1) * n + j];
        v[i * n + j] = 0.0;
        v[j * n + i] = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v[j * n + i] = f;
        g = e[j] + v[j * n + j] * f;
        for (std::size_t k = j + 1; k <= i - 1; ++k) {
          g += v[k * n + j] * d[k];
          e[k] += v[k * n + j] * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k <= i - 1; ++k) v[k * n + j] -= (f * e[k] + g * d[k]);
        d[j] = v[(i - 1) * n + j];
        v[i * n + j] = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    v[(n - 1) * n + i] = v[i * n + i];
    v[i * n + i] = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = v[k * n + i + 1] / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += v[k * n + i + 1] * v[k * n + j];
        for (std::size_t k = 0; k <= i; ++k) v[k * n + j] -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) v[k * n + i + 1] = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v[(n - 1) * n + j];
    v[(n - 1) * n + j] = 0.0;
  }
  v[(n - 1) * n + (n - 1)] = 1.0;
  e[0] = 0.0;
}

// Stable ascending order of eigenvalues.
inline std::vector<std::size_t> ascending_order(const std::vector<double>& d) {
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
  return idx;
}

}  // namespace detail

inline EigenDecomposition eig_dense_symmetric(const SymmetricMatrix& A, bool want_vectors) {
  const std::size_t n = A.order();
  if (n == 0) throw input_error("eigendecomposition of an empty matrix");
  for (double x : A.packed())
    if (!std::isfinite(x)) throw input_error("non-finite entry in symmetric matrix of order " + std::to_string(n));

  std::vector<double> v = A.dense();
  std::vector<double> d(n), e(n);
  detail::tred(v, d, e);
  detail::tql(d, e, want_vectors ? &v : nullptr);

  EigenDecomposition out;
  out.order = n;
  const auto idx = detail::ascending_order(d);
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.values[k] = d[idx[k]];
  if (want_vectors) {
    out.vectors.resize(n * n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) out.vectors[k * n + i] = v[i * n + idx[k]];
  }
  return out;
}

/// The `count` smallest eigenvalues of a symmetric tridiagonal matrix, ascending.
inline std::vector<double> eig_tridiagonal(const TridiagonalSymmetric& T, std::size_t count) {
  const std::size_t n = T.order();
  if (n == 0) throw input_error("eigenvalues of an empty tridiagonal matrix");
  if (T.offdiagonal.size() + 1 != n)
    throw input_error("tridiagonal off-diagonal length " + std::to_string(T.offdiagonal.size()) +
                      " does not match order " + std::to_string(n));
  if (count > n) throw input_error("requested " + std::to_string(count) + " eigenvalues of order " + std::to_string(n));
  for (double x : T.diagonal)
    if (!std::isfinite(x)) throw input_error("non-finite diagonal entry in tridiagonal matrix");
  for (double x : T.offdiagonal)
    if (!std::isfinite(x)) throw input_error("non-finite off-diagonal entry in tridiagonal matrix");

  std::vector<double> d = T.diagonal;
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) e[i] = T.offdiagonal[i - 1];
  detail::tql(d, e, nullptr);
  std::stable_sort(d.begin(), d.end());
  d.resize(count);
  return d;
}

/// Eigenvalues and orthonormal eigenvectors of a tridiagonal matrix (vectors column-major).
inline EigenDecomposition eig_tridiagonal_vectors(const TridiagonalSymmetric& T) {
  const std::size_t n = T.order();
  if (n == 0 || T.offdiagonal.size() + 1 != n) throw input_error("malformed tridiagonal matrix");
  std::vector<double> d = T.diagonal;
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) e[i] = T.offdiagonal[i - 1];
  std::vector<double> z(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  detail::tql(d, e, &z);

  EigenDecomposition out;
  out.order = n;
  const auto idx = detail::ascending_order(d);
  out.values.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = d[idx[k]];
    for (std::size_t i = 0; i < n; ++i) out.vectors[k * n + i] = z[i * n + idx[k]];
  }
  return out;
}

inline double dot(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum;
}

}  // namespace moebius
