#pragma once

// Thin-strip limit a -> 0: compare the Galerkin approximation of the true
// spectrum with the closed-form effective one along a grid of half-widths.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "moebius/error.hpp"
#include "moebius/galerkin.hpp"
#include "moebius/geometry.hpp"
#include "moebius/linalg.hpp"
#include "moebius/models.hpp"

namespace moebius {

/// Largest half-width accepted by the sweeps.
inline constexpr double kSweepMaxHalfWidth = 1.5;

enum class SweepKind { eigenvalue, eigenvector };

struct SweepOptions {
  std::size_t threads = 1;   // 0: hardware concurrency
  std::size_t s_points = 0;  // quadrature overrides, 0 = automatic
  std::size_t u_points = 0;
  GeometryMode geometry = GeometryMode::true_geometry;
  BasisOrdering ordering = BasisOrdering::rescaled_rectangle;
};

struct SweepPoint {
  double a = 0.0;
  std::vector<double> effective;  // lambda_n^eff, n = 1..K
  std::vector<double> galerkin;   // first K Galerkin eigenvalues
  std::vector<double> ratio;      // |lambda^eff - lambda~| / a^2, or distance / a^2
  std::vector<double> distance;   // eigenvector kind only: L2 distance
  std::vector<ModeIndex> modes;   // effective labels by position
};

struct SweepResult {
  SweepKind kind = SweepKind::eigenvalue;
  double R = 0.0;
  std::size_t K = 0;
  std::size_t N = 0;
  std::vector<SweepPoint> points;  // ascending a

  std::vector<double> a_grid() const {
    std::vector<double> out;
    for (const auto& pt : points) out.push_back(pt.a);
    return out;
  }
};

/// Log-uniform grid of `steps` points from a_min to a_max (both included).
inline std::vector<double> geometric_grid(double a_min, double a_max, std::size_t steps) {
  if (!(a_min > 0.0) || !(a_max >= a_min)) throw input_error("geometric grid needs 0 < a_min <= a_max");
  if (steps < 1 || (steps == 1 && a_min != a_max)) throw input_error("grid needs at least 2 steps for a range");
  std::vector<double> g(steps);
  const double lo = std::log(a_min), hi = std::log(a_max);
  for (std::size_t i = 0; i < steps; ++i)
    g[i] = steps == 1 ? a_min : std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
  g.front() = a_min;
  g.back() = a_max;
  return g;
}

inline std::vector<double> uniform_grid(double a_min, double a_max, std::size_t steps) {
  if (!(a_min > 0.0) || !(a_max >= a_min)) throw input_error("uniform grid needs 0 < a_min <= a_max");
  if (steps < 1 || (steps == 1 && a_min != a_max)) throw input_error("grid needs at least 2 steps for a range");
  std::vector<double> g(steps);
  for (std::size_t i = 0; i < steps; ++i)
    g[i] = steps == 1 ? a_min : a_min + (a_max - a_min) * static_cast<double>(i) / static_cast<double>(steps - 1);
  g.back() = a_max;
  return g;
}

namespace detail {

inline void validate_sweep(double R, const std::vector<double>& grid, std::size_t K, std::size_t N) {
  if (!(std::isfinite(R) && R > 0.0)) throw input_error("radius R must be positive");
  if (K == 0) throw input_error("sweep needs K >= 1");
  if (K > N) throw input_error("sweep needs K <= N, got K=" + std::to_string(K) + ", N=" + std::to_string(N));
  if (grid.empty()) throw input_error("sweep grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] <= kSweepMaxHalfWidth))
      throw input_error("half-width " + std::to_string(grid[i]) + " outside (0, 1.5]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw input_error("sweep grid must be strictly ascending");
  }
}

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
// writes only its own slot, so the result does not depend on scheduling.
template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::size_t failed_at = count;
  std::mutex lock;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          // report the failure of the smallest index, as a serial run would
          std::lock_guard<std::mutex> g(lock);
          if (i < failed_at) {
            failed_at = i;
            failure = std::current_exception();
          }
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

inline GalerkinConfig sweep_config(double R, double a, std::size_t N, const SweepOptions& o) {
  GalerkinConfig c{StripParams(a, R), N, o.s_points, o.u_points, o.geometry, o.ordering};
  return c;
}

// Each compared effective mode must at least have its leading harmonic in the basis.
inline void require_leading_modes(const std::vector<BasisFunction>& basis, const std::vector<ModeIndex>& modes,
                                  double a) {
  for (const auto& m : modes) {
    const BasisFunction lead{m.m, m.family == ModeFamily::eff_ce ? Trig::cos : Trig::sin, m.n};
    if (std::find(basis.begin(), basis.end(), lead) == basis.end())
      throw capacity_error("basis of size " + std::to_string(basis.size()) + " at a=" + std::to_string(a) +
                           " lacks the leading harmonic of effective mode " + to_string(m) + "; raise N");
  }
}

// Consecutive positions [first, last) whose eigenvalues agree within the merge
// tolerance in either model.
inline std::vector<std::pair<std::size_t, std::size_t>> clusters(const std::vector<double>& x,
                                                                 const std::vector<double>& y) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0;
  while (i < x.size()) {
    std::size_t j = i + 1;
    while (j < x.size() && (within_merge_tolerance(x[j - 1], x[j]) || within_merge_tolerance(y[j - 1], y[j]))) ++j;
    out.emplace_back(i, j);
    i = j;
  }
  return out;
}

// L2 distance min_Q ||X - Y Q||_F between the span of orthonormal X and the span of Y,
// both given by coefficient columns in one orthonormal basis. Y may be truncated; the
// squared norms it loses outside the basis (`missing`) are added back, which is exact
// because the outside parts of distinct effective modes are mutually orthogonal.
// The optimal Q is the polar factor of Y^T X; forming X - Y Q explicitly keeps
// small distances accurate, where 2 - 2 sigma would cancel.
inline double subspace_distance(const std::vector<std::span<const double>>& X,
                                const std::vector<std::vector<double>>& Y, const std::vector<double>& missing) {
  const std::size_t d = X.size();
  const std::size_t N = X.front().size();
  std::vector<std::vector<double>> YX(d, std::vector<double>(d));  // YX[i][j] = y_i . x_j
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) YX[i][j] = dot(Y[i], X[j]);
  SymmetricMatrix C(d);  // (Y^T X)^T (Y^T X)
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < d; ++k) v += YX[k][i] * YX[k][j];
      C(i, j) = v;
    }
  const auto ev = eig_dense_symmetric(C, true);
  double lost = 0.0;
  for (double m : missing) lost += m;
  if (ev.values.front() < 0.25) {
    // far apart, cancellation is harmless: ||X||^2 + ||Y||^2 - 2 sum sigma with unit columns
    double sq = 0.0;
    for (double lam : ev.values) sq += 2.0 - 2.0 * std::sqrt(std::max(0.0, lam));
    return std::sqrt(std::max(0.0, sq));
  }
  // Q = (Y^T X) (C)^(-1/2)
  std::vector<std::vector<double>> Cinv(d, std::vector<double>(d, 0.0));
  for (std::size_t k = 0; k < d; ++k) {
    const auto v = ev.vector(k);
    const double w = 1.0 / std::sqrt(ev.values[k]);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) Cinv[i][j] += w * v[i] * v[j];
  }
  double sq = lost;
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> q(d, 0.0);  // column j of Q
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k) q[i] += YX[i][k] * Cinv[k][j];
    for (std::size_t r = 0; r < N; ++r) {
      double yq = 0.0;
      for (std::size_t i = 0; i < d; ++i) yq += Y[i][r] * q[i];
      const double diff = X[j][r] - yq;
      sq += diff * diff;
    }
  }
  return std::sqrt(sq);
}

}  // namespace detail

/// Ratios |lambda_n^eff - lambda~_n| / a^2 for n = 1..K, matched by sorted position.
inline SweepResult eigenvalue_sweep(double R, const std::vector<double>& a_grid, std::size_t K, std::size_t N,
                                    const SweepOptions& opts = {}) {
  detail::validate_sweep(R, a_grid, K, N);
  SweepResult out{SweepKind::eigenvalue, R, K, N, std::vector<SweepPoint>(a_grid.size())};
  detail::parallel_for(a_grid.size(), opts.threads, [&](std::size_t i) {
    const double a = a_grid[i];
    const GalerkinConfig cfg = detail::sweep_config(R, a, N, opts);
    const Spectrum eff = effective_spectrum(cfg.params, K);
    SweepPoint pt;
    pt.a = a;
    pt.effective = eff.values(K);
    pt.modes = eff.modes(K);
    const auto basis = galerkin_basis(cfg);
    detail::require_leading_modes(basis, pt.modes, a);
    const SymmetricMatrix M = assemble(cfg, basis);
    const auto ev = eigensolve(cfg, M, basis, false);
    pt.galerkin.assign(ev.values.begin(), ev.values.begin() + static_cast<std::ptrdiff_t>(K));
    for (std::size_t n = 0; n < K; ++n) pt.ratio.push_back(std::abs(pt.effective[n] - pt.galerkin[n]) / (a * a));
    out.points[i] = std::move(pt);
  });
  return out;
}

/// Ratios ||f~_n - f_n^eff||_{L2} / a^2 for n = 1..K. Single eigenvectors are sign-aligned;
/// near-degenerate clusters are compared as subspaces and each member reports the
/// cluster distance divided by sqrt(cluster size).
inline SweepResult eigenvector_sweep(double R, const std::vector<double>& a_grid, std::size_t K, std::size_t N,
                                     const SweepOptions& opts = {}) {
  detail::validate_sweep(R, a_grid, K, N);
  SweepResult out{SweepKind::eigenvector, R, K, N, std::vector<SweepPoint>(a_grid.size())};
  detail::parallel_for(a_grid.size(), opts.threads, [&](std::size_t i) {
    const double a = a_grid[i];
    const GalerkinConfig cfg = detail::sweep_config(R, a, N, opts);
    const GalerkinSolution sol = solve(cfg);
    // one extra position so a cluster straddling K is compared whole
    const std::size_t span = std::min(N, K + 1);
    const EffectiveExpansion eff = effective_in_basis(cfg.params, sol.basis, span);

    SweepPoint pt;
    pt.a = a;
    pt.effective.assign(eff.eigenvalues.begin(), eff.eigenvalues.begin() + static_cast<std::ptrdiff_t>(K));
    pt.modes.assign(eff.modes.begin(), eff.modes.begin() + static_cast<std::ptrdiff_t>(K));
    std::vector<double> gal(sol.eigenvalues().begin(), sol.eigenvalues().begin() + static_cast<std::ptrdiff_t>(span));
    pt.galerkin.assign(gal.begin(), gal.begin() + static_cast<std::ptrdiff_t>(K));
    pt.distance.assign(K, 0.0);
    for (const auto& [first, last] : detail::clusters(eff.eigenvalues, gal)) {
      if (first >= K) break;
      std::vector<std::span<const double>> X;
      std::vector<std::vector<double>> Y;
      std::vector<double> missing;
      for (std::size_t n = first; n < last; ++n) {
        X.push_back(sol.coefficients(n));
        Y.push_back(eff.coefficients[n]);
        missing.push_back(eff.truncation[n]);
      }
      const double d = detail::subspace_distance(X, Y, missing) / std::sqrt(static_cast<double>(last - first));
      for (std::size_t n = first; n < std::min(last, K); ++n) pt.distance[n] = d;
    }
    for (std::size_t n = 0; n < K; ++n) pt.ratio.push_back(pt.distance[n] / (a * a));
    out.points[i] = std::move(pt);
  });
  return out;
}

/// Least-squares slope of log y against log x.
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw input_error("slope fit needs equally long samples");
  if (x.size() < 4) throw input_error("slope fit needs at least 4 points, got " + std::to_string(x.size()));
  double mx = 0.0, my = 0.0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i]))
      throw numerical_error("slope fit needs positive finite data, got (" + std::to_string(x[i]) + ", " +
                            std::to_string(y[i]) + ")");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    mx += lx.back();
    my += ly.back();
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (!(sxx > 0.0)) throw input_error("slope fit needs at least two distinct abscissae");
  return sxy / sxx;
}

/// Slope of log |lambda_n^eff - lambda~_n| (eigenvalue sweeps) or log distance
/// (eigenvector sweeps) against log a, over grid points with a in [a_lo, a_hi]. n is 1-based.
inline double fit_rate(const SweepResult& sweep, std::size_t n, double a_lo, double a_hi) {
  if (n < 1 || n > sweep.K) throw input_error("fit index n must lie in 1.." + std::to_string(sweep.K));
  std::vector<double> x, y;
  for (const auto& pt : sweep.points) {
    if (pt.a < a_lo || pt.a > a_hi) continue;
    x.push_back(pt.a);
    y.push_back(sweep.kind == SweepKind::eigenvalue ? std::abs(pt.effective[n - 1] - pt.galerkin[n - 1])
                                                    : pt.distance[n - 1]);
  }
  if (x.size() < 4)
    throw input_error("window [" + std::to_string(a_lo) + ", " + std::to_string(a_hi) + "] holds " +
                      std::to_string(x.size()) + " grid points; at least 4 are needed");
  return log_log_slope(x, y);
}

/// Positions (0-based, consecutive) that form merged pairs in the effective spectrum at every grid point.
inline std::vector<std::pair<std::size_t, std::size_t>> degenerate_pairs(const SweepResult& sweep) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t n = 0; n + 1 < sweep.K; ++n) {
    bool all = !sweep.points.empty();
    for (const auto& pt : sweep.points)
      all = all && detail::within_merge_tolerance(pt.effective[n], pt.effective[n + 1]);
    if (all) {
      out.emplace_back(n, n + 1);
      ++n;
    }
  }
  return out;
}

}  // namespace moebius
