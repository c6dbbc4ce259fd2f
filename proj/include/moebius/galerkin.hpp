#pragma once

// Rayleigh-Ritz projection of the curved-strip operator
//   L = -d_s f_a^-2 d_s - a^-2 d_u^2 + V_a
// on (0, 2 pi R) x (-1, 1) onto the N lowest flat-strip eigenfunctions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "moebius/basis.hpp"
#include "moebius/error.hpp"
#include "moebius/geometry.hpp"
#include "moebius/linalg.hpp"
#include "moebius/mathieu.hpp"
#include "moebius/models.hpp"
#include "moebius/quadrature.hpp"

namespace moebius {

/// Which operator is projected. The flat variants are oracles: flat_plain is
/// diagonal in the basis, flat_with_Veff is the effective operator.
enum class GeometryMode { true_geometry, flat_with_Veff, flat_plain };

/// How the N basis functions are chosen from the flat modes.
///
/// rescaled_rectangle: ascending (k/2R)^2 + (n pi/2)^2, the spectrum of -d_s^2 - d_u^2 on
///   (0, 2 pi R) x (-1, 1). The basis is then the same for every half-width a; this is the
///   basis behind the published N = 82 table.
/// strip_spectrum: ascending flat-strip eigenvalue (k/2R)^2 + (n pi/2a)^2 at the actual a.
enum class BasisOrdering { rescaled_rectangle, strip_spectrum };

struct GalerkinConfig {
  StripParams params;
  std::size_t N = 0;
  std::size_t s_points = 0;  // 0: 4 * max harmonic + 32
  std::size_t u_points = 0;  // 0: 2 * max transverse index + 16
  GeometryMode geometry = GeometryMode::true_geometry;
  BasisOrdering ordering = BasisOrdering::rescaled_rectangle;
  // Diagonalise the cosine and sine sectors separately. L commutes with s -> -s, so the
  // sectors are decoupled exactly; splitting keeps near-degenerate ce/se pairs from
  // mixing through rounding. false diagonalises the full matrix (an oracle).
  bool parity_blocks = true;
};

/// Basis functions for `config`, ties broken by harmonic, cosine before sine, then n.
inline std::vector<BasisFunction> galerkin_basis(const GalerkinConfig& config) {
  if (config.N == 0) throw input_error("Galerkin basis size N must be at least 1");
  const StripParams& p = config.params;
  return config.ordering == BasisOrdering::strip_spectrum ? fake_basis(p, config.N)
                                                          : fake_basis(StripParams(1.0, p.R), config.N);
}

/// Capacity threshold for expanding effective eigenfunctions: at least 99.9999 % of the norm.
inline constexpr double kCapacityTolerance = 1e-6;

namespace detail {

inline void validate(const GalerkinConfig& c) {
  if (c.N == 0) throw input_error("Galerkin basis size N must be at least 1");
}

struct GridSizes {
  std::size_t s_points;
  std::size_t u_points;
};

inline GridSizes grid_sizes(const GalerkinConfig& c, const std::vector<BasisFunction>& basis) {
  int max_h = 0, max_n = 1;
  for (const auto& b : basis) {
    max_h = std::max(max_h, b.harmonic);
    max_n = std::max(max_n, b.n);
  }
  return {c.s_points ? c.s_points : default_s_points(max_h), c.u_points ? c.u_points : default_u_points(max_n)};
}

// Geometric weights at one node: kinetic factor 1/f_a^2, its s-derivative
// contribution 2 f_a^-3 d_s f_a (for the strong form), and the potential.
struct NodeGeometry {
  double inv_f2 = 1.0;
  double drift = 0.0;
  double potential = 0.0;
};

inline NodeGeometry node_geometry(const StripParams& p, GeometryMode mode, double s, double u) {
  switch (mode) {
    case GeometryMode::flat_plain: return {};
    case GeometryMode::flat_with_Veff: return {1.0, 0.0, potential_Veff(p, s)};
    case GeometryMode::true_geometry: {
      const JacobianDerivatives d = jacobian_f_derivatives(p, s, p.a * u);
      const double f2 = d.f * d.f;
      return {1.0 / f2, 2.0 * d.ds / (f2 * d.f), potential_Va(p, s, u)};
    }
  }
  return {};
}

// Sampled basis on a tensor grid, with per-(n, n') s-profiles of the
// u-integrated weights so that each matrix entry is an O(M_s) sum.
class SampledOperator {
 public:
  SampledOperator(const GalerkinConfig& c, const std::vector<BasisFunction>& basis, const QuadratureGrid& grid)
      : basis_(basis), grid_(grid) {
    const StripParams& p = c.params;
    const std::size_t S = grid.s_nodes.size(), U = grid.u_nodes.size();
    for (const auto& b : basis) max_n_ = std::max(max_n_, b.n);

    longi_.assign(basis.size() * S, 0.0);
    dlongi_.assign(basis.size() * S, 0.0);
    for (std::size_t j = 0; j < basis.size(); ++j)
      for (std::size_t i = 0; i < S; ++i) {
        longi_[j * S + i] = basis[j].longitudinal(p.R, grid.s_nodes[i]);
        dlongi_[j * S + i] = basis[j].longitudinal_d1(p.R, grid.s_nodes[i]);
      }

    std::vector<double> kin(S * U), pot(S * U);
    for (std::size_t i = 0; i < S; ++i)
      for (std::size_t l = 0; l < U; ++l) {
        const NodeGeometry g = node_geometry(p, c.geometry, grid.s_nodes[i], grid.u_nodes[l]);
        const double w = grid.s_weights[i] * grid.u_weights[l];
        kin[i * U + l] = w * g.inv_f2;
        pot[i * U + l] = w * g.potential;
      }

    const std::size_t nn = static_cast<std::size_t>(max_n_);
    kin_profile_.assign(nn * nn, {});
    pot_profile_.assign(nn * nn, {});
    std::vector<std::vector<double>> trans(nn, std::vector<double>(U));
    for (std::size_t n = 1; n <= nn; ++n) {
      const BasisFunction t{0, Trig::cos, static_cast<int>(n)};
      for (std::size_t l = 0; l < U; ++l) trans[n - 1][l] = t.transverse(grid.u_nodes[l]);
    }
    for (std::size_t n1 = 0; n1 < nn; ++n1)
      for (std::size_t n2 = 0; n2 < nn; ++n2) {
        auto& kp = kin_profile_[n1 * nn + n2];
        auto& pp = pot_profile_[n1 * nn + n2];
        kp.assign(S, 0.0);
        pp.assign(S, 0.0);
        for (std::size_t i = 0; i < S; ++i)
          for (std::size_t l = 0; l < U; ++l) {
            const double tt = trans[n1][l] * trans[n2][l];
            kp[i] += kin[i * U + l] * tt;
            pp[i] += pot[i * U + l] * tt;
          }
      }
  }

  /// Quadrature part of the entry (j, k): kinetic-s plus potential term.
  double entry(std::size_t j, std::size_t k) const {
    const std::size_t S = grid_.s_nodes.size();
    const std::size_t nn = static_cast<std::size_t>(max_n_);
    const std::size_t slot = static_cast<std::size_t>(basis_[j].n - 1) * nn + static_cast<std::size_t>(basis_[k].n - 1);
    const auto& kp = kin_profile_[slot];
    const auto& pp = pot_profile_[slot];
    const double* lj = &longi_[j * S];
    const double* lk = &longi_[k * S];
    const double* dj = &dlongi_[j * S];
    const double* dk = &dlongi_[k * S];
    double sum = 0.0;
    for (std::size_t i = 0; i < S; ++i) sum += dj[i] * dk[i] * kp[i] + lj[i] * lk[i] * pp[i];
    return sum;
  }

 private:
  const std::vector<BasisFunction>& basis_;
  const QuadratureGrid& grid_;
  int max_n_ = 1;
  std::vector<double> longi_, dlongi_;
  std::vector<std::vector<double>> kin_profile_, pot_profile_;
};

}  // namespace detail

/// Matrix of L in the first N flat modes, built on an explicit basis.
inline SymmetricMatrix assemble(const GalerkinConfig& config, const std::vector<BasisFunction>& basis) {
  const auto sizes = detail::grid_sizes(config, basis);
  const QuadratureGrid grid = make_grid(config.params.length(), sizes.s_points, sizes.u_points);
  const detail::SampledOperator op(config, basis, grid);
  const double inv_a2 = 1.0 / (config.params.a * config.params.a);
  SymmetricMatrix M(basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    for (std::size_t k = 0; k <= j; ++k) M(j, k) = op.entry(j, k);
    // transverse kinetic term is exact and diagonal
    M(j, j) += inv_a2 * basis[j].transverse_eigenvalue();
  }
  return M;
}

inline SymmetricMatrix assemble(const GalerkinConfig& config) {
  detail::validate(config);
  return assemble(config, galerkin_basis(config));
}

/// One quadrature entry (Psi_j, L Psi_k) computed independently of the stored triangle.
inline double assemble_entry(const GalerkinConfig& config, const std::vector<BasisFunction>& basis, std::size_t j,
                             std::size_t k) {
  const auto sizes = detail::grid_sizes(config, basis);
  const QuadratureGrid grid = make_grid(config.params.length(), sizes.s_points, sizes.u_points);
  const StripParams& p = config.params;
  const BasisFunction& bj = basis[j];
  const BasisFunction& bk = basis[k];
  double v = integrate_2d(grid, [&](double s, double u) {
    const auto g = detail::node_geometry(p, config.geometry, s, u);
    const double tj = bj.transverse(u), tk = bk.transverse(u);
    return bj.longitudinal_d1(p.R, s) * tj * g.inv_f2 * bk.longitudinal_d1(p.R, s) * tk +
           g.potential * bj.longitudinal(p.R, s) * tj * bk.longitudinal(p.R, s) * tk;
  });
  if (j == k) v += bj.transverse_eigenvalue() / (p.a * p.a);
  return v;
}

/// Eigenpairs of M with the cosine-sector (including harmonic 0) and sine-sector rows
/// diagonalised independently and merged in ascending order; ties keep cosine first.
inline EigenDecomposition eig_parity_blocks(const SymmetricMatrix& M, const std::vector<BasisFunction>& basis,
                                            bool want_vectors) {
  const std::size_t n = M.order();
  if (basis.size() != n) throw input_error("basis size does not match matrix order");
  std::vector<std::size_t> sector[2];
  for (std::size_t j = 0; j < n; ++j) sector[basis[j].trig == Trig::sin ? 1 : 0].push_back(j);

  struct Pair {
    double value;
    int block;
    std::size_t local;
  };
  std::vector<Pair> pairs;
  EigenDecomposition parts[2];
  for (int b = 0; b < 2; ++b) {
    const auto& rows = sector[b];
    if (rows.empty()) continue;
    SymmetricMatrix sub(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j) sub(i, j) = M(rows[i], rows[j]);
    parts[b] = eig_dense_symmetric(sub, want_vectors);
    for (std::size_t k = 0; k < rows.size(); ++k) pairs.push_back({parts[b].values[k], b, k});
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.value < y.value; });

  EigenDecomposition out;
  out.order = n;
  for (const auto& pr : pairs) out.values.push_back(pr.value);
  if (want_vectors) {
    out.vectors.assign(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const auto& rows = sector[pairs[k].block];
      const auto v = parts[pairs[k].block].vector(pairs[k].local);
      for (std::size_t i = 0; i < rows.size(); ++i) out.vectors[k * n + rows[i]] = v[i];
    }
  }
  return out;
}

inline EigenDecomposition eigensolve(const GalerkinConfig& config, const SymmetricMatrix& M,
                                     const std::vector<BasisFunction>& basis, bool want_vectors) {
  return config.parity_blocks ? eig_parity_blocks(M, basis, want_vectors) : eig_dense_symmetric(M, want_vectors);
}

struct GalerkinSolution {
  GalerkinConfig config;
  std::vector<BasisFunction> basis;
  SymmetricMatrix matrix;
  EigenDecomposition eigen;

  std::size_t size() const { return basis.size(); }
  const std::vector<double>& eigenvalues() const { return eigen.values; }
  /// Coefficients c^(k) of the k-th eigenvector (0-based) in the basis.
  std::span<const double> coefficients(std::size_t k) const { return eigen.vector(k); }

  /// Approximate eigenfunction f_k(s, u) = sum_j c_j^(k) Psi_j(s, u).
  double evaluate(std::size_t k, double s, double u) const {
    const auto c = coefficients(k);
    double v = 0.0;
    for (std::size_t j = 0; j < basis.size(); ++j) v += c[j] * basis[j](config.params.R, s, u);
    return v;
  }

  double rayleigh_quotient(std::span<const double> c) const {
    const auto Mc = matrix.multiply(c);
    return dot(c, Mc) / dot(c, c);
  }
};

inline GalerkinSolution solve(const GalerkinConfig& config) {
  detail::validate(config);
  GalerkinSolution sol;
  sol.config = config;
  sol.basis = galerkin_basis(config);
  sol.matrix = assemble(config, sol.basis);
  sol.eigen = eigensolve(config, sol.matrix, sol.basis, true);
  return sol;
}

/// Strong-form residuals || L f_k - lambda_k f_k ||_{L2} for k = 0..count-1, with
/// L Psi_j = -f_a^-2 Psi_j'' + 2 f_a^-3 (d_s f_a) Psi_j' + a^-2 (n pi/2)^2 Psi_j + V Psi_j
/// evaluated pointwise on a grid twice as fine as the assembly grid.
inline std::vector<double> residual_norms(const GalerkinSolution& sol, std::size_t count) {
  if (count > sol.size()) throw input_error("residual requested for " + std::to_string(count) + " of " +
                                            std::to_string(sol.size()) + " eigenpairs");
  const StripParams& p = sol.config.params;
  const auto sizes = detail::grid_sizes(sol.config, sol.basis);
  const QuadratureGrid grid = make_grid(p.length(), 2 * sizes.s_points, 2 * sizes.u_points);
  const std::size_t S = grid.s_nodes.size(), U = grid.u_nodes.size(), N = sol.size();
  const double inv_a2 = 1.0 / (p.a * p.a);

  std::vector<double> out(count, 0.0);
  std::vector<double> lpsi(N), psi(N);
  for (std::size_t i = 0; i < S; ++i) {
    const double s = grid.s_nodes[i];
    for (std::size_t l = 0; l < U; ++l) {
      const double u = grid.u_nodes[l];
      const auto g = detail::node_geometry(p, sol.config.geometry, s, u);
      for (std::size_t j = 0; j < N; ++j) {
        const BasisFunction& b = sol.basis[j];
        const double t = b.transverse(u);
        const double lv = b.longitudinal(p.R, s);
        psi[j] = lv * t;
        lpsi[j] = (-g.inv_f2 * b.longitudinal_d2(p.R, s) + g.drift * b.longitudinal_d1(p.R, s)) * t +
                  (inv_a2 * b.transverse_eigenvalue() + g.potential) * psi[j];
      }
      const double w = grid.s_weights[i] * grid.u_weights[l];
      for (std::size_t k = 0; k < count; ++k) {
        const auto c = sol.coefficients(k);
        const double r = dot(c, lpsi) - sol.eigen.values[k] * dot(c, psi);
        out[k] += w * r * r;
      }
    }
  }
  for (double& r : out) r = std::sqrt(r);
  return out;
}

inline double residual_norm(const GalerkinSolution& sol, std::size_t k) {
  if (k >= sol.size()) throw input_error("eigenpair index " + std::to_string(k) + " out of range");
  return residual_norms(sol, k + 1)[k];
}

/// Effective eigenfunctions written in the flat basis. The Mathieu harmonics of
/// ce_m / se_m at eta = s/2R are exactly the cosine / sine basis harmonics, so the
/// expansion is exact up to the truncation of the basis.
struct EffectiveExpansion {
  std::vector<ModeIndex> modes;
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> coefficients;  // one N-vector per mode
  std::vector<double> truncation;                 // 1 - ||projection||^2
};

inline EffectiveExpansion effective_in_basis(const StripParams& p, const std::vector<BasisFunction>& basis,
                                             std::size_t count) {
  if (count == 0) throw input_error("effective expansion count must be at least 1");
  std::map<BasisFunction, std::size_t> where;
  for (std::size_t j = 0; j < basis.size(); ++j) where.emplace(basis[j], j);

  const Spectrum eff = effective_spectrum(p, count);
  const auto values = eff.values(count);
  const auto modes = eff.modes(count);
  EffectiveExpansion out;
  for (std::size_t idx = 0; idx < count; ++idx) {
    const ModeIndex& mode = modes[idx];
    const bool ce = mode.family == ModeFamily::eff_ce;
    const MathieuFunction fn = mathieu_function(ce ? MathieuKind::ce : MathieuKind::se, mode.m, kEffectiveMathieuQ);
    std::vector<double> c(basis.size(), 0.0);
    double missing = 0.0;
    for (std::size_t k = 0; k < fn.coefficients().size(); ++k) {
      const int h = fn.harmonic(k);
      // (pi R)^-1/2 A_0 equals sqrt2 A_0 times the normalised constant (2 pi R)^-1/2
      const double coef = fn.coefficients()[k] * (h == 0 ? std::numbers::sqrt2 : 1.0);
      const auto it = where.find(BasisFunction{h, ce ? Trig::cos : Trig::sin, mode.n});
      if (it == where.end())
        missing += coef * coef;
      else
        c[it->second] = coef;
    }
    if (missing > kCapacityTolerance)
      throw capacity_error("basis of size " + std::to_string(basis.size()) + " holds only " +
                           std::to_string(100.0 * (1.0 - missing)) + "% of effective mode " + to_string(mode));
    out.modes.push_back(mode);
    out.eigenvalues.push_back(values[idx]);
    out.coefficients.push_back(std::move(c));
    out.truncation.push_back(missing);
  }
  return out;
}

inline EffectiveExpansion effective_in_basis(const GalerkinConfig& config, std::size_t count) {
  detail::validate(config);
  return effective_in_basis(config.params, galerkin_basis(config), count);
}

}  // namespace moebius
