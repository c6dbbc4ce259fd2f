#pragma once

// Tensor-product quadrature on the rescaled rectangle (0, 2 pi R) x (-1, 1):
// periodic trapezoid rule along the strip, Gauss-Legendre across it.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "moebius/error.hpp"

namespace moebius {

struct GaussLegendre {
  std::vector<double> nodes;  // ascending
  std::vector<double> weights;
};

/// Nodes are found by Newton iteration on the three-term Legendre recurrence,
/// starting from the Tricomi approximation.
inline GaussLegendre gauss_legendre(std::size_t order) {
  if (order == 0) throw input_error("Gauss-Legendre order must be at least 1");
  GaussLegendre rule;
  rule.nodes.assign(order, 0.0);
  rule.weights.assign(order, 0.0);
  const std::size_t n = order;
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double dp = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      dp = nd * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 4e-16) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw numerical_error("Newton iteration for Gauss-Legendre node " + std::to_string(i) + " of order " +
                            std::to_string(n) + " did not converge");
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double kd = static_cast<double>(k);
      const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
      p0 = p1;
      p1 = p2;
    }
    dp = nd * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

struct QuadratureGrid {
  std::vector<double> s_nodes;
  std::vector<double> s_weights;
  std::vector<double> u_nodes;
  std::vector<double> u_weights;

  std::size_t size() const { return s_nodes.size() * u_nodes.size(); }
};

inline QuadratureGrid make_grid(double length, std::size_t s_points, std::size_t u_points) {
  if (!(length > 0.0)) throw input_error("quadrature interval length must be positive");
  if (s_points == 0 || u_points == 0) throw input_error("quadrature grid needs at least one node per direction");
  QuadratureGrid g;
  const double h = length / static_cast<double>(s_points);
  g.s_nodes.resize(s_points);
  g.s_weights.assign(s_points, h);
  for (std::size_t i = 0; i < s_points; ++i) g.s_nodes[i] = h * static_cast<double>(i);
  auto gl = gauss_legendre(u_points);
  g.u_nodes = std::move(gl.nodes);
  g.u_weights = std::move(gl.weights);
  return g;
}

/// Suggested node counts for integrands built from basis functions with
/// harmonics up to `max_harmonic` (in units of 1/2R) and transverse index up to `max_transverse`.
inline std::size_t default_s_points(int max_harmonic) { return 4 * static_cast<std::size_t>(max_harmonic) + 32; }
inline std::size_t default_u_points(int max_transverse) { return 2 * static_cast<std::size_t>(max_transverse) + 16; }

/// Tensor-product sum, accumulated in fixed (s-major) order.
template <class F>
double integrate_2d(const QuadratureGrid& grid, F&& f) {
  double total = 0.0;
  for (std::size_t i = 0; i < grid.s_nodes.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < grid.u_nodes.size(); ++j) {
      const double v = f(grid.s_nodes[i], grid.u_nodes[j]);
      if (!std::isfinite(v))
        throw input_error("non-finite integrand at node (s=" + std::to_string(grid.s_nodes[i]) +
                          ", u=" + std::to_string(grid.u_nodes[j]) + ")");
      row += grid.u_weights[j] * v;
    }
    total += grid.s_weights[i] * row;
  }
  return total;
}

}  // namespace moebius
