#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "wgflow/grid.hpp"

namespace wgflow {

/**
 * Difference stencils on the cell-midpoint grid with reflecting closure.
 *
 * Faces f = 0..M separate cells f-1 and f. Interior faces carry the slope
 * (u_f - u_{f-1}) / h; the two boundary faces carry slope 0, which is the
 * even reflection across the endpoint and encodes the Neumann condition.
 */
namespace stencil {

/// Slopes at the M+1 faces; both boundary entries are zero.
inline std::vector<double> face_slopes(std::span<const double> u, double h) {
  const std::size_t m = u.size();
  std::vector<double> p(m + 1, 0.0);
  for (std::size_t f = 1; f < m; ++f) p[f] = (u[f] - u[f - 1]) / h;
  return p;
}

/// Values at the M+1 faces: averages inside, the adjacent cell value at the boundary.
inline std::vector<double> face_values(std::span<const double> u) {
  const std::size_t m = u.size();
  std::vector<double> z(m + 1);
  z[0] = u[0];
  z[m] = u[m - 1];
  for (std::size_t f = 1; f < m; ++f) z[f] = 0.5 * (u[f] + u[f - 1]);
  return z;
}

/// Quadrature weights at the faces; they sum to the domain length.
inline std::vector<double> face_weights(std::size_t m, double h) {
  std::vector<double> w(m + 1, h);
  w[0] = w[m] = 0.5 * h;
  return w;
}

/// Central first derivative at cell midpoints using the even reflection u_{-1} = u_0.
inline std::vector<double> central_gradient(std::span<const double> u, double h) {
  const std::size_t m = u.size();
  std::vector<double> g(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double left = j == 0 ? u[0] : u[j - 1];
    const double right = j + 1 == m ? u[m - 1] : u[j + 1];
    g[j] = (right - left) / (2.0 * h);
  }
  return g;
}

/// Compact second derivative at cell midpoints: the face-slope difference.
inline std::vector<double> second_derivative(std::span<const double> u, double h) {
  const auto p = face_slopes(u, h);
  std::vector<double> d(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) d[j] = (p[j + 1] - p[j]) / h;
  return d;
}

inline double l2_squared(std::span<const double> u, double h) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return h * s;
}

/// Squared L2 norm of the derivative, from the face slopes.
inline double gradient_squared(std::span<const double> u, double h) {
  double s = 0.0;
  for (std::size_t f = 1; f < u.size(); ++f) {
    const double p = (u[f] - u[f - 1]) / h;
    s += p * p;
  }
  return h * s;
}

inline double hessian_squared(std::span<const double> u, double h) {
  return l2_squared(second_derivative(u, h), h);
}

}  // namespace stencil

/// Discrete Sobolev norms: l2, h1 = sqrt(l2^2 + |u'|^2), h2 = sqrt(h1^2 + |u''|^2).
struct SobolevNorms {
  double l2 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double grad = 0.0;  ///< L2 norm of the first derivative
  double hess = 0.0;  ///< L2 norm of the second derivative
};

inline SobolevNorms sobolev_norms(std::span<const double> u, double h) {
  SobolevNorms n;
  const double a = stencil::l2_squared(u, h);
  const double b = stencil::gradient_squared(u, h);
  const double c = stencil::hessian_squared(u, h);
  n.l2 = std::sqrt(a);
  n.grad = std::sqrt(b);
  n.hess = std::sqrt(c);
  n.h1 = std::sqrt(a + b);
  n.h2 = std::sqrt(a + b + c);
  return n;
}

inline SobolevNorms sobolev_norms(const GridDensity& u) {
  return sobolev_norms(u.values(), u.spacing());
}

}  // namespace wgflow
