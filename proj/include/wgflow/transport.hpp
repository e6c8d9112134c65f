#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wgflow/certificate.hpp"
#include "wgflow/errors.hpp"
#include "wgflow/grid.hpp"
#include "wgflow/test_function.hpp"

namespace wgflow {

namespace detail {

/// Cumulative mass at the M+1 faces, normalized so the last entry is exactly 1.
inline std::vector<double> face_cdf(const GridDensity& u) {
  const std::size_t m = u.size();
  std::vector<double> c(m + 1, 0.0);
  for (std::size_t j = 0; j < m; ++j) c[j + 1] = c[j] + u[j];
  const double total = c[m];
  for (double& v : c) v /= total;
  c[m] = 1.0;
  return c;
}

/// Generalized inverse of a piecewise-linear CDF given at uniform faces.
inline double invert_cdf(std::span<const double> cdf, double lo, double h, double level) {
  if (level <= 0.0) {
    std::size_t f = 0;
    while (f + 1 < cdf.size() && cdf[f + 1] <= 0.0) ++f;
    return lo + static_cast<double>(f) * h;
  }
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), level);
  const std::size_t f1 = static_cast<std::size_t>(it - cdf.begin());
  const std::size_t f0 = f1 - 1;
  const double t = (level - cdf[f0]) / (cdf[f1] - cdf[f0]);
  return lo + (static_cast<double>(f0) + std::clamp(t, 0.0, 1.0)) * h;
}

}  // namespace detail

/// Quantile function of u at each level: the left-continuous inverse of its CDF.
inline std::vector<double> quantile(const GridDensity& u, std::span<const double> levels) {
  const auto cdf = detail::face_cdf(u);
  std::vector<double> out;
  out.reserve(levels.size());
  double prev = 0.0;
  for (double s : levels) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw DomainError("quantile: level " + std::to_string(s) + " outside [0, 1]");
    }
    if (s < prev) throw DomainError("quantile: levels must be nondecreasing");
    prev = s;
    out.push_back(detail::invert_cdf(cdf, u.domain().lo(), u.spacing(), s));
  }
  return out;
}

/**
 * Quadratic Wasserstein distance between two grid densities on the same domain.
 *
 * Both quantile functions are piecewise linear in the mass variable, so the
 * squared L2 distance between them is integrated exactly on the merged set of
 * breakpoints.
 */
inline double wasserstein2(const GridDensity& u, const GridDensity& v) {
  if (!(u.domain() == v.domain())) throw ConfigurationError("wasserstein2: domains differ");
  const auto cu = detail::face_cdf(u);
  const auto cv = detail::face_cdf(v);
  const double hu = u.spacing(), hv = v.spacing();
  const double lo = u.domain().lo();
  auto next_positive = [](const std::vector<double>& c, std::size_t j) {
    while (j + 1 < c.size() && c[j + 1] <= c[j]) ++j;
    return j;
  };
  // Position of level s inside cell j of a density with face CDF c.
  auto position = [lo](const std::vector<double>& c, double h, std::size_t j, double s) {
    const double t = std::clamp((s - c[j]) / (c[j + 1] - c[j]), 0.0, 1.0);
    return lo + (static_cast<double>(j) + t) * h;
  };
  std::size_t i = next_positive(cu, 0);
  std::size_t j = next_positive(cv, 0);
  double s = 0.0;
  double total = 0.0;
  while (i + 1 < cu.size() && j + 1 < cv.size()) {
    const double s_next = std::min(cu[i + 1], cv[j + 1]);
    if (s_next > s) {
      const double da = position(cu, hu, i, s) - position(cv, hv, j, s);
      const double db = position(cu, hu, i, s_next) - position(cv, hv, j, s_next);
      total += (s_next - s) * (da * da + da * db + db * db) / 3.0;
      s = s_next;
    }
    if (cu[i + 1] <= s) i = next_positive(cu, i + 1);
    if (cv[j + 1] <= s) j = next_positive(cv, j + 1);
  }
  return std::sqrt(std::max(total, 0.0));
}

/// Exact W2 between the pushforwards of two maps on the same mass grid.
inline double wasserstein2(const TransportMap& a, const TransportMap& b) {
  if (a.cells() != b.cells() || !(a.domain() == b.domain())) {
    throw ConfigurationError("wasserstein2: maps have different mass grids or domains");
  }
  const double dm = 1.0 / static_cast<double>(a.cells());
  double total = 0.0;
  for (std::size_t i = 0; i < a.cells(); ++i) {
    const double da = a[i] - b[i], db = a[i + 1] - b[i + 1];
    total += dm * (da * da + da * db + db * db) / 3.0;
  }
  return std::sqrt(total);
}

/// Integral of u log u with 0 log 0 = 0.
inline double boltzmann_entropy(const GridDensity& u) {
  double s = 0.0;
  for (double v : u.values()) {
    if (v > 0.0) s += v * std::log(v);
  }
  return u.spacing() * s;
}

/**
 * Location of each density-grid face inside the map: node interval and local
 * coordinate. Faces left of the first node have cell = npos and t = 0; faces
 * right of the last node have cell = npos and t = 1.
 */
struct FaceLocation {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t cell = npos;
  double t = 0.0;
};

inline std::vector<FaceLocation> locate_faces(std::span<const double> nodes, const Interval& domain,
                                              std::size_t cells) {
  const double h = domain.length() / static_cast<double>(cells);
  const std::size_t k = nodes.size() - 1;
  std::vector<FaceLocation> loc(cells + 1);
  std::size_t i = 0;
  for (std::size_t f = 0; f <= cells; ++f) {
    const double x = f == cells ? domain.hi() : domain.lo() + static_cast<double>(f) * h;
    if (x <= nodes[0]) {
      loc[f] = {FaceLocation::npos, 0.0};
      continue;
    }
    if (x >= nodes[k]) {
      loc[f] = {FaceLocation::npos, 1.0};
      continue;
    }
    while (nodes[i + 1] <= x) ++i;
    loc[f] = {i, (x - nodes[i]) / (nodes[i + 1] - nodes[i])};
  }
  return loc;
}

/// Cumulative mass of the map pushforward at a located face.
inline double map_cdf(const FaceLocation& loc, std::size_t k) {
  if (loc.cell == FaceLocation::npos) return loc.t;
  return (static_cast<double>(loc.cell) + loc.t) / static_cast<double>(k);
}

/**
 * Pushforward density of a map resampled onto a uniform grid.
 *
 * The pushforward is piecewise constant (mass 1/K per map cell); its exact
 * cell averages on the grid are differences of the piecewise-linear CDF.
 */
inline GridDensity density_from_map(const TransportMap& x, std::size_t cells = 0) {
  if (cells == 0) cells = x.cells();
  const auto loc = locate_faces(x.positions(), x.domain(), cells);
  const double h = x.domain().length() / static_cast<double>(cells);
  std::vector<double> u(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    u[j] = std::max(0.0, map_cdf(loc[j + 1], x.cells()) - map_cdf(loc[j], x.cells())) / h;
  }
  return GridDensity::normalized(x.domain(), std::move(u));
}

/**
 * Monotone map whose nodes are the quantiles of u at levels i/K.
 *
 * Interior zero-density plateaus wider than L/K cannot be represented by a
 * map with piecewise-constant pushforward and raise DegenerateQuantileError.
 */
inline TransportMap map_from_density(const GridDensity& u, std::size_t k) {
  if (k < kMinCells) throw DomainError("map_from_density: need K >= " + std::to_string(kMinCells));
  const std::size_t m = u.size();
  const double h = u.spacing();
  std::size_t first = 0, last = m;
  while (first < m && u[first] <= 0.0) ++first;
  while (last > 0 && u[last - 1] <= 0.0) --last;
  std::size_t run = 0;
  for (std::size_t j = first; j < last; ++j) {
    run = u[j] <= 0.0 ? run + 1 : 0;
    if (static_cast<double>(run) * h > u.domain().length() / static_cast<double>(k)) {
      throw DegenerateQuantileError("map_from_density: interior vacuum region wider than map resolution");
    }
  }
  std::vector<double> levels(k + 1);
  for (std::size_t i = 0; i <= k; ++i) levels[i] = static_cast<double>(i) / static_cast<double>(k);
  levels[k] = 1.0;
  return TransportMap(u.domain(), quantile(u, levels));
}

/// One fourth-order Runge-Kutta step of y' = phi'(y), with first and second tangents.
struct FlowPoint {
  double y = 0.0;
  double dy = 1.0;   ///< derivative of the endpoint with respect to the start point
  double ddy = 0.0;  ///< second derivative with respect to the start point
};

inline FlowPoint flow_step(const TestFunction& phi, double y0, double s) {
  auto rhs = [&](const FlowPoint& p) {
    const double a = phi.d1(p.y), b = phi.d2(p.y), c = phi.d3(p.y);
    return FlowPoint{a, b * p.dy, c * p.dy * p.dy + b * p.ddy};
  };
  auto shift = [](const FlowPoint& p, const FlowPoint& k, double w) {
    return FlowPoint{p.y + w * k.y, p.dy + w * k.dy, p.ddy + w * k.ddy};
  };
  const FlowPoint p0{y0, 1.0, 0.0};
  const FlowPoint k1 = rhs(p0);
  const FlowPoint k2 = rhs(shift(p0, k1, 0.5 * s));
  const FlowPoint k3 = rhs(shift(p0, k2, 0.5 * s));
  const FlowPoint k4 = rhs(shift(p0, k3, s));
  return FlowPoint{y0 + s / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
                   1.0 + s / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy),
                   s / 6.0 * (k1.ddy + 2.0 * k2.ddy + 2.0 * k3.ddy + k4.ddy)};
}

/// Advances every node along the gradient flow of phi for time s.
inline TransportMap perturbation_flow(const TransportMap& x, const TestFunction& phi, double s) {
  std::vector<double> y(x.positions().begin(), x.positions().end());
  if (s == 0.0) return x;
  const double gap = min_gap(x.domain());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = flow_step(phi, y[i], s).y;
    if (!x.domain().contains(y[i])) {
      // Endpoints are fixed points; tiny excursions there are rounding.
      const double tol = 1e-14 * x.domain().length();
      if (y[i] < x.domain().lo() && y[i] > x.domain().lo() - tol) {
        y[i] = x.domain().lo();
      } else if (y[i] > x.domain().hi() && y[i] < x.domain().hi() + tol) {
        y[i] = x.domain().hi();
      } else {
        throw StepTooLargeError("perturbation_flow: node left the domain");
      }
    }
    if (i > 0 && y[i] - y[i - 1] < gap) {
      throw StepTooLargeError("perturbation_flow: flow time too large, order of nodes lost");
    }
  }
  return TransportMap(x.domain(), std::move(y));
}

/// Smooth density profile with its first derivative, used by the distortion check.
struct SmoothProfile {
  std::function<double(double)> u;
  std::function<double(double)> du;
};

/**
 * Finite-difference check of the two distortion identities at s = 0.
 *
 * At every node y of x: V_s = dX_s/dy has d/ds V_s = phi''(y), and the
 * transported slope G_s = u'/V_s^2 - u V_s'/V_s^3 has
 * d/ds G_s = -2 u' phi'' - u phi'''. Each report compares the largest
 * central-difference error with tol_fd times the largest analytic value.
 */
inline std::vector<CertificateReport> volume_distortion_check(
    const TransportMap& x, const TestFunction& phi, std::span<const double> s_values,
    const SmoothProfile* profile = nullptr, double tol_fd = 1e-5) {
  const double c = 1.0 / x.domain().length();
  SmoothProfile uniform{[c](double) { return c; }, [](double) { return 0.0; }};
  const SmoothProfile& prof = profile != nullptr ? *profile : uniform;
  std::vector<CertificateReport> out;
  for (double s : s_values) {
    if (!(s > 0.0)) throw DomainError("volume_distortion_check: flow times must be positive");
    perturbation_flow(x, phi, s);
    perturbation_flow(x, phi, -s);
    double err_v = 0.0, scale_v = 0.0, err_g = 0.0, scale_g = 0.0;
    for (double y : x.positions()) {
      const FlowPoint fp = flow_step(phi, y, s);
      const FlowPoint fm = flow_step(phi, y, -s);
      const double u = prof.u(y), du = prof.du(y);
      auto slope = [&](const FlowPoint& p) {
        return du / (p.dy * p.dy) - u * p.ddy / (p.dy * p.dy * p.dy);
      };
      const double dv = (fp.dy - fm.dy) / (2.0 * s);
      const double dg = (slope(fp) - slope(fm)) / (2.0 * s);
      const double v_exact = phi.d2(y);
      const double g_exact = -2.0 * du * phi.d2(y) - u * phi.d3(y);
      err_v = std::max(err_v, std::abs(dv - v_exact));
      err_g = std::max(err_g, std::abs(dg - g_exact));
      scale_v = std::max(scale_v, std::abs(v_exact));
      scale_g = std::max(scale_g, std::abs(g_exact));
    }
    const std::string ctx = "s=" + std::to_string(s);
    out.push_back(make_report("volume_distortion_rate", -1, err_v,
                              tol_fd * (scale_v > 0.0 ? scale_v : 1.0), 0.0, ctx));
    out.push_back(make_report("transported_gradient_rate", -1, err_g,
                              tol_fd * (scale_g > 0.0 ? scale_g : 1.0), 0.0, ctx));
  }
  return out;
}

}  // namespace wgflow
