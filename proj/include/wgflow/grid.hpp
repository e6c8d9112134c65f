#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wgflow/errors.hpp"

namespace wgflow {

/// Closed interval [lo, hi] with lo < hi.
class Interval {
 public:
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
      throw DomainError("Interval: requires finite lo < hi, got [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
    }
  }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double length() const noexcept { return hi_ - lo_; }
  bool contains(double x) const noexcept { return x >= lo_ && x <= hi_; }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_;
  double hi_;
};

/// Minimum admissible spacing between consecutive map nodes.
inline double min_gap(const Interval& domain) { return domain.length() * 1e-9; }

/// Tolerance on the unit-mass invariant of a GridDensity.
inline constexpr double kMassTolerance = 1e-12;

/// Smallest admissible number of cells.
inline constexpr std::size_t kMinCells = 8;

/**
 * Nonnegative probability density sampled at the midpoints of M uniform cells.
 *
 * The samples are interpreted as cell averages, so the mass is h * sum(values).
 */
class GridDensity {
 public:
  GridDensity(Interval domain, std::vector<double> values)
      : domain_(domain), values_(std::move(values)) {
    if (values_.size() < kMinCells) {
      throw DomainError("GridDensity: need at least " + std::to_string(kMinCells) + " cells, got " +
                        std::to_string(values_.size()));
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw EvaluationError("GridDensity: non-finite sample");
      if (v < 0.0) throw DomainError("GridDensity: negative sample " + std::to_string(v));
    }
    const double m = mass();
    if (std::abs(m - 1.0) > kMassTolerance) {
      throw DomainError("GridDensity: mass " + std::to_string(m) + " differs from 1");
    }
  }

  /// Rescales nonnegative samples to unit mass before validation.
  static GridDensity normalized(Interval domain, std::vector<double> values) {
    if (values.empty()) throw DomainError("GridDensity: empty sample vector");
    const double h = domain.length() / static_cast<double>(values.size());
    double total = 0.0;
    for (double v : values) {
      if (!std::isfinite(v)) throw EvaluationError("GridDensity: non-finite sample");
      if (v < 0.0) throw DomainError("GridDensity: negative sample " + std::to_string(v));
      total += v;
    }
    total *= h;
    if (!(total > 0.0)) throw DomainError("GridDensity: zero total mass");
    for (double& v : values) v /= total;
    return GridDensity(domain, std::move(values));
  }

  /// Density evaluated from a callable at cell midpoints, then normalized.
  template <typename Fn>
  static GridDensity sample(Interval domain, std::size_t cells, Fn&& fn) {
    std::vector<double> v(cells);
    const double h = domain.length() / static_cast<double>(cells);
    for (std::size_t j = 0; j < cells; ++j) v[j] = fn(domain.lo() + (static_cast<double>(j) + 0.5) * h);
    return normalized(domain, std::move(v));
  }

  static GridDensity uniform(Interval domain, std::size_t cells) {
    return GridDensity(domain, std::vector<double>(cells, 1.0 / domain.length()));
  }

  const Interval& domain() const noexcept { return domain_; }
  std::size_t size() const noexcept { return values_.size(); }
  double spacing() const noexcept { return domain_.length() / static_cast<double>(values_.size()); }
  double midpoint(std::size_t j) const noexcept {
    return domain_.lo() + (static_cast<double>(j) + 0.5) * spacing();
  }
  double face(std::size_t f) const noexcept {
    return domain_.lo() + static_cast<double>(f) * spacing();
  }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t j) const noexcept { return values_[j]; }

  double mass() const noexcept {
    return spacing() * std::accumulate(values_.begin(), values_.end(), 0.0);
  }

 private:
  Interval domain_;
  std::vector<double> values_;
};

/**
 * Monotone map from mass coordinates to positions: node i carries mass level i/K.
 *
 * Positions are strictly increasing with spacing at least min_gap(domain) and
 * lie in the closed domain.
 */
class TransportMap {
 public:
  TransportMap(Interval domain, std::vector<double> positions)
      : domain_(domain), positions_(std::move(positions)) {
    if (positions_.size() < kMinCells + 1) {
      throw DomainError("TransportMap: need at least " + std::to_string(kMinCells) + " cells");
    }
    const double gap = min_gap(domain_);
    for (std::size_t i = 0; i < positions_.size(); ++i) {
      const double x = positions_[i];
      if (!std::isfinite(x)) throw EvaluationError("TransportMap: non-finite node");
      if (!domain_.contains(x)) {
        throw DomainError("TransportMap: node " + std::to_string(i) + " at " + std::to_string(x) +
                          " outside domain");
      }
      if (i > 0 && x - positions_[i - 1] < gap) {
        throw MonotonicityError("TransportMap: gap below minimum between nodes " +
                                std::to_string(i - 1) + " and " + std::to_string(i));
      }
    }
  }

  const Interval& domain() const noexcept { return domain_; }
  /// Number of cells K (one less than the node count).
  std::size_t cells() const noexcept { return positions_.size() - 1; }
  std::span<const double> positions() const noexcept { return positions_; }
  double operator[](std::size_t i) const noexcept { return positions_[i]; }
  double mass_level(std::size_t i) const noexcept {
    return static_cast<double>(i) / static_cast<double>(cells());
  }

 private:
  Interval domain_;
  std::vector<double> positions_;
};

}  // namespace wgflow
