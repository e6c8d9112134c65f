#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace wgflow {

/**
 * One checked inequality lhs <= rhs.
 *
 * slack = rhs - lhs is signed so that a positive value means the inequality
 * holds with room to spare; pass is true exactly when slack >= -tolerance.
 */
struct CertificateReport {
  std::string name;
  int step = -1;  ///< time step index, or -1 for run-level checks
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::string context;
};

/// Builds a report and derives slack and pass from the two sides.
inline CertificateReport make_report(std::string name, int step, double lhs, double rhs,
                                     double tolerance, std::string context = {}) {
  CertificateReport r;
  r.name = std::move(name);
  r.step = step;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.tolerance = tolerance;
  r.pass = std::isfinite(r.slack) && r.slack >= -tolerance;
  r.context = std::move(context);
  return r;
}

inline bool all_pass(const std::vector<CertificateReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
}

/// Smallest slack relative to tolerance, i.e. the report closest to failing.
inline const CertificateReport* worst(const std::vector<CertificateReport>& reports) {
  const CertificateReport* best = nullptr;
  for (const auto& r : reports) {
    if (best == nullptr || r.slack + r.tolerance < best->slack + best->tolerance) best = &r;
  }
  return best;
}

inline void append(std::vector<CertificateReport>& into, std::vector<CertificateReport> from) {
  into.insert(into.end(), std::make_move_iterator(from.begin()), std::make_move_iterator(from.end()));
}

}  // namespace wgflow
