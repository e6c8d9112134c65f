#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "wgflow/certificate.hpp"
#include "wgflow/errors.hpp"
#include "wgflow/grid.hpp"
#include "wgflow/jko.hpp"

namespace wgflow {

/// Header comment identifying the certificate table layout.
inline constexpr const char* kCertificateSchema = "# wgflow-certificates v1";

/// Trajectory document: time series plus the density samples at every stamp.
inline nlohmann::json trajectory_json(const JkoTrajectory& traj) {
  nlohmann::json j;
  const auto& u0 = traj.states.front();
  std::vector<double> x(u0.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = u0.midpoint(i);
  j["tau"] = traj.tau;
  j["domain"] = {u0.domain().lo(), u0.domain().hi()};
  j["x"] = x;
  j["times"] = traj.times;
  j["energies"] = traj.energies;
  j["entropies"] = traj.entropies;
  j["step_distances"] = traj.step_distances;
  nlohmann::json states = nlohmann::json::array();
  for (const auto& s : traj.states) states.push_back(std::vector<double>(s.values().begin(), s.values().end()));
  j["states"] = std::move(states);
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& d : traj.diagnostics) {
    steps.push_back({{"converged", d.converged},
                     {"corrupted", d.corrupted},
                     {"iterations", d.iterations},
                     {"objective_start", d.objective_start},
                     {"objective_end", d.objective_end},
                     {"decrement", d.decrement}});
  }
  j["steps"] = std::move(steps);
  return j;
}

/// Shortest decimal form that reads back to the same double.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Quotes a CSV field when it contains a separator or quote.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_certificates_csv(std::ostream& os, const std::vector<CertificateReport>& reports) {
  os << kCertificateSchema << "\n";
  os << "certificate,step,lhs,rhs,slack,tolerance,pass\n";
  for (const auto& r : reports) {
    os << csv_field(r.name) << ',' << r.step << ',' << format_number(r.lhs) << ',' << format_number(r.rhs) << ','
       << format_number(r.slack) << ',' << format_number(r.tolerance) << ',' << (r.pass ? "true" : "false")
       << "\n";
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw Error("write to " + path.string() + " failed");
}

/**
 * Reads a two-column CSV (x, u) and samples it at the cell midpoints by
 * linear interpolation, constant beyond the first and last rows.
 *
 * Lines starting with '#' and lines whose first field is not a number are
 * skipped. The result is normalized to unit mass.
 */
inline GridDensity read_density_csv(const std::filesystem::path& path, Interval domain, std::size_t cells) {
  std::ifstream is(path);
  if (!is) throw ConfigurationError("cannot open initial datum file " + path.string());
  std::vector<std::pair<double, double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x = 0.0, u = 0.0;
    if (!(ls >> x >> u)) continue;
    rows.emplace_back(x, u);
  }
  if (rows.size() < 2) throw ConfigurationError("initial datum file " + path.string() + " needs at least two rows");
  std::sort(rows.begin(), rows.end());
  return GridDensity::sample(domain, cells, [&](double x) {
    if (x <= rows.front().first) return rows.front().second;
    if (x >= rows.back().first) return rows.back().second;
    const auto it = std::lower_bound(rows.begin(), rows.end(), std::make_pair(x, -std::numeric_limits<double>::infinity()));
    const auto& [x1, u1] = *it;
    const auto& [x0, u0] = *(it - 1);
    const double t = x1 > x0 ? (x - x0) / (x1 - x0) : 0.0;
    return u0 + t * (u1 - u0);
  });
}

}  // namespace wgflow
