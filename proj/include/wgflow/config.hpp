#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "wgflow/certificate.hpp"
#include "wgflow/diagnostics.hpp"
#include "wgflow/errors.hpp"
#include "wgflow/grid.hpp"
#include "wgflow/io.hpp"
#include "wgflow/jko.hpp"
#include "wgflow/lagrangian.hpp"
#include "wgflow/transport.hpp"

namespace wgflow {

/// Certificate groups that a run can enable.
inline const std::vector<std::string>& certificate_groups() {
  static const std::vector<std::string> groups = {
      "assumptions",       "energy_monotone",    "total_square_distance", "holder_continuity",
      "entropy_dissipation", "discrete_weak_form", "apriori",             "boundary_sign",
      "heat_flow_dissipation", "volume_distortion", "traceless_binomial", "refinement"};
  return groups;
}

/// A named model (integrand or initial datum) with its parameters.
struct ModelChoice {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
};

/// Everything needed to reproduce one run.
struct RunConfig {
  Interval domain{0.0, 1.0};
  std::size_t M = 256;
  std::size_t K = 256;
  ModelChoice lagrangian{"thin_film", nlohmann::json::object()};
  int dimension = 1;
  ModelChoice initial{"cosine_perturbation", {{"eps", 0.5}, {"k", 2}}};
  double tau = 1e-4;
  std::size_t n_steps = 100;
  std::size_t refine_levels = 1;
  double inner_tol = 1e-10;
  std::size_t inner_max_iter = 200;
  std::set<std::string> checks{certificate_groups().begin(), certificate_groups().end()};
  int phi_mode = 2;        ///< test function cos(k pi (x - lo) / L)
  double eta_lo = 0.2;     ///< temporal bump support as fractions of the horizon
  double eta_hi = 0.8;
  double beta = 1e-3;
  double slack_factor = 2.0;
  std::size_t traceless_samples = 10000;
  std::string output = "wgflow_out";
  std::uint64_t seed = 1;
  std::set<std::size_t> corrupt_steps;
  std::filesystem::path base_dir;  ///< directory against which relative file paths resolve

  double horizon() const { return tau * static_cast<double>(n_steps); }
};

namespace detail {

template <typename T>
T take(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("config key '") + key + "': " + e.what());
  }
}

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw ConfigurationError("unknown key '" + it.key() + "' in " + where);
  }
}

inline ModelChoice model_choice(const nlohmann::json& j, const char* where) {
  if (j.is_string()) return {j.get<std::string>(), nlohmann::json::object()};
  if (!j.is_object() || !j.contains("name")) {
    throw ConfigurationError(std::string(where) + " must be a name or an object with a 'name' key");
  }
  ModelChoice m;
  m.name = j.at("name").get<std::string>();
  m.params = j;
  m.params.erase("name");
  return m;
}

inline double param(const ModelChoice& m, const char* key, double fallback) {
  return take<double>(m.params, key, fallback);
}

inline double required(const ModelChoice& m, const char* key) {
  if (!m.params.contains(key)) throw ConfigurationError(m.name + " needs parameter '" + key + "'");
  return take<double>(m.params, key, 0.0);
}

}  // namespace detail

/// Parses a configuration document; every key is optional.
inline RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw ConfigurationError("config must be a JSON object");
  detail::reject_unknown(j,
                         {"domain", "grid", "lagrangian", "dimension", "initial", "scheme", "certificates",
                          "weak_form", "traceless_samples", "output", "seed", "corrupt_steps"},
                         "config");
  RunConfig c;
  c.base_dir = base_dir;
  if (j.contains("domain")) {
    const auto d = detail::take<std::vector<double>>(j, "domain", {});
    if (d.size() != 2) throw ConfigurationError("domain must be [lo, hi]");
    try {
      c.domain = Interval(d[0], d[1]);
    } catch (const DomainError& e) {
      throw ConfigurationError(e.what());
    }
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    detail::reject_unknown(g, {"M", "K"}, "grid");
    c.M = detail::take<std::size_t>(g, "M", c.M);
    c.K = detail::take<std::size_t>(g, "K", c.K);
  }
  if (j.contains("lagrangian")) c.lagrangian = detail::model_choice(j.at("lagrangian"), "lagrangian");
  c.dimension = detail::take<int>(j, "dimension", c.dimension);
  if (j.contains("initial")) c.initial = detail::model_choice(j.at("initial"), "initial");
  if (j.contains("scheme")) {
    const auto& s = j.at("scheme");
    detail::reject_unknown(s, {"tau", "n_steps", "refine_levels", "inner_tol", "inner_max_iter"}, "scheme");
    c.tau = detail::take<double>(s, "tau", c.tau);
    c.n_steps = detail::take<std::size_t>(s, "n_steps", c.n_steps);
    c.refine_levels = detail::take<std::size_t>(s, "refine_levels", c.refine_levels);
    c.inner_tol = detail::take<double>(s, "inner_tol", c.inner_tol);
    c.inner_max_iter = detail::take<std::size_t>(s, "inner_max_iter", c.inner_max_iter);
  }
  if (j.contains("certificates")) {
    const auto names = detail::take<std::vector<std::string>>(j, "certificates", {});
    c.checks.clear();
    for (const auto& n : names) {
      if (n == "all") {
        c.checks.insert(certificate_groups().begin(), certificate_groups().end());
      } else {
        c.checks.insert(n);
      }
    }
  }
  if (j.contains("weak_form")) {
    const auto& w = j.at("weak_form");
    detail::reject_unknown(w, {"phi_mode", "eta_window", "beta", "slack_factor"}, "weak_form");
    c.phi_mode = detail::take<int>(w, "phi_mode", c.phi_mode);
    if (w.contains("eta_window")) {
      const auto win = detail::take<std::vector<double>>(w, "eta_window", {});
      if (win.size() != 2) throw ConfigurationError("weak_form.eta_window must be [lo, hi]");
      c.eta_lo = win[0];
      c.eta_hi = win[1];
    }
    c.beta = detail::take<double>(w, "beta", c.beta);
    c.slack_factor = detail::take<double>(w, "slack_factor", c.slack_factor);
  }
  c.traceless_samples = detail::take<std::size_t>(j, "traceless_samples", c.traceless_samples);
  c.output = detail::take<std::string>(j, "output", c.output);
  c.seed = detail::take<std::uint64_t>(j, "seed", c.seed);
  if (j.contains("corrupt_steps")) {
    const auto steps = detail::take<std::vector<std::size_t>>(j, "corrupt_steps", {});
    c.corrupt_steps.insert(steps.begin(), steps.end());
  }
  return c;
}

/// Full configuration with all defaults made explicit.
inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json lag = c.lagrangian.params;
  lag["name"] = c.lagrangian.name;
  nlohmann::json ini = c.initial.params;
  ini["name"] = c.initial.name;
  return {{"domain", {c.domain.lo(), c.domain.hi()}},
          {"grid", {{"M", c.M}, {"K", c.K}}},
          {"lagrangian", lag},
          {"dimension", c.dimension},
          {"initial", ini},
          {"scheme",
           {{"tau", c.tau},
            {"n_steps", c.n_steps},
            {"refine_levels", c.refine_levels},
            {"inner_tol", c.inner_tol},
            {"inner_max_iter", c.inner_max_iter}}},
          {"certificates", std::vector<std::string>(c.checks.begin(), c.checks.end())},
          {"weak_form",
           {{"phi_mode", c.phi_mode},
            {"eta_window", {c.eta_lo, c.eta_hi}},
            {"beta", c.beta},
            {"slack_factor", c.slack_factor}}},
          {"traceless_samples", c.traceless_samples},
          {"output", c.output},
          {"seed", c.seed},
          {"corrupt_steps", std::vector<std::size_t>(c.corrupt_steps.begin(), c.corrupt_steps.end())}};
}

/// Builds the energy named in the configuration.
inline EnergyKind make_energy(const RunConfig& c) {
  const auto& m = c.lagrangian;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (m.name == "thin_film") return thin_film();
  if (m.name == "sqrt_mobility") return sqrt_mobility(c.dimension);
  if (m.name == "power_mobility") {
    const double alpha = detail::required(m, "alpha");
    const double coeff = detail::param(m, "C", 1.0);
    if (!(alpha > alpha_window(c.dimension) && alpha < 1.0)) {
      throw ValidationError("power_alpha_window: alpha = " + std::to_string(alpha) + " outside (" +
                            std::to_string(alpha_window(c.dimension)) + ", 1) for d = " +
                            std::to_string(c.dimension));
    }
    if (!(coeff > 0.0)) throw ValidationError("power_mobility: C must be positive");
    return power_mobility(alpha, coeff, c.dimension);
  }
  if (m.name == "custom_table") {
    const auto values = detail::take<std::vector<double>>(m.params, "values", {});
    const double dr = detail::required(m, "dr");
    try {
      return custom_table(values, dr, detail::param(m, "gamma", nan), detail::param(m, "c", nan),
                          detail::param(m, "C", nan), detail::param(m, "D", nan));
    } catch (const DomainError& e) {
      throw ConfigurationError(e.what());
    }
  }
  throw ConfigurationError("unknown lagrangian '" + m.name + "'");
}

/// Builds the initial datum named in the configuration, normalized to unit mass.
inline GridDensity make_initial(const RunConfig& c) {
  const auto& m = c.initial;
  const double lo = c.domain.lo(), L = c.domain.length();
  try {
    if (m.name == "uniform") return GridDensity::uniform(c.domain, c.M);
    if (m.name == "cosine_perturbation") {
      const double eps = detail::param(m, "eps", 0.5);
      const double k = detail::param(m, "k", 2.0);
      if (!(std::abs(eps) < 1.0)) throw ConfigurationError("cosine_perturbation: |eps| must be below 1");
      return GridDensity::sample(c.domain, c.M, [=](double x) {
        return 1.0 + eps * std::cos(k * std::numbers::pi * (x - lo) / L);
      });
    }
    if (m.name == "bump") {
      const double center = detail::param(m, "center", lo + 0.5 * L);
      const double width = detail::param(m, "width", 0.1 * L);
      if (!(width > 0.0)) throw ConfigurationError("bump: width must be positive");
      // A small background keeps the datum strictly positive.
      return GridDensity::sample(c.domain, c.M, [=](double x) {
        const double r = (x - center) / width;
        return std::exp(-0.5 * r * r) + 1e-8;
      });
    }
    if (m.name == "file") {
      const auto path = detail::take<std::string>(m.params, "path", "");
      if (path.empty()) throw ConfigurationError("file initial datum needs a 'path'");
      std::filesystem::path p(path);
      if (p.is_relative()) p = c.base_dir / p;
      return read_density_csv(p, c.domain, c.M);
    }
  } catch (const DomainError& e) {
    throw ConfigurationError(std::string("initial datum: ") + e.what());
  }
  throw ConfigurationError("unknown initial datum '" + m.name + "'");
}

/// Assumption validators for the configured energy.
inline std::vector<CertificateReport> validate_energy(const RunConfig& c, const EnergyKind& kind) {
  if (const auto* F = std::get_if<LagrangianSpec>(&kind)) {
    SamplingPlan plan;
    plan.x_lo = c.domain.lo();
    plan.x_hi = c.domain.hi();
    plan.seed = c.seed;
    return validate_assumption_A(*F, plan);
  }
  return validate_assumption_f(std::get<MobilitySpec>(kind), c.dimension);
}

/// Structural checks on the configuration values themselves.
inline void check_ranges(const RunConfig& c) {
  if (c.M < kMinCells || c.K < kMinCells) throw ConfigurationError("grid: M and K must be at least 8");
  if (!(c.tau > 0.0) || !std::isfinite(c.tau)) throw ConfigurationError("scheme.tau must be positive");
  if (!(c.inner_tol > 0.0)) throw ConfigurationError("scheme.inner_tol must be positive");
  if (c.inner_max_iter == 0) throw ConfigurationError("scheme.inner_max_iter must be positive");
  if (c.refine_levels == 0) throw ConfigurationError("scheme.refine_levels must be at least 1");
  if (c.dimension < 1) throw ConfigurationError("dimension must be at least 1");
  if (c.phi_mode < 1) throw ConfigurationError("weak_form.phi_mode must be at least 1");
  if (!(c.eta_lo > 0.0 && c.eta_lo < c.eta_hi && c.eta_hi <= 1.0)) {
    throw ConfigurationError("weak_form.eta_window must satisfy 0 < lo < hi <= 1");
  }
  if (!(c.beta > 0.0)) throw ConfigurationError("weak_form.beta must be positive");
  if (!(c.slack_factor > 0.0)) throw ConfigurationError("weak_form.slack_factor must be positive");
  for (const auto& n : c.checks) {
    const auto& g = certificate_groups();
    if (std::find(g.begin(), g.end(), n) == g.end()) throw ConfigurationError("unknown certificate '" + n + "'");
  }
}

/**
 * Validates a configuration: ranges, model names, the initial datum, and the
 * assumption validators of the energy. Throws ValidationError naming the first
 * failing assumption clause.
 */
inline void validate_config(const RunConfig& c) {
  check_ranges(c);
  const EnergyKind kind = make_energy(c);
  make_initial(c);
  for (const auto& r : validate_energy(c, kind)) {
    if (!r.pass) {
      throw ValidationError(r.name + " failed: lhs " + format_number(r.lhs) + ", rhs " + format_number(r.rhs) +
                            (r.context.empty() ? "" : " (" + r.context + ")"));
    }
  }
}

/// Reads, parses and validates a configuration file.
inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigurationError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigurationError("malformed config " + path.string() + ": " + e.what());
  }
  RunConfig c = config_from_json(j, path.parent_path());
  validate_config(c);
  return c;
}

/// Exit codes of the command-line runner.
enum ExitCode : int { kExitOk = 0, kExitCertificateFailure = 1, kExitConfigError = 2, kExitRuntimeError = 3 };

/// Result of one executed run.
struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<CertificateReport> reports;
  nlohmann::json summary;
  JkoTrajectory trajectory;
};

inline JkoConfig jko_config(const RunConfig& c, const EnergyKind& kind) {
  JkoConfig j;
  j.tau = c.tau;
  j.n_steps = c.n_steps;
  j.inner_tol = c.inner_tol;
  j.inner_max_iter = c.inner_max_iter;
  j.K = c.K;
  j.energy_kind = kind;
  j.corrupt_steps = c.corrupt_steps;
  return j;
}

/// Evaluates the enabled certificate groups on a finished trajectory.
inline std::vector<CertificateReport> run_certificates(const RunConfig& c, const EnergyKind& kind,
                                                       const JkoTrajectory& traj, std::vector<std::string>& skipped) {
  std::vector<CertificateReport> out;
  auto on = [&](const char* g) { return c.checks.count(g) != 0; };
  const auto* F = std::get_if<LagrangianSpec>(&kind);
  const auto* m = std::get_if<MobilitySpec>(&kind);
  const GridDensity& u0 = traj.states.front();

  if (on("assumptions")) append(out, validate_energy(c, kind));
  if (on("energy_monotone")) append(out, check_energy_monotone(traj, c.inner_tol));
  if (on("total_square_distance")) out.push_back(check_total_square_distance(traj, c.inner_tol));
  if (on("holder_continuity")) append(out, check_holder(traj));
  if (on("entropy_dissipation")) {
    if (F != nullptr && F->gamma > 0.0) {
      append(out, check_entropy_dissipation_A(traj, *F, c.inner_tol));
    } else if (m != nullptr) {
      append(out, check_entropy_dissipation_f(traj, *m, dissipation_constants(*m, c.dimension).delta, c.inner_tol));
    } else {
      skipped.push_back("entropy_dissipation: gamma not declared");
    }
  }
  if (on("discrete_weak_form")) {
    const double T = c.horizon();
    if (c.eta_lo * T >= c.tau) {
      const auto phi = TestFunction::cosine(c.domain, c.phi_mode);
      const auto eta = TemporalWeight::bump(c.eta_lo * T, c.eta_hi * T);
      if (F != nullptr) {
        out.push_back(check_discrete_weak_A(traj, *F, phi, eta, c.slack_factor));
      } else {
        append(out, check_discrete_weak_f(traj, *m, phi, eta, c.beta, c.slack_factor));
      }
    } else {
      skipped.push_back("discrete_weak_form: temporal window shorter than one step");
    }
  }
  if (on("apriori")) {
    if (F == nullptr || (F->c > 0.0 && F->gamma > 0.0)) {
      append(out, apriori_bounds(traj, kind));
    } else {
      skipped.push_back("apriori: constants c and gamma not declared");
    }
  }
  if (on("boundary_sign")) append(out, boundary_sign_check(traj.states.back()));
  if (on("heat_flow_dissipation")) {
    if (F != nullptr && F->gamma > 0.0) {
      out.push_back(check_dissipation_bound(*F, u0, default_probe(c.domain)));
    } else {
      skipped.push_back("heat_flow_dissipation: applies to integrands with declared gamma");
    }
  }
  if (on("volume_distortion")) {
    const auto phi = TestFunction::cosine(c.domain, c.phi_mode);
    // Small enough that the O(s^2) truncation of the central differences is far below tolerance.
    const double s = 1e-5 * c.domain.length() * c.domain.length();
    const std::vector<double> probes{s, 0.5 * s};
    append(out, volume_distortion_check(map_from_density(u0, c.K), phi, probes));
  }
  if (on("traceless_binomial")) {
    const auto sweep = traceless_lemma_sweep(c.traceless_samples, c.seed);
    out.push_back(make_report("traceless_binomial", -1, 0.0, sweep.worst_relative, 1e-12,
                              "samples=" + std::to_string(sweep.samples) +
                                  " failures=" + std::to_string(sweep.failures)));
  }
  if (on("refinement") && c.refine_levels > 1) {
    const auto study = refine_study(u0, jko_config(c, kind), c.refine_levels);
    append(out, check_refinement(study));
  }
  return out;
}

/// Pass counts and worst slack per certificate name.
inline nlohmann::json summarize(const std::vector<CertificateReport>& reports) {
  std::map<std::string, nlohmann::json> by_name;
  for (const auto& r : reports) {
    auto& e = by_name[r.name];
    if (e.is_null()) e = {{"count", 0}, {"failures", 0}, {"worst_slack", r.slack}, {"worst_step", r.step}};
    e["count"] = e["count"].get<int>() + 1;
    if (!r.pass) e["failures"] = e["failures"].get<int>() + 1;
    if (r.slack < e["worst_slack"].get<double>()) {
      e["worst_slack"] = r.slack;
      e["worst_step"] = r.step;
    }
  }
  nlohmann::json j = nlohmann::json::object();
  for (auto& [k, v] : by_name) j[k] = v;
  return j;
}

/**
 * Runs the scheme, evaluates the enabled certificates and writes
 * trajectory.json, certificates.csv and summary.json into the output directory.
 */
inline RunOutcome execute(const RunConfig& c, bool write_files = true) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const EnergyKind kind = make_energy(c);
  const GridDensity u0 = make_initial(c);
  RunOutcome out;
  out.trajectory = run(u0, jko_config(c, kind));
  const auto t1 = Clock::now();
  std::vector<std::string> skipped;
  out.reports = run_certificates(c, kind, out.trajectory, skipped);
  const auto t2 = Clock::now();

  const auto& traj = out.trajectory;
  double path = 0.0;
  for (double d : traj.step_distances) path += d;
  const std::size_t failed = static_cast<std::size_t>(
      std::count_if(out.reports.begin(), out.reports.end(), [](const auto& r) { return !r.pass; }));
  out.exit_code = failed == 0 ? kExitOk : kExitCertificateFailure;
  const auto* w = worst(out.reports);
  out.summary = {{"config", config_to_json(c)},
                 {"exit_status", out.exit_code},
                 {"certificates_total", out.reports.size()},
                 {"certificates_failed", failed},
                 {"worst_slack", w != nullptr ? w->slack : 0.0},
                 {"worst_certificate", w != nullptr ? w->name : ""},
                 {"by_certificate", summarize(out.reports)},
                 {"skipped", skipped},
                 {"initial_energy", traj.energies.front()},
                 {"final_energy", traj.energies.back()},
                 {"path_length", path},
                 {"all_converged", traj.all_converged()},
                 {"gradient_check_error", traj.gradient_check_error},
                 {"timings_seconds",
                  {{"run", std::chrono::duration<double>(t1 - t0).count()},
                   {"certificates", std::chrono::duration<double>(t2 - t1).count()}}}};
  if (write_files) {
    const std::filesystem::path dir(c.output);
    std::filesystem::create_directories(dir);
    nlohmann::json tj = trajectory_json(traj);
    tj["config"] = config_to_json(c);
    write_text(dir / "trajectory.json", tj.dump());
    std::ostringstream csv;
    write_certificates_csv(csv, out.reports);
    write_text(dir / "certificates.csv", csv.str());
    write_text(dir / "summary.json", out.summary.dump(2));
  }
  return out;
}

/// One row of a parameter sweep.
struct SweepRow {
  double value = 0.0;
  double final_energy = std::numeric_limits<double>::quiet_NaN();
  double path_length = std::numeric_limits<double>::quiet_NaN();
  double worst_slack = std::numeric_limits<double>::quiet_NaN();
  double weak_residual = std::numeric_limits<double>::quiet_NaN();
  int exit_code = kExitOk;
  std::string error;
};

/**
 * Applies one sweep value to a copy of the template.
 *
 * The tau axis keeps the template's horizon fixed; alpha sets the exponent of
 * a power mobility; eps sets the amplitude of a cosine perturbation.
 */
inline RunConfig apply_sweep_value(const RunConfig& base, const std::string& axis, double value) {
  RunConfig c = base;
  if (axis == "tau") {
    c.tau = value;
    c.n_steps = static_cast<std::size_t>(std::llround(base.horizon() / value));
  } else if (axis == "alpha") {
    if (c.lagrangian.name != "power_mobility") throw ConfigurationError("alpha sweep needs a power_mobility");
    c.lagrangian.params["alpha"] = value;
  } else if (axis == "eps") {
    if (c.initial.name != "cosine_perturbation") throw ConfigurationError("eps sweep needs a cosine_perturbation");
    c.initial.params["eps"] = value;
  } else {
    throw ConfigurationError("unknown sweep axis '" + axis + "' (expected tau, alpha or eps)");
  }
  return c;
}

/// Runs one configuration per value in parallel; each run writes into its own subdirectory.
inline std::vector<SweepRow> sweep(const RunConfig& base, const std::string& axis, const std::vector<double>& values,
                                   bool write_files = true) {
  if (axis != "tau" && axis != "alpha" && axis != "eps") {
    throw ConfigurationError("unknown sweep axis '" + axis + "' (expected tau, alpha or eps)");
  }
  std::vector<std::future<SweepRow>> jobs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&, i] {
      SweepRow row;
      row.value = values[i];
      try {
        RunConfig c = apply_sweep_value(base, axis, values[i]);
        c.output = (std::filesystem::path(base.output) / (axis + "_" + std::to_string(i))).string();
        validate_config(c);
        const auto outcome = execute(c, write_files);
        row.final_energy = outcome.trajectory.energies.back();
        row.path_length = outcome.summary["path_length"].get<double>();
        row.worst_slack = outcome.summary["worst_slack"].get<double>();
        row.exit_code = outcome.exit_code;
        for (const auto& r : outcome.reports) {
          if (r.name == "discrete_weak_form" || r.name == "discrete_weak_form_mobility_upper") row.weak_residual = r.lhs;
        }
      } catch (const ConfigurationError& e) {
        row.exit_code = kExitConfigError;
        row.error = e.what();
      } catch (const ValidationError& e) {
        row.exit_code = kExitConfigError;
        row.error = e.what();
      } catch (const std::exception& e) {
        row.exit_code = kExitRuntimeError;
        row.error = e.what();
      }
      return row;
    }));
  }
  std::vector<SweepRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::string& axis, const std::vector<SweepRow>& rows) {
  os << "# wgflow-sweep v1\n";
  os << axis << ",final_energy,path_length,worst_slack,weak_residual,exit_status,error\n";
  for (const auto& r : rows) {
    os << format_number(r.value) << ',' << format_number(r.final_energy) << ',' << format_number(r.path_length)
       << ',' << format_number(r.worst_slack) << ',' << format_number(r.weak_residual) << ',' << r.exit_code << ','
       << csv_field(r.error) << "\n";
  }
}

}  // namespace wgflow
