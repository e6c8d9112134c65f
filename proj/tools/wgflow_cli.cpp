#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "wgflow/config.hpp"

namespace {

/// Splits "axis=v1,v2,..." into the axis name and its values.
std::pair<std::string, std::vector<double>> parse_sweep(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw wgflow::ConfigurationError("--sweep expects AXIS=v1,v2,...");
  std::pair<std::string, std::vector<double>> out{spec.substr(0, eq), {}};
  std::stringstream ss(spec.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.second.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw wgflow::ConfigurationError("--sweep: '" + item + "' is not a number");
    }
  }
  return out;
}

void print_failures(const std::vector<wgflow::CertificateReport>& reports) {
  for (const auto& r : reports) {
    if (!r.pass) {
      std::cerr << "FAIL " << r.name << " step " << r.step << ": lhs " << r.lhs << " rhs " << r.rhs << " slack "
                << r.slack << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimizing-movement solver for fourth-order Wasserstein gradient flows"};
  std::string config_path, out_dir, sweep_spec;
  double tau = 0.0;
  std::size_t steps = 0;
  bool check_all = false, inject = false;
  std::vector<std::string> checks;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  auto* tau_opt = app.add_option("--tau", tau, "time step (overrides the config)");
  auto* steps_opt = app.add_option("--steps", steps, "number of steps (overrides the config)");
  app.add_flag("--check-all", check_all, "enable every certificate group");
  app.add_option("--check", checks, "enable only the named certificate groups");
  app.add_option("--sweep", sweep_spec, "parameter sweep AXIS=v1,v2,... with AXIS in {tau, alpha, eps}");
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized checks");
  app.add_flag("--inject-corruption", inject, "skip the minimization of step 1 (negative control)");
  CLI11_PARSE(app, argc, argv);

  wgflow::RunConfig cfg;
  try {
    cfg = wgflow::load_config(config_path);
    if (!out_dir.empty()) cfg.output = out_dir;
    if (tau_opt->count() > 0) cfg.tau = tau;
    if (steps_opt->count() > 0) cfg.n_steps = steps;
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (check_all) cfg.checks = {wgflow::certificate_groups().begin(), wgflow::certificate_groups().end()};
    if (!checks.empty() && !check_all) cfg.checks = {checks.begin(), checks.end()};
    if (inject) cfg.corrupt_steps.insert(1);
    wgflow::check_ranges(cfg);
  } catch (const wgflow::ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return wgflow::kExitConfigError;
  } catch (const wgflow::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return wgflow::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wgflow::kExitRuntimeError;
  }

  try {
    if (!sweep_spec.empty()) {
      const auto [axis, values] = parse_sweep(sweep_spec);
      const auto rows = wgflow::sweep(cfg, axis, values);
      std::filesystem::create_directories(cfg.output);
      std::ostringstream csv;
      wgflow::write_sweep_csv(csv, axis, rows);
      wgflow::write_text(std::filesystem::path(cfg.output) / "sweep.csv", csv.str());
      std::cout << csv.str();
      int code = wgflow::kExitOk;
      for (const auto& r : rows) code = std::max(code, r.exit_code);
      return code;
    }
    const auto outcome = wgflow::execute(cfg);
    print_failures(outcome.reports);
    std::cout << "certificates: " << outcome.reports.size() << " evaluated, "
              << outcome.summary["certificates_failed"].get<std::size_t>() << " failed; output in " << cfg.output
              << "\n";
    return outcome.exit_code;
  } catch (const wgflow::ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return wgflow::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return wgflow::kExitRuntimeError;
  }
}
