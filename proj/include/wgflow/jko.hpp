#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <limits>
#include <memory>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wgflow/banded.hpp"
#include "wgflow/energy_model.hpp"
#include "wgflow/errors.hpp"
#include "wgflow/grid.hpp"
#include "wgflow/quantile_distance.hpp"
#include "wgflow/transport.hpp"

namespace wgflow {

/// Parameters of the minimizing-movement scheme.
struct JkoConfig {
  double tau = 1e-4;
  std::size_t n_steps = 0;
  double inner_tol = 1e-10;
  std::size_t inner_max_iter = 200;
  std::size_t K = 256;  ///< node count of the transport maps exported with each state
  EnergyKind energy_kind = thin_film();
  /// Steps whose minimization is skipped (state copied forward); test mode only.
  std::set<std::size_t> corrupt_steps;
  /// Check the analytic gradient against finite differences before the first step.
  bool verify_gradient = true;

  void validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigurationError("JkoConfig: tau must be positive");
    if (!(inner_tol > 0.0)) throw ConfigurationError("JkoConfig: inner_tol must be positive");
    if (K < kMinCells) throw ConfigurationError("JkoConfig: K must be at least 8");
    if (inner_max_iter == 0) throw ConfigurationError("JkoConfig: inner_max_iter must be positive");
  }
};

/// Outcome of one inner minimization.
struct StepDiagnostics {
  bool converged = false;
  bool corrupted = false;
  std::size_t iterations = 0;
  double objective_start = 0.0;  ///< penalized objective at the previous state
  double objective_end = 0.0;
  double energy = 0.0;
  double transport = 0.0;  ///< squared W2 to the previous state
  double decrement = 0.0;  ///< last Newton decrement
};

/// Discrete solution: one state per time stamp t_n = n tau.
struct JkoTrajectory {
  double tau = 0.0;
  std::size_t K = 256;
  std::vector<double> times;
  std::vector<GridDensity> states;
  std::vector<double> energies;
  std::vector<double> step_distances;  ///< W2(u^{n-1}, u^n) for n = 1..N
  std::vector<double> entropies;
  std::vector<StepDiagnostics> diagnostics;
  double gradient_check_error = 0.0;

  std::size_t steps() const noexcept { return states.size() - 1; }

  /// Index n = ceil(t / tau) of the piecewise-constant interpolant, clamped to the horizon.
  std::size_t index_at(double t) const {
    if (t <= 0.0) return 0;
    const double r = t / tau;
    const double n = std::ceil(r - 1e-9 * std::max(1.0, r));
    return std::min<std::size_t>(static_cast<std::size_t>(n), steps());
  }

  const GridDensity& state_at(double t) const { return states[index_at(t)]; }

  TransportMap map_at(std::size_t n) const { return map_from_density(states[n], K); }

  bool all_converged() const {
    return std::all_of(diagnostics.begin(), diagnostics.end(),
                       [](const auto& d) { return d.converged || d.corrupted; });
  }
};

/**
 * Inner problem of one step: minimize Phi(u) + W2^2(u, v) / (2 tau) over grid
 * densities u, parametrized by their face CDF values C_1..C_{M-1}.
 *
 * This is the inverse of the monotone-map parametrization: mass is exact and
 * positivity is the ordering constraint C_{f+1} - C_f > 0. Both terms are
 * smooth in C, with a pentadiagonal Hessian.
 */
class JkoSolver {
 public:
  JkoSolver(const EnergyKind& kind, Interval domain, std::size_t cells, double tau)
      : energy_(make_discrete_energy(kind, domain, cells)), domain_(domain), m_(cells), tau_(tau),
        h_(domain.length() / static_cast<double>(cells)) {}

  /// Face CDF of a density, normalized to end exactly at 1.
  std::vector<double> cdf_of(const GridDensity& u) const { return detail::face_cdf(u); }

  std::vector<double> density_of(std::span<const double> c) const {
    std::vector<double> u(m_);
    for (std::size_t j = 0; j < m_; ++j) u[j] = (c[j + 1] - c[j]) / h_;
    return u;
  }

  double objective(std::span<const double> c, const QuantileDistance& w) const {
    return energy_->value(density_of(c)) + w.value(c) / (2.0 * tau_);
  }

  /// Objective, with its gradient over interior faces written to g (size M-1).
  double gradient(std::span<const double> c, const QuantileDistance& w, std::vector<double>& g) const {
    const auto u = density_of(c);
    std::vector<double> gu(m_);
    const double e = energy_->gradient(u, gu);
    const auto t = w.terms(c);
    g.assign(m_ - 1, 0.0);
    w.gradient(t, g);
    double wv = 0.0;
    for (std::size_t j = 0; j < m_; ++j) wv += (c[j + 1] - c[j]) * t[j].e2;
    for (std::size_t f = 1; f < m_; ++f) g[f - 1] = g[f - 1] / (2.0 * tau_) + (gu[f - 1] - gu[f]) / h_;
    return e + wv / (2.0 * tau_);
  }

  BandedSymmetric hessian(std::span<const double> c, const QuantileDistance& w) const {
    const auto u = density_of(c);
    const Tridiagonal hu = energy_->hessian(u);
    const std::size_t n = m_ - 1;
    BandedSymmetric H(n, 2);
    // Energy part G^T Hu G with u_j = (C_{j+1} - C_j) / h; faces 0 and M are fixed.
    const double s = 1.0 / (h_ * h_);
    auto add = [&](std::size_t f, std::size_t g, double v) {
      if (f == 0 || g == 0 || f == m_ || g == m_) return;
      if (f >= g) H.add(f - 1, g - 1, v);
    };
    for (std::size_t j = 0; j < m_; ++j) {
      for (std::size_t jj = (j == 0 ? 0 : j - 1); jj <= std::min(j + 1, m_ - 1); ++jj) {
        const double v = s * (jj == j ? hu.diag[j] : hu.off[std::min(j, jj)]);
        add(j + 1, jj + 1, v);
        add(j + 1, jj, -v);
        add(j, jj + 1, -v);
        add(j, jj, v);
      }
    }
    const auto t = w.terms(c);
    std::vector<double> diag(n), off(n);
    w.hessian(t, diag, off);
    for (std::size_t i = 0; i < n; ++i) {
      H.add(i, i, diag[i] / (2.0 * tau_));
      if (i + 1 < n) H.add(i + 1, i, off[i] / (2.0 * tau_));
    }
    return H;
  }

  /**
   * Damped Newton iteration started at the previous state.
   *
   * A diagonal shift is added when the Hessian is not positive definite.
   * Steps keep every cell mass positive and must satisfy the
   * Armijo condition, so the objective never increases.
   */
  std::pair<std::vector<double>, StepDiagnostics> minimize(const GridDensity& v, double inner_tol,
                                                           std::size_t max_iter) const {
    StepDiagnostics diag;
    const QuantileDistance w(v);
    std::vector<double> c = w.reference_cdf();
    std::vector<double> g;
    double j = gradient(c, w, g);
    diag.objective_start = j;
    const std::size_t n = m_ - 1;
    for (std::size_t it = 0; it < max_iter; ++it) {
      diag.iterations = it + 1;
      double gmax = 0.0;
      for (double x : g) gmax = std::max(gmax, std::abs(x));
      if (gmax == 0.0) {
        diag.converged = true;
        break;
      }
      BandedSymmetric H = hessian(c, w);
      double scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(H.get(i, i)));
      std::vector<double> rhs(n);
      for (std::size_t i = 0; i < n; ++i) rhs[i] = -g[i];
      std::vector<double> p;
      double shift = 0.0;
      for (int attempt = 0; attempt < 40 && p.empty(); ++attempt) {
        BandedSymmetric A = H;
        if (shift > 0.0) A.add_to_diagonal(shift);
        if (A.factor()) p = A.solve(rhs);
        shift = shift == 0.0 ? 1e-12 * scale : 10.0 * shift;
      }
      if (p.empty()) break;
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) slope += g[i] * p[i];
      diag.decrement = -0.5 * slope;
      // Decrements below the rounding level of the objective cannot be resolved.
      const double eps = std::numeric_limits<double>::epsilon();
      const double floor = static_cast<double>(n) * scale * (16.0 * eps) * (16.0 * eps);
      if (!(slope < 0.0) || diag.decrement <= inner_tol * std::abs(j) + floor) {
        diag.converged = true;
        break;
      }

      // Fraction-to-boundary rule: no cell loses more than 99% of its mass in one step.
      double alpha = 1.0;
      for (std::size_t jj = 0; jj < m_; ++jj) {
        const double dm = (jj + 1 < m_ ? p[jj] : 0.0) - (jj > 0 ? p[jj - 1] : 0.0);
        const double mass = c[jj + 1] - c[jj];
        if (dm < 0.0) alpha = std::min(alpha, 0.99 * mass / -dm);
      }
      bool accepted = false;
      for (int ls = 0; ls < 60 && alpha > 0.0; ++ls, alpha *= 0.5) {
        std::vector<double> trial = c;
        for (std::size_t i = 0; i < n; ++i) trial[i + 1] = c[i + 1] + alpha * p[i];
        const double jt = objective(trial, w);
        if (jt <= j + 1e-4 * alpha * slope) {
          c = std::move(trial);
          j = gradient(c, w, g);
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        // No representable decrease: the iterate is converged to rounding level.
        diag.converged = diag.decrement <= 1e3 * inner_tol * std::abs(j);
        break;
      }
    }
    if (j > diag.objective_start) {
      c = w.reference_cdf();
      j = diag.objective_start;
    }
    diag.objective_end = j;
    diag.transport = w.value(c);
    diag.energy = energy_->value(density_of(c));
    return {std::move(c), diag};
  }

  /// Largest relative mismatch between the analytic gradient and central differences at c.
  double gradient_check(std::span<const double> c, const QuantileDistance& w, std::uint64_t seed = 7) const {
    std::vector<double> g;
    gradient(c, w, g);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    double mmin = 1.0;
    for (std::size_t j = 0; j < m_; ++j) mmin = std::min(mmin, c[j + 1] - c[j]);
    const double eps = 1e-4 * mmin;
    for (int trial = 0; trial < 4; ++trial) {
      std::vector<double> d(m_ + 1, 0.0);
      for (std::size_t f = 1; f < m_; ++f) d[f] = normal(rng);
      std::vector<double> cp(c.begin(), c.end()), cm(c.begin(), c.end());
      for (std::size_t f = 1; f < m_; ++f) {
        cp[f] += eps * d[f];
        cm[f] -= eps * d[f];
      }
      const double fd = (objective(cp, w) - objective(cm, w)) / (2.0 * eps);
      double an = 0.0;
      for (std::size_t f = 1; f < m_; ++f) an += g[f - 1] * d[f];
      worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
    }
    return worst;
  }

  std::size_t cells() const noexcept { return m_; }
  const Interval& domain() const noexcept { return domain_; }

 private:
  std::unique_ptr<DiscreteEnergy> energy_;
  Interval domain_;
  std::size_t m_;
  double tau_;
  double h_;
};

/// Penalized objective Phi(u) + W2^2(u, v_prev) / (2 tau) at a candidate density.
inline double penalized_objective(const GridDensity& candidate, const GridDensity& v_prev, double tau,
                                  const EnergyKind& kind) {
  if (!(tau > 0.0)) throw ConfigurationError("penalized_objective: tau must be positive");
  const double w = wasserstein2(candidate, v_prev);
  return evaluate_energy(kind, candidate) + w * w / (2.0 * tau);
}

/// Same objective for a candidate given as a transport map, evaluated on its pushforward.
inline double penalized_objective(const TransportMap& candidate, const GridDensity& v_prev, double tau,
                                  const EnergyKind& kind) {
  return penalized_objective(density_from_map(candidate, v_prev.size()), v_prev, tau, kind);
}

/// One step of the scheme; returns the new density and diagnostics.
inline std::pair<GridDensity, StepDiagnostics> jko_step(const GridDensity& v_prev, const JkoConfig& cfg) {
  cfg.validate();
  JkoSolver solver(cfg.energy_kind, v_prev.domain(), v_prev.size(), cfg.tau);
  auto [c, diag] = solver.minimize(v_prev, cfg.inner_tol, cfg.inner_max_iter);
  return {GridDensity::normalized(v_prev.domain(), solver.density_of(c)), diag};
}

/// Iterates the scheme n_steps times from u0.
inline JkoTrajectory run(const GridDensity& u0, const JkoConfig& cfg) {
  cfg.validate();
  JkoSolver solver(cfg.energy_kind, u0.domain(), u0.size(), cfg.tau);
  JkoTrajectory traj;
  traj.tau = cfg.tau;
  traj.K = cfg.K;
  traj.times.push_back(0.0);
  traj.states.push_back(u0);
  traj.energies.push_back(evaluate_energy(cfg.energy_kind, u0));
  traj.entropies.push_back(boltzmann_entropy(u0));
  if (cfg.verify_gradient && cfg.n_steps > 0) {
    const QuantileDistance w(u0);
    std::vector<double> c = w.reference_cdf();
    // Probe away from the reference so that the transport term is exercised.
    for (std::size_t f = 1; f < u0.size(); ++f) {
      c[f] += 0.2 * std::min(c[f] - c[f - 1], c[f + 1] - c[f]) * std::sin(static_cast<double>(f));
    }
    traj.gradient_check_error = solver.gradient_check(c, w);
    if (traj.gradient_check_error > 1e-4) {
      throw EvaluationError("run: analytic gradient disagrees with finite differences");
    }
  }
  for (std::size_t n = 1; n <= cfg.n_steps; ++n) {
    const GridDensity& prev = traj.states.back();
    StepDiagnostics diag;
    std::vector<double> u;
    if (cfg.corrupt_steps.count(n) != 0) {
      u.assign(prev.values().begin(), prev.values().end());
      diag.corrupted = true;
      diag.objective_start = diag.objective_end = diag.energy = traj.energies.back();
    } else {
      std::vector<double> c;
      std::tie(c, diag) = solver.minimize(prev, cfg.inner_tol, cfg.inner_max_iter);
      u = solver.density_of(c);
    }
    GridDensity state = GridDensity::normalized(u0.domain(), std::move(u));
    traj.step_distances.push_back(wasserstein2(prev, state));
    traj.times.push_back(static_cast<double>(n) * cfg.tau);
    traj.energies.push_back(evaluate_energy(cfg.energy_kind, state));
    traj.entropies.push_back(boltzmann_entropy(state));
    traj.states.push_back(std::move(state));
    traj.diagnostics.push_back(diag);
  }
  return traj;
}

/// Runs at tau, tau/2, ... and compares consecutive levels.
struct RefinementStudy {
  std::vector<double> taus;
  std::vector<JkoTrajectory> trajectories;
  /// Sup over the coarser level's stamps of W2 between consecutive levels.
  std::vector<double> level_gaps;
};

/// Runs levels in parallel; level l uses tau / 2^l and 2^l times as many steps.
inline RefinementStudy refine_study(const GridDensity& u0, const JkoConfig& cfg, std::size_t levels) {
  if (levels == 0) throw ConfigurationError("refine_study: need at least one level");
  RefinementStudy study;
  std::vector<std::future<JkoTrajectory>> jobs;
  for (std::size_t l = 0; l < levels; ++l) {
    JkoConfig c = cfg;
    c.tau = cfg.tau / std::pow(2.0, static_cast<double>(l));
    c.n_steps = cfg.n_steps << l;
    study.taus.push_back(c.tau);
    jobs.push_back(std::async(std::launch::async, [u0, c] { return run(u0, c); }));
  }
  for (auto& j : jobs) study.trajectories.push_back(j.get());
  for (std::size_t l = 0; l + 1 < levels; ++l) {
    const auto& coarse = study.trajectories[l];
    const auto& fine = study.trajectories[l + 1];
    double gap = 0.0;
    for (std::size_t n = 0; n <= coarse.steps(); ++n) {
      gap = std::max(gap, wasserstein2(coarse.states[n], fine.states[2 * n]));
    }
    study.level_gaps.push_back(gap);
  }
  return study;
}

}  // namespace wgflow
