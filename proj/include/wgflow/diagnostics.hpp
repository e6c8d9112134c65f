#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <lapacke.h>

#include "wgflow/certificate.hpp"
#include "wgflow/energy_model.hpp"
#include "wgflow/errors.hpp"
#include "wgflow/grid.hpp"
#include "wgflow/jko.hpp"
#include "wgflow/lagrangian.hpp"
#include "wgflow/stencil.hpp"
#include "wgflow/test_function.hpp"
#include "wgflow/transport.hpp"

namespace wgflow {

// ---------------------------------------------------------------------------
// Classical estimates of the scheme
// ---------------------------------------------------------------------------

/// Per step: Phi(u^n) <= Phi(u^{n-1}) + inner_tol |Phi(u0)|.
inline std::vector<CertificateReport> check_energy_monotone(const JkoTrajectory& traj, double inner_tol = 1e-10) {
  std::vector<CertificateReport> out;
  const double tol = inner_tol * std::abs(traj.energies[0]);
  for (std::size_t n = 1; n <= traj.steps(); ++n) {
    out.push_back(make_report("energy_monotone", static_cast<int>(n), traj.energies[n], traj.energies[n - 1], tol));
  }
  return out;
}

/// sum_n W2(u^{n-1}, u^n)^2 <= 2 tau Phi(u0), with relative tolerance rel_tol.
inline CertificateReport check_total_square_distance(const JkoTrajectory& traj, double rel_tol = 1e-10) {
  double sum = 0.0;
  for (double d : traj.step_distances) sum += d * d;
  const double bound = 2.0 * traj.tau * traj.energies[0];
  return make_report("total_square_distance", -1, sum, bound, rel_tol * bound);
}

/**
 * W2(u^m, u^n) <= sqrt(2 Phi(u0) (|t_n - t_m| + tau)) over all pairs m < n.
 *
 * One report per n, holding the pair with the smallest slack.
 */
inline std::vector<CertificateReport> check_holder(const JkoTrajectory& traj) {
  std::vector<CertificateReport> out;
  const double e0 = traj.energies[0];
  for (std::size_t n = 1; n <= traj.steps(); ++n) {
    CertificateReport worst_pair;
    bool first = true;
    for (std::size_t m = 0; m < n; ++m) {
      const double lhs = wasserstein2(traj.states[m], traj.states[n]);
      const double rhs = std::sqrt(2.0 * e0 * (traj.times[n] - traj.times[m] + traj.tau));
      auto r = make_report("holder_continuity", static_cast<int>(n), lhs, rhs, 1e-12 * rhs,
                           "pair=" + std::to_string(m) + "," + std::to_string(n));
      if (first || r.slack < worst_pair.slack) worst_pair = r;
      first = false;
    }
    out.push_back(worst_pair);
  }
  return out;
}

/**
 * Refinement study reports: each inter-level gap is no larger than the
 * previous one, and the finest gap is at most half the coarsest.
 */
inline std::vector<CertificateReport> check_refinement(const RefinementStudy& study) {
  std::vector<CertificateReport> out;
  const auto& g = study.level_gaps;
  for (std::size_t l = 1; l < g.size(); ++l) {
    out.push_back(make_report("refinement_monotone", static_cast<int>(l), g[l], g[l - 1], 0.0,
                              "tau=" + std::to_string(study.taus[l])));
  }
  if (g.size() >= 2) {
    out.push_back(make_report("refinement_halving", -1, g.back(), 0.5 * g.front(), 0.0,
                              "ratio=" + std::to_string(g.back() / g.front())));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Heat flow and flow interchange
// ---------------------------------------------------------------------------

/**
 * Neumann heat flow by Crank-Nicolson on the compact three-point Laplacian.
 *
 * Substeps satisfy ds <= h^2, which keeps the explicit half nonnegative, so
 * the scheme maps nonnegative data to nonnegative data. Column sums of the
 * Laplacian vanish, so mass is conserved up to rounding.
 */
inline GridDensity heat_flow(const GridDensity& u, double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("heat_flow: diffusion time must be nonnegative");
  if (s == 0.0) return u;
  const std::size_t m = u.size();
  const double h = u.spacing();
  const auto substeps = static_cast<std::size_t>(std::ceil(s / (h * h)));
  const double r = 0.5 * (s / static_cast<double>(substeps)) / (h * h);
  std::vector<double> v(u.values().begin(), u.values().end());
  std::vector<double> rhs(m), dl(m - 1), d(m), du(m - 1);
  for (std::size_t k = 0; k < substeps; ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      const double left = j == 0 ? 0.0 : v[j - 1] - v[j];
      const double right = j + 1 == m ? 0.0 : v[j + 1] - v[j];
      rhs[j] = v[j] + r * (left + right);
      const double neighbors = (j == 0 ? 0.0 : 1.0) + (j + 1 == m ? 0.0 : 1.0);
      d[j] = 1.0 + r * neighbors;
    }
    std::fill(dl.begin(), dl.end(), -r);
    std::fill(du.begin(), du.end(), -r);
    const lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, static_cast<lapack_int>(m), 1, dl.data(), d.data(),
                                          du.data(), rhs.data(), static_cast<lapack_int>(m));
    if (info != 0) throw EvaluationError("heat_flow: tridiagonal solve failed");
    for (std::size_t j = 0; j < m; ++j) v[j] = std::max(rhs[j], 0.0);
  }
  return GridDensity(u.domain(), std::move(v));
}

/// Default probe time for dissipation quotients.
inline double default_probe(const Interval& domain) { return 1e-6 * domain.length() * domain.length(); }

/// Difference quotient (Phi(u) - Phi(S_s u)) / s along the heat flow S.
inline double flow_interchange_dissipation(const EnergyKind& kind, const GridDensity& u, double s_probe) {
  if (!(s_probe > 0.0)) throw DomainError("flow_interchange_dissipation: probe time must be positive");
  return (evaluate_energy(kind, u) - evaluate_energy(kind, heat_flow(u, s_probe))) / s_probe;
}

/// First-order Richardson extrapolation 2 Q(s/2) - Q(s) of the dissipation quotient.
inline double extrapolated_dissipation(const EnergyKind& kind, const GridDensity& u, double s_probe) {
  return 2.0 * flow_interchange_dissipation(kind, u, 0.5 * s_probe) -
         flow_interchange_dissipation(kind, u, s_probe);
}

/**
 * Dissipation bound of the heat flow for the thin-film class:
 * D Phi(u) >= gamma |u''|^2 - C (|u|_{H^1}^2 + 1), with C = 0 unless F depends on x.
 *
 * The two sides agree exactly for x-independent quadratic energies, so the
 * tolerance is relative to their size plus a rounding floor for flat data.
 */
inline CertificateReport check_dissipation_bound(const LagrangianSpec& F, const GridDensity& u,
                                                 double s_probe, double rel_tol = 1e-2) {
  if (!std::isfinite(F.gamma)) throw PreconditionError("check_dissipation_bound: gamma must be declared");
  const double q = extrapolated_dissipation(F, u, s_probe);
  const auto n = sobolev_norms(u);
  const double c = F.x_dependent ? 0.25 * F.D : 0.0;
  const double rhs = F.gamma * n.hess * n.hess - c * (n.h1 * n.h1 + 1.0);
  // Rounding of the samples contributes up to (eps max u / h)^2 L to each energy value.
  double u_max = 0.0;
  for (double v : u.values()) u_max = std::max(u_max, v);
  const double noise = 16.0 * std::numeric_limits<double>::epsilon() * u_max / u.spacing();
  const double floor = noise * noise * u.domain().length() / s_probe;
  return make_report("heat_flow_dissipation", -1, rhs, q, rel_tol * std::max(std::abs(q), std::abs(rhs)) + floor,
                     "s_probe=" + std::to_string(s_probe));
}

// ---------------------------------------------------------------------------
// Per-step entropy dissipation
// ---------------------------------------------------------------------------

namespace detail {

/// Rounding allowance for a difference of two entropy values.
inline double entropy_rounding(double a, double b) {
  return 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(a) + std::abs(b) + 1.0);
}

/// Constant in front of (|u|_{H^1}^2 + 1) in the per-step H^2 estimate.
inline double regularity_constant(const LagrangianSpec& F, const Interval& domain) {
  if (!F.x_dependent) return 0.0;
  if (!std::isfinite(F.D)) throw PreconditionError("x-dependent Lagrangian needs a declared D");
  return 0.25 * F.D * std::max(1.0, domain.length()) / F.gamma;
}

}  // namespace detail

/**
 * Per step: |u^n''|^2 <= (E(u^{n-1}) - E(u^n)) / (gamma tau) + C3 (|u^n|_{H^1}^2 + 1).
 *
 * The tolerance is 10% of the left side plus the inner solver tolerance and a
 * rounding allowance for the entropy difference.
 */
inline std::vector<CertificateReport> check_entropy_dissipation_A(const JkoTrajectory& traj,
                                                                  const LagrangianSpec& F,
                                                                  double inner_tol = 1e-10,
                                                                  double rel_slack = 0.1) {
  if (!(F.gamma > 0.0)) throw PreconditionError("check_entropy_dissipation_A: gamma must be declared");
  std::vector<CertificateReport> out;
  if (traj.steps() == 0) return out;
  const double c3 = detail::regularity_constant(F, traj.states[0].domain());
  const double scale = 1.0 / (F.gamma * traj.tau);
  for (std::size_t n = 1; n <= traj.steps(); ++n) {
    const auto norms = sobolev_norms(traj.states[n]);
    const double lhs = norms.hess * norms.hess;
    const double drop = traj.entropies[n - 1] - traj.entropies[n];
    const double rhs = drop * scale + c3 * (norms.h1 * norms.h1 + 1.0);
    const double tol = rel_slack * lhs + inner_tol +
                       scale * detail::entropy_rounding(traj.entropies[n - 1], traj.entropies[n]);
    out.push_back(make_report("entropy_dissipation", static_cast<int>(n), lhs, rhs, tol,
                              "tau=" + std::to_string(traj.tau)));
  }
  return out;
}

/// Per step: |f(u^n)''|^2 <= (E(u^{n-1}) - E(u^n)) / (delta tau).
inline std::vector<CertificateReport> check_entropy_dissipation_f(const JkoTrajectory& traj,
                                                                  const MobilitySpec& m, double delta,
                                                                  double inner_tol = 1e-10,
                                                                  double rel_slack = 0.1) {
  if (!(delta > 0.0)) throw PreconditionError("check_entropy_dissipation_f: delta must be positive");
  std::vector<CertificateReport> out;
  const double scale = 1.0 / (delta * traj.tau);
  for (std::size_t n = 1; n <= traj.steps(); ++n) {
    const auto w = mobility_values(m, traj.states[n]);
    const double lhs = stencil::hessian_squared(w, traj.states[n].spacing());
    const double rhs = (traj.entropies[n - 1] - traj.entropies[n]) * scale;
    const double tol = rel_slack * lhs + inner_tol +
                       scale * detail::entropy_rounding(traj.entropies[n - 1], traj.entropies[n]);
    out.push_back(make_report("entropy_dissipation_mobility", static_cast<int>(n), lhs, rhs, tol,
                              "delta=" + std::to_string(delta)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Discrete weak formulations
// ---------------------------------------------------------------------------

namespace detail {

/// eta at the stamps n tau for n = 0..N+1, after checking that its support fits the horizon.
inline std::vector<double> stamp_weights(const JkoTrajectory& traj, const TemporalWeight& eta) {
  const std::size_t n_max = traj.steps();
  std::vector<double> w(n_max + 2, 0.0);
  if (!eta.has_support()) return w;
  const double horizon = static_cast<double>(n_max) * traj.tau;
  const double slack = 1e-12 * std::max(1.0, horizon);
  if (eta.support_lo() < traj.tau - slack || eta.support_hi() > horizon + slack) {
    throw DomainError("temporal weight support [" + std::to_string(eta.support_lo()) + ", " +
                      std::to_string(eta.support_hi()) + "] does not fit the horizon [tau, " +
                      std::to_string(horizon) + "]");
  }
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = eta(static_cast<double>(n) * traj.tau);
  return w;
}

inline double integral_against(const GridDensity& u, const TestFunction& phi) {
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += u[j] * phi(u.midpoint(j));
  return s * u.spacing();
}

}  // namespace detail

/**
 * Residual of the discrete weak formulation for the Lagrangian class:
 * |sum_n (eta_{n+1} - eta_n) int u^n phi - tau sum_n eta_n int N(u^n, phi)|
 * against slack_factor * tau |phi|_{C^2} |eta|_{C^0} Phi(u0).
 */
inline CertificateReport check_discrete_weak_A(const JkoTrajectory& traj, const LagrangianSpec& F,
                                               const TestFunction& phi, const TemporalWeight& eta,
                                               double slack_factor = 2.0) {
  const auto w = detail::stamp_weights(traj, eta);
  double first = 0.0, second = 0.0;
  for (std::size_t n = 1; n <= traj.steps(); ++n) {
    if (w[n] == 0.0 && w[n + 1] == 0.0) continue;
    first += (w[n + 1] - w[n]) * detail::integral_against(traj.states[n], phi);
    if (w[n] != 0.0) second += traj.tau * w[n] * weak_operator_N(F, traj.states[n], phi);
  }
  const double residual = std::abs(first - second);
  const double bound = slack_factor * traj.tau * phi.c2_norm() * eta.sup_norm() * traj.energies[0];
  return make_report("discrete_weak_form", -1, residual, bound, 1e-13 * (std::abs(first) + std::abs(second)),
                     "tau=" + std::to_string(traj.tau) + " transport=" + std::to_string(first) +
                         " operator=" + std::to_string(second));
}

/// Three sides of the mobility weak formulation sandwich.
struct WeakSandwich {
  double lower = 0.0;
  double middle = 0.0;
  double upper = 0.0;
};

/**
 * Evaluates the mobility weak formulation sandwich
 * -|eta| kappa tau Phi0 + beta S <= sum (eta_n - eta_{n+1}) int u^n phi + tau sum eta_n int N_f
 *                                <= |eta| kappa tau Phi0 - beta S,
 * with S = sum (|eta|_n - |eta|_{n+1}) E(u^n) and kappa = sup |phi''|.
 */
inline WeakSandwich discrete_weak_f_sides(const JkoTrajectory& traj, const MobilitySpec& m,
                                          const TestFunction& phi, const TemporalWeight& eta, double beta,
                                          double slack_factor = 2.0) {
  if (!(beta > 0.0)) throw PreconditionError("check_discrete_weak_f: beta must be positive");
  const auto w = detail::stamp_weights(traj, eta);
  double middle = 0.0, entropy_term = 0.0;
  for (std::size_t n = 1; n <= traj.steps(); ++n) {
    if (w[n] == 0.0 && w[n + 1] == 0.0) continue;
    middle += (w[n] - w[n + 1]) * detail::integral_against(traj.states[n], phi);
    if (w[n] != 0.0) middle += traj.tau * w[n] * weak_operator_Nf(m, traj.states[n], phi);
    entropy_term += (std::abs(w[n]) - std::abs(w[n + 1])) * traj.entropies[n];
  }
  const double envelope =
      slack_factor * eta.sup_norm() * phi.sup_second_derivative() * traj.tau * traj.energies[0];
  return {-envelope + beta * entropy_term, middle, envelope - beta * entropy_term};
}

inline std::vector<CertificateReport> check_discrete_weak_f(const JkoTrajectory& traj, const MobilitySpec& m,
                                                            const TestFunction& phi, const TemporalWeight& eta,
                                                            double beta, double slack_factor = 2.0) {
  const auto s = discrete_weak_f_sides(traj, m, phi, eta, beta, slack_factor);
  const double tol = 1e-13 * (std::abs(s.middle) + std::abs(s.upper) + std::abs(s.lower));
  const std::string ctx = "beta=" + std::to_string(beta) + " tau=" + std::to_string(traj.tau);
  return {make_report("discrete_weak_form_mobility_lower", -1, s.lower, s.middle, tol, ctx),
          make_report("discrete_weak_form_mobility_upper", -1, s.middle, s.upper, tol, ctx)};
}

// ---------------------------------------------------------------------------
// A priori bounds
// ---------------------------------------------------------------------------

/// Coercivity constants Phi(u) >= C0 |g(u)|_{H^1}^2 - C1 with g = id or g = f.
struct CoercivityConstants {
  double c0 = 0.0;
  double c1 = 0.0;
};

/**
 * Coercivity from the lower bound c p^2 <= F and the sharp Poincare constant P
 * of the interval.
 *
 * For the identity, |u|^2 <= P |u'|^2 + 1/L since u has unit mass. For a
 * concave mobility f, Jensen's inequality bounds the mean of f(u) by f(1/L).
 * P is (L/pi)^2 in the continuum; with cells > 0 it is the inverse of the
 * first Neumann eigenvalue (4/h^2) sin^2(pi h / 2L) of the grid Laplacian,
 * which is slightly larger.
 */
inline CoercivityConstants coercivity_constants(const EnergyKind& kind, const Interval& domain,
                                                std::size_t cells = 0) {
  const double L = domain.length();
  double poincare = (L / std::numbers::pi) * (L / std::numbers::pi);
  if (cells > 0) {
    const double h = L / static_cast<double>(cells);
    const double s = std::sin(std::numbers::pi * h / (2.0 * L));
    poincare = h * h / (4.0 * s * s);
  }
  const double k = 1.0 + poincare;
  if (const auto* F = std::get_if<LagrangianSpec>(&kind)) {
    if (!(F->c > 0.0)) throw PreconditionError("coercivity_constants: lower bound c must be declared");
    const double c0 = F->c / k;
    return {c0, c0 / L};
  }
  const auto& m = std::get<MobilitySpec>(kind);
  const double mean = m.f(1.0 / L);
  const double c0 = 0.5 / k;
  return {c0, c0 * L * mean * mean};
}

/**
 * A priori bounds over the whole trajectory.
 *
 * Reports sup_n |g(u^n)|_{H^1} against sqrt((Phi(u0) + C1) / C0), and
 * tau sum_n |g(u^n)''|^2 against (E(u0) + log L) / gamma plus the H^1 part,
 * where E >= -log L is the entropy floor on the interval. g is the identity or
 * the mobility and gamma is replaced by delta in the mobility case.
 */
inline std::vector<CertificateReport> apriori_bounds(const JkoTrajectory& traj, const EnergyKind& kind,
                                                     double delta = std::numeric_limits<double>::quiet_NaN()) {
  const Interval domain = traj.states[0].domain();
  const auto k = coercivity_constants(kind, domain, traj.states[0].size());
  const auto* m = std::get_if<MobilitySpec>(&kind);
  double sup_h1 = 0.0, l2h2 = 0.0;
  for (std::size_t n = 0; n <= traj.steps(); ++n) {
    const auto& u = traj.states[n];
    const auto norms = m ? sobolev_norms(mobility_values(*m, u), u.spacing()) : sobolev_norms(u);
    sup_h1 = std::max(sup_h1, norms.h1);
    if (n > 0) l2h2 += traj.tau * norms.hess * norms.hess;
  }
  const double h1_bound = std::sqrt((traj.energies[0] + k.c1) / k.c0);
  std::vector<CertificateReport> out;
  out.push_back(make_report("apriori_h1_sup", -1, sup_h1, h1_bound, 1e-12 * h1_bound,
                            "C0=" + std::to_string(k.c0) + " C1=" + std::to_string(k.c1)));

  double rate = 0.0, c3 = 0.0;
  if (m) {
    if (!(delta > 0.0)) delta = dissipation_constants(*m, m->dimension).delta;
    rate = delta;
  } else {
    const auto& F = std::get<LagrangianSpec>(kind);
    if (!(F.gamma > 0.0)) throw PreconditionError("apriori_bounds: gamma must be declared");
    rate = F.gamma;
    c3 = detail::regularity_constant(F, domain);
  }
  const double horizon = traj.tau * static_cast<double>(traj.steps());
  const double l2h2_bound =
      (traj.entropies[0] + std::log(domain.length())) / rate + c3 * horizon * (sup_h1 * sup_h1 + 1.0);
  out.push_back(make_report("apriori_l2h2", -1, l2h2, l2h2_bound, 0.1 * l2h2,
                            "T=" + std::to_string(horizon)));
  return out;
}

// ---------------------------------------------------------------------------
// Matrix lemma and boundary sign
// ---------------------------------------------------------------------------

namespace detail {

template <typename Real>
Real traceless_form(std::span<const double> a, std::span<const double> v) {
  const std::size_t d = v.size();
  Real frob = 0, quad = 0, vv = 0;
  for (std::size_t i = 0; i < d; ++i) {
    vv += Real(v[i]) * Real(v[i]);
    for (std::size_t j = 0; j < d; ++j) {
      frob += Real(a[i * d + j]) * Real(a[i * d + j]);
      quad += Real(v[i]) * Real(a[i * d + j]) * Real(v[j]);
    }
  }
  return frob + 2 * quad + Real(d - 1) / Real(d) * vv * vv;
}

}  // namespace detail

/**
 * |A|_F^2 + 2 v.Av + (d-1)/d |v|^4 >= 0 for symmetric traceless A (row major, d x d).
 *
 * Values within 1e-10 of zero relative to |A|^2 + |v|^4 are recomputed in
 * 50-digit arithmetic before the sign is judged.
 */
inline CertificateReport traceless_lemma_check(std::span<const double> a, std::span<const double> v) {
  const std::size_t d = v.size();
  if (d < 2 || a.size() != d * d) throw PreconditionError("traceless_lemma_check: need a d x d matrix, d >= 2");
  double norm = 0.0, trace = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    trace += a[i * d + i];
    vv += v[i] * v[i];
    for (std::size_t j = 0; j < d; ++j) norm += a[i * d + j] * a[i * d + j];
  }
  norm = std::sqrt(norm);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(a[i * d + j] - a[j * d + i]) > 1e-12 * norm) {
        throw PreconditionError("traceless_lemma_check: matrix is not symmetric");
      }
    }
  }
  if (std::abs(trace) > 1e-12 * norm) throw PreconditionError("traceless_lemma_check: matrix is not traceless");
  const double scale = norm * norm + vv * vv;
  double value = detail::traceless_form<double>(a, v);
  std::string ctx = "d=" + std::to_string(d);
  if (std::abs(value) <= 1e-10 * scale) {
    using Wide = boost::multiprecision::cpp_dec_float_50;
    value = static_cast<double>(detail::traceless_form<Wide>(a, v));
    ctx += " reverified";
  }
  return make_report("traceless_binomial", -1, 0.0, value, 1e-12 * scale, ctx);
}

/// Outcome of a randomized sweep of the matrix lemma.
struct TracelessSweep {
  std::size_t samples = 0;
  std::size_t failures = 0;
  std::size_t reverified = 0;
  double worst_relative = std::numeric_limits<double>::infinity();  ///< min of value / scale
};

/// Random symmetric traceless A with Gaussian entries and Gaussian v, d uniform in [d_lo, d_hi].
inline TracelessSweep traceless_lemma_sweep(std::size_t samples, std::uint64_t seed, int d_lo = 2, int d_hi = 10) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> dim(d_lo, d_hi);
  TracelessSweep out;
  std::vector<double> a, v;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto d = static_cast<std::size_t>(dim(rng));
    a.assign(d * d, 0.0);
    v.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j <= i; ++j) a[i * d + j] = a[j * d + i] = normal(rng);
      v[i] = normal(rng);
    }
    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) trace += a[i * d + i];
    for (std::size_t i = 0; i < d; ++i) a[i * d + i] -= trace / static_cast<double>(d);
    const auto r = traceless_lemma_check(a, v);
    ++out.samples;
    if (!r.pass) ++out.failures;
    if (r.context.find("reverified") != std::string::npos) ++out.reverified;
    double vv = 0.0, norm = 0.0;
    for (double x : v) vv += x * x;
    for (double x : a) norm += x * x;
    out.worst_relative = std::min(out.worst_relative, r.slack / (norm + vv * vv));
  }
  return out;
}

/**
 * Boundary sign u' u'' nu <= 0 at both endpoints.
 *
 * The reflecting closure gives u' = 0 on the boundary faces, so both values
 * vanish identically in one dimension; curvature effects of higher dimensions
 * are outside this check.
 */
inline std::vector<CertificateReport> boundary_sign_check(const GridDensity& u) {
  const double h = u.spacing();
  const auto p = stencil::face_slopes(u.values(), h);
  const auto d2 = stencil::second_derivative(u.values(), h);
  const double left = p.front() * d2.front() * -1.0;
  const double right = p.back() * d2.back() * 1.0;
  return {make_report("boundary_sign_left", -1, left, 0.0, 0.0),
          make_report("boundary_sign_right", -1, right, 0.0, 0.0)};
}

}  // namespace wgflow
