#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "wgflow/jko.hpp"

using namespace wgflow;

namespace {

const double kPi = std::numbers::pi;

GridDensity cosine_datum(std::size_t m, double eps = 0.5, double k = 2.0) {
  return GridDensity::sample(Interval(0, 1), m, [=](double x) { return 1 + eps * std::cos(k * kPi * x); });
}

/// Amplitude of the cos(k pi x) component of u - 1 on [0, 1].
double mode_amplitude(const GridDensity& u, double k) {
  double a = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) a += (u[j] - 1.0) * std::cos(k * kPi * u.midpoint(j));
  return 2.0 * a * u.spacing();
}

GridDensity from_cdf(const Interval& d, const std::vector<double>& c) {
  const std::size_t m = c.size() - 1;
  std::vector<double> u(m);
  for (std::size_t j = 0; j < m; ++j) u[j] = (c[j + 1] - c[j]) * m / d.length();
  return GridDensity::normalized(d, u);
}

/**
 * Independent minimizer of the penalized objective over grid densities: Newton
 * iteration with finite-difference gradient and Hessian of penalized_objective
 * in the interior CDF values, dense Gaussian elimination, and backtracking.
 */
GridDensity brute_force_step(const GridDensity& v, double tau, const EnergyKind& kind) {
  const Interval d = v.domain();
  const std::size_t m = v.size(), n = m - 1;
  std::vector<double> c(m + 1, 0.0);
  for (std::size_t j = 0; j < m; ++j) c[j + 1] = c[j] + v[j] * v.spacing();
  c[m] = 1.0;
  auto J = [&](const std::vector<double>& x) { return penalized_objective(from_cdf(d, x), v, tau, kind); };
  const double e = 1e-5;
  for (int it = 0; it < 30; ++it) {
    std::vector<double> g(n), H(n * n);
    const double j0 = J(c);
    for (std::size_t a = 0; a < n; ++a) {
      auto p = c, q = c;
      p[a + 1] += e;
      q[a + 1] -= e;
      const double jp = J(p), jq = J(q);
      g[a] = (jp - jq) / (2 * e);
      H[a * n + a] = (jp - 2 * j0 + jq) / (e * e);
      for (std::size_t b = 0; b < a; ++b) {
        auto pp = c, pm = c, mp = c, mm = c;
        pp[a + 1] += e, pp[b + 1] += e;
        pm[a + 1] += e, pm[b + 1] -= e;
        mp[a + 1] -= e, mp[b + 1] += e;
        mm[a + 1] -= e, mm[b + 1] -= e;
        H[a * n + b] = H[b * n + a] = (J(pp) - J(pm) - J(mp) + J(mm)) / (4 * e * e);
      }
    }
    // Solve H s = -g by Gaussian elimination with partial pivoting.
    std::vector<double> s(n);
    for (std::size_t a = 0; a < n; ++a) s[a] = -g[a];
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      for (std::size_t r = k + 1; r < n; ++r)
        if (std::abs(H[r * n + k]) > std::abs(H[piv * n + k])) piv = r;
      for (std::size_t col = 0; col < n; ++col) std::swap(H[k * n + col], H[piv * n + col]);
      std::swap(s[k], s[piv]);
      for (std::size_t r = k + 1; r < n; ++r) {
        const double f = H[r * n + k] / H[k * n + k];
        for (std::size_t col = k; col < n; ++col) H[r * n + col] -= f * H[k * n + col];
        s[r] -= f * s[k];
      }
    }
    for (std::size_t k = n; k-- > 0;) {
      for (std::size_t col = k + 1; col < n; ++col) s[k] -= H[k * n + col] * s[col];
      s[k] /= H[k * n + k];
    }
    double t = 1.0, step = 0.0;
    for (; t > 1e-8; t *= 0.5) {
      auto trial = c;
      bool ok = true;
      for (std::size_t a = 0; a < n; ++a) trial[a + 1] += t * s[a];
      for (std::size_t j = 0; j < m; ++j) ok = ok && trial[j + 1] > trial[j];
      if (ok && J(trial) <= j0) {
        for (double x : s) step = std::max(step, std::abs(t * x));
        c = trial;
        break;
      }
    }
    if (step < 1e-12) break;
  }
  return from_cdf(d, c);
}

}  // namespace

TEST(PenalizedObjective, PreviousStateGivesItsEnergy) {
  const auto v = cosine_datum(64);
  EXPECT_EQ(penalized_objective(v, v, 1e-3, thin_film()), energy(thin_film(), v));
  const auto uni = GridDensity::uniform(Interval(0, 1), 32);
  EXPECT_NEAR(penalized_objective(map_from_density(uni, 32), uni, 1e-3, thin_film()), 0.0, 1e-14);
}

TEST(PenalizedObjective, LargeTauLeavesEnergy) {
  const auto v = cosine_datum(64), u = cosine_datum(64, 0.3);
  EXPECT_NEAR(penalized_objective(u, v, 1e12, thin_film()), energy(thin_film(), u), 1e-12);
  EXPECT_THROW(penalized_objective(u, v, 0.0, thin_film()), ConfigurationError);
}

TEST(PenalizedObjective, TranslationCost) {
  const Interval d(0, 1);
  const std::size_t m = 64;
  const double h = 1.0 / m, tau = 1e-2;
  auto box = [&](double a) {
    return GridDensity::sample(d, m, [=](double x) { return x > a && x < a + 0.5 ? 1.0 : 0.0; });
  };
  const auto v = box(0.0), u = box(3 * h);
  const double transport = penalized_objective(u, v, tau, thin_film()) - energy(thin_film(), u);
  EXPECT_NEAR(transport, 9 * h * h / (2 * tau), 1e-12);
}

TEST(JkoStep, UniformIsFixedPoint) {
  const auto v = GridDensity::uniform(Interval(0, 1), 64);
  JkoConfig cfg;
  const auto [u, diag] = jko_step(v, cfg);
  EXPECT_TRUE(diag.converged);
  for (std::size_t j = 0; j < u.size(); ++j) EXPECT_EQ(u[j], v[j]);
}

TEST(JkoStep, MatchesBruteForceOnCoarseGrid) {
  const auto v = cosine_datum(16);
  for (const EnergyKind& kind : {EnergyKind(thin_film()), EnergyKind(sqrt_mobility())}) {
    JkoConfig cfg;
    cfg.tau = 1e-3;
    cfg.K = 16;
    cfg.energy_kind = kind;
    const auto [u, diag] = jko_step(v, cfg);
    EXPECT_TRUE(diag.converged);
    const auto oracle = brute_force_step(v, cfg.tau, kind);
    for (std::size_t j = 0; j < u.size(); ++j) EXPECT_NEAR(u[j], oracle[j], 1e-5);
    EXPECT_LT(penalized_objective(u, v, cfg.tau, kind), penalized_objective(v, v, cfg.tau, kind));
    EXPECT_LE(penalized_objective(u, v, cfg.tau, kind), penalized_objective(oracle, v, cfg.tau, kind) + 1e-10);
  }
}

TEST(JkoStep, LinearModeContractsAtImplicitRate) {
  // Small cosine perturbations follow the linearized thin-film step a -> a / (1 + tau lambda_h),
  // with lambda_h the fourth power of the discrete Neumann eigenvalue.
  const std::size_t m = 256;
  const double tau = 1e-4, h = 1.0 / m;
  const auto v = cosine_datum(m, 1e-3);
  JkoConfig cfg;
  cfg.tau = tau;
  const auto [u, diag] = jko_step(v, cfg);
  const double mu = 4.0 / (h * h) * std::pow(std::sin(kPi * h), 2);
  const double predicted = 1.0 / (1.0 + tau * mu * mu);
  EXPECT_NEAR(mode_amplitude(u, 2) / mode_amplitude(v, 2), predicted, 1e-3 * predicted);
  EXPECT_LT(energy(thin_film(), u), energy(thin_film(), v));
}

TEST(Run, ZeroStepsAndUniformTrajectories) {
  const auto u0 = cosine_datum(32);
  JkoConfig cfg;
  const auto t0 = run(u0, cfg);
  EXPECT_EQ(t0.steps(), 0u);
  EXPECT_EQ(t0.states.size(), 1u);
  const auto uni = GridDensity::uniform(Interval(0, 1), 32);
  cfg.n_steps = 5;
  const auto t1 = run(uni, cfg);
  for (const auto& s : t1.states)
    for (std::size_t j = 0; j < s.size(); ++j) EXPECT_EQ(s[j], 1.0);
  for (double d : t1.step_distances) EXPECT_EQ(d, 0.0);
}

TEST(Run, ThinFilmRelaxation) {
  const auto u0 = cosine_datum(256);
  JkoConfig cfg;
  cfg.n_steps = 100;
  const auto tr = run(u0, cfg);
  EXPECT_TRUE(tr.all_converged());
  EXPECT_LT(tr.gradient_check_error, 1e-6);
  EXPECT_EQ(tr.times.size(), 101u);
  for (std::size_t j = 0; j < u0.size(); ++j) EXPECT_EQ(tr.states[0][j], u0[j]);
  for (std::size_t n = 1; n <= tr.steps(); ++n) {
    if (tr.energies[n - 1] > 1e-12) {
      EXPECT_LT(tr.energies[n], tr.energies[n - 1]);
    }
    EXPECT_NEAR(tr.states[n].mass(), 1.0, 1e-10);
  }
  EXPECT_LT(tr.energies.back(), 1e-2 * tr.energies.front());
  EXPECT_LT(wasserstein2(tr.states.back(), GridDensity::uniform(Interval(0, 1), 256)), 1e-3);
  double sum = 0.0;
  for (double d : tr.step_distances) sum += d * d;
  EXPECT_LE(sum, 2 * cfg.tau * tr.energies[0]);
}

TEST(Run, RelaxationAgreesAcrossResolutions) {
  JkoConfig cfg;
  cfg.n_steps = 10;
  const auto a = run(cosine_datum(128), cfg), b = run(cosine_datum(256), cfg);
  for (std::size_t n = 1; n <= 10; ++n) EXPECT_NEAR(a.energies[n] / b.energies[n], 1.0, 0.05);
}

TEST(Run, SqrtMobilityDescends) {
  JkoConfig cfg;
  cfg.n_steps = 30;
  cfg.energy_kind = sqrt_mobility();
  const auto tr = run(cosine_datum(128), cfg);
  EXPECT_TRUE(tr.all_converged());
  for (std::size_t n = 1; n <= tr.steps(); ++n) EXPECT_LE(tr.energies[n], tr.energies[n - 1]);
}

TEST(Run, CorruptedStepCopiesPreviousState) {
  JkoConfig cfg;
  cfg.n_steps = 3;
  cfg.corrupt_steps = {2};
  const auto tr = run(cosine_datum(64), cfg);
  EXPECT_TRUE(tr.diagnostics[1].corrupted);
  for (std::size_t j = 0; j < 64; ++j) EXPECT_EQ(tr.states[2][j], tr.states[1][j]);
  EXPECT_EQ(tr.step_distances[1], 0.0);
}

TEST(Run, CeilingIndexConvention) {
  JkoConfig cfg;
  cfg.tau = 0.1;
  cfg.n_steps = 4;
  const auto tr = run(GridDensity::uniform(Interval(0, 1), 16), cfg);
  EXPECT_EQ(tr.index_at(0.0), 0u);
  EXPECT_EQ(tr.index_at(0.05), 1u);
  EXPECT_EQ(tr.index_at(0.2), 2u);
  EXPECT_EQ(tr.index_at(0.25), 3u);
  EXPECT_EQ(tr.index_at(9.0), 4u);
}

TEST(Config, RejectsInvalidParameters) {
  JkoConfig cfg;
  cfg.tau = -1;
  EXPECT_THROW(cfg.validate(), ConfigurationError);
  cfg = JkoConfig{};
  cfg.K = 4;
  EXPECT_THROW(cfg.validate(), ConfigurationError);
}

TEST(RefineStudy, UniformHasZeroGaps) {
  JkoConfig cfg;
  cfg.tau = 1e-3;
  cfg.n_steps = 4;
  const auto st = refine_study(GridDensity::uniform(Interval(0, 1), 32), cfg, 3);
  ASSERT_EQ(st.level_gaps.size(), 2u);
  for (double g : st.level_gaps) EXPECT_EQ(g, 0.0);
  EXPECT_EQ(st.trajectories[2].steps(), 16u);
}

TEST(RefineStudy, ThinFilmGapsShrink) {
  JkoConfig cfg;
  cfg.tau = 1e-3;
  cfg.n_steps = 20;
  const auto u0 = cosine_datum(128, 0.5, 1.0);
  const auto st = refine_study(u0, cfg, 3);
  const double e0 = st.trajectories[0].energies[0];
  EXPECT_LT(st.level_gaps[1], st.level_gaps[0]);
  for (std::size_t l = 0; l < 2; ++l) EXPECT_LE(st.level_gaps[l], std::sqrt(2 * e0 * st.taus[l]));
}
