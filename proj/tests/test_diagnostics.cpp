#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "wgflow/diagnostics.hpp"

using namespace wgflow;

namespace {

const double kPi = std::numbers::pi;

GridDensity cosine_datum(std::size_t m, double eps = 0.5, double k = 2.0) {
  return GridDensity::sample(Interval(0, 1), m, [=](double x) { return 1 + eps * std::cos(k * kPi * x); });
}

double mode_amplitude(const GridDensity& u, double k) {
  double a = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) a += (u[j] - 1.0) * std::cos(k * kPi * u.midpoint(j));
  return 2.0 * a * u.spacing();
}

JkoTrajectory thin_film_run(std::size_t steps, std::set<std::size_t> corrupt = {}) {
  JkoConfig cfg;
  cfg.n_steps = steps;
  cfg.corrupt_steps = std::move(corrupt);
  return run(cosine_datum(128), cfg);
}

const JkoTrajectory& shared_run() {
  static const JkoTrajectory traj = thin_film_run(40);
  return traj;
}

}  // namespace

TEST(HeatFlow, CosineModeDecaysAtDiffusionRate) {
  const auto u = cosine_datum(256, 0.3, 2.0);
  const double s = 1e-3;
  const auto v = heat_flow(u, s);
  EXPECT_NEAR(v.mass(), 1.0, 1e-12);
  const double expected = std::exp(-4 * kPi * kPi * s);
  EXPECT_NEAR(mode_amplitude(v, 2) / mode_amplitude(u, 2), expected, 1e-3);
  const auto uni = GridDensity::uniform(Interval(0, 1), 32);
  const auto w = heat_flow(uni, 0.1);
  for (std::size_t j = 0; j < w.size(); ++j) EXPECT_NEAR(w[j], 1.0, 1e-14);
  EXPECT_THROW(heat_flow(u, -1.0), DomainError);
}

TEST(HeatFlow, ThinFilmDissipationEqualsHessianNorm) {
  // For Phi = |u'|^2 / 2 the heat flow dissipates exactly |u''|^2 at s = 0.
  const auto u = cosine_datum(128);
  const double q = extrapolated_dissipation(thin_film(), u, default_probe(u.domain()));
  const auto n = sobolev_norms(u);
  EXPECT_NEAR(q / (n.hess * n.hess), 1.0, 1e-3);
  const auto r = check_dissipation_bound(thin_film(), u, default_probe(u.domain()));
  EXPECT_TRUE(r.pass) << r.lhs << " " << r.rhs;
  EXPECT_EQ(r.name, "heat_flow_dissipation");
}

TEST(Classical, EstimatesHoldOnThinFilmRun) {
  const auto& tr = shared_run();
  const auto mono = check_energy_monotone(tr);
  ASSERT_EQ(mono.size(), tr.steps());
  EXPECT_TRUE(all_pass(mono));
  EXPECT_TRUE(check_total_square_distance(tr).pass);
  const auto holder = check_holder(tr);
  ASSERT_EQ(holder.size(), tr.steps());
  EXPECT_TRUE(all_pass(holder));
  EXPECT_FALSE(holder.front().context.empty());
}

TEST(Classical, RefinementReports) {
  RefinementStudy st;
  st.taus = {1e-3, 5e-4, 2.5e-4};
  st.level_gaps = {1.0, 0.4};
  auto r = check_refinement(st);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_TRUE(all_pass(r));
  st.level_gaps = {1.0, 0.6};
  r = check_refinement(st);
  EXPECT_TRUE(r[0].pass);
  EXPECT_FALSE(r[1].pass);
  st.level_gaps = {1.0, 1.2};
  EXPECT_FALSE(check_refinement(st)[0].pass);
}

TEST(EntropyDissipation, HoldsPerStepForThinFilm) {
  const auto& tr = shared_run();
  const auto r = check_entropy_dissipation_A(tr, thin_film());
  ASSERT_EQ(r.size(), tr.steps());
  EXPECT_TRUE(all_pass(r));
  for (const auto& x : r) EXPECT_GT(x.lhs, 0.0);
}

TEST(EntropyDissipation, CorruptedStepIsCaught) {
  const auto tr = thin_film_run(3, {2});
  const auto r = check_entropy_dissipation_A(tr, thin_film());
  EXPECT_TRUE(r[0].pass);
  EXPECT_FALSE(r[1].pass);
}

TEST(EntropyDissipation, HoldsForSqrtMobility) {
  JkoConfig cfg;
  cfg.n_steps = 20;
  cfg.energy_kind = sqrt_mobility();
  const auto tr = run(cosine_datum(128), cfg);
  EXPECT_TRUE(all_pass(check_entropy_dissipation_f(tr, sqrt_mobility(), 0.5)));
  EXPECT_THROW(check_entropy_dissipation_f(tr, sqrt_mobility(), 0.0), PreconditionError);
}

TEST(DiscreteWeak, ResidualWithinBound) {
  const auto& tr = shared_run();
  const double T = tr.tau * static_cast<double>(tr.steps());
  const auto phi = TestFunction::cosine(Interval(0, 1), 2);
  const auto r = check_discrete_weak_A(tr, thin_film(), phi, TemporalWeight::bump(0.2 * T, 0.8 * T));
  EXPECT_TRUE(r.pass) << r.lhs << " > " << r.rhs;
  EXPECT_NE(r.context.find("transport="), std::string::npos);
}

TEST(DiscreteWeak, ZeroWeightAndSupportErrors) {
  const auto& tr = shared_run();
  const auto phi = TestFunction::cosine(Interval(0, 1), 2);
  const auto r = check_discrete_weak_A(tr, thin_film(), phi, TemporalWeight::zero());
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_TRUE(r.pass);
  const double T = tr.tau * static_cast<double>(tr.steps());
  EXPECT_THROW(check_discrete_weak_A(tr, thin_film(), phi, TemporalWeight::bump(0.5 * T, 2 * T)), DomainError);
  EXPECT_THROW(check_discrete_weak_A(tr, thin_film(), phi, TemporalWeight::bump(0.0, T)), DomainError);
}

TEST(DiscreteWeak, MobilitySandwich) {
  JkoConfig cfg;
  cfg.n_steps = 20;
  cfg.energy_kind = sqrt_mobility();
  const auto tr = run(cosine_datum(128), cfg);
  const double T = tr.tau * 20;
  const auto phi = TestFunction::cosine(Interval(0, 1), 2);
  const auto eta = TemporalWeight::bump(0.2 * T, 0.8 * T);
  const auto r = check_discrete_weak_f(tr, sqrt_mobility(), phi, eta, 1e-3);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_TRUE(all_pass(r));
  // The middle term does not depend on beta and the envelope width is affine in it.
  const auto a = discrete_weak_f_sides(tr, sqrt_mobility(), phi, eta, 1e-3);
  const auto b = discrete_weak_f_sides(tr, sqrt_mobility(), phi, eta, 2e-3);
  const auto c = discrete_weak_f_sides(tr, sqrt_mobility(), phi, eta, 3e-3);
  EXPECT_EQ(a.middle, b.middle);
  const double wa = a.upper - a.lower, wb = b.upper - b.lower, wc = c.upper - c.lower;
  EXPECT_NEAR(wb - wa, wc - wb, 1e-12 * std::abs(wa));
  EXPECT_THROW(discrete_weak_f_sides(tr, sqrt_mobility(), phi, eta, 0.0), PreconditionError);
}

TEST(Apriori, CoercivityHoldsOnSamples) {
  const Interval d(0, 1);
  EXPECT_NEAR(coercivity_constants(thin_film(), d).c0, 0.5 / (1 + 1 / (kPi * kPi)), 1e-15);
  const auto k = coercivity_constants(thin_film(), d, 128);
  EXPECT_LT(k.c0, coercivity_constants(thin_film(), d).c0);
  for (double eps : {0.1, 0.5, 0.9}) {
    for (double mode : {1.0, 2.0, 5.0}) {
      const auto u = cosine_datum(128, eps, mode);
      const double h1 = sobolev_norms(u).h1;
      const double phi = energy(thin_film(), u), lower = k.c0 * h1 * h1 - k.c1;
      EXPECT_GE(phi, lower - 1e-12 * phi);
      // The lowest grid eigenmode attains the discrete Poincare constant.
      if (mode == 1.0) {
        EXPECT_NEAR(phi, lower, 1e-12 * phi);
      }
    }
  }
  EXPECT_THROW(coercivity_constants(custom_table({0.0, 0.125, 0.5, 1.125, 2.0}, 0.5), d), PreconditionError);
}

TEST(Apriori, UniformIsTightAndRunPasses) {
  JkoConfig cfg;
  cfg.n_steps = 3;
  const auto uni = run(GridDensity::uniform(Interval(0, 1), 32), cfg);
  const auto r = apriori_bounds(uni, thin_film());
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0].lhs, 1.0, 1e-14);
  EXPECT_NEAR(r[0].rhs, 1.0, 1e-14);
  EXPECT_TRUE(all_pass(r));
  EXPECT_TRUE(all_pass(apriori_bounds(shared_run(), thin_film())));
}

TEST(Traceless, EqualityCase) {
  const std::array<double, 4> a{-0.5, 0.0, 0.0, 0.5};
  const std::array<double, 2> v{1.0, 0.0};
  const auto r = traceless_lemma_check(a, v);
  EXPECT_NEAR(r.rhs, 0.0, 1e-15);
  EXPECT_TRUE(r.pass);
  EXPECT_NE(r.context.find("reverified"), std::string::npos);
}

TEST(Traceless, Preconditions) {
  const std::array<double, 4> nonsym{0.0, 1.0, 0.0, 0.0};
  const std::array<double, 4> trace{1.0, 0.0, 0.0, 1.0};
  const std::array<double, 2> v{1.0, 1.0};
  EXPECT_THROW(traceless_lemma_check(nonsym, v), PreconditionError);
  EXPECT_THROW(traceless_lemma_check(trace, v), PreconditionError);
  EXPECT_THROW(traceless_lemma_check(std::array<double, 1>{0.0}, std::array<double, 1>{1.0}), PreconditionError);
}

TEST(Traceless, RandomSweepHasNoFailures) {
  const auto s = traceless_lemma_sweep(2000, 11);
  EXPECT_EQ(s.samples, 2000u);
  EXPECT_EQ(s.failures, 0u);
  EXPECT_GE(s.worst_relative, 0.0);
}

TEST(BoundarySign, VanishesWithReflectingClosure) {
  const auto r = boundary_sign_check(cosine_datum(64));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_TRUE(all_pass(r));
  EXPECT_EQ(r[0].lhs, 0.0);
}
