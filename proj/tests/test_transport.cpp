#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "wgflow/quantile_distance.hpp"
#include "wgflow/transport.hpp"

using namespace wgflow;

namespace {

const double kPi = std::numbers::pi;

/// Density equal to 1/|[a,b]| on the cells inside [a, b] and zero elsewhere.
GridDensity box(Interval domain, std::size_t cells, double a, double b) {
  return GridDensity::sample(domain, cells, [=](double x) { return x > a && x < b ? 1.0 : 0.0; });
}

GridDensity random_density(std::mt19937_64& rng, std::size_t cells) {
  std::uniform_real_distribution<double> u(0.05, 2.0);
  std::vector<double> v(cells);
  for (auto& x : v) x = u(rng);
  return GridDensity::normalized(Interval(0, 1), v);
}

/// Independent W2 oracle: midpoint rule on a fine mass grid of the quantile difference.
double w2_oracle(const GridDensity& u, const GridDensity& v, std::size_t levels = 200000) {
  std::vector<double> s(levels);
  for (std::size_t i = 0; i < levels; ++i) s[i] = (i + 0.5) / levels;
  const auto qu = quantile(u, s), qv = quantile(v, s);
  double acc = 0.0;
  for (std::size_t i = 0; i < levels; ++i) acc += (qu[i] - qv[i]) * (qu[i] - qv[i]);
  return std::sqrt(acc / levels);
}

}  // namespace

TEST(Quantile, UniformAndHalfInterval) {
  const Interval d(0, 1);
  const auto u = GridDensity::uniform(d, 16);
  const std::vector<double> lv{0.0, 0.5, 1.0};
  const auto q = quantile(u, lv);
  EXPECT_NEAR(q[0], 0.0, 1e-15);
  EXPECT_NEAR(q[1], 0.5, 1e-15);
  EXPECT_NEAR(q[2], 1.0, 1e-15);
  const auto half = box(d, 16, 0.0, 0.5);
  const std::vector<double> mid{0.5};
  EXPECT_NEAR(quantile(half, mid)[0], 0.25, 1e-15);
}

TEST(Quantile, LevelZeroIsLeftEdgeOfSupport) {
  const auto u = box(Interval(0, 1), 16, 0.25, 1.0);
  const std::vector<double> zero{0.0};
  EXPECT_NEAR(quantile(u, zero)[0], 0.25, 1e-15);
}

TEST(Quantile, RejectsInvalidLevels) {
  const auto u = GridDensity::uniform(Interval(0, 1), 8);
  const std::vector<double> out{1.5};
  const std::vector<double> dec{0.6, 0.2};
  EXPECT_THROW(quantile(u, out), DomainError);
  EXPECT_THROW(quantile(u, dec), DomainError);
}

TEST(Wasserstein, AnalyticExamples) {
  const Interval d(0, 2);
  EXPECT_NEAR(wasserstein2(box(d, 64, 0, 1), box(d, 64, 1, 2)), 1.0, 1e-14);
  const Interval e(0, 1);
  EXPECT_NEAR(wasserstein2(GridDensity::uniform(e, 64), box(e, 64, 0, 0.5)), std::sqrt(1.0 / 12.0), 1e-14);
  const auto u = GridDensity::sample(e, 32, [](double x) { return 1 + x; });
  EXPECT_EQ(wasserstein2(u, u), 0.0);
  EXPECT_THROW(wasserstein2(u, GridDensity::uniform(Interval(0, 2), 32)), ConfigurationError);
}

TEST(Wasserstein, MatchesFineQuadratureOracle) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    const auto u = random_density(rng, 24), v = random_density(rng, 24);
    EXPECT_NEAR(wasserstein2(u, v), w2_oracle(u, v), 1e-6);
  }
}

TEST(Wasserstein, MetricProperties) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto a = random_density(rng, 64), b = random_density(rng, 64), c = random_density(rng, 64);
    EXPECT_EQ(wasserstein2(a, b), wasserstein2(b, a));
    EXPECT_LE(wasserstein2(a, c), wasserstein2(a, b) + wasserstein2(b, c) + 1e-12);
  }
}

TEST(Wasserstein, TranslationInvariance) {
  const Interval d(0, 1);
  const std::size_t m = 256;
  const double h = 1.0 / m;
  for (int shift : {1, 5, 40}) {
    auto profile = [](double x) { return std::exp(-std::pow((x - 0.35) / 0.05, 2)); };
    const auto u = GridDensity::sample(d, m, [&](double x) { return x < 0.7 ? profile(x) : 0.0; });
    const auto v = GridDensity::sample(d, m, [&](double x) {
      const double y = x - shift * h;
      return y > 0 && y < 0.7 ? profile(y) : 0.0;
    });
    EXPECT_NEAR(wasserstein2(u, v), shift * h, 1e-6);
  }
}

TEST(Wasserstein, MapFormulaForEqualMasses) {
  const Interval d(0, 1);
  std::vector<double> a(9), b(9);
  for (int i = 0; i <= 8; ++i) {
    a[i] = i / 8.0;
    b[i] = 0.5 * i / 8.0;
  }
  // The maps of uniform[0,1] and uniform[0,0.5]: the quantile gap s/2 is linear per cell.
  EXPECT_NEAR(wasserstein2(TransportMap(d, a), TransportMap(d, b)), std::sqrt(1.0 / 12.0), 1e-14);
}

TEST(Entropy, AnalyticValues) {
  EXPECT_NEAR(boltzmann_entropy(GridDensity::uniform(Interval(0, 1), 16)), 0.0, 1e-15);
  EXPECT_NEAR(boltzmann_entropy(box(Interval(0, 1), 16, 0, 0.5)), std::log(2.0), 1e-14);
  EXPECT_NEAR(boltzmann_entropy(GridDensity::uniform(Interval(0, 2), 16)), -std::log(2.0), 1e-14);
  const auto bumpy = GridDensity::sample(Interval(0, 1), 64, [](double x) { return 1 + 0.3 * std::cos(kPi * x); });
  EXPECT_GT(boltzmann_entropy(bumpy), 0.0);
}

TEST(DensityFromMap, ExamplesAndRoundTrip) {
  const Interval d(0, 1);
  std::vector<double> lin(17), half(17);
  for (int i = 0; i <= 16; ++i) {
    lin[i] = i / 16.0;
    half[i] = 0.5 * i / 16.0;
  }
  const auto u = density_from_map(TransportMap(d, lin), 32);
  for (std::size_t j = 0; j < u.size(); ++j) EXPECT_NEAR(u[j], 1.0, 1e-12);
  const auto v = density_from_map(TransportMap(d, half), 32);
  for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(v[j], 2.0, 1e-12);
  for (std::size_t j = 16; j < 32; ++j) EXPECT_NEAR(v[j], 0.0, 1e-12);

  const auto w = GridDensity::sample(d, 64, [](double x) { return 1 + 0.5 * std::cos(2 * kPi * x); });
  const auto back = density_from_map(map_from_density(w, 64), 64);
  for (std::size_t j = 0; j < 64; ++j) EXPECT_NEAR(back[j], w[j], 2e-2 * w[j]);
  const auto fine = density_from_map(map_from_density(w, 4096), 64);
  for (std::size_t j = 0; j < 64; ++j) EXPECT_NEAR(fine[j], w[j], 1e-3 * w[j]);
}

TEST(MapFromDensity, Examples) {
  const Interval d(0, 1);
  const auto x = map_from_density(GridDensity::uniform(d, 16), 8);
  for (int i = 0; i <= 8; ++i) EXPECT_NEAR(x[i], i / 8.0, 1e-15);
  const auto y = map_from_density(box(d, 16, 0, 0.5), 8);
  EXPECT_NEAR(y[4], 0.25, 1e-15);
  EXPECT_NEAR(y[8], 0.5, 1e-15);
  const auto gap = GridDensity::sample(d, 64, [](double x) { return x < 0.3 || x > 0.7 ? 1.0 : 0.0; });
  EXPECT_THROW(map_from_density(gap, 16), DegenerateQuantileError);
}

TEST(PerturbationFlow, Examples) {
  const Interval d(0, 1);
  std::vector<double> lin(17);
  for (int i = 0; i <= 16; ++i) lin[i] = i / 16.0;
  const TransportMap x(d, lin);
  const auto phi = TestFunction::cosine(d, 1);
  const auto same = perturbation_flow(x, phi, 0.0);
  for (int i = 0; i <= 16; ++i) EXPECT_EQ(same[i], x[i]);
  const auto flat = perturbation_flow(x, TestFunction::constant(d, 2.0), 0.3);
  for (int i = 0; i <= 16; ++i) EXPECT_EQ(flat[i], x[i]);
  const double s = 1e-4;
  const auto moved = perturbation_flow(x, phi, s);
  EXPECT_NEAR(moved[8] - 0.5, -kPi * s, 1e-7);
  const auto back = perturbation_flow(moved, phi, -s);
  for (int i = 0; i <= 16; ++i) EXPECT_NEAR(back[i], x[i], 1e-12);
  EXPECT_THROW(perturbation_flow(x, TestFunction::cosine(d, 8), 1.0), StepTooLargeError);
}

TEST(VolumeDistortion, IdentitiesHold) {
  const Interval d(0, 1);
  const auto u = GridDensity::sample(d, 64, [](double x) { return 1 + 0.4 * std::cos(kPi * x); });
  const auto x = map_from_density(u, 64);
  const std::vector<double> s{1e-4, 5e-5};
  SmoothProfile prof{[](double y) { return 1 + 0.4 * std::cos(kPi * y); },
                     [](double y) { return -0.4 * kPi * std::sin(kPi * y); }};
  for (const auto& phi : {TestFunction::cosine(d, 1), TestFunction::cosine(d, 3, 0.2)}) {
    for (const auto& r : volume_distortion_check(x, phi, s, &prof)) EXPECT_TRUE(r.pass) << r.name << r.context;
  }
  // A linear phi has no curvature: both analytic rates vanish and the flow is a translation.
  std::vector<double> inner(9);
  for (int i = 0; i <= 8; ++i) inner[i] = 0.3 + 0.4 * i / 8.0;
  const auto lin = TestFunction::linear(d, 0.5);
  for (const auto& r : volume_distortion_check(TransportMap(d, inner), lin, s)) {
    EXPECT_TRUE(r.pass);
    EXPECT_LT(r.lhs, 1e-8);
  }
}

TEST(QuantileDistance, ValueMatchesExactTransport) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const auto u = random_density(rng, 32), v = random_density(rng, 32);
    const QuantileDistance q(v);
    const auto c = detail::face_cdf(u);
    const double w = wasserstein2(u, v);
    EXPECT_NEAR(q.value(c), w * w, 1e-13);
  }
}

TEST(QuantileDistance, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(9);
  const auto u = random_density(rng, 16), v = random_density(rng, 16);
  const QuantileDistance q(v);
  auto c = detail::face_cdf(u);
  const std::size_t n = 15;
  std::vector<double> g(n), diag(n), off(n);
  const auto t = q.terms(c);
  q.gradient(t, g);
  q.hessian(t, diag, off);
  const double eps = 1e-6;
  for (std::size_t f = 1; f <= n; ++f) {
    auto cp = c, cm = c;
    cp[f] += eps;
    cm[f] -= eps;
    EXPECT_NEAR(g[f - 1], (q.value(cp) - q.value(cm)) / (2 * eps), 1e-7);
    std::vector<double> gp(n), gm(n);
    q.gradient(q.terms(cp), gp);
    q.gradient(q.terms(cm), gm);
    const double scale = std::abs(diag[f - 1]) + 1.0;
    EXPECT_NEAR(diag[f - 1], (gp[f - 1] - gm[f - 1]) / (2 * eps), 1e-5 * scale);
    if (f < n) {
      EXPECT_NEAR(off[f - 1], (gp[f] - gm[f]) / (2 * eps), 1e-5 * scale);
    }
    for (std::size_t k = 1; k <= n; ++k) {
      if (k + 1 < f || k > f + 1) {
        EXPECT_NEAR((gp[k - 1] - gm[k - 1]) / (2 * eps), 0.0, 1e-6);
      }
    }
  }
}
