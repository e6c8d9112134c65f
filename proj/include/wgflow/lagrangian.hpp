#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/random/sobol.hpp>

#include "wgflow/certificate.hpp"
#include "wgflow/errors.hpp"
#include "wgflow/grid.hpp"
#include "wgflow/stencil.hpp"
#include "wgflow/test_function.hpp"

namespace wgflow {

/// Second derivatives of F in the variable order (x, z, p).
using Hessian3 = std::array<std::array<double, 3>, 3>;

/**
 * Integrand F(x, z, p) of the energy with its first and second derivatives.
 *
 * The constants gamma, c, C, D are the convexity and growth constants the
 * integrand is claimed to satisfy; they are NaN when not declared.
 */
struct LagrangianSpec {
  using Scalar3 = std::function<double(double, double, double)>;
  std::string name;
  Scalar3 F, F_x, F_z, F_p;
  std::function<Hessian3(double, double, double)> hessian;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double c = std::numeric_limits<double>::quiet_NaN();
  double C = std::numeric_limits<double>::quiet_NaN();
  double D = std::numeric_limits<double>::quiet_NaN();
  bool x_dependent = false;

  bool constants_declared() const {
    return std::isfinite(gamma) && std::isfinite(c) && std::isfinite(C) && std::isfinite(D);
  }
};

/**
 * Concave mobility f on (0, infinity) with derivatives up to third order.
 *
 * alpha and C_lower give the lower bound f'(z) >= C_lower z^(alpha - 1);
 * delta_bar is the margin in the third-derivative ratio condition for the
 * declared dimension. zf_limit, when known, is the value of z f'(z) at z = 0.
 */
struct MobilitySpec {
  using Scalar1 = std::function<double(double)>;
  std::string name;
  Scalar1 f, f1, f2, f3;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double C_lower = std::numeric_limits<double>::quiet_NaN();
  double delta_bar = std::numeric_limits<double>::quiet_NaN();
  int dimension = 1;
  std::optional<double> zf_limit;
  bool is_power = false;
};

/// Density floor applied before evaluating mobility derivatives.
inline constexpr double kDensityFloor = 1e-12;

/// 1 - d/2 + sqrt(d^2 + 8d) / 2, the dimension term of the ratio condition.
inline double ratio_threshold(int d) {
  const double dd = d;
  return 1.0 - dd / 2.0 + 0.5 * std::sqrt(dd * dd + 8.0 * dd);
}

/// Open lower endpoint of the admissible exponent window for power mobilities.
inline double alpha_window(int d) {
  if (d < 1) throw DomainError("alpha_window: dimension must be at least 1");
  return 0.75 - 0.25 * std::sqrt(1.0 + 8.0 / static_cast<double>(d));
}

// ---------------------------------------------------------------------------
// Built-in integrands and mobilities
// ---------------------------------------------------------------------------

/// F = p^2 / 2, the thin-film energy.
inline LagrangianSpec thin_film() {
  LagrangianSpec s;
  s.name = "thin_film";
  s.F = [](double, double, double p) { return 0.5 * p * p; };
  s.F_x = [](double, double, double) { return 0.0; };
  s.F_z = [](double, double, double) { return 0.0; };
  s.F_p = [](double, double, double p) { return p; };
  s.hessian = [](double, double, double) { return Hessian3{{{0, 0, 0}, {0, 0, 0}, {0, 0, 1}}}; };
  s.gamma = 1.0;
  s.c = 0.5;
  s.C = 0.5;
  s.D = 1.0;
  return s;
}

/// f(z) = C z^alpha with the ratio margin computed for dimension d.
inline MobilitySpec power_mobility(double alpha, double coeff = 1.0, int d = 1) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("power_mobility: exponent must lie in (0, 1)");
  }
  if (!(coeff > 0.0)) throw DomainError("power_mobility: coefficient must be positive");
  MobilitySpec m;
  m.name = "power_mobility";
  m.f = [=](double z) { return z <= 0.0 ? 0.0 : coeff * std::pow(z, alpha); };
  m.f1 = [=](double z) { return coeff * alpha * std::pow(z, alpha - 1.0); };
  m.f2 = [=](double z) { return coeff * alpha * (alpha - 1.0) * std::pow(z, alpha - 2.0); };
  m.f3 = [=](double z) {
    return coeff * alpha * (alpha - 1.0) * (alpha - 2.0) * std::pow(z, alpha - 3.0);
  };
  m.alpha = alpha;
  m.C_lower = coeff * alpha;
  m.delta_bar = (2.0 - alpha) / (1.0 - alpha) - ratio_threshold(d);
  m.dimension = d;
  m.zf_limit = 0.0;
  m.is_power = true;
  return m;
}

/// f(z) = sqrt(z).
inline MobilitySpec sqrt_mobility(int d = 1) {
  MobilitySpec m = power_mobility(0.5, 1.0, d);
  m.name = "sqrt_mobility";
  m.f = [](double z) { return z <= 0.0 ? 0.0 : std::sqrt(z); };
  m.f1 = [](double z) { return 0.5 / std::sqrt(z); };
  m.f2 = [](double z) { return -0.25 / (z * std::sqrt(z)); };
  m.f3 = [](double z) { return 0.375 / (z * z * std::sqrt(z)); };
  return m;
}

/// F = f'(z)^2 p^2 / 2, the integrand whose energy is half the squared gradient of f(u).
inline LagrangianSpec lagrangian_from_mobility(const MobilitySpec& m) {
  LagrangianSpec s;
  s.name = "from_" + m.name;
  auto f1 = m.f1, f2 = m.f2, f3 = m.f3;
  s.F = [=](double, double z, double p) {
    const double a = f1(z);
    return 0.5 * a * a * p * p;
  };
  s.F_x = [](double, double, double) { return 0.0; };
  s.F_z = [=](double, double z, double p) { return f1(z) * f2(z) * p * p; };
  s.F_p = [=](double, double z, double p) {
    const double a = f1(z);
    return a * a * p;
  };
  s.hessian = [=](double, double z, double p) {
    const double a = f1(z), b = f2(z), c = f3(z);
    const double zz = (b * b + a * c) * p * p;
    const double zp = 2.0 * a * b * p;
    return Hessian3{{{0, 0, 0}, {0, zz, zp}, {0, zp, a * a}}};
  };
  return s;
}

/**
 * F = G(|p|) with G a cubic B-spline through tabulated values at r = 0, dr, 2 dr, ...
 *
 * The spline has G'(0) = 0 so that F is smooth across p = 0; beyond the last
 * knot G continues as its second-order Taylor polynomial.
 */
inline LagrangianSpec custom_table(std::vector<double> values, double dr, double gamma = NAN,
                                   double c = NAN, double C = NAN, double D = NAN) {
  if (values.size() < 4) throw DomainError("custom_table: need at least 4 tabulated values");
  if (!(dr > 0.0)) throw DomainError("custom_table: spacing must be positive");
  using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
  const double r_max = dr * static_cast<double>(values.size() - 1);
  // G'(0) = 0 by radial symmetry; the right slope is a second-order one-sided difference.
  const std::size_t n = values.size();
  const double right_slope = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * dr);
  auto spline = std::make_shared<Spline>(values.begin(), values.end(), 0.0, dr, 0.0, right_slope);
  const double g0 = (*spline)(r_max), g1 = spline->prime(r_max), g2 = spline->double_prime(r_max);
  // Value, first and second derivative of G at r >= 0.
  auto eval = [=](double r) -> std::array<double, 3> {
    if (r <= r_max) return {(*spline)(r), spline->prime(r), spline->double_prime(r)};
    const double d = r - r_max;
    return {g0 + g1 * d + 0.5 * g2 * d * d, g1 + g2 * d, g2};
  };
  LagrangianSpec s;
  s.name = "custom_table";
  s.F = [=](double, double, double p) { return eval(std::abs(p))[0]; };
  s.F_x = [](double, double, double) { return 0.0; };
  s.F_z = [](double, double, double) { return 0.0; };
  s.F_p = [=](double, double, double p) {
    const double g = eval(std::abs(p))[1];
    return p < 0.0 ? -g : g;
  };
  s.hessian = [=](double, double, double p) {
    return Hessian3{{{0, 0, 0}, {0, 0, 0}, {0, 0, eval(std::abs(p))[2]}}};
  };
  s.gamma = gamma;
  s.c = c;
  s.C = C;
  s.D = D;
  return s;
}

// ---------------------------------------------------------------------------
// Energies and weak-form operators
// ---------------------------------------------------------------------------

/**
 * Energy sum over faces of w_f F(x_f, z_f, p_f).
 *
 * Face values and slopes come from the staggered stencil; boundary faces have
 * zero slope and half weight.
 */
inline double energy(const LagrangianSpec& F, const GridDensity& u) {
  const double h = u.spacing();
  const auto z = stencil::face_values(u.values());
  const auto p = stencil::face_slopes(u.values(), h);
  const auto w = stencil::face_weights(u.size(), h);
  double e = 0.0;
  for (std::size_t f = 0; f < z.size(); ++f) e += w[f] * F.F(u.face(f), z[f], p[f]);
  if (!std::isfinite(e)) throw EvaluationError("energy: integrand is not finite");
  return e;
}

/// Values f(max(u, floor)) at cell midpoints.
inline std::vector<double> mobility_values(const MobilitySpec& m, const GridDensity& u) {
  std::vector<double> w(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) w[j] = m.f(std::max(u[j], 0.0));
  return w;
}

/// Half the squared L2 norm of the derivative of f(u), same face stencil as energy.
inline double energy_mobility(const MobilitySpec& m, const GridDensity& u) {
  const auto w = mobility_values(m, u);
  const double e = 0.5 * stencil::gradient_squared(w, u.spacing());
  if (!std::isfinite(e)) throw EvaluationError("energy_mobility: integrand is not finite");
  return e;
}

/**
 * Integral of N(x, u, phi) = F_x phi' + (F - u F_z) phi''
 *                            - F_p (2 u' phi'' + u phi''').
 *
 * The last group is the derivative of the transported slope along the flow of
 * phi', so F_p enters with a minus sign. Evaluated at the energy's faces.
 */
inline double weak_operator_N(const LagrangianSpec& F, const GridDensity& u, const TestFunction& phi) {
  const double h = u.spacing();
  const auto z = stencil::face_values(u.values());
  const auto p = stencil::face_slopes(u.values(), h);
  const auto w = stencil::face_weights(u.size(), h);
  double total = 0.0;
  for (std::size_t f = 0; f < z.size(); ++f) {
    const double x = u.face(f);
    const double d1 = phi.d1(x), d2 = phi.d2(x), d3 = phi.d3(x);
    const double fx = F.x_dependent ? F.F_x(x, z[f], p[f]) : 0.0;
    const double val = fx * d1 + (F.F(x, z[f], p[f]) - z[f] * F.F_z(x, z[f], p[f])) * d2 -
                       F.F_p(x, z[f], p[f]) * (2.0 * p[f] * d2 + z[f] * d3);
    total += w[f] * val;
  }
  if (!std::isfinite(total)) throw EvaluationError("weak_operator_N: non-finite value");
  return total;
}

/// z f'(z) with the declared limit at vacuum or the density floor otherwise.
inline double mobility_flux(const MobilitySpec& m, double z) {
  if (z < kDensityFloor && m.zf_limit.has_value()) return *m.zf_limit;
  const double zc = std::max(z, kDensityFloor);
  const double v = zc * m.f1(zc);
  if (!std::isfinite(v)) {
    throw MobilityDegeneracyError("mobility derivative is not finite near vacuum and no limit is declared");
  }
  return v;
}

/// Integral of N_f(u, phi) = (f(u))'' (f(u))' phi' + u f'(u) (f(u))'' phi''.
inline double weak_operator_Nf(const MobilitySpec& m, const GridDensity& u, const TestFunction& phi) {
  const double h = u.spacing();
  const auto w = mobility_values(m, u);
  const auto w1 = stencil::central_gradient(w, h);
  const auto w2 = stencil::second_derivative(w, h);
  double total = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double x = u.midpoint(j);
    total += w2[j] * w1[j] * phi.d1(x) + mobility_flux(m, u[j]) * w2[j] * phi.d2(x);
  }
  total *= h;
  if (!std::isfinite(total)) throw EvaluationError("weak_operator_Nf: non-finite value");
  return total;
}

// ---------------------------------------------------------------------------
// Assumption validators
// ---------------------------------------------------------------------------

/// Sampling box for the integrand validator.
struct SamplingPlan {
  double x_lo = 0.0, x_hi = 1.0;
  double z_min = 1e-6, z_max = 1e3;  ///< z sampled log-uniformly
  double p_max = 1e3;                ///< p sampled uniformly in [-p_max, p_max]
  std::size_t count = 10000;
  std::size_t directions = 8;  ///< random Hessian directions per sample
  std::uint64_t seed = 1;
};

namespace detail {

/// Deterministic low-discrepancy points in [0,1)^dim.
class QuasiRandom {
 public:
  explicit QuasiRandom(unsigned dim) : gen_(dim) {}
  double next() {
    const auto v = gen_();
    return static_cast<double>(v - gen_.min()) / (static_cast<double>(gen_.max() - gen_.min()) + 1.0);
  }

 private:
  boost::random::sobol gen_;
};

/// Accumulates the sample with the smallest normalized slack rhs - lhs.
struct WorstCase {
  double lhs = 0.0, rhs = 0.0, score = std::numeric_limits<double>::infinity();
  std::string where;
  void offer(double l, double r, double scale, const std::string& at) {
    const double s = (r - l) / scale;
    if (s < score) {
      score = s;
      lhs = l;
      rhs = r;
      where = at;
    }
  }
};

inline std::string point_label(double x, double z, double p) {
  return "x=" + std::to_string(x) + " z=" + std::to_string(z) + " p=" + std::to_string(p);
}

/**
 * Largest g with D2F - g e_p e_p^T positive semidefinite at one point.
 *
 * This is the Schur complement of the (x, z) block when that block is
 * positive definite; a slightly regularized inverse handles a singular block,
 * and an indefinite block gives minus infinity.
 */
inline double hessian_gamma(const Hessian3& H, bool with_x) {
  const double scale = 1.0 + std::abs(H[0][0]) + std::abs(H[1][1]) + std::abs(H[2][2]);
  const double eps = 1e-14 * scale;
  if (!with_x) {
    const double b = H[1][1];
    if (b < -eps) return -std::numeric_limits<double>::infinity();
    return H[2][2] - H[1][2] * H[1][2] / (std::max(b, 0.0) + eps);
  }
  const double a = H[0][0] + eps, b = H[0][1], d = H[1][1] + eps;
  const double det = a * d - b * b;
  if (a < 0.0 || d < 0.0 || det < -eps * eps) return -std::numeric_limits<double>::infinity();
  const double c0 = H[0][2], c1 = H[1][2];
  const double q = (d * c0 * c0 - 2.0 * b * c0 * c1 + a * c1 * c1) / std::max(det, eps * eps);
  return H[2][2] - q;
}

}  // namespace detail

/**
 * Samples the integrand and checks radial symmetry, the convexity bound and
 * the growth bounds. Growth bounds are only checked when constants are
 * declared; an undeclared gamma is replaced by the requirement that the
 * observed convexity modulus be positive.
 */
inline std::vector<CertificateReport> validate_assumption_A(const LagrangianSpec& F,
                                                            const SamplingPlan& plan = {}) {
  detail::QuasiRandom qr(3);
  std::mt19937_64 rng(plan.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  detail::WorstCase sym, mono, gam, lower, upper, fx, fxx, fz, fp;
  double gamma_obs = std::numeric_limits<double>::infinity();
  double dir_obs = std::numeric_limits<double>::infinity();
  double max_fpp = 0.0;
  std::string gamma_at;
  const double log_lo = std::log(plan.z_min), log_hi = std::log(plan.z_max);
  for (std::size_t k = 0; k < plan.count; ++k) {
    const double x = plan.x_lo + (plan.x_hi - plan.x_lo) * qr.next();
    const double z = std::exp(log_lo + (log_hi - log_lo) * qr.next());
    const double p = plan.p_max * (2.0 * qr.next() - 1.0);
    const std::string at = detail::point_label(x, z, p);
    const double f = F.F(x, z, p);
    const double fm = F.F(x, z, -p);
    const double scale = 1.0 + std::abs(f);
    sym.offer(std::abs(f - fm), 0.0, scale, at);
    mono.offer(-p * F.F_p(x, z, p), 0.0, scale, at);

    const Hessian3 H = F.hessian(x, z, p);
    max_fpp = std::max(max_fpp, std::abs(H[2][2]));
    const double g = detail::hessian_gamma(H, F.x_dependent);
    if (g < gamma_obs) {
      gamma_obs = g;
      gamma_at = at;
    }
    for (std::size_t r = 0; r < plan.directions; ++r) {
      std::array<double, 3> v{F.x_dependent ? normal(rng) : 0.0, normal(rng), normal(rng)};
      double q = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) q += H[a][b] * v[a] * v[b];
      dir_obs = std::min(dir_obs, q / (v[2] * v[2]));
    }

    if (F.constants_declared()) {
      const double p2 = p * p;
      const double bound = F.D * (p2 + 1.0);
      lower.offer(F.c * p2, f, 1.0 + p2, at);
      upper.offer(f, F.C * (p2 + 1.0), 1.0 + p2, at);
      fz.offer(z * std::abs(F.F_z(x, z, p)), bound, 1.0 + p2, at);
      const double fpv = F.F_p(x, z, p);
      fp.offer(fpv * fpv, bound, 1.0 + p2, at);
      if (F.x_dependent) {
        fx.offer(std::abs(F.F_x(x, z, p)), bound, 1.0 + p2, at);
        fxx.offer(H[0][0], bound, 1.0 + p2, at);
      }
    }
  }

  std::vector<CertificateReport> out;
  out.push_back(make_report("assumption_A_symmetry", -1, sym.lhs, sym.rhs,
                            1e-12 * (1.0 + std::abs(sym.lhs)), sym.where));
  out.push_back(make_report("assumption_A_monotone_radial", -1, mono.lhs, mono.rhs,
                            1e-12 * (1.0 + std::abs(mono.lhs)), mono.where));
  const double observed = std::min(gamma_obs, dir_obs);
  if (std::isfinite(F.gamma)) {
    out.push_back(make_report("assumption_A_hessian", -1, F.gamma, observed, 1e-9 * F.gamma,
                              "observed gamma at " + gamma_at));
  } else {
    // Without a declared gamma, demand a modulus that is positive relative to the Hessian scale.
    out.push_back(make_report("assumption_A_hessian", -1, 1e-9 * max_fpp, observed, 0.0,
                              "observed gamma at " + gamma_at));
  }
  if (F.constants_declared()) {
    auto tol = [](const detail::WorstCase& w) { return 1e-12 * (1.0 + std::abs(w.lhs) + std::abs(w.rhs)); };
    out.push_back(make_report("assumption_A_lower_bound", -1, lower.lhs, lower.rhs, tol(lower), lower.where));
    out.push_back(make_report("assumption_A_upper_bound", -1, upper.lhs, upper.rhs, tol(upper), upper.where));
    out.push_back(make_report("assumption_A_z_derivative", -1, fz.lhs, fz.rhs, tol(fz), fz.where));
    out.push_back(make_report("assumption_A_p_derivative", -1, fp.lhs, fp.rhs, tol(fp), fp.where));
    if (F.x_dependent) {
      out.push_back(make_report("assumption_A_x_derivative", -1, fx.lhs, fx.rhs, tol(fx), fx.where));
      out.push_back(make_report("assumption_A_x_hessian_trace", -1, fxx.lhs, fxx.rhs, tol(fxx), fxx.where));
    }
  }
  return out;
}

/// H(z) = -f''/f'^2.
inline double mobility_H(const MobilitySpec& m, double z) {
  const double a = m.f1(z);
  return -m.f2(z) / (a * a);
}

/// L(z) = -(f''' f' + 2 f''^2) / f'^5, so that dH/dz = L f'.
inline double mobility_L(const MobilitySpec& m, double z) {
  const double a = m.f1(z), b = m.f2(z), c = m.f3(z);
  return -(c * a + 2.0 * b * b) / std::pow(a, 5);
}

/// Sampling range for the mobility validator.
struct MobilitySamplingPlan {
  double z_min = 1e-8, z_max = 1e4;
  std::size_t count = 2000;
};

/**
 * Checks the structural conditions on f and the derived growth properties.
 *
 * Strict inequalities use a negative tolerance: the report passes only when
 * the slack is strictly positive.
 */
inline std::vector<CertificateReport> validate_assumption_f(const MobilitySpec& m, int d,
                                                            const MobilitySamplingPlan& plan = {}) {
  std::vector<CertificateReport> out;
  const double strict = -std::numeric_limits<double>::denorm_min();
  out.push_back(make_report("assumption_f_vanishes_at_zero", -1, std::abs(m.f(0.0)), 0.0, 1e-12));

  const double lower_a = std::max(0.0, 0.5 - 1.0 / d);
  out.push_back(make_report("assumption_f_alpha_lower", -1, lower_a, m.alpha, strict,
                            "alpha must exceed max(0, 1/2 - 1/d)"));
  out.push_back(make_report("assumption_f_alpha_upper", -1, m.alpha, 1.0, strict, "alpha must be below 1"));
  if (m.is_power) {
    out.push_back(make_report("power_alpha_window", -1, alpha_window(d), m.alpha, strict,
                              "d=" + std::to_string(d)));
  }

  double max_f2 = -std::numeric_limits<double>::infinity();
  double min_ratio = std::numeric_limits<double>::infinity();
  detail::WorstCase lowerb, growth_a;
  double c0 = 0.0, c1 = 0.0;
  std::string f2_at, ratio_at;
  const double log_lo = std::log(plan.z_min), log_hi = std::log(plan.z_max);
  for (std::size_t k = 0; k < plan.count; ++k) {
    const double z = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(k) /
                                           static_cast<double>(plan.count - 1));
    const std::string at = "z=" + std::to_string(z);
    const double f = m.f(z), a = m.f1(z), b = m.f2(z), c = m.f3(z);
    if (b > max_f2) {
      max_f2 = b;
      f2_at = at;
    }
    const double ratio = c * a / (b * b);
    if (!(ratio >= min_ratio)) {
      min_ratio = ratio;
      ratio_at = at;
    }
    const double bound = m.C_lower * std::pow(z, m.alpha - 1.0);
    lowerb.offer(bound, a, std::abs(a) + std::abs(bound), at);
    const double ga = m.C_lower / m.alpha * std::pow(z, m.alpha);
    growth_a.offer(ga, f, 1.0 + std::abs(f) + std::abs(ga), at);
    c0 = std::max(c0, f / (z + 1.0));
    c1 = std::max(c1, z * a / (f + 1.0));
  }
  out.push_back(make_report("assumption_f_concave", -1, max_f2, 0.0, strict, f2_at));
  out.push_back(make_report("assumption_f_derivative_lower", -1, lowerb.lhs, lowerb.rhs,
                            1e-12 * std::abs(lowerb.lhs), lowerb.where));

  // Existence of lim z f'(z): successive differences along z = 10^-k must contract.
  std::vector<double> q;
  for (int k = 4; k <= 16; ++k) {
    const double z = std::pow(10.0, -k);
    q.push_back(z * m.f1(z));
  }
  double worst_ratio = 0.0;
  bool finite = true;
  for (std::size_t i = 2; i < q.size(); ++i) {
    const double d_prev = std::abs(q[i - 1] - q[i - 2]);
    const double d_cur = std::abs(q[i] - q[i - 1]);
    finite = finite && std::isfinite(q[i]);
    if (d_prev > 1e-300) worst_ratio = std::max(worst_ratio, d_cur / d_prev);
  }
  if (!finite) worst_ratio = std::numeric_limits<double>::infinity();
  out.push_back(make_report("assumption_f_flux_limit", -1, worst_ratio, 1.0, -1e-3,
                            "z f'(z) at z=1e-16: " + std::to_string(q.back())));

  const double required = (std::isfinite(m.delta_bar) ? m.delta_bar : 0.0) + ratio_threshold(d);
  out.push_back(make_report("assumption_f_ratio", -1, required, min_ratio, 1e-9 * std::abs(required),
                            "min ratio at " + ratio_at));
  out.push_back(make_report("assumption_f_delta_bar_positive", -1, 0.0, m.delta_bar, strict));

  out.push_back(make_report("mobility_growth_lower", -1, growth_a.lhs, growth_a.rhs,
                            1e-10 * (1.0 + std::abs(growth_a.lhs)), growth_a.where));
  // Growth constants: extending the range a hundredfold must not double the box supremum.
  const double zf = 100.0 * plan.z_max;
  const double far0 = m.f(zf) / (zf + 1.0), far1 = zf * m.f1(zf) / (m.f(zf) + 1.0);
  out.push_back(make_report("mobility_growth_linear", -1, far0, 2.0 * c0, 0.0,
                            "C0=" + std::to_string(std::max(c0, far0))));
  out.push_back(make_report("mobility_flux_bound", -1, far1, 2.0 * c1, 0.0,
                            "C1=" + std::to_string(std::max(c1, far1))));
  return out;
}

/// Constants from the mobility dissipation estimate.
struct DissipationConstants {
  double chi = 0.0;        ///< sqrt(d / (d + 8))
  double delta = 0.0;      ///< safety-halved admissible delta
  double delta_max = 0.0;  ///< largest admissible delta in (0, 1]
};

/**
 * chi and delta for the mobility dissipation estimate.
 *
 * delta must keep delta_bar - delta * B >= 0 with
 * B = delta_bar - 1 - d/2 + sqrt(d^2 + 8d)/2; the largest such delta in (0, 1]
 * is halved.
 */
inline DissipationConstants dissipation_constants(const MobilitySpec& m, int d) {
  if (d < 1) throw DomainError("dissipation_constants: dimension must be at least 1");
  if (!(m.delta_bar > 0.0)) throw InvalidMobilityError("dissipation_constants: delta_bar must be positive");
  DissipationConstants k;
  const double dd = d;
  k.chi = std::sqrt(dd / (dd + 8.0));
  const double B = m.delta_bar - 1.0 - dd / 2.0 + 0.5 * std::sqrt(dd * dd + 8.0 * dd);
  k.delta_max = B > 0.0 ? std::min(1.0, m.delta_bar / B) : 1.0;
  k.delta = 0.5 * k.delta_max;
  return k;
}

}  // namespace wgflow
