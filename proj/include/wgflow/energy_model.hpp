#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "wgflow/errors.hpp"
#include "wgflow/grid.hpp"
#include "wgflow/lagrangian.hpp"
#include "wgflow/stencil.hpp"

namespace wgflow {

/// Energy selector: a general integrand or a mobility.
using EnergyKind = std::variant<LagrangianSpec, MobilitySpec>;

inline double evaluate_energy(const EnergyKind& kind, const GridDensity& u) {
  return std::visit(
      [&](const auto& spec) {
        if constexpr (std::is_same_v<std::decay_t<decltype(spec)>, LagrangianSpec>) {
          return energy(spec, u);
        } else {
          return energy_mobility(spec, u);
        }
      },
      kind);
}

/// Symmetric tridiagonal matrix: diag has M entries, off has M-1.
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;
};

/**
 * Energy as a function of the cell values on a fixed grid, with gradient and
 * tridiagonal Hessian. Used by the inner minimization of the time step.
 */
class DiscreteEnergy {
 public:
  DiscreteEnergy(Interval domain, std::size_t cells)
      : domain_(domain), m_(cells), h_(domain.length() / static_cast<double>(cells)) {}
  virtual ~DiscreteEnergy() = default;

  virtual double value(std::span<const double> u) const = 0;
  /// Writes dE/du_j into g and returns the energy.
  virtual double gradient(std::span<const double> u, std::span<double> g) const = 0;
  virtual Tridiagonal hessian(std::span<const double> u) const = 0;

  const Interval& domain() const noexcept { return domain_; }
  std::size_t cells() const noexcept { return m_; }
  double spacing() const noexcept { return h_; }

 protected:
  double face(std::size_t f) const { return domain_.lo() + static_cast<double>(f) * h_; }

  Interval domain_;
  std::size_t m_;
  double h_;
};

/// Face-stencil energy of a general integrand F.
class LagrangianEnergy final : public DiscreteEnergy {
 public:
  LagrangianEnergy(LagrangianSpec spec, Interval domain, std::size_t cells)
      : DiscreteEnergy(domain, cells), spec_(std::move(spec)) {}

  double value(std::span<const double> u) const override {
    const auto z = stencil::face_values(u);
    const auto p = stencil::face_slopes(u, h_);
    double e = 0.5 * h_ * (spec_.F(face(0), z[0], 0.0) + spec_.F(face(m_), z[m_], 0.0));
    for (std::size_t f = 1; f < m_; ++f) e += h_ * spec_.F(face(f), z[f], p[f]);
    return e;
  }

  double gradient(std::span<const double> u, std::span<double> g) const override {
    std::fill(g.begin(), g.end(), 0.0);
    const auto z = stencil::face_values(u);
    const auto p = stencil::face_slopes(u, h_);
    double e = 0.5 * h_ * (spec_.F(face(0), z[0], 0.0) + spec_.F(face(m_), z[m_], 0.0));
    g[0] += 0.5 * h_ * spec_.F_z(face(0), z[0], 0.0);
    g[m_ - 1] += 0.5 * h_ * spec_.F_z(face(m_), z[m_], 0.0);
    for (std::size_t f = 1; f < m_; ++f) {
      const double x = face(f);
      e += h_ * spec_.F(x, z[f], p[f]);
      const double fz = spec_.F_z(x, z[f], p[f]);
      const double fp = spec_.F_p(x, z[f], p[f]);
      g[f - 1] += h_ * (0.5 * fz) - fp;
      g[f] += h_ * (0.5 * fz) + fp;
    }
    return e;
  }

  Tridiagonal hessian(std::span<const double> u) const override {
    Tridiagonal t{std::vector<double>(m_, 0.0), std::vector<double>(m_ - 1, 0.0)};
    const auto z = stencil::face_values(u);
    const auto p = stencil::face_slopes(u, h_);
    t.diag[0] += 0.5 * h_ * spec_.hessian(face(0), z[0], 0.0)[1][1];
    t.diag[m_ - 1] += 0.5 * h_ * spec_.hessian(face(m_), z[m_], 0.0)[1][1];
    for (std::size_t f = 1; f < m_; ++f) {
      const Hessian3 H = spec_.hessian(face(f), z[f], p[f]);
      const double zz = H[1][1], zp = H[1][2], pp = H[2][2];
      // Local map (u_{f-1}, u_f) -> (z, p) has columns (1/2, -1/h) and (1/2, 1/h).
      const double a = 0.25 * h_ * zz;
      const double c = pp / h_;
      t.diag[f - 1] += a - zp + c;
      t.diag[f] += a + zp + c;
      t.off[f - 1] += a - c;
    }
    return t;
  }

 private:
  LagrangianSpec spec_;
};

/// Half the squared gradient of f(u) on the face stencil.
class MobilityEnergy final : public DiscreteEnergy {
 public:
  MobilityEnergy(MobilitySpec spec, Interval domain, std::size_t cells)
      : DiscreteEnergy(domain, cells), spec_(std::move(spec)) {}

  double value(std::span<const double> u) const override {
    std::vector<double> w(m_);
    for (std::size_t j = 0; j < m_; ++j) w[j] = spec_.f(std::max(u[j], 0.0));
    return 0.5 * stencil::gradient_squared(w, h_);
  }

  double gradient(std::span<const double> u, std::span<double> g) const override {
    std::vector<double> w(m_), gw(m_);
    const double e = values_and_wgrad(u, w, gw);
    for (std::size_t j = 0; j < m_; ++j) g[j] = spec_.f1(clip(u[j])) * gw[j];
    return e;
  }

  Tridiagonal hessian(std::span<const double> u) const override {
    std::vector<double> w(m_), gw(m_);
    values_and_wgrad(u, w, gw);
    Tridiagonal t{std::vector<double>(m_), std::vector<double>(m_ - 1)};
    for (std::size_t j = 0; j < m_; ++j) {
      const double z = clip(u[j]);
      const double a = spec_.f1(z);
      const double neighbours = (j > 0 ? 1.0 : 0.0) + (j + 1 < m_ ? 1.0 : 0.0);
      t.diag[j] = a * a * neighbours / h_ + spec_.f2(z) * gw[j];
      if (j + 1 < m_) t.off[j] = -a * spec_.f1(clip(u[j + 1])) / h_;
    }
    return t;
  }

 private:
  static double clip(double z) { return std::max(z, kDensityFloor); }

  /// Fills w = f(u) and dE/dw, returns the energy.
  double values_and_wgrad(std::span<const double> u, std::vector<double>& w,
                          std::vector<double>& gw) const {
    for (std::size_t j = 0; j < m_; ++j) w[j] = spec_.f(std::max(u[j], 0.0));
    double e = 0.0;
    std::fill(gw.begin(), gw.end(), 0.0);
    for (std::size_t f = 1; f < m_; ++f) {
      const double d = w[f] - w[f - 1];
      e += d * d;
      gw[f] += d / h_;
      gw[f - 1] -= d / h_;
    }
    return 0.5 * e / h_;
  }

  MobilitySpec spec_;
};

inline std::unique_ptr<DiscreteEnergy> make_discrete_energy(const EnergyKind& kind, Interval domain,
                                                            std::size_t cells) {
  if (const auto* l = std::get_if<LagrangianSpec>(&kind)) {
    return std::make_unique<LagrangianEnergy>(*l, domain, cells);
  }
  return std::make_unique<MobilityEnergy>(std::get<MobilitySpec>(kind), domain, cells);
}

}  // namespace wgflow
