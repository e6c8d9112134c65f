#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "wgflow/grid.hpp"
#include "wgflow/transport.hpp"

namespace wgflow {

/**
 * Squared W2 distance to a fixed reference density, as a function of the face
 * CDF values C_1..C_{M-1} of a candidate density on the same grid.
 *
 * On cell j the candidate quantile is x_j + h theta for s = C_j + m_j theta,
 * m_j = C_{j+1} - C_j, and the reference quantile is piecewise linear in s.
 * All integrals over theta are polynomial of degree at most two on each
 * piece between reference breakpoints and are evaluated exactly by Simpson's
 * rule. The distance is twice continuously differentiable in C and its
 * Hessian is tridiagonal.
 */
class QuantileDistance {
 public:
  explicit QuantileDistance(const GridDensity& reference)
      : lo_(reference.domain().lo()), h_(reference.spacing()), m_(reference.size()),
        d_(detail::face_cdf(reference)) {}

  /// Face CDF of the reference; the distance vanishes exactly at these values.
  const std::vector<double>& reference_cdf() const noexcept { return d_; }

  /// Per-cell integrals needed by value, gradient and Hessian.
  struct CellTerms {
    double e2 = 0.0;    ///< integral of e^2
    double el = 0.0;    ///< integral of e (theta - 1)
    double er = 0.0;    ///< integral of e theta
    double q11 = 0.0;   ///< integral of q (1 - theta)^2
    double q22 = 0.0;   ///< integral of q theta^2
    double q12 = 0.0;   ///< integral of q theta (1 - theta)
  };

  /// c holds all M+1 face values with c[0] = 0 and c[M] = 1.
  std::vector<CellTerms> terms(std::span<const double> c) const {
    std::vector<CellTerms> out(m_);
    std::size_t k = 0;
    for (std::size_t j = 0; j < m_; ++j) {
      const double cj = c[j], end = c[j + 1], mj = end - cj;
      if (!(mj > 0.0)) continue;
      const double xj = lo_ + static_cast<double>(j) * h_;
      CellTerms& t = out[j];
      double s = cj;
      while (k + 1 < m_ && d_[k + 1] <= s) ++k;
      while (s < end) {
        const double s_end = k + 1 == m_ ? end : std::min(end, d_[k + 1]);
        const double width = d_[k + 1] - d_[k];
        if (s_end > s && width > 0.0) {
          const double ta = (s - cj) / mj, tb = (s_end - cj) / mj;
          const double q = h_ / width;
          const double xk = lo_ + static_cast<double>(k) * h_;
          auto e = [&](double th) { return xj + h_ * th - (xk + q * (cj + mj * th - d_[k])); };
          const double tm = 0.5 * (ta + tb), len = tb - ta;
          const double ea = e(ta), em = e(tm), eb = e(tb);
          auto simpson = [len](double fa, double fm, double fb) { return len / 6.0 * (fa + 4.0 * fm + fb); };
          t.e2 += simpson(ea * ea, em * em, eb * eb);
          t.el += simpson(ea * (ta - 1.0), em * (tm - 1.0), eb * (tb - 1.0));
          t.er += simpson(ea * ta, em * tm, eb * tb);
          t.q11 += q * simpson((1 - ta) * (1 - ta), (1 - tm) * (1 - tm), (1 - tb) * (1 - tb));
          t.q22 += q * simpson(ta * ta, tm * tm, tb * tb);
          t.q12 += q * simpson(ta * (1 - ta), tm * (1 - tm), tb * (1 - tb));
        }
        s = s_end;
        while (s < end && k + 1 < m_ && d_[k + 1] <= s) ++k;
      }
    }
    return out;
  }

  double value(std::span<const double> c) const {
    const auto t = terms(c);
    double w = 0.0;
    for (std::size_t j = 0; j < m_; ++j) w += (c[j + 1] - c[j]) * t[j].e2;
    return w;
  }

  /// Gradient with respect to the interior faces 1..M-1, written to g[f-1].
  void gradient(const std::vector<CellTerms>& t, std::span<double> g) const {
    for (std::size_t f = 1; f < m_; ++f) g[f - 1] = -2.0 * h_ * t[f - 1].er + 2.0 * h_ * t[f].el;
  }

  /// Tridiagonal Hessian over the interior faces.
  void hessian(const std::vector<CellTerms>& t, std::span<double> diag, std::span<double> off) const {
    for (std::size_t f = 1; f < m_; ++f) {
      diag[f - 1] = 2.0 * h_ * (t[f - 1].q22 + t[f].q11);
      if (f + 1 < m_) off[f - 1] = 2.0 * h_ * t[f].q12;
    }
  }

 private:
  double lo_;
  double h_;
  std::size_t m_;
  std::vector<double> d_;
};

}  // namespace wgflow
