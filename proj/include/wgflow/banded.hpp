#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <lapacke.h>

#include "wgflow/errors.hpp"

namespace wgflow {

/**
 * Symmetric banded matrix in LAPACK lower band storage, with Cholesky
 * factorization and solves delegated to LAPACK (dpbtrf / dpbtrs).
 */
class BandedSymmetric {
 public:
  BandedSymmetric(std::size_t n, std::size_t bandwidth)
      : n_(n), kd_(bandwidth), ab_((bandwidth + 1) * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t bandwidth() const noexcept { return kd_; }

  /// Adds v to entry (i, j) and, implicitly, to (j, i).
  void add(std::size_t i, std::size_t j, double v) {
    if (i < j) std::swap(i, j);
    if (i - j > kd_) throw PreconditionError("BandedSymmetric: entry outside the band");
    ab_[(i - j) + j * (kd_ + 1)] += v;
  }

  double get(std::size_t i, std::size_t j) const {
    if (i < j) std::swap(i, j);
    if (i - j > kd_) return 0.0;
    return ab_[(i - j) + j * (kd_ + 1)];
  }

  void add_to_diagonal(double shift) {
    for (std::size_t j = 0; j < n_; ++j) ab_[j * (kd_ + 1)] += shift;
  }

  /// y = A x.
  std::vector<double> multiply(std::span<const double> x) const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      y[j] += ab_[j * (kd_ + 1)] * x[j];
      for (std::size_t k = 1; k <= kd_ && j + k < n_; ++k) {
        const double a = ab_[k + j * (kd_ + 1)];
        y[j + k] += a * x[j];
        y[j] += a * x[j + k];
      }
    }
    return y;
  }

  /// In-place Cholesky factorization; returns false if the matrix is not positive definite.
  bool factor() {
    const lapack_int info = LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(n_),
                                           static_cast<lapack_int>(kd_), ab_.data(),
                                           static_cast<lapack_int>(kd_ + 1));
    factored_ = info == 0;
    return factored_;
  }

  /// Solves A x = b after a successful factor().
  std::vector<double> solve(std::span<const double> b) const {
    if (!factored_) throw PreconditionError("BandedSymmetric: solve before successful factorization");
    std::vector<double> x(b.begin(), b.end());
    const lapack_int info = LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(n_),
                                           static_cast<lapack_int>(kd_), 1, ab_.data(),
                                           static_cast<lapack_int>(kd_ + 1), x.data(),
                                           static_cast<lapack_int>(n_));
    if (info != 0) throw EvaluationError("BandedSymmetric: triangular solve failed");
    return x;
  }

 private:
  std::size_t n_;
  std::size_t kd_;
  std::vector<double> ab_;
  bool factored_ = false;
};

}  // namespace wgflow
