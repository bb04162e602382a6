#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

namespace graymol {

struct PropagatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Short-iterative Arnoldi approximation of w = exp(scale * A) v for a sparse
/// (generally non-Hermitian) operator A. The basis grows until the standard
/// a-posteriori error estimate drops below tol * |v|, up to max_basis vectors;
/// failure to converge aborts the step with a diagnostic. All workspace is
/// reused across calls, so steady-state stepping is allocation-free.
class KrylovPropagator {
 public:
  explicit KrylovPropagator(int dim, int max_basis = 20, double tol = 1e-10)
      : dim_(dim), max_basis_(max_basis), tol_(tol) {
    if (max_basis_ < 1 || max_basis_ > 64)
      throw std::invalid_argument("Krylov basis size must be in [1, 64]");
    basis_.resize(std::size_t(max_basis_) + 1, Eigen::VectorXcd::Zero(dim_));
    hess_ = Eigen::MatrixXcd::Zero(max_basis_ + 1, max_basis_);
    col_.resize(max_basis_);
    col_tmp_.resize(max_basis_);
  }

  int last_basis_size() const { return last_m_; }

  /// Applies exp(scale*A). Op must provide apply(const complex*, complex*)
  /// computing y = A x on vectors of length dim.
  template <typename Op>
  void apply(const Op& op, std::complex<double> scale,
             const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
    const double beta = v.norm();
    if (beta == 0.0) {
      out.setZero(dim_);
      return;
    }
    hess_.setZero();
    basis_[0] = v / beta;
    double err = std::numeric_limits<double>::infinity();
    int m = 0;
    while (m < max_basis_) {
      op.apply(basis_[std::size_t(m)].data(),
               basis_[std::size_t(m) + 1].data());
      Eigen::VectorXcd& w = basis_[std::size_t(m) + 1];
      const double norm_in = w.norm();
      for (int j = 0; j <= m; ++j) {
        const std::complex<double> h = basis_[std::size_t(j)].dot(w);
        hess_(j, m) = h;
        w -= h * basis_[std::size_t(j)];
      }
      double hnext = w.norm();
      if (hnext < 0.7 * norm_in) {  // DGKS reorthogonalization pass
        for (int j = 0; j <= m; ++j) {
          const std::complex<double> h = basis_[std::size_t(j)].dot(w);
          hess_(j, m) += h;
          w -= h * basis_[std::size_t(j)];
        }
        hnext = w.norm();
      }
      hess_(m + 1, m) = hnext;
      ++m;
      if (hnext < 1e-14 * beta) {
        err = 0.0;  // invariant subspace: exact in the current basis
        break;
      }
      w /= hnext;
      exp_column(scale, m);
      err = beta * hnext * std::abs(col_[std::size_t(m) - 1]);
      if (err < tol_ * beta) break;
    }
    if (err >= tol_ * beta)
      throw PropagatorError("Krylov propagator failed to converge: residual " +
                            std::to_string(err / beta) + " after basis size " +
                            std::to_string(m));
    exp_column(scale, m);
    out = (beta * col_[0]) * basis_[0];
    for (int j = 1; j < m; ++j) out += (beta * col_[std::size_t(j)]) * basis_[std::size_t(j)];
    last_m_ = m;
  }

 private:
  /// col_ = first column of exp(scale * H_m). The scaled Hessenberg norm is
  /// O(1) for sensible time steps, so a plain Taylor sum on the first unit
  /// vector converges in a few tens of terms; larger norms fall back to the
  /// dense matrix exponential.
  void exp_column(std::complex<double> scale, int m) {
    double norm1 = 0.0;  // max column sum of |scale*H_m|
    for (int c = 0; c < m; ++c) {
      double s = 0.0;
      for (int r = 0; r <= std::min(c + 1, m - 1); ++r)
        s += std::abs(hess_(r, c));
      norm1 = std::max(norm1, std::abs(scale) * s);
    }
    if (norm1 > 2.0) {
      Eigen::MatrixXcd hm = scale * hess_.topLeftCorner(m, m);
      Eigen::MatrixXcd e = hm.exp();
      for (int j = 0; j < m; ++j) col_[std::size_t(j)] = e(j, 0);
      return;
    }
    for (int j = 0; j < m; ++j) {
      col_[std::size_t(j)] = (j == 0) ? 1.0 : 0.0;
      col_tmp_[std::size_t(j)] = col_[std::size_t(j)];
    }
    double term_bound = 1.0;
    for (int k = 1; k <= 60; ++k) {
      // col_tmp <- (scale/k) * H_m * col_tmp ; exploit Hessenberg structure
      for (int r = 0; r < m; ++r) {
        std::complex<double> acc{0.0, 0.0};
        for (int c = std::max(0, r - 1); c < m; ++c)
          acc += hess_(r, c) * col_tmp_[std::size_t(c)];
        scratch_[std::size_t(r)] = acc * (scale / double(k));
      }
      for (int j = 0; j < m; ++j) {
        col_tmp_[std::size_t(j)] = scratch_[std::size_t(j)];
        col_[std::size_t(j)] += scratch_[std::size_t(j)];
      }
      term_bound *= norm1 / double(k);
      if (term_bound < 1e-18) break;
    }
  }

  int dim_;
  int max_basis_;
  double tol_;
  int last_m_ = 0;
  std::vector<Eigen::VectorXcd> basis_;
  Eigen::MatrixXcd hess_;
  std::vector<std::complex<double>> col_, col_tmp_;
  std::array<std::complex<double>, 64> scratch_{};
};

}  // namespace graymol
