#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

namespace graymol {

/// Result of a damped least-squares fit.
struct FitResult {
  Eigen::VectorXd params;
  Eigen::VectorXd uncertainties;  ///< sqrt of covariance diagonal
  Eigen::MatrixXd covariance;
  double residual_norm = 0.0;     ///< sqrt(sum of squared residuals)
  double cost = 0.0;              ///< 0.5 * sum of squared residuals
  int iterations = 0;
  bool converged = false;
};

/// Levenberg-Marquardt minimization of |r(p)|^2 with analytic Jacobian.
/// residual(p, r) fills r (length m); jacobian(p, J) fills J (m x n).
/// Converges when the relative cost change drops below rel_tol, up to
/// max_iter iterations; non-convergence is reported, not thrown.
inline FitResult levenberg_marquardt(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& residual,
    const std::function<void(const Eigen::VectorXd&, Eigen::MatrixXd&)>& jacobian,
    Eigen::VectorXd p0, int m_residuals, double rel_tol = 1e-10,
    int max_iter = 200) {
  const int n = int(p0.size());
  Eigen::VectorXd r(m_residuals);
  Eigen::MatrixXd jac(m_residuals, n);

  residual(p0, r);
  double cost = 0.5 * r.squaredNorm();
  double lambda = 1e-3;
  FitResult out;
  out.params = p0;

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    jacobian(p0, jac);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    bool stepped = false;
    for (int tries = 0; tries < 25; ++tries) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd step = a.ldlt().solve(-jtr);
      const Eigen::VectorXd p_new = p0 + step;
      Eigen::VectorXd r_new(m_residuals);
      residual(p_new, r_new);
      const double cost_new = 0.5 * r_new.squaredNorm();
      if (cost_new < cost) {
        const double rel_change = (cost - cost_new) / std::max(cost, 1e-300);
        p0 = p_new;
        r = r_new;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (rel_change < rel_tol) {
          out.converged = true;
          cost = cost_new;
        }
        cost = cost_new;
        break;
      }
      lambda *= 2.0;
    }
    if (out.converged || !stepped) {
      if (!stepped) out.converged = true;  // no downhill direction left
      break;
    }
  }

  out.params = p0;
  out.cost = cost;
  out.residual_norm = std::sqrt(2.0 * cost);
  out.iterations = iter + 1;

  jacobian(p0, jac);
  const int dof = std::max(1, m_residuals - n);
  const double s2 = 2.0 * cost / dof;
  Eigen::MatrixXd jtj = jac.transpose() * jac;
  jtj.diagonal() += Eigen::VectorXd::Constant(n, 1e-300);
  out.covariance = s2 * jtj.inverse();
  out.uncertainties = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  return out;
}

}  // namespace graymol
