#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <stdexcept>
#include <vector>

#include "graymol/level_scheme.hpp"
#include "graymol/params.hpp"

namespace graymol {

/// F=2 population of the analytic Lambda dark-state family,
/// P_{F=2} = 9 a^2 / (1 + 9 a^2) with a = omega / Omega.
inline double dark_state_f2_population(double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
  const double x = 9.0 * alpha * alpha;
  return x / (1.0 + x);
}

/// Internal atom-light coupling operator behind the dark-state analysis:
/// each beam's polarization components stacked as separate rows (a state is
/// position-independent dark only when every beam annihilates it), restricted
/// to the near-resonant F'=2 manifold of the Lambda scheme (the far-detuned
/// F'=0,1,3 manifolds only perturb the family). Rows are the 5 sublevels of
/// F'=2 per beam, columns the 8 ground sublevels; entries carry the Rabi
/// weights Omega/2 or omega/2 in Gamma units.
inline Eigen::MatrixXd lambda_coupling_operator(const LaserParams& lasers) {
  lasers.validate();
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(10, n_ground);
  int row0 = 0;
  for (int beam : {+1, -1}) {
    for (int q = -1; q <= 1; ++q) {
      const double amp = lasers.pol.amp(beam, q);
      if (amp == 0.0) continue;
      for (int mp = -2; mp <= 2; ++mp) {
        const int e = level_index(2, mp, true);
        for (int g = 0; g < n_ground; ++g) {
          const double rabi = is_f2_ground(g) ? lasers.Omega : lasers.omega;
          v(row0 + mp + 2, g) += 0.5 * rabi * amp * dipole_coefficient(g, e, q);
        }
      }
    }
    row0 += 5;
  }
  return v;
}

/// Orthonormal basis of the null space of lambda_coupling_operator, returned
/// as 24-component internal vectors (excited components zero). Empty when the
/// null space is trivial. Basis vectors are deterministic: SVD order with the
/// largest-magnitude component made positive.
inline std::vector<Eigen::VectorXd> dark_states(const LaserParams& lasers) {
  if (lasers.Omega <= 0.0 && lasers.omega <= 0.0)
    throw std::invalid_argument("dark_states: need Omega > 0 or omega > 0");
  const Eigen::MatrixXd v = lambda_coupling_operator(lasers);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-12 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  std::vector<Eigen::VectorXd> basis;
  for (int i = 0; i < svd.matrixV().cols(); ++i) {
    if (i < sv.size() && sv(i) > tol) continue;
    Eigen::VectorXd ground = svd.matrixV().col(i);
    int imax = 0;
    ground.cwiseAbs().maxCoeff(&imax);
    if (ground(imax) < 0.0) ground = -ground;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(n_levels);
    full.head(n_ground) = ground;
    basis.push_back(std::move(full));
  }
  return basis;
}

/// The printed analytic member of the dark-state family for alpha > 0,
/// normalized, as a 24-component internal vector.
inline Eigen::VectorXd analytic_dark_state(double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("alpha must be > 0");
  const double a_norm = std::sqrt(6.0 + 2.0 / (3.0 * alpha * alpha));
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n_levels);
  v[level_index(2, 0, false)] = 1.0;
  v[level_index(2, 1, false)] = -1.0;
  v[level_index(2, -1, false)] = -1.0;
  v[level_index(2, 2, false)] = std::sqrt(1.5);
  v[level_index(2, -2, false)] = std::sqrt(1.5);
  v[level_index(1, 1, false)] = -1.0 / (std::sqrt(3.0) * alpha);
  v[level_index(1, -1, false)] = +1.0 / (std::sqrt(3.0) * alpha);
  return v / a_norm;
}

/// Residual |V psi| / |psi| of an internal vector under the dark-state
/// coupling operator.
inline double coupling_residual(const LaserParams& lasers,
                                const Eigen::VectorXd& internal24) {
  const Eigen::MatrixXd v = lambda_coupling_operator(lasers);
  const Eigen::VectorXd ground = internal24.head(n_ground);
  return (v * ground).norm() / internal24.norm();
}

/// F=2 weight of an internal vector.
inline double f2_weight(const Eigen::VectorXd& internal24) {
  double w = 0.0, total = 0.0;
  for (int i = 0; i < n_levels; ++i) {
    const double p = internal24[i] * internal24[i];
    total += p;
    if (is_f2_ground(i)) w += p;
  }
  return w / total;
}

}  // namespace graymol
