#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

#include "graymol/hamiltonian.hpp"

namespace graymol {

/// Trajectory wave function over (internal level x momentum point).
struct StateVector {
  Eigen::VectorXcd amplitudes;
  double norm_sq = 0.0;

  static StateVector pure(const HamiltonianModel& m, int level, int ip) {
    StateVector s;
    s.amplitudes = Eigen::VectorXcd::Zero(m.dim);
    s.amplitudes[m.state_index(level, ip)] = 1.0;
    s.norm_sq = 1.0;
    return s;
  }

  void renormalize() {
    const double n2 = amplitudes.squaredNorm();
    if (!(n2 > 0.0) || !std::isfinite(n2))
      throw std::runtime_error("state norm degenerate or non-finite");
    amplitudes /= std::sqrt(n2);
    norm_sq = 1.0;
  }
};

inline double excited_population(const HamiltonianModel& m,
                                 const Eigen::VectorXcd& psi) {
  double pop = 0.0;
  for (int l = 0; l < m.n_lev; ++l) {
    if (!m.level_is_excited[std::size_t(l)]) continue;
    for (int ip = 0; ip < m.n_p; ++ip)
      pop += std::norm(psi[m.state_index(l, ip)]);
  }
  return pop;
}

inline double level_population(const HamiltonianModel& m,
                               const Eigen::VectorXcd& psi, int level) {
  double pop = 0.0;
  for (int ip = 0; ip < m.n_p; ++ip)
    pop += std::norm(psi[m.state_index(level, ip)]);
  return pop;
}

/// Population of the F=2 ground manifold (all momenta).
inline double f2_population(const HamiltonianModel& m,
                            const Eigen::VectorXcd& psi) {
  double pop = 0.0;
  for (int l = 0; l < m.n_lev; ++l) {
    if (!m.level_is_f2[std::size_t(l)]) continue;
    pop += level_population(m, psi, l);
  }
  return pop;
}

/// First and second moments of momentum in absolute hbar*k units.
inline void momentum_moments(const HamiltonianModel& m,
                             const Eigen::VectorXcd& psi, double& mean_p,
                             double& mean_p2) {
  mean_p = 0.0;
  mean_p2 = 0.0;
  for (int ip = 0; ip < m.n_p; ++ip) {
    double w = 0.0;
    for (int l = 0; l < m.n_lev; ++l) w += std::norm(psi[m.state_index(l, ip)]);
    const double p = m.momentum_abs(ip);
    mean_p += w * p;
    mean_p2 += w * p * p;
  }
}

/// Probability per momentum grid point, summed over internal levels.
inline Eigen::VectorXd momentum_histogram(const HamiltonianModel& m,
                                          const Eigen::VectorXcd& psi) {
  Eigen::VectorXd h = Eigen::VectorXd::Zero(m.n_p);
  for (int l = 0; l < m.n_lev; ++l)
    for (int ip = 0; ip < m.n_p; ++ip)
      h[ip] += std::norm(psi[m.state_index(l, ip)]);
  return h;
}

/// Population within two grid points of either momentum bound.
inline double edge_population(const HamiltonianModel& m,
                              const Eigen::VectorXcd& psi) {
  if (m.n_p < 6) return 0.0;
  double pop = 0.0;
  for (int l = 0; l < m.n_lev; ++l)
    for (int ip : {0, 1, 2, m.n_p - 3, m.n_p - 2, m.n_p - 1})
      pop += std::norm(psi[m.state_index(l, ip)]);
  return pop;
}

}  // namespace graymol
