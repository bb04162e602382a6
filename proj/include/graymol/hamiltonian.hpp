#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <stdexcept>
#include <vector>

#include "graymol/constants.hpp"
#include "graymol/csr.hpp"
#include "graymol/level_scheme.hpp"
#include "graymol/params.hpp"

namespace graymol {

/// One spontaneous-emission channel |g><e| with the polarization of the
/// emitted photon; amplitude is sqrt(Gamma) * c_{g,e,q} (rad/s units).
struct JumpChannel {
  int g_level;
  int e_level;
  int q;
  double amplitude;
};

/// Sparse operators for one parameter set on the (levels x momentum grid)
/// Hilbert space, in rad/s. Immutable after construction; shared across
/// trajectory workers.
///
/// The Hermitian part is split as  H = diag + C + (e^{i phi} W_up + h.c.)
/// where C holds the coupling-laser (Omega) matrix elements and W the
/// Raman-laser (omega) ones, so that Raman phase noise is a cheap phase
/// rotation instead of a matrix rebuild. The non-Hermitian correction is
/// -i/2 * decay_diag.
struct HamiltonianModel {
  int n_lev = 0;
  int n_p = 1;
  int dim = 0;
  int kick_points = 0;
  bool recoil_enabled = false;
  double k_eff = 1.0;
  double b_z = 0.0;
  LaserParams lasers{};
  SimGrid grid{};

  Eigen::VectorXd diag;        // Hermitian diagonal, rad/s
  Eigen::VectorXd decay_diag;  // Gamma on excited states, 0 elsewhere
  Csr coupling;                // Omega block, both (g<-e and e<-g) directions
  Csr raman_up;                // omega block, |e,p+ak><g,p| direction
  Csr raman_dn;                // adjoint of raman_up
  std::vector<JumpChannel> jumps;

  std::vector<std::uint8_t> level_is_excited;
  std::vector<std::uint8_t> level_is_f2;

  int state_index(int level, int ip) const { return level * n_p + ip; }

  /// Momentum of grid point ip in absolute hbar*k units.
  double momentum_abs(int ip) const { return grid.momentum(ip) * k_eff; }

  /// y = H_nh x with the Raman couplings rotated by exp(i*phase).
  void apply_nh(std::complex<double> raman_phase, const std::complex<double>* x,
                std::complex<double>* y) const {
    const std::complex<double> half_i(0.0, -0.5);
    for (int i = 0; i < dim; ++i)
      y[i] = (diag[i] + half_i * decay_diag[i]) * x[i];
    coupling.accumulate({1.0, 0.0}, x, y);
    if (raman_up.nnz() > 0) {
      raman_up.accumulate(raman_phase, x, y);
      raman_dn.accumulate(std::conj(raman_phase), x, y);
    }
  }

  /// Hermitian H as a dense complex matrix (test/diagnostic use only).
  Eigen::MatrixXcd assemble_dense(std::complex<double> raman_phase = {1.0,
                                                                      0.0}) const {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) h(i, i) = diag[i];
    coupling.for_each([&](int r, int c, double v) { h(r, c) += v; });
    raman_up.for_each(
        [&](int r, int c, double v) { h(r, c) += raman_phase * v; });
    raman_dn.for_each(
        [&](int r, int c, double v) { h(r, c) += std::conj(raman_phase) * v; });
    return h;
  }

  /// Sum_j L_j^dagger L_j as a diagonal (it is diagonal by construction).
  Eigen::VectorXd jump_completeness_diag() const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
    for (const auto& j : jumps)
      for (int ip = 0; ip < n_p; ++ip)
        d[state_index(j.e_level, ip)] += j.amplitude * j.amplitude;
    return d;
  }
};

/// Builds the full 24-level x momentum-grid model of the paper's Hamiltonian:
/// two counter-propagating beams each carrying both frequencies, excited
/// hyperfine + one-photon detuning on the diagonal, the +delta shift on the
/// F=2 ground manifold, kinetic energy and Zeeman terms, and the spontaneous
/// jump family. All rates in rad/s.
inline HamiltonianModel build_hamiltonian(const LevelScheme& scheme,
                                          const LaserParams& lasers,
                                          const SimGrid& grid, double b_z) {
  lasers.validate();
  grid.validate();
  if (grid.p_max < 1.0)
    throw std::invalid_argument(
        "grid too small to hold a laser kick (p_max < 1)");
  if (std::abs(b_z) > 1e-3)
    throw std::invalid_argument("|B_z| must be <= 1e-3 T");

  HamiltonianModel m;
  m.n_lev = n_levels;
  m.n_p = grid.n_p();
  m.dim = m.n_lev * m.n_p;
  m.kick_points = grid.points_per_kick();
  m.recoil_enabled = true;
  m.k_eff = lasers.k_eff;
  m.b_z = b_z;
  m.lasers = lasers;
  m.grid = grid;

  const double g = constants::gamma;
  const double delta_big = lasers.Delta * g;
  const double delta_raman = lasers.delta * g * lasers.delta_sign;
  const double omega_big = lasers.Omega * g;
  const double omega_small = lasers.omega * g;

  m.diag.resize(m.dim);
  m.decay_diag = Eigen::VectorXd::Zero(m.dim);
  m.level_is_excited.resize(std::size_t(m.n_lev));
  m.level_is_f2.resize(std::size_t(m.n_lev));

  for (int l = 0; l < m.n_lev; ++l) {
    const Level& lv = levels()[std::size_t(l)];
    m.level_is_excited[std::size_t(l)] = lv.excited ? 1 : 0;
    m.level_is_f2[std::size_t(l)] = (!lv.excited && lv.f == 2) ? 1 : 0;
    double internal = 0.0;
    if (lv.excited)
      internal = -delta_big + scheme.energy(l);
    else if (lv.f == 2)
      internal = delta_raman;
    internal += scheme.lande_g(l) * lv.m * constants::zeeman_rate_per_tesla * b_z;
    for (int ip = 0; ip < m.n_p; ++ip) {
      const double p_abs = grid.momentum(ip) * lasers.k_eff;
      m.diag[m.state_index(l, ip)] =
          internal + p_abs * p_abs * constants::omega_recoil;
      if (lv.excited) m.decay_diag[m.state_index(l, ip)] = g;
    }
  }

  std::vector<Csr::Triplet> coupling_t, raman_up_t, raman_dn_t;
  for (int beam : {+1, -1}) {
    const int kick = beam * m.kick_points;
    for (int q = -1; q <= 1; ++q) {
      const double pol_amp = lasers.pol.amp(beam, q);
      if (pol_amp == 0.0) continue;
      for (int gi = 0; gi < n_ground; ++gi) {
        const Level& glv = levels()[std::size_t(gi)];
        const double rabi = (glv.f == 2) ? omega_big : omega_small;
        if (rabi == 0.0) continue;
        for (int el = n_ground; el < n_levels; ++el) {
          const double c = dipole_coefficient(gi, el, q);
          if (c == 0.0) continue;
          const double v = 0.5 * rabi * pol_amp * c;
          for (int ip = 0; ip < m.n_p; ++ip) {
            const int ipe = ip + kick;
            if (ipe < 0 || ipe >= m.n_p) continue;
            const int gs = m.state_index(gi, ip);
            const int es = m.state_index(el, ipe);
            if (glv.f == 2) {
              coupling_t.push_back({es, gs, v});
              coupling_t.push_back({gs, es, v});
            } else {
              raman_up_t.push_back({es, gs, v});
              raman_dn_t.push_back({gs, es, v});
            }
          }
        }
      }
    }
  }
  m.coupling = Csr::from_triplets(m.dim, m.dim, std::move(coupling_t));
  m.raman_up = Csr::from_triplets(m.dim, m.dim, std::move(raman_up_t));
  m.raman_dn = Csr::from_triplets(m.dim, m.dim, std::move(raman_dn_t));

  const double sqrt_g = std::sqrt(g);
  for (int el = n_ground; el < n_levels; ++el)
    for (int gi = 0; gi < n_ground; ++gi)
      for (int q = -1; q <= 1; ++q) {
        const double c = dipole_coefficient(gi, el, q);
        if (c != 0.0) m.jumps.push_back({gi, el, q, sqrt_g * c});
      }
  return m;
}

/// Three-level Lambda system expressed as a HamiltonianModel so the same
/// trajectory machinery drives the master-equation cross-checks. Levels:
/// 0 = ground on the Omega leg, 1 = ground on the omega leg, 2 = excited.
/// No momentum grid, no recoil. branching_g0 is the fraction of Gamma
/// decaying to level 0.
inline HamiltonianModel lambda_wfmc_model(double Omega, double omega,
                                          double Delta, double delta,
                                          double branching_g0 = 0.5) {
  if (branching_g0 < 0.0 || branching_g0 > 1.0)
    throw std::invalid_argument("branching fraction must be in [0,1]");
  const double g = constants::gamma;
  HamiltonianModel m;
  m.n_lev = 3;
  m.n_p = 1;
  m.dim = 3;
  m.kick_points = 0;
  m.recoil_enabled = false;
  m.k_eff = 1.0;
  m.grid = SimGrid{1.0, 1.0};
  m.diag.resize(3);
  m.diag << 0.0, -delta * g, -Delta * g;
  m.decay_diag = Eigen::VectorXd::Zero(3);
  m.decay_diag[2] = g;
  m.level_is_excited = {0, 0, 1};
  m.level_is_f2 = {1, 0, 0};
  m.coupling = Csr::from_triplets(
      3, 3, {{2, 0, 0.5 * Omega * g}, {0, 2, 0.5 * Omega * g}});
  m.raman_up = Csr::from_triplets(3, 3, {{2, 1, 0.5 * omega * g}});
  m.raman_dn = Csr::from_triplets(3, 3, {{1, 2, 0.5 * omega * g}});
  m.jumps.push_back({0, 2, 0, std::sqrt(g * branching_g0)});
  m.jumps.push_back({1, 2, 0, std::sqrt(g * (1.0 - branching_g0))});
  return m;
}

}  // namespace graymol
