#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace graymol {

/// Spherical-component decomposition of each beam's polarization along the
/// model axis. amp[q+1] is the (real) amplitude with which the beam drives
/// the q in {-1,0,+1} transitions; amplitudes are normalized per beam so the
/// Rabi frequencies keep their meaning.
struct BeamPolarization {
  std::array<double, 3> amp_plus{0.7071067811865476, 0.0,
                                 0.7071067811865476};   ///< +axis beam
  std::array<double, 3> amp_minus{0.7071067811865476, 0.0,
                                  0.7071067811865476};  ///< -axis beam

  /// Counter-propagating beams of opposite helicity along the axis
  /// (rotating linear polarization, uniform intensity).
  static BeamPolarization counter_rotating() {
    return {{1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}};
  }

  /// Both beams drive the same single sigma component (standing wave).
  static BeamPolarization same_sigma(int q = -1) {
    BeamPolarization p{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    p.amp_plus[std::size_t(q + 1)] = 1.0;
    p.amp_minus[std::size_t(q + 1)] = 1.0;
    return p;
  }

  /// Both beams linearly polarized along the same transverse axis
  /// (standing wave driving both sigma components coherently).
  static BeamPolarization lin_par_lin() {
    const double r = 1.0 / std::sqrt(2.0);
    return {{r, 0.0, r}, {r, 0.0, r}};
  }

  /// Crossed linear polarizations.
  static BeamPolarization lin_perp_lin() {
    const double r = 1.0 / std::sqrt(2.0);
    return {{r, 0.0, r}, {r, 0.0, -r}};
  }

  const std::array<double, 3>& amps(int beam_direction) const {
    if (beam_direction == +1) return amp_plus;
    if (beam_direction == -1) return amp_minus;
    throw std::invalid_argument("beam direction must be +1 or -1");
  }

  double amp(int beam_direction, int q) const {
    if (q < -1 || q > 1) throw std::invalid_argument("bad polarization q");
    return amps(beam_direction)[std::size_t(q + 1)];
  }

  bool operator==(const BeamPolarization& o) const {
    return amp_plus == o.amp_plus && amp_minus == o.amp_minus;
  }
};

/// Laser parameters. Rabi frequencies and detunings are in units of Gamma.
struct LaserParams {
  double Delta = 2.0;   ///< one-photon detuning of the coupling laser (blue positive)
  double delta = 0.0;   ///< Raman (two-photon) detuning
  double Omega = 2.03;  ///< peak coupling Rabi frequency
  double omega = 0.642; ///< peak Raman Rabi frequency
  double k_eff = 1.0;   ///< wave-vector projection factor eta in (0,1]
  int delta_sign = +1;  ///< sign of the +delta shift applied to the F=2 ground manifold
  BeamPolarization pol{};

  void validate() const {
    if (Omega < 0.0 || omega < 0.0)
      throw std::invalid_argument("Rabi frequencies must be >= 0");
    if (!(k_eff > 0.0) || k_eff > 1.0)
      throw std::invalid_argument("k_eff must be in (0, 1]");
    if (delta_sign != 1 && delta_sign != -1)
      throw std::invalid_argument("delta_sign must be +1 or -1");
  }

  double alpha() const { return Omega > 0.0 ? omega / Omega : 0.0; }
};

/// 1-D momentum grid in units of the effective photon recoil (k_eff * hbar k).
/// The spacing must divide the laser kick so coherent couplings land exactly
/// on grid points.
struct SimGrid {
  double p_max = 30.0;       ///< bound, recoil units
  double p_step = 1.0 / 3.0; ///< spacing, recoil units

  int points_per_kick() const {
    double inv = 1.0 / p_step;
    int n = int(std::lround(inv));
    if (std::abs(inv - n) > 1e-9 || n < 1)
      throw std::invalid_argument("1/p_step must be a positive integer");
    return n;
  }

  int n_p() const {
    points_per_kick();
    double half = p_max / p_step;
    int h = int(std::lround(half));
    if (std::abs(half - h) > 1e-9 || h < 1)
      throw std::invalid_argument("p_max must be a multiple of p_step");
    return 2 * h + 1;
  }

  /// Momentum of grid point i in recoil units, i in [0, n_p).
  double momentum(int i) const { return -p_max + i * p_step; }

  void validate() const { n_p(); }
};

}  // namespace graymol
