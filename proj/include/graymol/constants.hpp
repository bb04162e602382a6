#pragma once

#include <cmath>

// Physical constants for the 87Rb D2 line and the simulation unit system.
//
// Unit conventions used throughout:
//   - energies/frequencies are angular (rad/s) unless a name says _hz
//   - momenta are in units of the photon recoil hbar*k of the cooling light
//   - times are seconds; config files may use 1/Gamma units where noted
namespace graymol::constants {

inline constexpr double pi = 3.14159265358979323846;

/// Natural linewidth of 5P3/2, angular (rad/s). Gamma/2pi = 6.0666 MHz.
inline constexpr double gamma = 2.0 * pi * 6.0666e6;

/// 87Rb atomic mass (kg).
inline constexpr double mass_rb87 = 1.44316e-25;

/// D2 cooling wavelength (m).
inline constexpr double lambda_d2 = 780.241e-9;

/// Cooling-light wave number k = 2 pi / lambda (1/m).
inline constexpr double k_d2 = 2.0 * pi / lambda_d2;

inline constexpr double hbar = 1.054571817e-34;
inline constexpr double k_boltzmann = 1.380649e-23;

/// Bohr magneton over h (Hz/T). mu_B/h = 1.39962 MHz/G = 1.39962e10 Hz/T.
inline constexpr double mu_b_over_h_hz_per_t = 1.39962e10;

/// Recoil angular frequency hbar k^2 / (2 M) (rad/s); ~2pi * 3.77 kHz.
inline constexpr double omega_recoil = hbar * k_d2 * k_d2 / (2.0 * mass_rb87);

/// Ground-state hyperfine splitting, angular (rad/s); 6.834 GHz.
inline constexpr double hfs_ground = 2.0 * pi * 6.834e9;

/// Temperature scale (hbar k)^2 / (2 M k_B) in kelvin per (hbar k)^2 of
/// momentum variance; ~0.181 uK. Used by the 3-D temperature estimate.
inline constexpr double temp_per_hbark_sq =
    hbar * hbar * k_d2 * k_d2 / (2.0 * mass_rb87 * k_boltzmann);

/// Zeeman shift per (g_F * m_F), angular (rad/s), for field B_z in tesla.
inline constexpr double zeeman_rate_per_tesla =
    2.0 * pi * mu_b_over_h_hz_per_t;

}  // namespace graymol::constants
