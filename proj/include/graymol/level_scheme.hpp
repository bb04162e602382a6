#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "graymol/constants.hpp"
#include "graymol/wigner.hpp"

namespace graymol {

/// One internal state of the 87Rb D2 system.
struct Level {
  int f = 0;       ///< total angular momentum F
  int m = 0;       ///< magnetic quantum number m_F
  bool excited = false;
};

inline constexpr int n_levels = 24;
inline constexpr int n_ground = 8;
inline constexpr int n_excited = 16;

/// Canonical level ordering: ground F=1 (m=-1..1), ground F=2 (m=-2..2),
/// then excited F'=0,1,2,3 each m=-F'..F'. Index is stable across the
/// whole code base; momentum blocks are contiguous per level.
inline const std::array<Level, n_levels>& levels() {
  static const std::array<Level, n_levels> table = [] {
    std::array<Level, n_levels> t{};
    int i = 0;
    for (int m = -1; m <= 1; ++m) t[i++] = {1, m, false};
    for (int m = -2; m <= 2; ++m) t[i++] = {2, m, false};
    for (int fp = 0; fp <= 3; ++fp)
      for (int m = -fp; m <= fp; ++m) t[i++] = {fp, m, true};
    return t;
  }();
  return table;
}

inline int level_index(int f, int m, bool excited) {
  if (!excited) {
    if (f == 1 && std::abs(m) <= 1) return m + 1;
    if (f == 2 && std::abs(m) <= 2) return 3 + (m + 2);
  } else {
    if (f < 0 || f > 3 || std::abs(m) > f) throw std::domain_error("bad level");
    int base = 8;
    for (int fp = 0; fp < f; ++fp) base += 2 * fp + 1;
    return base + (m + f);
  }
  throw std::domain_error("bad level");
}

inline bool is_f2_ground(int idx) { return idx >= 3 && idx < 8; }
inline bool is_f1_ground(int idx) { return idx >= 0 && idx < 3; }
inline bool is_excited_index(int idx) { return idx >= 8 && idx < n_levels; }

/// The 24 internal states of the D2 line with hyperfine energies (angular,
/// relative to F'=2) and Lande g-factors.
struct LevelScheme {
  std::vector<Level> ground_levels;    // 8
  std::vector<Level> excited_levels;   // 16
  std::array<double, n_levels> hyperfine_energy{};  // rad/s, 0 for grounds and F'=2
  std::array<double, n_levels> g_factor{};
  double hfs_ground = constants::hfs_ground;  // rad/s

  double energy(int idx) const { return hyperfine_energy.at(std::size_t(idx)); }
  double lande_g(int idx) const { return g_factor.at(std::size_t(idx)); }
};

/// Excited hyperfine intervals relative to F'=2 (MHz): standard 87Rb D2 data.
inline constexpr std::array<double, 4> excited_hf_mhz = {-229.165, -156.947,
                                                         0.0, +266.650};

inline LevelScheme build_level_scheme() {
  LevelScheme s;
  for (const auto& lv : levels()) {
    if (lv.excited)
      s.excited_levels.push_back(lv);
    else
      s.ground_levels.push_back(lv);
  }
  for (int i = 0; i < n_levels; ++i) {
    const Level& lv = levels()[std::size_t(i)];
    if (lv.excited) {
      s.hyperfine_energy[std::size_t(i)] =
          2.0 * constants::pi * excited_hf_mhz[std::size_t(lv.f)] * 1e6;
      s.g_factor[std::size_t(i)] = (lv.f == 0) ? 0.0 : 2.0 / 3.0;
    } else {
      s.hyperfine_energy[std::size_t(i)] = 0.0;
      s.g_factor[std::size_t(i)] = (lv.f == 1) ? -0.5 : +0.5;
    }
  }
  return s;
}

namespace detail {

/// Signed hyperfine strength factor connecting ground F to excited F' on the
/// D2 line (J=1/2 -> J'=3/2, I=3/2), normalized so that for every excited
/// sublevel the squared dipole amplitudes summed over decay channels (g,q)
/// equal 1; the square is the F'->F branching fraction.
inline double hyperfine_factor(int f_ground, int f_excited) {
  constexpr double j = 0.5, jp = 1.5, i_nuc = 1.5;
  const double sixj = wigner::six_j(j, jp, 1.0, f_excited, f_ground, i_nuc);
  const int exponent = int(std::lround(f_excited + j + 1 + i_nuc));
  const double sign = (exponent % 2 == 0) ? 1.0 : -1.0;
  return sign *
         std::sqrt((2.0 * f_ground + 1.0) * (2.0 * jp + 1.0)) * sixj;
}

}  // namespace detail

/// Relative dipole transition amplitude c_{g,e,q} between a ground and an
/// excited sublevel for spherical polarization q in {-1,0,+1}. Normalized so
/// sum over (g,q) of c^2 equals 1 for every excited level. Zero unless
/// m' = m + q and |F' - F| <= 1.
inline double dipole_coefficient(const Level& g, const Level& e, int q) {
  if (g.excited || !e.excited)
    throw std::invalid_argument("dipole_coefficient: need (ground, excited)");
  if (q < -1 || q > 1) throw std::invalid_argument("bad polarization q");
  if (e.m != g.m + q) return 0.0;
  if (std::abs(e.f - g.f) > 1) return 0.0;
  const double cg =
      wigner::clebsch_gordan(g.f, g.m, 1.0, q, e.f, e.m);
  return detail::hyperfine_factor(g.f, e.f) * cg;
}

inline double dipole_coefficient(int g_idx, int e_idx, int q) {
  return dipole_coefficient(levels()[std::size_t(g_idx)],
                            levels()[std::size_t(e_idx)], q);
}

}  // namespace graymol
