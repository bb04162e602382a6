#include <doctest.h>
#include <gsl/gsl_sf_coupling.h>

#include <cmath>

#include "graymol/constants.hpp"
#include "graymol/level_scheme.hpp"

using namespace graymol;

TEST_CASE("level scheme has 24 states, 8 ground + 16 excited") {
  const LevelScheme s = build_level_scheme();
  CHECK(s.ground_levels.size() == 8);
  CHECK(s.excited_levels.size() == 16);
  CHECK(levels().size() == 24);
  // index round-trips
  for (int i = 0; i < n_levels; ++i) {
    const Level& lv = levels()[std::size_t(i)];
    CHECK(level_index(lv.f, lv.m, lv.excited) == i);
  }
}

TEST_CASE("hyperfine energies pin the published intervals") {
  const LevelScheme s = build_level_scheme();
  CHECK(s.energy(level_index(2, 0, true)) == 0.0);  // F'=2 is the reference
  const double two_pi_mhz = 2.0 * constants::pi * 1e6;
  const double e3 = s.energy(level_index(3, 0, true));
  const double e1 = s.energy(level_index(1, 0, true));
  const double e0 = s.energy(level_index(0, 0, true));
  CHECK(e3 / two_pi_mhz == doctest::Approx(266.650).epsilon(1e-9));
  CHECK((e3 - e1) / two_pi_mhz == doctest::Approx(423.597).epsilon(1e-9));

  // independent oracle: magnetic-dipole/electric-quadrupole hyperfine
  // constants of 5P3/2 (A = 84.7185 MHz, B = 12.4965 MHz)
  const double a_hf = 84.7185, b_hf = 12.4965;
  auto shift = [&](int fp) {
    const double k = fp * (fp + 1.0) - 3.75 - 3.75;
    return 0.5 * a_hf * k +
           b_hf * (1.5 * k * (k + 1.0) - 2.0 * 3.75 * 3.75) / 36.0;
  };
  CHECK(std::abs(e3 / two_pi_mhz - (shift(3) - shift(2))) < 0.05);
  CHECK(std::abs(e1 / two_pi_mhz - (shift(1) - shift(2))) < 0.05);
  CHECK(std::abs(e0 / two_pi_mhz - (shift(0) - shift(2))) < 0.05);

  CHECK(s.hfs_ground / (2.0 * constants::pi) ==
        doctest::Approx(6.834e9).epsilon(5e-4));
}

TEST_CASE("Lande g-factors") {
  const LevelScheme s = build_level_scheme();
  CHECK(s.lande_g(level_index(1, 0, false)) == -0.5);
  CHECK(s.lande_g(level_index(2, 1, false)) == +0.5);
  CHECK(s.lande_g(level_index(0, 0, true)) == 0.0);
  for (int fp = 1; fp <= 3; ++fp)
    CHECK(s.lande_g(level_index(fp, 0, true)) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("dipole coefficient selection rules hold exhaustively") {
  for (int g = 0; g < n_ground; ++g)
    for (int e = n_ground; e < n_levels; ++e)
      for (int q = -1; q <= 1; ++q) {
        const Level& gl = levels()[std::size_t(g)];
        const Level& el = levels()[std::size_t(e)];
        const double c = dipole_coefficient(g, e, q);
        if (el.m != gl.m + q || std::abs(el.f - gl.f) > 1) CHECK(c == 0.0);
      }
  // m-selection example: (2,0)->(3,2) with q=+1 is forbidden, (3,1) allowed
  CHECK(dipole_coefficient(level_index(2, 0, false), level_index(3, 2, true),
                           +1) == 0.0);
  CHECK(dipole_coefficient(level_index(2, 0, false), level_index(3, 1, true),
                           +1) != 0.0);
}

TEST_CASE("dipole coefficients are emission-normalized per excited level") {
  for (int e = n_ground; e < n_levels; ++e) {
    double sum = 0.0;
    for (int g = 0; g < n_ground; ++g)
      for (int q = -1; q <= 1; ++q) {
        const double c = dipole_coefficient(g, e, q);
        sum += c * c;
      }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("stretched transition carries the largest F=2 -> F'=3 coefficient") {
  // independent evaluation through GSL's coupling coefficients
  auto gsl_coeff = [](int f, int m, int fp, int mp, int q) {
    const double sixj =
        gsl_sf_coupling_6j(1, 3, 2, 2 * fp, 2 * f, 3);  // {1/2 3/2 1; F' F 3/2}
    const double cg = ((2 * f - 2 + 2 * mp) % 4 == 0 ? 1.0 : -1.0) *
                      std::sqrt(2.0 * fp + 1.0) *
                      gsl_sf_coupling_3j(2 * f, 2, 2 * fp, 2 * m, 2 * q,
                                         -2 * mp);
    const int expo = fp + 3;  // F' + J + 1 + I with J=1/2, I=3/2
    const double sign = (expo % 2 == 0) ? 1.0 : -1.0;
    return sign * std::sqrt((2.0 * f + 1.0) * 4.0) * sixj * cg;
  };
  const double c_stretch = dipole_coefficient(
      level_index(2, 2, false), level_index(3, 3, true), +1);
  CHECK(c_stretch ==
        doctest::Approx(gsl_coeff(2, 2, 3, 3, +1)).epsilon(1e-12));
  double max_abs = 0.0;
  for (int m = -2; m <= 2; ++m)
    for (int mp = -3; mp <= 3; ++mp)
      for (int q = -1; q <= 1; ++q) {
        if (mp != m + q) continue;
        max_abs = std::max(max_abs,
                           std::abs(dipole_coefficient(
                               level_index(2, m, false),
                               level_index(3, mp, true), q)));
      }
  CHECK(std::abs(c_stretch) == doctest::Approx(max_abs).epsilon(1e-12));
  CHECK(std::abs(c_stretch) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dipole coefficient rejects swapped arguments") {
  const Level g = levels()[std::size_t(level_index(1, 0, false))];
  const Level e = levels()[std::size_t(level_index(2, 0, true))];
  CHECK_THROWS_AS((void)dipole_coefficient(e, g, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)dipole_coefficient(g, g, 0), std::invalid_argument);
}
