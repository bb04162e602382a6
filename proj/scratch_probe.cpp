// Throwaway convention probe (not part of the build).
#include <gsl/gsl_sf_coupling.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "graymol/level_scheme.hpp"
#include "graymol/wigner.hpp"

using namespace graymol;

int main() {
  // 1. 3j/6j vs GSL over a sweep
  double max3 = 0, max6 = 0;
  for (int tj1 = 0; tj1 <= 6; ++tj1)
    for (int tj2 = 0; tj2 <= 6; ++tj2)
      for (int tj3 = 0; tj3 <= 8; ++tj3)
        for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2)
          for (int tm2 = -tj2; tm2 <= tj2; tm2 += 2) {
            int tm3 = -tm1 - tm2;
            if (std::abs(tm3) > tj3) continue;
            if ((tj1 + tm1) % 2 || (tj2 + tm2) % 2 || (tj3 + tm3) % 2) continue;
            double mine = wigner::three_j(tj1 / 2.0, tj2 / 2.0, tj3 / 2.0,
                                          tm1 / 2.0, tm2 / 2.0, tm3 / 2.0);
            double ref = gsl_sf_coupling_3j(tj1, tj2, tj3, tm1, tm2, tm3);
            max3 = std::max(max3, std::abs(mine - ref));
          }
  for (int t1 = 0; t1 <= 6; ++t1)
    for (int t2 = 0; t2 <= 6; ++t2)
      for (int t3 = 0; t3 <= 6; ++t3)
        for (int t4 = 0; t4 <= 6; ++t4)
          for (int t5 = 0; t5 <= 6; ++t5)
            for (int t6 = 0; t6 <= 6; ++t6) {
              double mine = wigner::six_j(t1 / 2.0, t2 / 2.0, t3 / 2.0,
                                          t4 / 2.0, t5 / 2.0, t6 / 2.0);
              double ref = gsl_sf_coupling_6j(t1, t2, t3, t4, t5, t6);
              max6 = std::max(max6, std::abs(mine - ref));
            }
  std::printf("max |3j - gsl| = %.3e   max |6j - gsl| = %.3e\n", max3, max6);

  // 2. normalization sum_(g,q) c^2 = 1 per excited level
  for (int e = 8; e < 24; ++e) {
    double sum = 0;
    for (int g = 0; g < 8; ++g)
      for (int q = -1; q <= 1; ++q) {
        double c = dipole_coefficient(g, e, q);
        sum += c * c;
      }
    if (std::abs(sum - 1.0) > 1e-12)
      std::printf("NORM FAIL e=%d sum=%.15f\n", e, sum);
  }
  std::printf("normalization checked\n");

  // 3. hyperfine factor signs
  for (int fg = 1; fg <= 2; ++fg)
    for (int fe = 0; fe <= 3; ++fe)
      std::printf("h(F=%d,F'=%d) = %+.6f\n", fg, fe,
                  detail::hyperfine_factor(fg, fe));

  // 4. dark state of the two-beam-summed coupling restricted to F'=2,
  //    with beam +z driving q=-1 and beam -z driving q=+1.
  //    Rows: 5 m' states of F'=2 per

  //    combined operator V = V_{q=-1} + V_{q=+1} (equal weights)
  //    columns: 8 ground amplitudes (F=1 m=-1..1, F=2 m=-2..2)
  auto test_alpha = [&](double alpha) {
    double Om = 1.7, om = alpha * Om;
    // psi_D per the printed family
    std::vector<double> psi(8, 0.0);
    double A = std::sqrt(6.0 + 2.0 / (3.0 * alpha * alpha));
    psi[std::size_t(level_index(2, 0, false))] = 1.0 / A;
    psi[std::size_t(level_index(2, 1, false))] = -1.0 / A;
    psi[std::size_t(level_index(2, -1, false))] = -1.0 / A;
    psi[std::size_t(level_index(2, 2, false))] = std::sqrt(1.5) / A;
    psi[std::size_t(level_index(2, -2, false))] = std::sqrt(1.5) / A;
    psi[std::size_t(level_index(1, 1, false))] = -1.0 / (std::sqrt(3.0) * alpha * A);
    psi[std::size_t(level_index(1, -1, false))] = +1.0 / (std::sqrt(3.0) * alpha * A);

    double resid_sum = 0.0, resid_perbeam = 0.0;
    for (int mp = -2; mp <= 2; ++mp) {
      int e = level_index(2, mp, true);
      double amp_sum = 0.0;
      for (int q : {-1, +1}) {
        double amp_q = 0.0;
        for (int g = 0; g < 8; ++g) {
          double rabi = is_f2_ground(g) ? Om : om;
          amp_q += 0.5 * rabi * dipole_coefficient(g, e, q) * psi[std::size_t(g)];
        }
        amp_sum += amp_q;
        resid_perbeam += amp_q * amp_q;
      }
      resid_sum += amp_sum * amp_sum;
    }
    // also residual vs ALL excited manifolds under the summed operator
    double resid_all = 0.0;
    for (int e = 8; e < 24; ++e) {
      double amp_sum = 0.0;
      for (int q : {-1, +1})
        for (int g = 0; g < 8; ++g) {
          double rabi = is_f2_ground(g) ? Om : om;
          amp_sum += 0.5 * rabi * dipole_coefficient(g, e, q) * psi[std::size_t(g)];
        }
      resid_all += amp_sum * amp_sum;
    }
    std::printf(
        "alpha=%.4f  |V_sum(F'=2) psi|=%.3e  |V_perbeam(F'=2) psi|=%.3e  "
        "|V_sum(all F') psi|=%.3e\n",
        alpha, std::sqrt(resid_sum), std::sqrt(resid_perbeam),
        std::sqrt(resid_all));
  };
  for (double a : {0.1, std::sqrt(0.1), 1.0 / 3.0, 1.0, 3.0}) test_alpha(a);
  return 0;
}
