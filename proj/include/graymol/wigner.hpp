#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

// Angular-momentum coupling coefficients (Wigner 3j/6j, Clebsch-Gordan)
// via the Racah closed-form sums. Arguments are physical (possibly
// half-integer) angular momenta passed as doubles; internally everything
// is converted to twice-j integers so the triangle logic is exact.
namespace graymol::wigner {

namespace detail {

inline const std::array<double, 64>& factorial_table() {
  static const std::array<double, 64> table = [] {
    std::array<double, 64> t{};
    t[0] = 1.0;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * double(i);
    return t;
  }();
  return table;
}

inline double fact(int n) {
  if (n < 0) throw std::domain_error("factorial of negative integer");
  return factorial_table().at(std::size_t(n));
}

inline int to_twice(double j) {
  int tj = int(std::lround(2.0 * j));
  if (std::abs(2.0 * j - tj) > 1e-9)
    throw std::domain_error("angular momentum not a multiple of 1/2");
  return tj;
}

inline bool triangle_ok(int tj1, int tj2, int tj3) {
  return tj3 >= std::abs(tj1 - tj2) && tj3 <= tj1 + tj2 &&
         (tj1 + tj2 + tj3) % 2 == 0;
}

// sqrt of the triangle coefficient Delta(abc)
inline double sqrt_triangle(int ta, int tb, int tc) {
  return std::sqrt(fact((ta + tb - tc) / 2) * fact((ta - tb + tc) / 2) *
                   fact((-ta + tb + tc) / 2) / fact((ta + tb + tc) / 2 + 1));
}

inline int phase(int k) { return (k % 2 == 0) ? 1 : -1; }

}  // namespace detail

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3), Racah sum formula.
inline double three_j(double j1, double j2, double j3, double m1, double m2,
                      double m3) {
  using namespace detail;
  const int tj1 = to_twice(j1), tj2 = to_twice(j2), tj3 = to_twice(j3);
  const int tm1 = to_twice(m1), tm2 = to_twice(m2), tm3 = to_twice(m3);
  if (tm1 + tm2 + tm3 != 0) return 0.0;
  if (!triangle_ok(tj1, tj2, tj3)) return 0.0;
  if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tm3) > tj3)
    return 0.0;
  if ((tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj3 + tm3) % 2 != 0)
    return 0.0;

  const int kmin = std::max({0, (tj2 - tj3 - tm1) / 2, (tj1 - tj3 + tm2) / 2});
  const int kmax = std::min({(tj1 + tj2 - tj3) / 2, (tj1 - tm1) / 2,
                             (tj2 + tm2) / 2});
  double sum = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    double denom = fact(k) * fact((tj1 + tj2 - tj3) / 2 - k) *
                   fact((tj1 - tm1) / 2 - k) * fact((tj2 + tm2) / 2 - k) *
                   fact((tj3 - tj2 + tm1) / 2 + k) *
                   fact((tj3 - tj1 - tm2) / 2 + k);
    sum += phase(k) / denom;
  }
  double pref = sqrt_triangle(tj1, tj2, tj3) *
                std::sqrt(fact((tj1 + tm1) / 2) * fact((tj1 - tm1) / 2) *
                          fact((tj2 + tm2) / 2) * fact((tj2 - tm2) / 2) *
                          fact((tj3 + tm3) / 2) * fact((tj3 - tm3) / 2));
  return phase((tj1 - tj2 - tm3) / 2) * pref * sum;
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}, Racah sum formula.
inline double six_j(double j1, double j2, double j3, double j4, double j5,
                    double j6) {
  using namespace detail;
  const int t1 = to_twice(j1), t2 = to_twice(j2), t3 = to_twice(j3);
  const int t4 = to_twice(j4), t5 = to_twice(j5), t6 = to_twice(j6);
  if (!triangle_ok(t1, t2, t3) || !triangle_ok(t1, t5, t6) ||
      !triangle_ok(t4, t2, t6) || !triangle_ok(t4, t5, t3))
    return 0.0;

  const double pref = sqrt_triangle(t1, t2, t3) * sqrt_triangle(t1, t5, t6) *
                      sqrt_triangle(t4, t2, t6) * sqrt_triangle(t4, t5, t3);
  const int a1 = (t1 + t2 + t3) / 2, a2 = (t1 + t5 + t6) / 2;
  const int a3 = (t4 + t2 + t6) / 2, a4 = (t4 + t5 + t3) / 2;
  const int b1 = (t1 + t2 + t4 + t5) / 2, b2 = (t2 + t3 + t5 + t6) / 2;
  const int b3 = (t3 + t1 + t6 + t4) / 2;
  const int kmin = std::max({a1, a2, a3, a4});
  const int kmax = std::min({b1, b2, b3});
  double sum = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    double denom = fact(k - a1) * fact(k - a2) * fact(k - a3) * fact(k - a4) *
                   fact(b1 - k) * fact(b2 - k) * fact(b3 - k);
    sum += phase(k) * fact(k + 1) / denom;
  }
  return pref * sum;
}

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>.
inline double clebsch_gordan(double j1, double m1, double j2, double m2,
                             double J, double M) {
  using namespace detail;
  if (to_twice(m1) + to_twice(m2) != to_twice(M)) return 0.0;
  return phase((to_twice(j1) - to_twice(j2) + to_twice(M)) / 2) *
         std::sqrt(2.0 * J + 1.0) * three_j(j1, j2, J, m1, m2, -M);
}

}  // namespace graymol::wigner
