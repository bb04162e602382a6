#include <doctest.h>

#include <cmath>
#include <vector>

#include "graymol/constants.hpp"
#include "graymol/eit.hpp"
#include "graymol/rng.hpp"

using namespace graymol;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  v.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) v[std::size_t(i)] = a + (b - a) * i / (n - 1);
  return v;
}

EITSpectrum synthetic_two_lorentzian(double wide_fwhm, double narrow_fwhm,
                                     double amp_wide, double amp_narrow,
                                     double offset, int n = 801,
                                     double span = 3e7) {
  EITSpectrum s;
  s.detuning_hz = linspace(-span, span, n);
  s.absorption.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    const double x = s.detuning_hz[std::size_t(i)];
    s.absorption[std::size_t(i)] = offset +
                                   detail::lorentz(x, 0.0, wide_fwhm, amp_wide) +
                                   detail::lorentz(x, 0.0, narrow_fwhm, amp_narrow);
  }
  return s;
}

}  // namespace

TEST_CASE("single-field control: coupling-leg absorption is flat in delta") {
  EITParams p;
  p.Omega = 1.0;
  p.omega = 0.0;
  p.Delta = 0.5;
  p.probe_leg = ProbeLeg::coupling;
  const auto spec = eit_spectrum(p, linspace(-8e6, 8e6, 41));
  const double first = spec.absorption.front();
  CHECK(first > 0.0);
  for (double a : spec.absorption)
    CHECK(std::abs(a - first) < 1e-9 * std::abs(first));
}

TEST_CASE("perfect CPT: absorption vanishes at Raman resonance") {
  EITParams p;
  p.Omega = 1.0;
  p.omega = 0.25;
  p.Delta = 0.0;
  const auto spec = eit_spectrum(p, linspace(-1.2e7, 1.2e7, 241));
  const double peak =
      *std::max_element(spec.absorption.begin(), spec.absorption.end());
  REQUIRE(peak > 0.0);
  // grid contains delta = 0 exactly
  const std::size_t mid = spec.absorption.size() / 2;
  CHECK(spec.detuning_hz[mid] == 0.0);
  CHECK(spec.absorption[mid] < 1e-8 * peak);
}

TEST_CASE("transparency dip width grows monotonically with the coupling power") {
  auto dip_fwhm = [](double Omega) {
    EITParams p;
    p.Omega = Omega;
    p.omega = 0.05;
    p.Delta = 0.0;
    const auto spec = eit_spectrum(p, linspace(-2.4e7, 2.4e7, 1601));
    // width where absorption recovers to half of its far-wing value
    const double wing = spec.absorption.front();
    int lo = int(spec.absorption.size()) / 2, hi = lo;
    while (lo > 0 && spec.absorption[std::size_t(lo)] < 0.5 * wing) --lo;
    while (hi + 1 < int(spec.absorption.size()) &&
           spec.absorption[std::size_t(hi)] < 0.5 * wing)
      ++hi;
    return spec.detuning_hz[std::size_t(hi)] - spec.detuning_hz[std::size_t(lo)];
  };
  const double w1 = dip_fwhm(0.5), w2 = dip_fwhm(1.0), w3 = dip_fwhm(2.0);
  CHECK(w1 < w2);
  CHECK(w2 < w3);
}

TEST_CASE("dip depth degrades monotonically with ground dephasing") {
  auto dip_depth = [](double deph) {
    EITParams p;
    p.Omega = 1.0;
    p.omega = 0.2;
    p.Delta = 0.0;
    p.gamma_deph = deph;
    const auto spec = eit_spectrum(p, linspace(-1.2e7, 1.2e7, 241));
    const double peak =
        *std::max_element(spec.absorption.begin(), spec.absorption.end());
    const double mid = spec.absorption[spec.absorption.size() / 2];
    return 1.0 - mid / peak;
  };
  const double d0 = dip_depth(0.0);
  const double d1 = dip_depth(2.0 * constants::pi * 3e4);
  const double d2 = dip_depth(2.0 * constants::pi * 3e5);
  CHECK(d0 > d1);
  CHECK(d1 > d2);
}

TEST_CASE("error signal: antisymmetric with zero crossing at resonance") {
  EITParams p;
  p.Omega = 1.0;
  p.omega = 0.2;
  p.Delta = 0.0;
  const auto spec = eit_spectrum(p, linspace(-3e7, 3e7, 1201));
  const auto err = error_signal(spec, 1e7, 1.0);
  // signal(0) = 0 exactly for the symmetric spectrum
  const std::size_t mid = err.detuning_hz.size() / 2;
  CHECK(err.detuning_hz[mid] == 0.0);
  CHECK(std::abs(err.signal_v[mid]) <
        1e-6 * *std::max_element(err.signal_v.begin(), err.signal_v.end()));
  // antisymmetry
  double max_asym = 0.0, max_val = 0.0;
  for (std::size_t i = 0; i < err.signal_v.size(); ++i) {
    const std::size_t j = err.signal_v.size() - 1 - i;
    max_asym = std::max(max_asym, std::abs(err.signal_v[i] + err.signal_v[j]));
    max_val = std::max(max_val, std::abs(err.signal_v[i]));
  }
  CHECK(max_asym < 1e-6 * max_val);
  CHECK(err.capture_range > 0.0);
}

TEST_CASE("slope calibration reproduces the target sensitivity exactly") {
  EITParams p;
  p.Omega = 1.0;
  p.omega = 0.2;
  p.Delta = 0.0;
  const auto spec = eit_spectrum(p, linspace(-3e7, 3e7, 1201));
  const double target = 2.5e-8;  // 25 mV/MHz in V/Hz
  const double cal = calibrate_to_slope(spec, 1e7, target);
  const auto err = error_signal(spec, 1e7, cal);
  CHECK(err.slope_at_zero == doctest::Approx(target).epsilon(1e-12));
}

TEST_CASE("steeper dips calibrate to larger raw slopes") {
  auto raw_slope = [](double omega) {
    EITParams p;
    p.Omega = 0.7;
    p.omega = omega;
    p.Delta = 0.0;
    p.gamma_deph = 2.0 * constants::pi * 2e4;
    const auto spec = eit_spectrum(p, linspace(-3e7, 3e7, 1201));
    return std::abs(error_signal(spec, 1e7, 1.0).slope_at_zero);
  };
  // halving the coupling halves the dip width and steepens the demodulated
  // slope at resonance
  CHECK(raw_slope(0.1) > 0.0);
  EITParams wide;
  wide.Omega = 1.4;
  wide.omega = 0.1;
  wide.Delta = 0.0;
  wide.gamma_deph = 2.0 * constants::pi * 2e4;
  EITParams narrow = wide;
  narrow.Omega = 0.7;
  const auto spec_wide = eit_spectrum(wide, linspace(-3e7, 3e7, 1201));
  const auto spec_narrow = eit_spectrum(narrow, linspace(-3e7, 3e7, 1201));
  CHECK(std::abs(error_signal(spec_narrow, 1e7, 1.0).slope_at_zero) >
        std::abs(error_signal(spec_wide, 1e7, 1.0).slope_at_zero));
}

TEST_CASE("two-Lorentzian fit: noiseless round trip recovers the widths") {
  const auto spec =
      synthetic_two_lorentzian(6e6, 2.08e6, 1.0, -0.8, 0.05);
  const auto fit = fit_two_lorentzians(spec);
  CHECK(fit.converged);
  CHECK(std::abs(fit.eit_linewidth - 2.08e6) / 2.08e6 < 1e-3);
  const double wide = fit.eit_linewidth == fit.fwhm1 ? fit.fwhm2 : fit.fwhm1;
  CHECK(std::abs(wide - 6e6) / 6e6 < 1e-3);
  CHECK(fit.secondary_significant);
}

TEST_CASE("two-Lorentzian fit under 1% noise recovers the narrow width to 5%") {
  Rng rng(321);
  int failures = 0;
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    auto spec = synthetic_two_lorentzian(6e6, 2.08e6, 1.0, -0.8, 0.05);
    const double scale =
        *std::max_element(spec.absorption.begin(), spec.absorption.end());
    for (auto& y : spec.absorption) y += 0.01 * scale * rng.normal();
    const auto fit = fit_two_lorentzians(spec);
    const double dev = std::abs(fit.eit_linewidth - 2.08e6) / 2.08e6;
    worst = std::max(worst, dev);
    if (!fit.converged || dev > 0.05) ++failures;
  }
  CHECK(failures == 0);
  CHECK(worst < 0.05);
}

TEST_CASE("fit round-trip recovers all seven parameters on random draws") {
  Rng rng(777);
  for (int draw = 0; draw < 20; ++draw) {
    const double wide = 4e6 + 6e6 * rng.uniform();
    const double narrow = 0.5e6 + 2e6 * rng.uniform();
    const double aw = 0.5 + rng.uniform();
    const double an = -(0.3 + 0.5 * rng.uniform());
    const double off = 0.2 * rng.uniform();
    const auto spec = synthetic_two_lorentzian(wide, narrow, aw, an, off);
    const auto fit = fit_two_lorentzians(spec);
    CHECK(fit.converged);
    CHECK(std::abs(fit.eit_linewidth - narrow) / narrow < 1e-3);
    CHECK(std::abs(fit.offset - off) < 1e-3 * std::max(1.0, std::abs(off)));
  }
}

TEST_CASE("single-Lorentzian input degrades gracefully") {
  const auto spec = synthetic_two_lorentzian(6e6, 2e6, 1.0, 0.0, 0.1);
  const auto fit = fit_two_lorentzians(spec);
  // the second component is insignificant by the amplitude/uncertainty test
  CHECK(!fit.secondary_significant);
}

TEST_CASE("fit input validation") {
  EITSpectrum tiny;
  tiny.detuning_hz = {1, 2, 3, 4, 5, 6};
  tiny.absorption = {0, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS((void)fit_two_lorentzians(tiny), std::invalid_argument);
  EITSpectrum bad;
  bad.detuning_hz = {1, 2, 2, 3, 4, 5, 6};
  bad.absorption = {0, 0, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS((void)fit_two_lorentzians(bad), std::invalid_argument);
}

TEST_CASE("error signal needs margin for the sidebands") {
  EITParams p;
  p.Omega = 1.0;
  p.omega = 0.2;
  p.Delta = 0.0;
  const auto spec = eit_spectrum(p, linspace(-5e6, 5e6, 51));
  CHECK_THROWS_AS((void)error_signal(spec, 4.9e6, 1.0), std::invalid_argument);
}
