#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graymol/constants.hpp"
#include "graymol/levmar.hpp"
#include "graymol/lindblad.hpp"

namespace graymol {

/// Which leg of the Lambda system the synthesized spectrum reports.
/// raman is the experimentally detected beam; the coupling leg is useful as
/// the single-field control (its absorption is flat in delta when the Raman
/// field is off).
enum class ProbeLeg { raman, coupling };

/// Parameters generating a synthetic EIT spectrum (Rabi/detuning in Gamma
/// units, dephasing rate in 1/s).
struct EITParams {
  double Omega = 1.5;
  double omega = 0.1;
  double Delta = 0.0;
  double gamma_deph = 0.0;
  ProbeLeg probe_leg = ProbeLeg::raman;
};

/// Probe absorption versus two-photon detuning.
struct EITSpectrum {
  std::vector<double> detuning_hz;
  std::vector<double> absorption;  ///< arbitrary units
  EITParams params;

  void validate() const {
    if (detuning_hz.size() != absorption.size())
      throw std::invalid_argument("spectrum arrays must have equal length");
    for (std::size_t i = 1; i < detuning_hz.size(); ++i)
      if (detuning_hz[i] <= detuning_hz[i - 1])
        throw std::invalid_argument("detuning grid must be strictly increasing");
  }
};

/// Steady-state absorption spectrum of the homogeneous Lambda medium.
/// Absorption is -Im of the probed leg's optical coherence, which is
/// positive for an absorbing medium and dips to zero at Raman resonance.
inline EITSpectrum eit_spectrum(const EITParams& params,
                                const std::vector<double>& delta_grid_hz) {
  for (std::size_t i = 1; i < delta_grid_hz.size(); ++i)
    if (delta_grid_hz[i] <= delta_grid_hz[i - 1])
      throw std::invalid_argument("detuning grid must be strictly increasing");
  EITSpectrum spec;
  spec.params = params;
  spec.detuning_hz = delta_grid_hz;
  spec.absorption.reserve(delta_grid_hz.size());
  const int g_idx = params.probe_leg == ProbeLeg::raman ? 1 : 0;
  for (const double d_hz : delta_grid_hz) {
    const double d_gamma = 2.0 * constants::pi * d_hz / constants::gamma;
    const auto sys = lambda_system(params.Omega, params.omega, params.Delta,
                                   d_gamma, params.gamma_deph);
    const auto ss = steady_state(sys);
    spec.absorption.push_back(-ss.rho(2, g_idx).imag());
  }
  return spec;
}

/// Demodulated dispersive error signal of the sideband lock.
struct ErrorSignal {
  std::vector<double> detuning_hz;
  std::vector<double> signal_v;
  double slope_at_zero = 0.0;   ///< V/Hz
  double capture_range = 0.0;   ///< Hz between the signal extrema
};

namespace detail {

inline double interp(const std::vector<double>& x, const std::vector<double>& y,
                     double xq) {
  const auto it = std::upper_bound(x.begin(), x.end(), xq);
  if (it == x.begin() || it == x.end())
    throw std::invalid_argument("interpolation outside grid");
  const std::size_t i = std::size_t(it - x.begin());
  const double t = (xq - x[i - 1]) / (x[i] - x[i - 1]);
  return y[i - 1] + t * (y[i] - y[i - 1]);
}

}  // namespace detail

/// FM-spectroscopy model of the lock signal: the difference of the absorption
/// sampled at the two sideband positions, scaled by the calibration constant
/// (volts per absorption unit).
inline ErrorSignal error_signal(const EITSpectrum& spec, double f_mod_hz,
                                double calibration_v) {
  spec.validate();
  if (!(f_mod_hz > 0.0)) throw std::invalid_argument("f_mod must be > 0");
  const double lo = spec.detuning_hz.front() + f_mod_hz;
  const double hi = spec.detuning_hz.back() - f_mod_hz;
  ErrorSignal out;
  for (std::size_t i = 0; i < spec.detuning_hz.size(); ++i) {
    const double d = spec.detuning_hz[i];
    if (d < lo || d > hi) continue;
    const double a_minus =
        detail::interp(spec.detuning_hz, spec.absorption, d - f_mod_hz);
    const double a_plus =
        detail::interp(spec.detuning_hz, spec.absorption, d + f_mod_hz);
    out.detuning_hz.push_back(d);
    out.signal_v.push_back(calibration_v * (a_minus - a_plus));
  }
  if (out.detuning_hz.size() < 5)
    throw std::invalid_argument(
        "spectrum grid too narrow for the modulation frequency");
  // slope at zero detuning by a symmetric difference one grid step out
  const double h = spec.detuning_hz[1] - spec.detuning_hz[0];
  if (out.detuning_hz.front() <= -h && out.detuning_hz.back() >= h)
    out.slope_at_zero = (detail::interp(out.detuning_hz, out.signal_v, h) -
                         detail::interp(out.detuning_hz, out.signal_v, -h)) /
                        (2.0 * h);
  const auto mn = std::min_element(out.signal_v.begin(), out.signal_v.end());
  const auto mx = std::max_element(out.signal_v.begin(), out.signal_v.end());
  out.capture_range =
      std::abs(out.detuning_hz[std::size_t(mx - out.signal_v.begin())] -
               out.detuning_hz[std::size_t(mn - out.signal_v.begin())]);
  return out;
}

/// Calibration constant that makes the error-signal slope at resonance equal
/// target_slope (V/Hz).
inline double calibrate_to_slope(const EITSpectrum& spec, double f_mod_hz,
                                 double target_slope_v_per_hz) {
  const ErrorSignal raw = error_signal(spec, f_mod_hz, 1.0);
  if (raw.slope_at_zero == 0.0)
    throw std::invalid_argument("flat error signal cannot be calibrated");
  return target_slope_v_per_hz / raw.slope_at_zero;
}

/// Sum-of-two-Lorentzians fit of an EIT spectrum.
struct TwoLorentzianFit {
  double center1 = 0, fwhm1 = 0, amplitude1 = 0;
  double center2 = 0, fwhm2 = 0, amplitude2 = 0;
  double offset = 0;
  Eigen::VectorXd uncertainties;  ///< order: c1,w1,a1,c2,w2,a2,off
  double eit_linewidth = 0;       ///< FWHM of the transparency component
  double residual_norm = 0;
  bool converged = false;
  bool secondary_significant = true;  ///< false when one Lorentzian suffices
};

namespace detail {

inline double lorentz(double x, double c, double w, double a) {
  const double hw = 0.5 * w;
  return a * hw * hw / ((x - c) * (x - c) + hw * hw);
}

}  // namespace detail

/// Levenberg-Marquardt fit of absorption = offset + L1 + L2. The cold-start
/// guess seeds the narrow component at the grid minimum (the transparency
/// dip) and the wide one at the global maximum, widths from second
/// differences. Non-convergence is reported via the converged flag.
inline TwoLorentzianFit fit_two_lorentzians(
    const EITSpectrum& spec,
    std::optional<Eigen::VectorXd> initial_guess = std::nullopt) {
  spec.validate();
  const std::size_t n = spec.detuning_hz.size();
  if (n < 7) throw std::invalid_argument("need at least 7 data points");
  const auto& x = spec.detuning_hz;
  const auto& y = spec.absorption;

  Eigen::VectorXd p0(7);
  if (initial_guess) {
    if (initial_guess->size() != 7)
      throw std::invalid_argument("initial guess must have 7 parameters");
    p0 = *initial_guess;
  } else {
    const std::size_t imax =
        std::size_t(std::max_element(y.begin(), y.end()) - y.begin());
    const std::size_t imin =
        std::size_t(std::min_element(y.begin(), y.end()) - y.begin());
    const double span = x.back() - x.front();
    const double off0 = 0.5 * (y.front() + y.back());
    auto width_from_curvature = [&](std::size_t i, double fallback) {
      if (i == 0 || i + 1 >= n) return fallback;
      const double h = 0.5 * (x[i + 1] - x[i - 1]);
      const double d2 = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
      const double a = y[i] - off0;
      if (d2 == 0.0 || a == 0.0) return fallback;
      const double w2 = std::abs(8.0 * a / d2);
      const double w = std::sqrt(w2);
      return std::isfinite(w) && w > 0 ? std::min(w, span) : fallback;
    };
    p0 << x[imax], width_from_curvature(imax, span / 4), y[imax] - off0,
        x[imin], width_from_curvature(imin, span / 40), y[imin] - off0, off0;
  }

  auto resid = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    for (std::size_t i = 0; i < n; ++i)
      r[long(i)] = detail::lorentz(x[i], p[0], p[1], p[2]) +
                   detail::lorentz(x[i], p[3], p[4], p[5]) + p[6] - y[i];
  };
  auto jac = [&](const Eigen::VectorXd& p, Eigen::MatrixXd& j) {
    for (std::size_t i = 0; i < n; ++i) {
      for (int comp = 0; comp < 2; ++comp) {
        const double c = p[3 * comp], w = p[3 * comp + 1], a = p[3 * comp + 2];
        const double hw = 0.5 * w;
        const double dx = x[i] - c;
        const double den = dx * dx + hw * hw;
        j(long(i), 3 * comp) = a * hw * hw * 2.0 * dx / (den * den);
        j(long(i), 3 * comp + 1) = a * hw * dx * dx / (den * den);
        j(long(i), 3 * comp + 2) = hw * hw / den;
      }
      j(long(i), 6) = 1.0;
    }
  };
  FitResult fit = levenberg_marquardt(resid, jac, p0, int(n));

  TwoLorentzianFit out;
  auto fill = [&](const Eigen::VectorXd& p) {
    out.center1 = p[0];
    out.fwhm1 = std::abs(p[1]);
    out.amplitude1 = p[2];
    out.center2 = p[3];
    out.fwhm2 = std::abs(p[4]);
    out.amplitude2 = p[5];
    out.offset = p[6];
  };
  fill(fit.params);
  out.uncertainties = fit.uncertainties;
  out.residual_norm = fit.residual_norm;
  out.converged = fit.converged;

  // transparency component: opposite sign to the dominant one; fall back to
  // the narrower component when both amplitudes share a sign
  const bool opposite = out.amplitude1 * out.amplitude2 < 0.0;
  int narrow;
  if (opposite)
    narrow = std::abs(out.amplitude1) < std::abs(out.amplitude2) ? 0 : 1;
  else
    narrow = out.fwhm1 < out.fwhm2 ? 0 : 1;
  out.eit_linewidth = narrow == 0 ? out.fwhm1 : out.fwhm2;
  const double a_n = narrow == 0 ? out.amplitude1 : out.amplitude2;
  const double a_err = fit.uncertainties[3 * narrow + 2];
  out.secondary_significant = a_err > 0.0 && std::abs(a_n) / a_err >= 2.0;
  if (out.eit_linewidth <= 0.0) out.converged = false;
  return out;
}

}  // namespace graymol
