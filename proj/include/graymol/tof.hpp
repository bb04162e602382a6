#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "graymol/constants.hpp"
#include "graymol/levmar.hpp"
#include "graymol/rng.hpp"

namespace graymol {

/// One fluorescence profile: counts versus position at a fixed expansion time.
struct CloudProfile {
  std::vector<double> positions_m;
  std::vector<double> counts;
  double t_expansion_s = 0.0;

  void validate() const {
    if (positions_m.size() != counts.size())
      throw std::invalid_argument("profile arrays must have equal length");
    if (positions_m.size() < 8)
      throw std::invalid_argument("profile needs at least 8 points");
  }
};

struct GaussianFit {
  double sigma = 0, sigma_err = 0;
  double center = 0, center_err = 0;
  double amplitude = 0, amplitude_err = 0;
  double offset = 0, offset_err = 0;
  double residual_norm = 0;
  bool converged = false;
};

/// Least-squares fit of A exp(-(x-x0)^2 / 2 sigma^2) + B to a cloud profile.
inline GaussianFit fit_gaussian(const CloudProfile& profile) {
  profile.validate();
  const auto& x = profile.positions_m;
  const auto& y = profile.counts;
  const std::size_t n = x.size();

  const double ymin = *std::min_element(y.begin(), y.end());
  const double ymax = *std::max_element(y.begin(), y.end());
  if (!(ymax - ymin > 0.0) ||
      ymax - ymin < 1e-9 * std::max(std::abs(ymax), 1.0))
    throw std::invalid_argument("degenerate flat profile");

  // moment-based start
  double wsum = 0, mean = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::max(0.0, y[i] - ymin);
    wsum += w;
    mean += w * x[i];
  }
  mean = wsum > 0 ? mean / wsum : 0.5 * (x.front() + x.back());
  double var = 0;
  for (std::size_t i = 0; i < n; ++i)
    var += std::max(0.0, y[i] - ymin) * (x[i] - mean) * (x[i] - mean);
  var = wsum > 0 ? var / wsum : (x.back() - x.front()) * (x.back() - x.front()) / 16;

  Eigen::VectorXd p0(4);
  p0 << ymax - ymin, mean, std::sqrt(std::max(var, 1e-20)), ymin;

  auto resid = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (x[i] - p[1]) / p[2];
      r[long(i)] = p[0] * std::exp(-0.5 * u * u) + p[3] - y[i];
    }
  };
  auto jac = [&](const Eigen::VectorXd& p, Eigen::MatrixXd& j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (x[i] - p[1]) / p[2];
      const double e = std::exp(-0.5 * u * u);
      j(long(i), 0) = e;
      j(long(i), 1) = p[0] * e * u / p[2];
      j(long(i), 2) = p[0] * e * u * u / p[2];
      j(long(i), 3) = 1.0;
    }
  };
  const FitResult fit = levenberg_marquardt(resid, jac, p0, int(n));

  GaussianFit out;
  out.amplitude = fit.params[0];
  out.center = fit.params[1];
  out.sigma = std::abs(fit.params[2]);
  out.offset = fit.params[3];
  out.amplitude_err = fit.uncertainties[0];
  out.center_err = fit.uncertainties[1];
  out.sigma_err = fit.uncertainties[2];
  out.offset_err = fit.uncertainties[3];
  out.residual_norm = fit.residual_norm;
  out.converged = fit.converged;
  return out;
}

/// Cloud widths versus expansion time.
struct WidthSeries {
  std::vector<double> times_s;
  std::vector<double> sigma_m;
  std::vector<double> sigma_err_m;  ///< may be empty or zero for unweighted

  void validate() const {
    if (times_s.size() != sigma_m.size())
      throw std::invalid_argument("series arrays must have equal length");
    if (!sigma_err_m.empty() && sigma_err_m.size() != sigma_m.size())
      throw std::invalid_argument("sigma_err length mismatch");
    for (std::size_t i = 0; i < times_s.size(); ++i) {
      if (!(sigma_m[i] > 0.0))
        throw std::invalid_argument("widths must be positive");
      if (i > 0 && times_s[i] <= times_s[i - 1])
        throw std::invalid_argument("times must be strictly increasing");
    }
  }
};

struct TemperatureFit {
  double temperature_k = 0, temperature_err_k = 0;
  double sigma0_m = 0, sigma0_err_m = 0;
  std::vector<double> residuals_m2;  ///< sigma^2 residuals per point
  bool unphysical = false;           ///< negative expansion slope
};

/// Weighted linear regression of sigma^2 against t^2:
/// sigma^2(t) = sigma0^2 + (k_B T / m) t^2. Width errors propagate into
/// sigma^2-space as 2 sigma sigma_err.
inline TemperatureFit fit_temperature(const WidthSeries& series, double mass_kg) {
  series.validate();
  const std::size_t n = series.times_s.size();
  if (n < 3) throw std::invalid_argument("need at least 3 time points");
  if (!(mass_kg > 0.0)) throw std::invalid_argument("mass must be positive");

  bool weighted = !series.sigma_err_m.empty();
  if (weighted)
    for (double e : series.sigma_err_m)
      if (!(e > 0.0)) weighted = false;

  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = series.times_s[i] * series.times_s[i];
    const double yi = series.sigma_m[i] * series.sigma_m[i];
    const double err =
        weighted ? 2.0 * series.sigma_m[i] * series.sigma_err_m[i] : 1.0;
    const double w = 1.0 / (err * err);
    sw += w;
    swx += w * xi;
    swy += w * yi;
    swxx += w * xi * xi;
    swxy += w * xi * yi;
  }
  const double det = sw * swxx - swx * swx;
  if (det <= 0.0) throw std::invalid_argument("degenerate time grid");
  const double slope = (sw * swxy - swx * swy) / det;
  const double intercept = (swxx * swy - swx * swxy) / det;
  double var_slope = sw / det;
  double var_intercept = swxx / det;

  TemperatureFit out;
  out.residuals_m2.resize(n);
  double chi2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = series.times_s[i] * series.times_s[i];
    const double yi = series.sigma_m[i] * series.sigma_m[i];
    out.residuals_m2[i] = yi - (intercept + slope * xi);
    const double err =
        weighted ? 2.0 * series.sigma_m[i] * series.sigma_err_m[i] : 1.0;
    chi2 += out.residuals_m2[i] * out.residuals_m2[i] / (err * err);
  }
  if (!weighted && n > 2) {
    // scale covariance by the residual variance
    const double s2 = chi2 / double(n - 2);
    var_slope *= s2;
    var_intercept *= s2;
  }

  out.temperature_k = slope * mass_kg / constants::k_boltzmann;
  out.temperature_err_k =
      std::sqrt(std::max(var_slope, 0.0)) * mass_kg / constants::k_boltzmann;
  out.unphysical = slope < 0.0;
  out.sigma0_m = intercept > 0.0 ? std::sqrt(intercept) : 0.0;
  out.sigma0_err_m = out.sigma0_m > 0.0
                         ? 0.5 * std::sqrt(std::max(var_intercept, 0.0)) /
                               out.sigma0_m
                         : std::sqrt(std::max(var_intercept, 0.0));
  return out;
}

/// Expansion width sigma(t) = sqrt(sigma0^2 + k_B T t^2 / m).
inline double expanded_width(double temperature_k, double sigma0_m, double t_s,
                             double mass_kg) {
  return std::sqrt(sigma0_m * sigma0_m +
                   constants::k_boltzmann * temperature_k * t_s * t_s / mass_kg);
}

/// Synthetic fluorescence profile for closed-loop testing: a Gaussian of the
/// ballistically expanded width with multiplicative Gaussian noise.
inline CloudProfile synthesize_cloud(double temperature_k, double sigma0_m,
                                     double t_s, double mass_kg, double noise,
                                     Rng& rng, int n_points = 101,
                                     double amplitude = 1000.0) {
  if (!(temperature_k >= 0.0) || !(sigma0_m > 0.0) || !(mass_kg > 0.0) ||
      t_s < 0.0 || noise < 0.0)
    throw std::invalid_argument("synthesize_cloud: invalid arguments");
  const double sigma = expanded_width(temperature_k, sigma0_m, t_s, mass_kg);
  CloudProfile p;
  p.t_expansion_s = t_s;
  const double half = 4.0 * sigma;
  p.positions_m.resize(std::size_t(n_points));
  p.counts.resize(std::size_t(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double x = -half + 2.0 * half * i / (n_points - 1);
    p.positions_m[std::size_t(i)] = x;
    const double clean = amplitude * std::exp(-0.5 * x * x / (sigma * sigma));
    const double factor = noise > 0.0 ? 1.0 + noise * rng.normal() : 1.0;
    p.counts[std::size_t(i)] = clean * factor;
  }
  return p;
}

}  // namespace graymol
