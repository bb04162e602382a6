#pragma once

#include <json.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "graymol/config.hpp"
#include "graymol/dark_states.hpp"
#include "graymol/io.hpp"
#include "graymol/lindblad.hpp"
#include "graymol/manifest.hpp"
#include "graymol/tof.hpp"
#include "graymol/wfmc.hpp"

namespace graymol {

namespace fs = std::filesystem;

/// Writes the trajectory-averaged series in the fixed column layout.
inline fs::path write_series_csv(const fs::path& dir,
                                 const EnsembleResult& res) {
  const fs::path file = dir / "series.csv";
  write_csv(file, {{"time_s", &res.times},
                   {"delta_p_hbark", &res.delta_p},
                   {"delta_p_err", &res.delta_p_err},
                   {"f2_pop", &res.f2},
                   {"f2_err", &res.f2_err},
                   {"boundary_leak", &res.leak_t}});
  return file;
}

/// Momentum histograms as one two-column block per snapshot, each introduced
/// by a `# time_s=...` comment line.
inline fs::path write_histograms_csv(const fs::path& dir,
                                     const EnsembleResult& res,
                                     const HamiltonianModel& model) {
  const fs::path file = dir / "histograms.csv";
  std::ofstream out(file, std::ios::binary);
  out << "p_hbark,probability\n";
  for (std::size_t k = 0; k < res.histograms.size(); ++k) {
    out << "# time_s=" << format_double(res.times[k]) << "\n";
    for (int ip = 0; ip < model.n_p; ++ip)
      out << format_double(model.momentum_abs(ip)) << ","
          << format_double(res.histograms[k][ip]) << "\n";
  }
  return file;
}

inline int resolve_threads(int cli_threads) {
  if (cli_threads > 0) return cli_threads;
  if (const char* env = std::getenv("GRAYMOL_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

/// cool: one ensemble at the configured parameters; emits series.csv,
/// histograms.csv and a manifest.
inline int cmd_cool(const RunConfig& cfg, int threads = 0,
                    std::ostream& log = std::cerr) {
  const fs::path dir = cfg.output_dir;
  RunManifest manifest(dir, serialize_config(cfg), cfg.seed);
  try {
    const auto model =
        build_hamiltonian(build_level_scheme(), cfg.lasers, cfg.grid, cfg.b_z);
    const EnsembleResult res = run_ensemble(
        cfg.trajectory(), cfg.n_traj, resolve_threads(threads), &model);
    manifest.add_output(write_series_csv(dir, res));
    manifest.add_output(write_histograms_csv(dir, res, model));
    manifest.finalize();
    if (!res.flagged_seeds.empty()) {
      log << "warning: " << res.flagged_seeds.size()
          << " trajectories flagged for boundary leak\n";
    }
    log << "cool: delta_p(t_final) = " << res.final_delta_p() << " +- "
        << res.final_delta_p_err() << " hbar k over " << res.n_trajectories
        << " trajectories\n";
    return 0;
  } catch (const std::exception& e) {
    log << "cool failed: " << e.what() << "\n";
    return 1;
  }
}

struct SweepPointResult {
  double value = 0;
  double t3d_uk = 0, t3d_err_uk = 0;
  double dp_x = 0, dp_x_err = 0;
  double dp_z = 0, dp_z_err = 0;
  bool ok = false;
  std::string error;
};

/// One sweep point: an ensemble per axis (k_eff per axis), combined into the
/// 3-D temperature estimate.
inline SweepPointResult run_sweep_point(const RunConfig& base, double value,
                                        int threads) {
  SweepPointResult out;
  out.value = value;
  try {
    const RunConfig point = with_swept_value(base, base.sweep_parameter, value);
    double dp[2] = {0, 0}, dp_err[2] = {0, 0};
    for (std::size_t a = 0; a < base.sweep_axes.size(); ++a) {
      RunConfig axis_cfg = point;
      axis_cfg.lasers.k_eff = base.sweep_axes[a].second;
      const EnsembleResult res =
          run_ensemble(axis_cfg.trajectory(), axis_cfg.n_traj, threads);
      const bool is_x = base.sweep_axes[a].first == "x";
      dp[is_x ? 0 : 1] = res.final_delta_p();
      dp_err[is_x ? 0 : 1] = res.final_delta_p_err();
    }
    out.dp_x = dp[0];
    out.dp_x_err = dp_err[0];
    out.dp_z = dp[1];
    out.dp_z_err = dp_err[1];
    out.t3d_uk = temperature_3d(out.dp_x, out.dp_z);
    // linear error propagation through T = C (2 dpx^2 + dpz^2)
    const double c = constants::temp_per_hbark_sq * 1e6;
    out.t3d_err_uk = std::sqrt(
        std::pow(4.0 * c * out.dp_x * out.dp_x_err, 2) +
        std::pow(2.0 * c * out.dp_z * out.dp_z_err, 2));
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

/// sweep: one pair of ensembles per swept value, aggregated CSV sorted by
/// value; failed points are kept in the log and produce a nonzero exit.
inline int cmd_sweep(const RunConfig& cfg, int threads = 0,
                     std::ostream& log = std::cerr) {
  const fs::path dir = cfg.output_dir;
  RunManifest manifest(dir, serialize_config(cfg), cfg.seed);
  std::vector<double> values = cfg.sweep_values;
  std::sort(values.begin(), values.end());
  std::vector<SweepPointResult> points;
  const int n_threads = resolve_threads(threads);
  for (double v : values) {
    points.push_back(run_sweep_point(cfg, v, n_threads));
    const auto& p = points.back();
    if (p.ok)
      log << "sweep " << cfg.sweep_parameter << "=" << v
          << ": T3d = " << p.t3d_uk << " uK (dp_x " << p.dp_x << ", dp_z "
          << p.dp_z << ")\n";
    else
      log << "sweep " << cfg.sweep_parameter << "=" << v
          << " FAILED: " << p.error << "\n";
  }
  std::vector<double> col_v, col_t, col_te, col_x, col_xe, col_z, col_ze;
  for (const auto& p : points) {
    if (!p.ok) continue;
    col_v.push_back(p.value);
    col_t.push_back(p.t3d_uk);
    col_te.push_back(p.t3d_err_uk);
    col_x.push_back(p.dp_x);
    col_xe.push_back(p.dp_x_err);
    col_z.push_back(p.dp_z);
    col_ze.push_back(p.dp_z_err);
  }
  const fs::path file = dir / "sweep.csv";
  write_csv(file, {{"swept_value", &col_v},
                   {"T3d_uK", &col_t},
                   {"T3d_err_uK", &col_te},
                   {"delta_p_x_hbark", &col_x},
                   {"delta_p_x_err", &col_xe},
                   {"delta_p_z_hbark", &col_z},
                   {"delta_p_z_err", &col_ze}});
  manifest.add_output(file);
  manifest.finalize();
  const std::size_t failed = points.size() - col_v.size();
  if (failed > 0) {
    log << "sweep: " << failed << " of " << points.size()
        << " points failed\n";
    return 1;
  }
  return 0;
}

/// eit: synthesize (or read) a spectrum, derive the error signal, fit two
/// Lorentzians; emits spectrum.csv, error_signal.csv, fit.json.
inline int cmd_eit(const RunConfig& cfg, int /*threads*/ = 0,
                   std::ostream& log = std::cerr) {
  const fs::path dir = cfg.output_dir;
  RunManifest manifest(dir, serialize_config(cfg), cfg.seed);
  try {
    EITSpectrum spec;
    if (!cfg.eit.input_spectrum.empty()) {
      read_two_column_csv(cfg.eit.input_spectrum, spec.detuning_hz,
                          spec.absorption);
      spec.params = cfg.eit.params;
      spec.validate();
    } else {
      std::vector<double> grid(std::size_t(cfg.eit.n_points));
      for (int i = 0; i < cfg.eit.n_points; ++i)
        grid[std::size_t(i)] =
            cfg.eit.delta_min_hz + (cfg.eit.delta_max_hz - cfg.eit.delta_min_hz) *
                                       i / (cfg.eit.n_points - 1);
      spec = eit_spectrum(cfg.eit.params, grid);
    }
    const fs::path spec_file = dir / "spectrum.csv";
    write_csv(spec_file,
              {{"detuning_hz", &spec.detuning_hz}, {"value", &spec.absorption}});
    manifest.add_output(spec_file);

    double cal = cfg.eit.calibration_v;
    if (cfg.eit.target_slope_v_per_hz != 0.0)
      cal = calibrate_to_slope(spec, cfg.eit.f_mod_hz,
                               cfg.eit.target_slope_v_per_hz);
    const ErrorSignal err = error_signal(spec, cfg.eit.f_mod_hz, cal);
    const fs::path err_file = dir / "error_signal.csv";
    write_csv(err_file,
              {{"detuning_hz", &err.detuning_hz}, {"value", &err.signal_v}});
    manifest.add_output(err_file);

    const TwoLorentzianFit fit = fit_two_lorentzians(spec);
    Json report;
    report["converged"] = fit.converged;
    report["eit_linewidth_hz"] = fit.eit_linewidth;
    report["lorentzians"] = Json::array(
        {Json{{"center_hz", fit.center1},
              {"fwhm_hz", fit.fwhm1},
              {"amplitude", fit.amplitude1}},
         Json{{"center_hz", fit.center2},
              {"fwhm_hz", fit.fwhm2},
              {"amplitude", fit.amplitude2}}});
    report["offset"] = fit.offset;
    report["uncertainties"] = std::vector<double>(
        fit.uncertainties.data(),
        fit.uncertainties.data() + fit.uncertainties.size());
    report["residual_norm"] = fit.residual_norm;
    report["secondary_significant"] = fit.secondary_significant;
    report["calibration_v_per_unit"] = cal;
    report["slope_at_zero_v_per_hz"] = err.slope_at_zero;
    report["capture_range_hz"] = err.capture_range;
    const fs::path fit_file = dir / "fit.json";
    std::ofstream(fit_file, std::ios::binary) << report.dump(2) << "\n";
    manifest.add_output(fit_file);
    manifest.finalize();
    if (!fit.converged) {
      log << "eit: fit did not converge; best-so-far parameters reported\n";
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    log << "eit failed: " << e.what() << "\n";
    return 1;
  }
}

/// tof: Gaussian fit per frame, weighted temperature regression, JSON report
/// with the per-frame width table.
inline int cmd_tof(const RunConfig& cfg, int /*threads*/ = 0,
                   std::ostream& log = std::cerr) {
  const fs::path dir = cfg.output_dir;
  RunManifest manifest(dir, serialize_config(cfg), cfg.seed);
  try {
    if (cfg.tof.frames_manifest.empty())
      throw ConfigError("tof.frames_manifest is required");
    const auto frames = read_frames_manifest(cfg.tof.frames_manifest);
    if (frames.size() < 3)
      throw ConfigError("need at least 3 frames for thermometry");

    WidthSeries series;
    Json table = Json::array();
    for (const auto& fr : frames) {
      CloudProfile prof;
      read_two_column_csv(fr.path, prof.positions_m, prof.counts);
      prof.t_expansion_s = fr.time_s;
      const GaussianFit g = fit_gaussian(prof);
      series.times_s.push_back(fr.time_s);
      series.sigma_m.push_back(g.sigma);
      series.sigma_err_m.push_back(g.sigma_err);
      table.push_back(Json{{"time_s", fr.time_s},
                           {"path", fr.path.filename().string()},
                           {"sigma_m", g.sigma},
                           {"sigma_err_m", g.sigma_err},
                           {"converged", g.converged}});
    }
    const TemperatureFit fit = fit_temperature(series, cfg.tof.mass_kg);
    Json report;
    report["temperature_K"] = fit.temperature_k;
    report["temperature_err_K"] = fit.temperature_err_k;
    report["sigma0_m"] = fit.sigma0_m;
    report["sigma0_err_m"] = fit.sigma0_err_m;
    report["unphysical"] = fit.unphysical;
    report["residuals_m2"] = fit.residuals_m2;
    report["frames"] = table;
    const fs::path report_file = dir / "report.json";
    std::ofstream(report_file, std::ios::binary) << report.dump(2) << "\n";
    manifest.add_output(report_file);
    manifest.finalize();
    log << "tof: T = " << fit.temperature_k * 1e6 << " +- "
        << fit.temperature_err_k * 1e6 << " uK\n";
    return fit.unphysical ? 1 : 0;
  } catch (const std::exception& e) {
    log << "tof failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace graymol
