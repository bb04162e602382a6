// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Heavy ensembles are shared
// between criteria; all seeds are fixed so the suite is deterministic.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "graymol/config.hpp"
#include "graymol/dark_states.hpp"
#include "graymol/eit.hpp"
#include "graymol/harness.hpp"
#include "graymol/tof.hpp"
#include "graymol/validate.hpp"
#include "graymol/wfmc.hpp"

using namespace graymol;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail, double seconds) {
  std::printf("[%s] criterion %2d: %-28s %s  (%.1f s)\n",
              pass ? "PASS" : "FAIL", number, name.c_str(), detail.c_str(),
              seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

struct Timer {
  clock_type::time_point t0 = clock_type::now();
  double elapsed() const {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
  }
};

constexpr double kAcceptDt = 0.1;        // units of 1/Gamma
constexpr std::uint64_t kSeed = 20250808;
const double kCos20 = std::cos(20.0 * constants::pi / 180.0);

TrajectoryConfig ensemble_config(double k_eff, double delta, double b_z,
                                 double gamma_r_hz, double t_final,
                                 std::uint64_t seed_salt = 0) {
  TrajectoryConfig cfg;
  cfg.lasers = reference_operating_point();
  cfg.lasers.delta = delta;
  cfg.lasers.k_eff = k_eff;
  cfg.b_z = b_z;
  cfg.gamma_r_hz = gamma_r_hz;
  cfg.dt = kAcceptDt;
  cfg.t_final = t_final;
  cfg.seed = kSeed + seed_salt;
  cfg.record_stride = int(std::lround(10e-6 / cfg.dt_seconds()));
  cfg.record_histograms = false;
  return cfg;
}

double t3d_from(const EnsembleResult& x, const EnsembleResult& z) {
  return temperature_3d(x.final_delta_p(), z.final_delta_p());
}

}  // namespace

int main() {
  std::printf("acceptance suite: dt = %.2f/Gamma, base seed %llu\n", kAcceptDt,
              static_cast<unsigned long long>(kSeed));

  // ---- criterion 1: dark-state algebra --------------------------------
  {
    Timer t;
    bool pass = true;
    double worst_resid = 0, worst_weight = 0;
    for (double alpha : {0.1, std::sqrt(0.1), 1.0 / 3.0, 1.0, 3.0}) {
      LaserParams p = reference_operating_point();
      p.omega = alpha * p.Omega;
      const auto basis = dark_states(p);
      if (basis.empty()) {
        pass = false;
        continue;
      }
      // the analytic member projected onto the returned null space
      const Eigen::VectorXd psi = analytic_dark_state(alpha);
      Eigen::VectorXd proj = Eigen::VectorXd::Zero(psi.size());
      for (const auto& b : basis) proj += b.dot(psi) * b;
      if (proj.norm() < 0.9) pass = false;  // psi_D must live in the span
      proj /= proj.norm();
      worst_resid = std::max(worst_resid, coupling_residual(p, proj));
      worst_weight =
          std::max(worst_weight, std::abs(f2_weight(proj) -
                                          dark_state_f2_population(alpha)));
      worst_resid = std::max(worst_resid, (proj - psi).norm());
    }
    pass = pass && worst_resid < 1e-12 && worst_weight < 1e-10;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "residual %.1e, weight dev %.1e",
                  worst_resid, worst_weight);
    report(1, "dark-state algebra", pass && t.elapsed() < 1.0, buf,
           t.elapsed());
  }

  // ---- criterion 2: Lambda-system oracle equivalence ------------------
  {
    Timer t;
    const auto s = validate_lambda_oracle(500, 20.0);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "worst |z| = %.2f",
                  s.metrics["worst_z"].get<double>());
    report(2, "master-equation equivalence", s.pass, buf, t.elapsed());
  }

  // ---- shared heavy ensembles ------------------------------------------
  std::printf("... running shared ensembles (z and x axes, 1 ms, 100 traj)\n");
  std::fflush(stdout);
  EnsembleResult ens_z, ens_x;
  {
    auto cfg = ensemble_config(1.0, 0.0, 0.0, 0.0, 1e-3);
    ens_z = run_ensemble(cfg, 100, 1);
    cfg = ensemble_config(kCos20, 0.0, 0.0, 0.0, 1e-3);
    ens_x = run_ensemble(cfg, 100, 1);
  }

  // ---- criterion 3: final widths and 3-D temperature ------------------
  {
    Timer t;
    const double dpz = ens_z.final_delta_p();
    const double dpx = ens_x.final_delta_p();
    const double t3d = temperature_3d(dpx, dpz);
    const bool pass_z = std::abs(dpz - 3.60) <= 0.10 * 3.60;
    const bool pass_x = std::abs(dpx - 4.15) <= 0.10 * 4.15;
    const bool pass_t = std::abs(t3d - 8.5) <= 0.15 * 8.5;

    // smoke variant: 50 trajectories, 300 us, must reach <= 7 hbar k
    auto smoke_cfg = ensemble_config(1.0, 0.0, 0.0, 0.0, 300e-6, 7);
    const auto smoke = run_ensemble(smoke_cfg, 50, 1);
    const bool pass_smoke = smoke.final_delta_p() <= 7.0;

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "dp_z %.2f (3.60+-10%%), dp_x %.2f (4.15+-10%%), T3d %.2f "
                  "uK (8.5+-15%%), smoke %.2f <= 7",
                  dpz, dpx, t3d, smoke.final_delta_p());
    report(3, "final momentum widths", pass_z && pass_x && pass_t && pass_smoke,
           buf, t.elapsed());
  }

  // ---- criterion 4: cooling timescales --------------------------------
  {
    Timer t;
    auto width_at = [](const EnsembleResult& r, double time_s) {
      double best = r.delta_p.back();
      double best_dt = 1e9;
      for (std::size_t k = 0; k < r.times.size(); ++k)
        if (std::abs(r.times[k] - time_s) < best_dt) {
          best_dt = std::abs(r.times[k] - time_s);
          best = r.delta_p[k];
        }
      return best;
    };
    const double dpx_500 = width_at(ens_x, 500e-6);
    const bool pass_x = dpx_500 >= 3.3 && dpx_500 <= 5.0;
    double first_reach = 1e9;
    for (std::size_t k = 0; k < ens_z.times.size(); ++k)
      if (ens_z.delta_p[k] <= 4.3) {
        first_reach = ens_z.times[k];
        break;
      }
    const bool pass_z = first_reach >= 700e-6 && first_reach <= 1e-3;
    // desk property: ensemble width non-increasing after 50 us within error
    bool monotone = true;
    for (std::size_t k = 1; k < ens_x.times.size(); ++k) {
      if (ens_x.times[k - 1] < 50e-6) continue;
      const double rise = ens_x.delta_p[k] - ens_x.delta_p[k - 1];
      const double err =
          3.0 * (ens_x.delta_p_err[k] + ens_x.delta_p_err[k - 1]);
      if (rise > err + 1e-12) monotone = false;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "dp_x(500us) %.2f in [3.3,5.0], z reaches 4.3 at %.0f us "
                  "(>=700), monotone %d",
                  dpx_500, first_reach * 1e6, int(monotone));
    report(4, "cooling rate asymmetry", pass_x && pass_z && monotone, buf,
           t.elapsed());
  }

  // ---- criterion 5: Raman linewidth panel ------------------------------
  {
    Timer t;
    const double t0_3d = t3d_from(ens_x, ens_z);
    auto point = [&](double gamma_r, std::uint64_t salt) {
      auto cz = ensemble_config(1.0, 0.0, 0.0, gamma_r, 1e-3, salt);
      auto cx = ensemble_config(kCos20, 0.0, 0.0, gamma_r, 1e-3, salt + 1);
      const auto rz = run_ensemble(cz, 50, 1);
      const auto rx = run_ensemble(cx, 50, 1);
      return t3d_from(rx, rz);
    };
    const double t_50k = point(5e4, 11);
    const double t_1m = point(1e6, 13);
    const bool pass_lock = std::abs(t_50k - t0_3d) <= 0.10 * t0_3d;
    const bool pass_free = std::abs(t_1m - 17.0) <= 0.25 * 17.0;
    const bool pass_mono = t_50k >= t0_3d - 0.10 * t0_3d && t_1m > t_50k;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "T(0) %.2f, T(50kHz) %.2f (+-10%%), T(1MHz) %.2f uK "
                  "(17+-25%%)",
                  t0_3d, t_50k, t_1m);
    report(5, "linewidth robustness", pass_lock && pass_free && pass_mono, buf,
           t.elapsed());
  }

  // ---- criterion 6: Raman-detuning panel --------------------------------
  {
    Timer t;
    auto point = [&](double delta, double b_z, std::uint64_t salt) {
      auto cz = ensemble_config(1.0, delta, b_z, 0.0, 1e-3, salt);
      auto cx = ensemble_config(kCos20, delta, b_z, 0.0, 1e-3, salt + 1);
      const auto rz = run_ensemble(cz, 50, 1);
      const auto rx = run_ensemble(cx, 50, 1);
      return t3d_from(rx, rz);
    };
    std::map<double, double> temp;
    for (auto [delta, salt] : std::vector<std::pair<double, std::uint64_t>>{
             {-0.2, 21}, {-0.1, 25}, {-0.07, 27}, {0.07, 29}, {0.15, 31}})
      temp[delta] = point(delta, 0.0, salt);
    temp[0.0] = t3d_from(ens_x, ens_z);
    const double t_b100 = point(-0.1, 1e-5, 41);

    double t_min = 1e9;
    for (auto& [d, v] : temp) t_min = std::min(t_min, v);
    const bool pass_min = t_min <= 5.5;
    const bool pass_dip = std::abs(temp[-0.1] - 4.9) <= 0.25 * 4.9;
    const double t_opt = std::min(temp[-0.07], temp[0.07]);
    const bool pass_opt = std::abs(t_opt - 3.88) <= 0.25 * 3.88;
    const bool pass_b = t_b100 >= 1.5 * temp[-0.1];
    const bool pass_edge = t_min < temp[-0.2];
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "min %.2f<=5.5, T(-0.1) %.2f (4.9+-25%%), opt %.2f "
                  "(3.88+-25%%), T(100mG)/T(0) %.2f>=1.5",
                  t_min, temp[-0.1], t_opt, t_b100 / temp[-0.1]);
    report(6, "detuning/field panel",
           pass_min && pass_dip && pass_opt && pass_b && pass_edge, buf,
           t.elapsed());
  }

  // ---- criterion 7: dark-state population tracking ----------------------
  {
    Timer t;
    double worst = 0.0;
    for (auto [alpha, salt] : std::vector<std::pair<double, std::uint64_t>>{
             {0.15, 51}, {0.25, 53}, {std::sqrt(0.1), 55}, {0.45, 57},
             {0.6, 59}}) {
      auto cfg = ensemble_config(1.0, 0.0, 0.0, 0.0, 500e-6, salt);
      cfg.lasers.Omega = 1.8;
      cfg.lasers.omega = alpha * 1.8;
      const auto res = run_ensemble(cfg, 50, 1);
      const double dev =
          std::abs(res.final_f2() - dark_state_f2_population(alpha));
      worst = std::max(worst, dev);
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "max |F2 - formula| = %.3f (<= 0.07)",
                  worst);
    report(7, "F=2 population vs ratio", worst <= 0.07, buf, t.elapsed());
  }

  // ---- criterion 8: EIT synthesis and fit ------------------------------
  {
    Timer t;
    bool pass = true;
    std::string detail;
    // synthetic two-Lorentzian round trip, narrow 2.08 MHz
    auto make = [](double noise, Rng* rng) {
      EITSpectrum s;
      const int n = 801;
      for (int i = 0; i < n; ++i) {
        const double x = -3e7 + 6e7 * i / (n - 1);
        s.detuning_hz.push_back(x);
        double y = 0.05 + detail::lorentz(x, 0.0, 6e6, 1.0) +
                   detail::lorentz(x, 0.0, 2.08e6, -0.8);
        if (noise > 0.0) y += noise * rng->normal();
        s.absorption.push_back(y);
      }
      return s;
    };
    const auto clean_fit = fit_two_lorentzians(make(0.0, nullptr));
    const double clean_dev = std::abs(clean_fit.eit_linewidth - 2.08e6) / 2.08e6;
    if (!(clean_fit.converged && clean_dev < 0.01)) pass = false;
    Rng rng(4242);
    double worst_noisy = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
      const auto fit = fit_two_lorentzians(make(0.01, &rng));
      worst_noisy = std::max(
          worst_noisy, std::abs(fit.eit_linewidth - 2.08e6) / 2.08e6);
    }
    if (worst_noisy > 0.05) pass = false;

    // physics pipeline: zero crossing and exact slope calibration
    EITParams p;
    p.Omega = 0.9;
    p.omega = 0.15;
    p.Delta = 0.0;
    p.gamma_deph = 2.0 * constants::pi * 2e4;
    std::vector<double> grid;
    for (int i = 0; i < 1201; ++i) grid.push_back(-3e7 + 6e7 * i / 1200.0);
    const auto spec = eit_spectrum(p, grid);
    const double cal = calibrate_to_slope(spec, 1e7, 2.5e-8);
    const auto err = error_signal(spec, 1e7, cal);
    const std::size_t mid = err.detuning_hz.size() / 2;
    double max_sig = 0.0;
    for (double v : err.signal_v) max_sig = std::max(max_sig, std::abs(v));
    if (std::abs(err.detuning_hz[mid]) > 1.0 ||
        std::abs(err.signal_v[mid]) > 1e-6 * max_sig)
      pass = false;
    if (std::abs(err.slope_at_zero - 2.5e-8) > 1e-20) pass = false;

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "clean dev %.2e (<1%%), noisy max %.2e (<5%%), slope %.3e "
                  "V/Hz",
                  clean_dev, worst_noisy, err.slope_at_zero);
    report(8, "EIT lock round trip", pass, buf, t.elapsed());
  }

  // ---- criterion 9: TOF thermometry -------------------------------------
  {
    Timer t;
    bool pass = true;
    // noiseless recovery to 1e-6
    Rng rng(31415);
    WidthSeries series;
    for (int i = 1; i <= 10; ++i) {
      const double ts = i * 1e-3;
      const auto prof = synthesize_cloud(6.8e-6, 0.5e-3, ts,
                                         constants::mass_rb87, 0.0, rng);
      const auto g = fit_gaussian(prof);
      series.times_s.push_back(ts);
      series.sigma_m.push_back(g.sigma);
    }
    const auto exact = fit_temperature(series, constants::mass_rb87);
    if (std::abs(exact.temperature_k - 6.8e-6) / 6.8e-6 > 1e-6) pass = false;

    // Monte Carlo around the quoted uncertainty scale: 10 frames with 3%
    // profile noise per draw; 68% of draws within +-0.9 uK
    int within = 0;
    const int draws = 1000;
    for (int d = 0; d < draws; ++d) {
      WidthSeries s;
      for (int i = 1; i <= 10; ++i) {
        const double ts = i * 1e-3;
        const auto prof = synthesize_cloud(6.8e-6, 0.5e-3, ts,
                                           constants::mass_rb87, 0.03, rng);
        const auto g = fit_gaussian(prof);
        s.times_s.push_back(ts);
        s.sigma_m.push_back(g.sigma);
        s.sigma_err_m.push_back(g.sigma_err);
      }
      const auto fit = fit_temperature(s, constants::mass_rb87);
      if (std::abs(fit.temperature_k - 6.8e-6) <= 0.9e-6) ++within;
    }
    const double frac = double(within) / draws;
    if (frac < 0.68) pass = false;
    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "noiseless rel err %.1e, coverage %.3f (>= 0.68)",
                  std::abs(exact.temperature_k - 6.8e-6) / 6.8e-6, frac);
    report(9, "TOF thermometry", pass, buf, t.elapsed());
  }

  // ---- criterion 10: byte-identical reruns ------------------------------
  {
    Timer t;
    RunConfig cfg;
    cfg.mode = RunMode::cool;
    cfg.lasers = reference_operating_point();
    cfg.grid = SimGrid{12.0, 1.0 / 3.0};
    cfg.n_traj = 4;
    cfg.dt = 0.1;
    cfg.t_final = 20e-6;
    cfg.record_stride = 800;
    cfg.initial_dp = 4.0;
    cfg.seed = kSeed;
    const fs::path base = fs::temp_directory_path() / "graymol_accept_det";
    fs::remove_all(base);
    auto run_to = [&](const std::string& sub, int threads) {
      RunConfig c = cfg;
      c.output_dir = (base / sub).string();
      std::ostringstream sink;
      return cmd_cool(c, threads, sink);
    };
    bool pass = run_to("a", 1) == 0 && run_to("b", 1) == 0 &&
                run_to("c", 3) == 0;
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    for (const char* f : {"series.csv", "histograms.csv"}) {
      const auto a = slurp(base / "a" / f);
      if (a.empty() || a != slurp(base / "b" / f) ||
          a != slurp(base / "c" / f))
        pass = false;
    }
    report(10, "deterministic outputs", pass, "cool x3 (threads 1,1,3)",
           t.elapsed());
  }

  // ---- supporting checks tied to the panels ----------------------------
  {
    Timer t;
    // boundary behavior at the evolution-figure operating point
    auto cfg = ensemble_config(kCos20, 0.0, 0.0, 0.0, 500e-6, 71);
    const auto model =
        build_hamiltonian(build_level_scheme(), cfg.lasers, cfg.grid, cfg.b_z);
    Rng rng(derive_seed(cfg.seed, 0));
    StateVector psi = draw_initial_state(cfg, model, rng);
    const auto traj =
        run_trajectory(cfg, model, std::move(psi), std::move(rng), 1);
    const bool pass = !traj.aborted && traj.max_edge < 1e-3;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "single-trajectory leak %.2e (< 1e-3)",
                  traj.max_edge);
    report(11, "boundary containment", pass, buf, t.elapsed());
  }
  {
    Timer t;
    const auto s = validate_delta_asymmetry(+1, 32, 800e-6);
    const auto flipped = validate_delta_asymmetry(-1, 6, 40e-6, 424242);
    const auto straight = validate_delta_asymmetry(+1, 6, 40e-6, 424242);
    const bool mirror =
        flipped.metrics["asymmetry"].get<double>() ==
        -straight.metrics["asymmetry"].get<double>();
    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "dp(-0.1)=%.2f < dp(+0.1)=%.2f, sign-flip mirror %d",
                  s.metrics["delta_p_at_minus_0p1"].get<double>(),
                  s.metrics["delta_p_at_plus_0p1"].get<double>(), int(mirror));
    report(12, "detuning sign convention", s.pass && mirror, buf, t.elapsed());
  }

  std::printf("%s: %d criterion(s) failed\n",
              g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures);
  return g_failures == 0 ? 0 : 1;
}
