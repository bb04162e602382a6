#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <memory>

#include "graymol/constants.hpp"
#include "graymol/hamiltonian.hpp"
#include "graymol/krylov.hpp"
#include "graymol/rng.hpp"
#include "graymol/split_step.hpp"
#include "graymol/state.hpp"

namespace graymol {

/// Projected 1-D recoil distribution of a spontaneously emitted photon:
/// f(u) = 3/4 (1 - u^2) for pi light, f(u) = 3/8 (1 + u^2) for sigma light,
/// with u = cos(theta) in [-1, 1].
inline double recoil_pdf(int q, double u) {
  if (std::abs(u) > 1.0) return 0.0;
  return q == 0 ? 0.75 * (1.0 - u * u) : 0.375 * (1.0 + u * u);
}

/// Inverse-CDF sample of u = cos(theta) for the distribution above.
inline double sample_recoil_projection(int q, Rng& rng) {
  const double f = rng.uniform();
  if (q == 0) {
    // solve u^3 - 3u + (4F - 2) = 0, root in [-1, 1]
    const double c = 4.0 * f - 2.0;
    return 2.0 * std::cos(std::acos(-0.5 * c) / 3.0 + 4.0 * constants::pi / 3.0);
  }
  // solve u^3 + 3u - (8F - 4) = 0
  return 2.0 * std::sinh(std::asinh(4.0 * f - 2.0) / 3.0);
}

/// Momentum shift, in grid points, imparted by a spontaneously emitted photon
/// of polarization q. The full photon momentum (hbar k) is projected onto the
/// model axis and expressed on the k_eff-scaled grid; rounding is to the
/// nearest grid point with ties toward zero.
inline int sample_recoil(int q, Rng& rng, double p_step, double k_eff) {
  const double u = sample_recoil_projection(q, rng);
  const double shift = -u / (k_eff * p_step);
  const double a = std::abs(shift);
  double r = std::floor(a);
  const double frac = a - r;
  if (frac > 0.5) r += 1.0;  // frac == 0.5 rounds toward zero
  return int(shift < 0.0 ? -r : r);
}

/// Brownian phase tracking the Raman-laser beat note; the increment variance
/// 2*pi*Gamma_R*dt yields a Lorentzian beat spectrum of FWHM Gamma_R (Hz).
/// Gamma_R = 0 is a strict no-op.
inline double advance_raman_phase(double phase, double gamma_r_hz, double dt_s,
                                  Rng& rng) {
  if (gamma_r_hz == 0.0) return phase;
  if (gamma_r_hz < 0.0) throw std::invalid_argument("Gamma_R must be >= 0");
  phase += std::sqrt(2.0 * constants::pi * gamma_r_hz * dt_s) * rng.normal();
  return std::remainder(phase, 2.0 * constants::pi);
}

/// Applies the selected jump channel: project onto |g><e|, imprint the
/// sampled photon recoil, renormalize. Returns norm lost to off-grid recoil.
inline double apply_jump_channel(const HamiltonianModel& m, StateVector& psi,
                                 const JumpChannel& ch, int shift_points) {
  Eigen::VectorXcd next = Eigen::VectorXcd::Zero(m.dim);
  double lost = 0.0;
  for (int ip = 0; ip < m.n_p; ++ip) {
    const std::complex<double> a = psi.amplitudes[m.state_index(ch.e_level, ip)];
    if (a == std::complex<double>(0.0, 0.0)) continue;
    const int ip_new = ip + shift_points;
    if (ip_new < 0 || ip_new >= m.n_p)
      lost += std::norm(a);
    else
      next[m.state_index(ch.g_level, ip_new)] = a;
  }
  psi.amplitudes.swap(next);
  psi.renormalize();
  return lost;
}

/// Quantum jump: selects a decay channel with probability |L_j psi|^2
/// (normalized), applies it with a recoil kick sampled for the channel's
/// polarization. Precondition: nonzero excited population.
inline const JumpChannel& apply_jump(const HamiltonianModel& m,
                                     StateVector& psi, Rng& rng,
                                     double* lost_norm = nullptr) {
  std::vector<double> weights(m.jumps.size());
  double total = 0.0;
  for (std::size_t j = 0; j < m.jumps.size(); ++j) {
    const auto& ch = m.jumps[j];
    const double pop = level_population(m, psi.amplitudes, ch.e_level);
    weights[j] = ch.amplitude * ch.amplitude * pop;
    total += weights[j];
  }
  if (!(total > 0.0))
    throw std::logic_error("apply_jump called with zero excited population");
  const double r = rng.uniform() * total;
  std::size_t pick = weights.size() - 1;
  double acc = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    acc += weights[j];
    if (r < acc) {
      pick = j;
      break;
    }
  }
  const JumpChannel& ch = m.jumps[pick];
  const int shift = m.recoil_enabled
                        ? sample_recoil(ch.q, rng, m.grid.p_step, m.k_eff)
                        : 0;
  const double lost = apply_jump_channel(m, psi, ch, shift);
  if (lost_norm) *lost_norm += lost;
  return ch;
}

struct StepOutcome {
  bool jumped = false;
  double p_jump = 0.0;  ///< 1 - |psi(t+dt)|^2 before the branch
};

/// The jump decision shared by both propagation paths: compares the norm
/// decay against a uniform draw and either renormalizes or forces a jump.
inline StepOutcome jump_branch(const HamiltonianModel& m, StateVector& psi,
                               Rng& rng, double* lost_norm) {
  const double n2 = psi.amplitudes.squaredNorm();
  if (!std::isfinite(n2) || n2 <= 0.0)
    throw std::runtime_error("propagated state norm non-finite");
  StepOutcome out;
  out.p_jump = 1.0 - n2;
  const double r = rng.uniform_open();
  if (out.p_jump < r) {
    psi.amplitudes /= std::sqrt(n2);
    psi.norm_sq = 1.0;
  } else {
    apply_jump(m, psi, rng, lost_norm);
    out.jumped = true;
  }
  return out;
}

/// One WFMC step: non-unitary propagation by exp(-i H_nh dt) in a Krylov
/// basis, then the jump decision. Either branch leaves psi normalized.
inline StepOutcome evolve_step(const HamiltonianModel& m, StateVector& psi,
                               double dt_s, Rng& rng, KrylovPropagator& prop,
                               std::complex<double> raman_phase = {1.0, 0.0},
                               double* lost_norm = nullptr) {
  struct OpView {
    const HamiltonianModel* m;
    std::complex<double> phase;
    void apply(const std::complex<double>* x, std::complex<double>* y) const {
      m->apply_nh(phase, x, y);
    }
  };
  static thread_local Eigen::VectorXcd scratch;
  scratch.resize(m.dim);
  prop.apply(OpView{&m, raman_phase}, std::complex<double>(0.0, -dt_s),
             psi.amplitudes, scratch);
  psi.amplitudes.swap(scratch);
  return jump_branch(m, psi, rng, lost_norm);
}

enum class PropagatorKind { automatic, krylov, split_step };

/// Per-run configuration of the stochastic evolution.
struct TrajectoryConfig {
  LaserParams lasers{};
  SimGrid grid{};
  double b_z = 0.0;          ///< tesla
  double gamma_r_hz = 0.0;   ///< Raman beat-note FWHM (Hz)
  double dt = 0.005;         ///< step, units of 1/Gamma
  double t_final = 1e-3;     ///< s
  std::uint64_t seed = 1;
  int record_stride = 4000;  ///< steps between snapshots
  double initial_dp = 12.0;  ///< initial momentum std, absolute hbar*k
  int initial_level = -1;    ///< fixed ground level, or -1 for uniform draw
  bool record_histograms = true;
  PropagatorKind propagator = PropagatorKind::automatic;

  void validate() const {
    lasers.validate();
    grid.validate();
    if (!(dt > 0.0) || dt > 0.1 + 1e-12)
      throw std::invalid_argument("dt must satisfy 0 < dt*Gamma <= 0.1");
    if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be > 0");
    if (record_stride < 1)
      throw std::invalid_argument("record_stride must be >= 1");
    if (!(initial_dp >= 0.0))
      throw std::invalid_argument("initial_dp must be >= 0");
  }

  double dt_seconds() const { return dt / constants::gamma; }
  int n_steps() const {
    return int(std::llround(std::ceil(t_final / dt_seconds() - 1e-9)));
  }
};

struct TrajectoryResult {
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<double> mean_p;   // absolute hbar*k
  std::vector<double> mean_p2;  // absolute (hbar*k)^2
  std::vector<double> f2;
  std::vector<double> edge;
  std::vector<Eigen::VectorXd> histograms;
  double max_edge = 0.0;
  double lost_norm = 0.0;
  long n_jumps = 0;
  bool leak_flagged = false;
  bool aborted = false;
  std::string abort_reason;
};

/// Boundary population (or clipped recoil norm) beyond which a trajectory is
/// flagged as leaking.
inline constexpr double leak_threshold = 1e-3;

/// Runs one trajectory from a given initial state. Deterministic function of
/// the rng stream handed in; snapshots every record_stride steps starting at
/// t = 0.
inline TrajectoryResult run_trajectory(const TrajectoryConfig& cfg,
                                       const HamiltonianModel& model,
                                       StateVector psi, Rng rng,
                                       std::uint64_t seed_label = 0) {
  cfg.validate();
  TrajectoryResult res;
  res.seed = seed_label;
  const double dt_s = cfg.dt_seconds();
  const int n_steps = cfg.n_steps();
  const bool use_split =
      cfg.propagator == PropagatorKind::split_step ||
      (cfg.propagator == PropagatorKind::automatic &&
       SplitStepPropagator::supports(model));
  std::unique_ptr<SplitStepPropagator> split;
  std::unique_ptr<KrylovPropagator> krylov;
  if (use_split)
    split = std::make_unique<SplitStepPropagator>(model, dt_s);
  else
    krylov = std::make_unique<KrylovPropagator>(model.dim);
  double phase = 0.0;

  auto snapshot = [&](int step) {
    res.times.push_back(step * dt_s);
    double m1 = 0.0, m2 = 0.0;
    momentum_moments(model, psi.amplitudes, m1, m2);
    res.mean_p.push_back(m1);
    res.mean_p2.push_back(m2);
    res.f2.push_back(f2_population(model, psi.amplitudes));
    const double e = edge_population(model, psi.amplitudes);
    res.edge.push_back(e);
    res.max_edge = std::max(res.max_edge, e);
    if (cfg.record_histograms)
      res.histograms.push_back(momentum_histogram(model, psi.amplitudes));
  };

  snapshot(0);
  try {
    if (use_split) split->load(psi.amplitudes);
    for (int step = 1; step <= n_steps; ++step) {
      phase = advance_raman_phase(phase, cfg.gamma_r_hz, dt_s, rng);
      const std::complex<double> ph{std::cos(phase), std::sin(phase)};
      bool jumped = false;
      if (use_split) {
        const auto norms = split->step(ph);
        const double n2 = norms.norm_sq;
        res.lost_norm += norms.clipped;
        if (!std::isfinite(n2) || n2 <= 1e-12)
          throw std::runtime_error(
              "wave packet left the momentum grid (state norm degenerate)");
        const double p_jump = 1.0 - n2 - norms.clipped;
        const double r = rng.uniform_open();
        if (p_jump < r) {
          split->scale(1.0 / std::sqrt(n2));
        } else {
          split->store(psi.amplitudes);
          apply_jump(model, psi, rng, &res.lost_norm);
          split->load(psi.amplitudes);
          jumped = true;
        }
      } else {
        jumped = evolve_step(model, psi, dt_s, rng, *krylov, ph,
                             &res.lost_norm)
                     .jumped;
      }
      if (jumped) ++res.n_jumps;
      if (step % cfg.record_stride == 0 || step == n_steps) {
        if (use_split) {
          split->store(psi.amplitudes);
          psi.norm_sq = 1.0;
        }
        snapshot(step);
      }
    }
  } catch (const std::exception& e) {
    res.aborted = true;
    res.abort_reason = e.what();
  }
  res.leak_flagged = res.max_edge > leak_threshold;
  return res;
}

/// Draws the ensemble initial state: momentum from a Gaussian of std
/// initial_dp (absolute hbar*k), redrawn until it fits two recoil units
/// inside the grid; internal state a uniformly random (or fixed) pure ground
/// sublevel.
inline StateVector draw_initial_state(const TrajectoryConfig& cfg,
                                      const HamiltonianModel& model,
                                      Rng& rng) {
  int level = cfg.initial_level;
  if (level < 0)
    level = int(rng.uniform() * n_ground) % n_ground;
  const double sigma_grid = cfg.initial_dp / model.k_eff;  // grid recoil units
  double v = 0.0;
  do {
    v = sigma_grid * rng.normal();
  } while (std::abs(v) > cfg.grid.p_max - 2.0);
  const int ip = int(std::lround((v + cfg.grid.p_max) / cfg.grid.p_step));
  return StateVector::pure(model, level, std::min(std::max(ip, 0), model.n_p - 1));
}

struct EnsembleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Trajectory-averaged observables with statistical errors.
struct EnsembleResult {
  std::vector<double> times;
  std::vector<double> delta_p, delta_p_err;  // absolute hbar*k
  std::vector<double> f2, f2_err;
  std::vector<double> leak_t;
  std::vector<Eigen::VectorXd> histograms;
  double boundary_leak = 0.0;
  int n_trajectories = 0;
  std::vector<std::uint64_t> flagged_seeds;

  double final_delta_p() const { return delta_p.empty() ? 0.0 : delta_p.back(); }
  double final_delta_p_err() const {
    return delta_p_err.empty() ? 0.0 : delta_p_err.back();
  }
  double final_f2() const { return f2.empty() ? 0.0 : f2.back(); }
};

/// Runs n_traj independent trajectories with per-trajectory seeds derived
/// from hash(config.seed, index) and reduces in fixed index order, so the
/// result is a pure function of (config, n_traj) regardless of worker count.
inline EnsembleResult run_ensemble(const TrajectoryConfig& cfg, int n_traj,
                                   int n_threads = 1,
                                   const HamiltonianModel* prebuilt = nullptr) {
  cfg.validate();
  if (n_traj < 1) throw std::invalid_argument("n_traj must be >= 1");
  if (n_threads < 1) n_threads = 1;

  HamiltonianModel local;
  if (!prebuilt) {
    local = build_hamiltonian(build_level_scheme(), cfg.lasers, cfg.grid,
                              cfg.b_z);
    prebuilt = &local;
  }
  const HamiltonianModel& model = *prebuilt;

  std::vector<TrajectoryResult> results{std::size_t(n_traj)};
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_traj) return;
      const std::uint64_t s = derive_seed(cfg.seed, std::uint64_t(i));
      Rng rng(s);
      StateVector psi = draw_initial_state(cfg, model, rng);
      results[std::size_t(i)] =
          run_trajectory(cfg, model, std::move(psi), std::move(rng), s);
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<std::uint64_t> aborted;
  std::string first_reason;
  for (const auto& r : results)
    if (r.aborted) {
      if (aborted.empty()) first_reason = r.abort_reason;
      aborted.push_back(r.seed);
    }
  if (!aborted.empty()) {
    std::string msg = "ensemble failed; aborted trajectory seeds:";
    for (auto s : aborted) msg += " " + std::to_string(s);
    msg += " (" + first_reason + ")";
    throw EnsembleError(msg);
  }

  EnsembleResult out;
  out.n_trajectories = n_traj;
  out.times = results[0].times;
  const std::size_t n_snap = out.times.size();
  const double n = double(n_traj);
  out.delta_p.resize(n_snap);
  out.delta_p_err.resize(n_snap);
  out.f2.resize(n_snap);
  out.f2_err.resize(n_snap);
  out.leak_t.resize(n_snap);
  const bool with_hist = !results[0].histograms.empty();
  if (with_hist)
    out.histograms.assign(n_snap,
                          Eigen::VectorXd::Zero(results[0].histograms[0].size()));

  for (std::size_t k = 0; k < n_snap; ++k) {
    double s1 = 0, s2 = 0, sf = 0, sf2 = 0, s22 = 0, sl = 0;
    for (const auto& r : results) {
      s1 += r.mean_p[k];
      s2 += r.mean_p2[k];
      s22 += r.mean_p2[k] * r.mean_p2[k];
      sf += r.f2[k];
      sf2 += r.f2[k] * r.f2[k];
      sl += r.edge[k];
      if (with_hist) out.histograms[k] += r.histograms[k];
    }
    const double m1 = s1 / n, m2 = s2 / n, f2m = sf / n;
    const double var_p = std::max(0.0, m2 - m1 * m1);
    out.delta_p[k] = std::sqrt(var_p);
    const double var_m2 =
        n > 1 ? std::max(0.0, (s22 - n * m2 * m2) / (n - 1.0)) : 0.0;
    out.delta_p_err[k] =
        out.delta_p[k] > 0 ? std::sqrt(var_m2 / n) / (2.0 * out.delta_p[k]) : 0.0;
    out.f2[k] = f2m;
    const double var_f =
        n > 1 ? std::max(0.0, (sf2 - n * f2m * f2m) / (n - 1.0)) : 0.0;
    out.f2_err[k] = std::sqrt(var_f / n);
    out.leak_t[k] = sl / n;
    out.boundary_leak = std::max(out.boundary_leak, out.leak_t[k]);
    if (with_hist) out.histograms[k] /= n;
  }
  for (const auto& r : results)
    if (r.leak_flagged) out.flagged_seeds.push_back(r.seed);
  return out;
}

/// 3-D temperature estimate in microkelvin from the two 1-D momentum widths
/// (absolute hbar*k units), T = C (2 dp_x^2 + dp_z^2).
inline double temperature_3d(double dp_x, double dp_z) {
  if (dp_x < 0.0 || dp_z < 0.0)
    throw std::invalid_argument("momentum widths must be >= 0");
  return constants::temp_per_hbark_sq * (2.0 * dp_x * dp_x + dp_z * dp_z) * 1e6;
}

}  // namespace graymol
