// Throwaway split-step validation + benchmark (not part of the build).
#include <chrono>
#include <cstdio>

#include "graymol/krylov.hpp"
#include "graymol/split_step.hpp"
#include "graymol/wfmc.hpp"

using namespace graymol;
using clk = std::chrono::steady_clock;
using cplx = std::complex<double>;

int main(int argc, char** argv) {
  TrajectoryConfig cfg;
  cfg.lasers.Omega = 2.03;
  cfg.lasers.omega = std::sqrt(0.1) * 2.03;
  cfg.lasers.Delta = 2.0;
  cfg.dt = argc > 1 ? std::atof(argv[1]) : 0.1;
  const auto model =
      build_hamiltonian(build_level_scheme(), cfg.lasers, cfg.grid, 0.0);
  const double dt_s = cfg.dt_seconds();

  // accuracy vs Krylov on the full operator, one step, no jump branch
  Rng rng(3);
  Eigen::VectorXcd psi(model.dim);
  for (int i = 0; i < model.dim; ++i) {
    psi[i] = 0.0;
  }
  // localized wave packet: ground levels, Gaussian in p
  for (int l = 0; l < n_ground; ++l)
    for (int ip = 60; ip <= 120; ++ip) {
      double p = cfg.grid.momentum(ip);
      psi[model.state_index(l, ip)] =
          cplx(rng.normal(), rng.normal()) * std::exp(-p * p / (2 * 8.0 * 8.0));
    }
  psi /= psi.norm();

  struct OpView {
    const HamiltonianModel* m;
    void apply(const cplx* x, cplx* y) const { m->apply_nh({1.0, 0.0}, x, y); }
  };
  KrylovPropagator kry(model.dim, 40, 1e-13);
  Eigen::VectorXcd ref(model.dim);
  kry.apply(OpView{&model}, cplx(0.0, -dt_s), psi, ref);

  SplitStepPropagator ss(model, dt_s);
  Eigen::VectorXcd trial = psi;
  ss.step(trial, {1.0, 0.0});
  std::printf("dt=%.3f/Gamma  one-step |split - krylov|_inf = %.3e  l2 = %.3e\n",
              cfg.dt, (trial - ref).cwiseAbs().maxCoeff(), (trial - ref).norm());

  // error accumulation over 200 steps (pure coherent, renormalized)
  Eigen::VectorXcd a = psi, b = psi;
  for (int k = 0; k < 200; ++k) {
    kry.apply(OpView{&model}, cplx(0.0, -dt_s), a, ref);
    a = ref;
    ss.step(b, {1.0, 0.0});
  }
  std::printf("200 steps: |split - krylov|_l2 = %.3e (norms %.6f %.6f)\n",
              (a - b).norm(), a.norm(), b.norm());

  // speed
  const int n_bench = 20000;
  auto t0 = clk::now();
  for (int k = 0; k < n_bench; ++k) ss.step(b, {1.0, 0.0});
  double per = std::chrono::duration<double>(clk::now() - t0).count() / n_bench;
  std::printf("split step: %.2f us/step -> %.1f s per 1 ms trajectory at dt=%.3f\n",
              per * 1e6, per * (1e-3 / dt_s), cfg.dt);
  return 0;
}
