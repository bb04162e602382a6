// Throwaway micro-profile (not part of the build).
#include <chrono>
#include <cstdio>

#include "graymol/wfmc.hpp"

using namespace graymol;
using clk = std::chrono::steady_clock;

int main() {
  TrajectoryConfig cfg;
  cfg.lasers.Omega = 2.03;
  cfg.lasers.omega = std::sqrt(0.1) * 2.03;
  cfg.lasers.Delta = 2.0;
  cfg.dt = 0.01;
  const auto model =
      build_hamiltonian(build_level_scheme(), cfg.lasers, cfg.grid, 0.0);

  Rng rng(1);
  Eigen::VectorXcd x(model.dim), y(model.dim);
  for (int i = 0; i < model.dim; ++i) x[i] = {rng.normal(), rng.normal()};
  x /= x.norm();

  // raw matvec
  auto t0 = clk::now();
  const int n_mv = 20000;
  for (int k = 0; k < n_mv; ++k)
    model.apply_nh({1.0, 0.0}, x.data(), y.data());
  double mv = std::chrono::duration<double>(clk::now() - t0).count() / n_mv;
  std::printf("matvec: %.3f us\n", mv * 1e6);

  // full krylov apply
  KrylovPropagator prop(model.dim);
  Eigen::VectorXcd out(model.dim);
  const double dt_s = cfg.dt_seconds();
  t0 = clk::now();
  const int n_ap = 500;
  for (int k = 0; k < n_ap; ++k)
    prop.apply(
        [&] {
          struct OpView {
            const HamiltonianModel* m;
            void apply(const std::complex<double>* a,
                       std::complex<double>* b) const {
              m->apply_nh({1.0, 0.0}, a, b);
            }
          };
          return OpView{&model};
        }(),
        {0.0, -dt_s}, x, out);
  double ap = std::chrono::duration<double>(clk::now() - t0).count() / n_ap;
  std::printf("krylov apply: %.3f us  (basis %d)\n", ap * 1e6,
              prop.last_basis_size());
  return 0;
}
