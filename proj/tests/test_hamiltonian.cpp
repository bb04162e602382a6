#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>

#include "graymol/constants.hpp"
#include "graymol/hamiltonian.hpp"

using namespace graymol;

namespace {

LaserParams fig5_point() {
  LaserParams p;
  p.Delta = 2.0;
  p.Omega = 2.03;
  p.omega = std::sqrt(0.1) * 2.03;
  p.delta = 0.0;
  return p;
}

}  // namespace

TEST_CASE("Hamiltonian is bitwise Hermitian") {
  const SimGrid grid{4.0, 1.0 / 3.0};
  LaserParams p = fig5_point();
  p.delta = -0.1;
  const auto m = build_hamiltonian(build_level_scheme(), p, grid, 5e-5);
  const Eigen::MatrixXcd h = m.assemble_dense();
  for (int i = 0; i < m.dim; ++i)
    for (int j = 0; j <= i; ++j) {
      CHECK(h(i, j).real() == h(j, i).real());
      CHECK(h(i, j).imag() == -h(j, i).imag());
    }
}

TEST_CASE("jump completeness: sum L^d L = Gamma x excited projector") {
  const SimGrid grid{2.0, 1.0 / 3.0};
  const auto m =
      build_hamiltonian(build_level_scheme(), fig5_point(), grid, 0.0);
  const Eigen::VectorXd d = m.jump_completeness_diag();
  for (int l = 0; l < m.n_lev; ++l)
    for (int ip = 0; ip < m.n_p; ++ip) {
      const double expected =
          m.level_is_excited[std::size_t(l)] ? constants::gamma : 0.0;
      CHECK(std::abs(d[m.state_index(l, ip)] - expected) <=
            1e-12 * constants::gamma);
    }
}

TEST_CASE("coherent couplings connect only p and p +- k_eff hbar k") {
  const SimGrid grid{3.0, 1.0 / 3.0};
  const auto m =
      build_hamiltonian(build_level_scheme(), fig5_point(), grid, 0.0);
  auto scan = [&](const Csr& mat) {
    mat.for_each([&](int r, int c, double) {
      const int lr = r / m.n_p, ipr = r % m.n_p;
      const int lc = c / m.n_p, ipc = c % m.n_p;
      CHECK(std::abs(ipr - ipc) == m.kick_points);
      CHECK(levels()[std::size_t(lr)].excited !=
            levels()[std::size_t(lc)].excited);
    });
  };
  scan(m.coupling);
  scan(m.raman_up);
  scan(m.raman_dn);
  CHECK(m.coupling.nnz() > 0);
  CHECK(m.raman_up.nnz() > 0);
}

TEST_CASE("decoupled limit: lasers off leaves a purely kinetic ground diagonal") {
  LaserParams p;
  p.Omega = 0.0;
  p.omega = 0.0;
  p.delta = 0.0;
  const SimGrid grid{2.0, 1.0 / 3.0};
  const auto m = build_hamiltonian(build_level_scheme(), p, grid, 0.0);
  CHECK(m.coupling.nnz() == 0);
  CHECK(m.raman_up.nnz() == 0);
  const Eigen::MatrixXcd h = m.assemble_dense();
  for (int i = 0; i < m.dim; ++i)
    for (int j = 0; j < m.dim; ++j)
      if (i != j) CHECK(h(i, j) == std::complex<double>(0.0, 0.0));
  for (int l = 0; l < n_ground; ++l)
    for (int ip = 0; ip < m.n_p; ++ip) {
      const double pk = grid.momentum(ip);
      CHECK(m.diag[m.state_index(l, ip)] ==
            doctest::Approx(pk * pk * constants::omega_recoil)
                .epsilon(1e-14));
    }
}

TEST_CASE("the Fig. 5 operating point builds on the full grid") {
  const SimGrid grid{30.0, 1.0 / 3.0};
  CHECK(grid.n_p() == 181);
  const auto m =
      build_hamiltonian(build_level_scheme(), fig5_point(), grid, 0.0);
  CHECK(m.dim == 24 * 181);
  CHECK(m.kick_points == 3);
  CHECK(m.jumps.size() > 0);
}

TEST_CASE("grid too small for a laser kick is refused") {
  const SimGrid grid{2.0 / 3.0, 1.0 / 3.0};
  CHECK_THROWS_AS(
      (void)build_hamiltonian(build_level_scheme(), fig5_point(), grid, 0.0),
      std::invalid_argument);
}

TEST_CASE("field beyond 1 mT is refused") {
  const SimGrid grid{2.0, 1.0 / 3.0};
  CHECK_THROWS_AS(
      (void)build_hamiltonian(build_level_scheme(), fig5_point(), grid, 2e-3),
      std::invalid_argument);
}

TEST_CASE("at B=0 the spectrum is invariant under m -> -m with q -> -q") {
  const SimGrid grid{1.0, 1.0 / 3.0};
  LaserParams p = fig5_point();
  p.delta = 0.05;
  p.pol = BeamPolarization::counter_rotating();
  const auto m1 = build_hamiltonian(build_level_scheme(), p, grid, 0.0);
  LaserParams flipped = p;
  std::swap(flipped.pol.amp_plus, flipped.pol.amp_minus);
  const auto m2 = build_hamiltonian(build_level_scheme(), flipped, grid, 0.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es1(m1.assemble_dense());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(m2.assemble_dense());
  const double scale = es1.eigenvalues().cwiseAbs().maxCoeff();
  for (int i = 0; i < m1.dim; ++i)
    CHECK(std::abs(es1.eigenvalues()[i] - es2.eigenvalues()[i]) <=
          1e-12 * scale);
}

TEST_CASE("k_eff scales kinetic energy and absolute momenta") {
  LaserParams p = fig5_point();
  p.k_eff = std::cos(20.0 * constants::pi / 180.0);
  const SimGrid grid{2.0, 1.0 / 3.0};
  const auto m = build_hamiltonian(build_level_scheme(), p, grid, 0.0);
  const int ip = m.n_p - 1;
  CHECK(m.momentum_abs(ip) == doctest::Approx(2.0 * p.k_eff).epsilon(1e-14));
  const double expected =
      (2.0 * p.k_eff) * (2.0 * p.k_eff) * constants::omega_recoil;
  CHECK(m.diag[m.state_index(0, ip)] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("delta sign flag mirrors the F=2 manifold shift") {
  LaserParams p = fig5_point();
  p.delta = 0.1;
  const SimGrid grid{1.0, 1.0 / 3.0};
  const auto plus = build_hamiltonian(build_level_scheme(), p, grid, 0.0);
  p.delta_sign = -1;
  const auto minus = build_hamiltonian(build_level_scheme(), p, grid, 0.0);
  const int idx = plus.state_index(level_index(2, 0, false), 0);
  const int idx_f1 = plus.state_index(level_index(1, 0, false), 0);
  CHECK(plus.diag[idx] - minus.diag[idx] ==
        doctest::Approx(2.0 * 0.1 * constants::gamma).epsilon(1e-12));
  CHECK(plus.diag[idx_f1] == minus.diag[idx_f1]);
}
