#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "graymol/constants.hpp"

namespace graymol {

/// Dense density matrix for the master-equation oracle (small systems only).
struct DensityMatrix {
  Eigen::MatrixXcd rho;
  int dim = 0;

  static DensityMatrix pure(const Eigen::VectorXcd& psi) {
    DensityMatrix d;
    d.dim = int(psi.size());
    d.rho = psi * psi.adjoint();
    return d;
  }

  double trace_real() const { return rho.trace().real(); }

  double hermiticity_defect() const {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  }

  double min_eigenvalue() const {
    Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    return es.eigenvalues().minCoeff();
  }

  void check_valid(double tol_trace = 1e-6) const {
    if (rho.rows() != dim || rho.cols() != dim)
      throw std::invalid_argument("density matrix shape mismatch");
    if (std::abs(trace_real() - 1.0) > tol_trace)
      throw std::invalid_argument("density matrix trace != 1");
  }
};

/// Open quantum system: Hermitian Hamiltonian (rad/s) plus jump operators
/// with rates folded in; dephasing operators are kept separately for clarity
/// but enter the dissipator identically.
struct OpenSystem {
  Eigen::MatrixXcd h;
  std::vector<Eigen::MatrixXcd> jumps;
  std::vector<Eigen::MatrixXcd> dephasing;

  int dim() const { return int(h.rows()); }

  template <typename Fn>
  void for_each_lindblad(Fn&& fn) const {
    for (const auto& l : jumps) fn(l);
    for (const auto& l : dephasing) fn(l);
  }
};

/// Right-hand side of the Lindblad master equation:
/// drho/dt = -i[H,rho] - 1/2 sum {L^d L, rho} + sum L rho L^d.
inline Eigen::MatrixXcd lindblad_rhs(const DensityMatrix& rho,
                                     const OpenSystem& sys) {
  if (rho.rho.rows() != sys.h.rows())
    throw std::invalid_argument("lindblad_rhs: dimension mismatch");
  const std::complex<double> im(0.0, 1.0);
  Eigen::MatrixXcd d = -im * (sys.h * rho.rho - rho.rho * sys.h);
  sys.for_each_lindblad([&](const Eigen::MatrixXcd& l) {
    const Eigen::MatrixXcd ldl = l.adjoint() * l;
    d.noalias() += l * rho.rho * l.adjoint();
    d.noalias() -= 0.5 * (ldl * rho.rho + rho.rho * ldl);
  });
  return d;
}

struct IntegratorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Adaptive Dormand-Prince 4(5) integration of the master equation with
/// per-step tolerance 1e-9. The returned state is re-hermitized; trace and
/// positivity are preserved to the integration tolerance.
inline DensityMatrix evolve(const DensityMatrix& rho0, const OpenSystem& sys,
                            double t, double tol = 1e-9) {
  rho0.check_valid();
  if (t < 0.0) throw std::invalid_argument("evolve: negative duration");
  DensityMatrix state = rho0;
  if (t == 0.0) return state;

  // Dormand-Prince coefficients
  static const double c[] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static const double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
       -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
       11.0 / 84}};
  static const double b5[] = {35.0 / 384,      0.0,          500.0 / 1113,
                              125.0 / 192,     -2187.0 / 6784, 11.0 / 84,
                              0.0};
  static const double b4[] = {5179.0 / 57600,  0.0,           7571.0 / 16695,
                              393.0 / 640,     -92097.0 / 339200,
                              187.0 / 2100,    1.0 / 40};

  const int n = state.dim;
  std::vector<Eigen::MatrixXcd> k(7, Eigen::MatrixXcd::Zero(n, n));
  double time = 0.0;
  double h = std::min(t, 0.05 / constants::gamma);
  const double h_min = t * 1e-14;
  int rejects_in_a_row = 0;

  while (time < t) {
    h = std::min(h, t - time);
    if (h < h_min)
      throw IntegratorError("evolve: step size underflow at t = " +
                            std::to_string(time));
    DensityMatrix work;
    work.dim = n;
    for (int i = 0; i < 7; ++i) {
      work.rho = state.rho;
      for (int j = 0; j < i; ++j)
        if (a[i][j] != 0.0) work.rho.noalias() += (h * a[i][j]) * k[std::size_t(j)];
      k[std::size_t(i)] = lindblad_rhs(work, sys);
    }
    Eigen::MatrixXcd y5 = state.rho, err = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < 7; ++i) {
      if (b5[i] != 0.0) y5.noalias() += (h * b5[i]) * k[std::size_t(i)];
      const double db = b5[i] - b4[i];
      if (db != 0.0) err.noalias() += (h * db) * k[std::size_t(i)];
    }
    const double scale = tol * std::max(1.0, state.rho.cwiseAbs().maxCoeff());
    const double e = err.cwiseAbs().maxCoeff() / scale;
    if (e <= 1.0) {
      state.rho = std::move(y5);
      time += h;
      rejects_in_a_row = 0;
      h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(e, 1e-10), -0.2)));
    } else {
      h *= std::max(0.1, 0.9 * std::pow(e, -0.25));
      if (++rejects_in_a_row > 60)
        throw IntegratorError("evolve: repeated step rejection");
    }
  }
  state.rho = 0.5 * (state.rho + state.rho.adjoint().eval());
  return state;
}

struct SteadyStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Steady state via the null space of the vectorized Liouvillian (column-
/// stacking convention). Errors out unless the zero eigenspace is exactly
/// one-dimensional. Dense oracle: dimension capped at 32.
inline DensityMatrix steady_state(const OpenSystem& sys) {
  const int n = sys.dim();
  if (n > 32)
    throw std::invalid_argument("steady_state: dimension capped at 32");
  const int n2 = n * n;
  const std::complex<double> im(0.0, 1.0);
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);

  auto kron = [n](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
            a(i, j) * b;
    return out;
  };

  // vec(A X B) = (B^T kron A) vec(X)
  Eigen::MatrixXcd liou = -im * (kron(id, sys.h) - kron(sys.h.transpose(), id));
  sys.for_each_lindblad([&](const Eigen::MatrixXcd& l) {
    const Eigen::MatrixXcd ldl = l.adjoint() * l;
    liou += kron(l.conjugate(), l);
    liou -= 0.5 * kron(id, ldl);
    liou -= 0.5 * kron(ldl.transpose(), id);
  });

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(liou, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * std::max(1.0, sv(0));
  int zero_count = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) < tol) ++zero_count;
  if (zero_count != 1)
    throw SteadyStateError("steady_state: zero eigenspace dimension " +
                           std::to_string(zero_count) + ", expected 1");

  Eigen::VectorXcd v = svd.matrixV().col(n2 - 1);
  DensityMatrix out;
  out.dim = n;
  out.rho = Eigen::Map<Eigen::MatrixXcd>(v.data(), n, n);
  out.rho = 0.5 * (out.rho + out.rho.adjoint().eval());
  const double tr = out.rho.trace().real();
  if (std::abs(tr) < 1e-14)
    throw SteadyStateError("steady_state: traceless null vector");
  out.rho /= tr;
  return out;
}

/// Where the optional pure-dephasing operator acts in the Lambda model.
enum class DephasingPlacement { ground, excited };

/// Three-level Lambda system in the rotating frame: level 0 the ground leg
/// driven by Omega, level 1 the ground leg driven by omega (shifted by the
/// Raman detuning), level 2 the excited state at -Delta. Decay Gamma is
/// branched between the two grounds; gamma_deph (rate, 1/s) adds a projector
/// dephasing term. All detunings/Rabi frequencies in Gamma units.
inline OpenSystem lambda_system(double Omega, double omega, double Delta,
                                double delta, double gamma_deph = 0.0,
                                DephasingPlacement placement =
                                    DephasingPlacement::ground,
                                double branching_g0 = 0.5) {
  if (gamma_deph < 0.0) throw std::invalid_argument("gamma_deph must be >= 0");
  if (branching_g0 < 0.0 || branching_g0 > 1.0)
    throw std::invalid_argument("branching fraction must be in [0,1]");
  const double g = constants::gamma;
  OpenSystem sys;
  sys.h = Eigen::MatrixXcd::Zero(3, 3);
  sys.h(1, 1) = -delta * g;
  sys.h(2, 2) = -Delta * g;
  sys.h(0, 2) = sys.h(2, 0) = 0.5 * Omega * g;
  sys.h(1, 2) = sys.h(2, 1) = 0.5 * omega * g;

  Eigen::MatrixXcd l0 = Eigen::MatrixXcd::Zero(3, 3);
  l0(0, 2) = std::sqrt(g * branching_g0);
  Eigen::MatrixXcd l1 = Eigen::MatrixXcd::Zero(3, 3);
  l1(1, 2) = std::sqrt(g * (1.0 - branching_g0));
  sys.jumps = {l0, l1};

  if (gamma_deph > 0.0) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(3, 3);
    const int idx = placement == DephasingPlacement::ground ? 1 : 2;
    p(idx, idx) = std::sqrt(gamma_deph);
    sys.dephasing.push_back(p);
  }
  return sys;
}

}  // namespace graymol
