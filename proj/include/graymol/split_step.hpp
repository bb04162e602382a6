#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "graymol/constants.hpp"
#include "graymol/hamiltonian.hpp"

namespace graymol {

/// Fast fixed-step propagator for the full gray-molasses model, used by the
/// trajectory driver in place of per-step Krylov iteration.
///
/// Two factorizations are available, both built on the fact that the
/// internal Hamiltonian (hyperfine + detunings + Zeeman + decay + couplings
/// at zero kick) is momentum-independent, so its exponential is a single
/// 24x24 matrix applied to every momentum column:
///
///  - counter-rotating beams (the +beam drives only q, the -beam only -q):
///    conjugating by the per-level momentum shift s_l = q * kick * m_l
///    removes every kick exactly, and one Strang split against the kinetic
///    term remains;
///  - general real polarization amplitudes: each beam's coupling block is
///    gauged by shifting the excited levels by -+kick, and the two beams are
///    composed in a symmetric (B+/2, B-, B+/2) split, adding an O(dt^2)
///    cross-beam commutator error on top of the kinetic split.
///
/// Raman phase noise enters as a diagonal gauge on the F=1 levels composed
/// into the staging passes, so the matrix work is identical with and without
/// noise. The working state lives in a real struct-of-arrays panel (momentum
/// rows, level re/im columns): staging passes are contiguous vector code and
/// each internal factor is one real matrix product.
class SplitStepPropagator {
 public:
  SplitStepPropagator(const HamiltonianModel& m, double dt_s)
      : n_lev_(m.n_lev), n_p_(m.n_p), kick_(m.kick_points) {
    if (m.n_lev != n_levels || m.n_p < 2)
      throw std::invalid_argument("split-step propagator needs the full model");
    const int sigma = gauge_sign(m);
    exact_gauge_ = sigma != 0;

    shift_.assign(std::size_t(n_lev_), 0);
    is_f1_.resize(std::size_t(n_lev_));
    for (int l = 0; l < n_lev_; ++l) {
      const Level& lv = levels()[std::size_t(l)];
      if (exact_gauge_) shift_[std::size_t(l)] = -sigma * kick_ * lv.m;
      is_f1_[std::size_t(l)] = (!lv.excited && lv.f == 1) ? 1 : 0;
    }

    // momentum-independent internal diagonal (decay folded in)
    Eigen::VectorXcd d_int(n_lev_);
    for (int l = 0; l < n_lev_; ++l) {
      const int s = m.state_index(l, m.n_p / 2);
      const double p = m.grid.momentum(m.n_p / 2) * m.k_eff;
      d_int[l] = m.diag[s] - p * p * constants::omega_recoil -
                 std::complex<double>(0.0, 0.5) * m.decay_diag[s];
    }
    auto beam_coupling = [&](int beam) {
      Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(n_lev_, n_lev_);
      const double g = constants::gamma;
      for (int q = -1; q <= 1; ++q) {
        const double pol_amp = m.lasers.pol.amp(beam, q);
        if (pol_amp == 0.0) continue;
        for (int gi = 0; gi < n_ground; ++gi) {
          const Level& glv = levels()[std::size_t(gi)];
          const double rabi = (glv.f == 2 ? m.lasers.Omega : m.lasers.omega) * g;
          if (rabi == 0.0) continue;
          for (int el = n_ground; el < n_levels; ++el) {
            const double c = dipole_coefficient(gi, el, q);
            if (c == 0.0) continue;
            w(el, gi) += 0.5 * rabi * pol_amp * c;
            w(gi, el) += 0.5 * rabi * pol_amp * c;
          }
        }
      }
      return w;
    };

    const std::complex<double> mi(0.0, -1.0);
    if (exact_gauge_) {
      Eigen::MatrixXcd h0 = beam_coupling(+1) + beam_coupling(-1);
      h0 += d_int.asDiagonal();
      factors_.push_back(embed((mi * dt_s * h0).exp()));
    } else {
      Eigen::MatrixXcd h_plus = beam_coupling(+1);
      h_plus += (0.5 * d_int).asDiagonal();
      Eigen::MatrixXcd h_minus = beam_coupling(-1);
      h_minus += (0.5 * d_int).asDiagonal();
      factors_.push_back(embed((mi * 0.5 * dt_s * h_plus).exp()));
      factors_.push_back(embed((mi * dt_s * h_minus).exp()));
    }

    kin_re_.resize(std::size_t(n_p_));
    kin_im_.resize(std::size_t(n_p_));
    for (int ip = 0; ip < n_p_; ++ip) {
      const double p = m.grid.momentum(ip) * m.k_eff;
      const double w = -0.5 * dt_s * p * p * constants::omega_recoil;
      kin_re_[std::size_t(ip)] = std::cos(w);
      kin_im_[std::size_t(ip)] = std::sin(w);
    }
    panel_.setZero(n_p_, 2 * n_lev_);
    work_.setZero(n_p_, 2 * n_lev_);
    work2_.setZero(n_p_, 2 * n_lev_);
  }

  /// 0 unless each beam drives a single spherical component and the two
  /// beams drive opposite components (the exact-gauge case); else -+1.
  static int gauge_sign(const HamiltonianModel& m) {
    auto single_q = [](const std::array<double, 3>& a) {
      int q = 9;
      for (int i = 0; i < 3; ++i)
        if (a[std::size_t(i)] != 0.0) q = (q == 9) ? i - 1 : 9;
      return q;  // 9 when zero or mixed
    };
    const int qp = single_q(m.lasers.pol.amp_plus);
    const int qm = single_q(m.lasers.pol.amp_minus);
    if (qp == 9 || qm == 9 || qp != -qm || qp == 0) return 0;
    return -qp;
  }

  static bool supports(const HamiltonianModel& m) {
    return m.n_lev == n_levels && m.n_p >= 2;
  }

  bool exact_gauge() const { return exact_gauge_; }

  void load(const Eigen::VectorXcd& psi) {
    for (int l = 0; l < n_lev_; ++l)
      for (int p = 0; p < n_p_; ++p) {
        const std::complex<double> a = psi[l * n_p_ + p];
        panel_(p, l) = a.real();
        panel_(p, l + n_lev_) = a.imag();
      }
  }

  void store(Eigen::VectorXcd& psi) const {
    psi.resize(std::size_t(n_lev_) * std::size_t(n_p_));
    for (int l = 0; l < n_lev_; ++l)
      for (int p = 0; p < n_p_; ++p)
        psi[l * n_p_ + p] = {panel_(p, l), panel_(p, l + n_lev_)};
  }

  struct StepNorms {
    double norm_sq = 0.0;  ///< squared norm after the step
    double clipped = 0.0;  ///< norm lost to shifts crossing the grid edge
  };

  /// One coherent step panel <- exp(-i H_nh(phase) dt) panel. The squared
  /// norm decays by the excited-state decay; amplitude pushed over the grid
  /// edge by the shift gauges is reported separately so the caller does not
  /// mistake it for jump probability.
  StepNorms step(std::complex<double> raman_phase) {
    StepNorms out;
    if (exact_gauge_) {
      out.clipped += stage_pass(panel_, work_, raman_phase, true);
      work2_.noalias() = work_ * factors_[0];
      out.clipped += stage_pass(work2_, panel_, std::conj(raman_phase), false);
    } else {
      out.clipped += stage_pass(panel_, work_, raman_phase, true);
      out.clipped += shift_excited(work_, work2_, +kick_);
      work_.noalias() = work2_ * factors_[0];
      out.clipped += shift_excited(work_, work2_, -2 * kick_);
      work_.noalias() = work2_ * factors_[1];
      out.clipped += shift_excited(work_, work2_, +2 * kick_);
      work_.noalias() = work2_ * factors_[0];
      out.clipped += shift_excited(work_, work2_, -kick_);
      out.clipped += stage_pass(work2_, panel_, std::conj(raman_phase), false);
    }
    out.norm_sq = panel_.squaredNorm();
    return out;
  }

  void scale(double factor) { panel_ *= factor; }

  double norm_sq() const { return panel_.squaredNorm(); }

 private:
  static Eigen::MatrixXd embed(const Eigen::MatrixXcd& e) {
    const int n = int(e.rows());
    Eigen::MatrixXd r(2 * n, 2 * n);
    r.topLeftCorner(n, n) = e.real().transpose();
    r.topRightCorner(n, n) = e.imag().transpose();
    r.bottomLeftCorner(n, n) = -e.imag().transpose();
    r.bottomRightCorner(n, n) = e.real().transpose();
    return r;
  }

  // forward: out(p, l) = in(p + s_l, l) * kin(p + s_l) * gauge_l
  // backward: out(p, l) = in(p - s_l, l) * kin(p) * gauge_l
  // returns the squared norm clipped at the edges
  double stage_pass(const Eigen::MatrixXd& in, Eigen::MatrixXd& out,
                    std::complex<double> gauge, bool forward) {
    double clipped = 0.0;
    for (int l = 0; l < n_lev_; ++l) {
      const int s = forward ? shift_[std::size_t(l)] : -shift_[std::size_t(l)];
      const double gr = is_f1_[std::size_t(l)] ? gauge.real() : 1.0;
      const double gi = is_f1_[std::size_t(l)] ? gauge.imag() : 0.0;
      const double* sr = in.col(l).data();
      const double* si = in.col(l + n_lev_).data();
      double* dr = out.col(l).data();
      double* di = out.col(l + n_lev_).data();
      const int lo = std::max(0, -s);
      const int hi = std::min(n_p_, n_p_ - s);
      for (int p = 0; p < lo; ++p) dr[p] = di[p] = 0.0;
      for (int p = lo; p < hi; ++p) {
        const int k = forward ? p + s : p;
        const double cr =
            kin_re_[std::size_t(k)] * gr - kin_im_[std::size_t(k)] * gi;
        const double ci =
            kin_re_[std::size_t(k)] * gi + kin_im_[std::size_t(k)] * gr;
        const double a = sr[p + s];
        const double b = si[p + s];
        dr[p] = a * cr - b * ci;
        di[p] = a * ci + b * cr;
      }
      for (int p = hi; p < n_p_; ++p) dr[p] = di[p] = 0.0;
      if (s != 0) {
        // rows of the input that no destination row consumed are clipped
        const int read_lo = lo + s, read_hi = hi + s;
        for (int p = 0; p < read_lo; ++p)
          clipped += sr[p] * sr[p] + si[p] * si[p];
        for (int p = read_hi; p < n_p_; ++p)
          clipped += sr[p] * sr[p] + si[p] * si[p];
      }
    }
    return clipped;
  }

  /// out = in with excited-level columns shifted by s momentum rows; ground
  /// columns copied unchanged. Returns the squared norm clipped at the edges.
  double shift_excited(const Eigen::MatrixXd& in, Eigen::MatrixXd& out, int s) {
    double clipped = 0.0;
    for (int l = 0; l < n_lev_; ++l) {
      for (int half = 0; half < 2; ++half) {
        const int col = l + half * n_lev_;
        const double* src = in.col(col).data();
        double* dst = out.col(col).data();
        if (l < n_ground || s == 0) {
          std::copy(src, src + n_p_, dst);
          continue;
        }
        // dst[p] = src[p - s]
        const int lo = std::max(0, s);
        const int hi = std::min(n_p_, n_p_ + s);
        for (int p = 0; p < lo; ++p) dst[p] = 0.0;
        for (int p = lo; p < hi; ++p) dst[p] = src[p - s];
        for (int p = hi; p < n_p_; ++p) dst[p] = 0.0;
        const int read_lo = lo - s, read_hi = hi - s;
        for (int p = 0; p < read_lo; ++p) clipped += src[p] * src[p];
        for (int p = read_hi; p < n_p_; ++p) clipped += src[p] * src[p];
      }
    }
    return clipped;
  }

  int n_lev_;
  int n_p_;
  int kick_;
  bool exact_gauge_;
  std::vector<Eigen::MatrixXd> factors_;
  std::vector<int> shift_;
  std::vector<std::uint8_t> is_f1_;
  std::vector<double> kin_re_, kin_im_;
  Eigen::MatrixXd panel_, work_, work2_;
};

}  // namespace graymol
