// Throwaway gemm experiments (not part of the build).
#include <Eigen/Dense>
#include <chrono>
#include <complex>
#include <cstdio>

using clk = std::chrono::steady_clock;
using cplx = std::complex<double>;

template <typename F>
double bench(F&& f, int n = 20000) {
  auto t0 = clk::now();
  for (int k = 0; k < n; ++k) f();
  return std::chrono::duration<double>(clk::now() - t0).count() / n * 1e6;
}

int main() {
  const int L = 24, P = 181;
  Eigen::MatrixXcd e0 = Eigen::MatrixXcd::Random(L, L);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(L, P), b(L, P);
  std::printf("complex gemm 24x24 * 24x181: %.2f us\n",
              bench([&] { b.noalias() = e0 * a; }));

  // real embedding: [Re -Im; Im Re] (48x48) times 48x181
  Eigen::MatrixXd er(2 * L, 2 * L);
  er.topLeftCorner(L, L) = e0.real();
  er.topRightCorner(L, L) = -e0.imag();
  er.bottomLeftCorner(L, L) = e0.imag();
  er.bottomRightCorner(L, L) = e0.real();
  Eigen::MatrixXd ar = Eigen::MatrixXd::Random(2 * L, P), br(2 * L, P);
  std::printf("real embedded dgemm 48x48 * 48x181: %.2f us\n",
              bench([&] { br.noalias() = er * ar; }));

  Eigen::MatrixXf erf = er.cast<float>();
  Eigen::MatrixXf arf = ar.cast<float>(), brf(2 * L, P);
  std::printf("float embedded sgemm 48x48 * 48x181: %.2f us\n",
              bench([&] { brf.noalias() = erf * arf; }));

  // hand-rolled SoA fp64 kernel: out_re/out_im columns via FMA over l
  Eigen::MatrixXd ere = e0.real(), eim = e0.imag();
  Eigen::MatrixXd in_re = Eigen::MatrixXd::Random(L, P), in_im = Eigen::MatrixXd::Random(L, P);
  Eigen::MatrixXd out_re(L, P), out_im(L, P);
  auto kernel = [&] {
    for (int p = 0; p < P; ++p) {
      double vr[L], vi[L];
      for (int l = 0; l < L; ++l) {
        vr[l] = in_re(l, p);
        vi[l] = in_im(l, p);
      }
      Eigen::VectorXd accr = Eigen::VectorXd::Zero(L), acci = Eigen::VectorXd::Zero(L);
      for (int l = 0; l < L; ++l) {
        accr += ere.col(l) * vr[l] - eim.col(l) * vi[l];
        acci += ere.col(l) * vi[l] + eim.col(l) * vr[l];
      }
      out_re.col(p) = accr;
      out_im.col(p) = acci;
    }
  };
  std::printf("naive SoA kernel: %.2f us\n", bench(kernel, 3000));
  std::printf("checksum %.3f %.3f %.3f %.3f\n", b(0, 0).real(), br(0, 0),
              double(brf(0, 0)), out_re(0, 0));
  return 0;
}
