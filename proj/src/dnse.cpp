#include "bosde/dnse.hpp"

#include <cmath>
#include <limits>

namespace bosde::dnse {

void DnseParams::validate() const {
  if (N < 1) throw ValidationError("dnse.N must be positive");
  if (n < 1) throw ValidationError("dnse.n must be positive");
  if (!(c >= 0)) throw ValidationError("dnse.c must be >= 0");
  if (!(epsilon > 0)) throw ValidationError("dnse.epsilon must be > 0");
  if (H0.rows() != N || H0.cols() != N) throw DimensionError("dnse.H0 must be N x N");
  require_hermitian(H0, "system.H0");
}

ComplexMatrix<double> ring_hopping(int N) {
  ComplexMatrix<double> h = ComplexMatrix<double>::Zero(N, N);
  if (N < 2) return h;
  for (int j = 0; j < N; ++j) {
    const int k = (j + 1) % N;
    h(j, k) = 1.0;
    h(k, j) = 1.0;
  }
  return h;
}

SystemSpec build_dnse_spec(const DnseParams& p) {
  p.validate();
  SystemSpec s;
  s.H0 = p.H0;
  s.tensor = InteractionTensor::kronecker(p.N);
  s.n = p.n;
  const double root_c = std::sqrt(p.c);
  for (int m = 0; m < p.N; ++m) {
    ComplexMatrix<double> x = ComplexMatrix<double>::Zero(p.N, p.N);
    x(m, m) = root_c;
    s.Xs.push_back(std::move(x));
  }
  return s;
}

Eigen::Matrix2d dnse_block(cplx zj, double c, int n) {
  const cplx z2 = zj * zj;
  Eigen::Matrix2d b;
  b(0, 0) = 0.25 * z2.imag() + c * zj.imag() * zj.imag();
  b(0, 1) = -0.25 * z2.real() - 0.5 * c * z2.imag();
  b(1, 0) = b(0, 1);
  b(1, 1) = -0.25 * z2.imag() + c * zj.real() * zj.real();
  return b / static_cast<double>(n);
}

std::pair<double, double> lambda_pm(cplx zj, double c, int n) {
  const double pre = std::norm(zj) / (4.0 * n);
  const double root = std::sqrt(1.0 + 4.0 * c * c);
  // 2c - root loses precision for large c; use the conjugate form.
  return {pre * (2.0 * c + root), -pre / (2.0 * c + root)};
}

double c_for_error(double t, double epsilon) {
  if (!(epsilon > 0)) throw ValidationError("c_for_error: epsilon must be > 0");
  if (!(t >= 0)) throw ValidationError("c_for_error: t must be >= 0");
  return 3.0 * t / (8.0 * epsilon);
}

double alpha_upper_bound(double c, int n) {
  if (!(c > 0)) throw ValidationError("alpha_upper_bound: unbounded for c = 0");
  if (n < 1) throw ValidationError("alpha_upper_bound: n must be positive");
  return 1.0 / (16.0 * n * c);
}

double trace_error_bound(double t, double c) {
  if (!(c > 0)) return std::numeric_limits<double>::infinity();
  return 3.0 * t / (8.0 * c);
}

}  // namespace bosde::dnse
