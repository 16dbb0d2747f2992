#include "bosde/diffusion.hpp"

#include <random>

namespace bosde {

ComplexMatrix<double> build_cancellation_X(const ModeVector& z, const ModeVector& w) {
  if (z.size() != w.size()) throw DimensionError("build_cancellation_X: z and w differ in length");
  if (std::abs(z.norm() - 1.0) > kUnitNormTol)
    throw PreconditionError("build_cancellation_X: z is not unit norm");
  const cplx overlap = z.dot(w);  // z^* . w
  if (std::abs(overlap.real()) > kUnitNormTol)
    throw PreconditionError("build_cancellation_X: Re(z^* . w) = " +
                            std::to_string(overlap.real()) + " is not zero");
  const cplx i(0, 1);
  const cplx wz = w.dot(z);  // w^* . z
  return i * w * z.adjoint() - i * z * w.adjoint() + i * wz * z * z.adjoint();
}

std::array<ComplexMatrix<double>, 3> pauli_matrices() {
  const cplx i(0, 1);
  ComplexMatrix<double> sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -i, i, 0;
  sz << 1, 0, 0, -1;
  return {sx, sy, sz};
}

RealMatrix<double> embedding_A(const ComplexMatrix<double>& x) {
  const Eigen::Index N = x.rows();
  RealMatrix<double> a(2 * N, 2 * N);
  a.topLeftCorner(N, N) = x.imag();
  a.topRightCorner(N, N) = x.real();
  a.bottomLeftCorner(N, N) = -x.real();
  a.bottomRightCorner(N, N) = x.imag();
  return a;
}

PauliDemo pauli_demo(int n) {
  if (n < 1) throw ValidationError("pauli_demo: n must be positive");
  return PauliDemo{n, pauli_matrices()};
}

SystemSpec PauliDemo::spec() const {
  SystemSpec s;
  s.H0 = ComplexMatrix<double>::Zero(2, 2);
  s.tensor = InteractionTensor(2);
  s.Xs.assign(Xs.begin(), Xs.end());
  s.n = n;
  return s;
}

PauliCheckReport PauliDemo::check(int samples, std::uint64_t seed) const {
  PauliCheckReport rep;
  std::array<RealMatrix<double>, 3> a;
  for (int m = 0; m < 3; ++m) a[m] = embedding_A(Xs[m]);
  const RealMatrix<double> eye = RealMatrix<double>::Identity(4, 4);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      const RealMatrix<double> target = (j == k ? -2.0 : 0.0) * eye;
      rep.anticommutator_error = std::max(
          rep.anticommutator_error, (a[j] * a[k] + a[k] * a[j] - target).cwiseAbs().maxCoeff());
    }

  const SystemSpec s = spec();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int t = 0; t < samples; ++t) {
    RealState r(4);
    for (int i = 0; i < 4; ++i) r(i) = gauss(rng);
    r.normalize();
    const ModeVector z = to_complex(r);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double dot = diffusion_direction(Xs[j], z).dot(diffusion_direction(Xs[k], z));
        rep.orthonormality_error =
            std::max(rep.orthonormality_error, std::abs(dot - (j == k ? 1.0 : 0.0)));
      }
    const RealMatrix<double> d = compute_D(z, s);
    const RealMatrix<double> closed = (eye - r * r.transpose()) / static_cast<double>(n);
    rep.closed_form_error = std::max(rep.closed_form_error, (d - closed).cwiseAbs().maxCoeff());
    rep.projection_error =
        std::max(rep.projection_error, (project_Dperp(d, r) - d).cwiseAbs().maxCoeff());
  }
  return rep;
}

}  // namespace bosde
