#pragma once

#include <array>
#include <cstdint>

#include "bosde/core.hpp"
#include "bosde/dynamics.hpp"

namespace bosde {

// Diffusion direction of a dissipator X at z: u = (Im(Xz), -Re(Xz)),
// i.e. the real embedding of -i X z.
template <typename Real, typename Derived>
RealVector<Real> diffusion_direction(const ComplexMatrix<Real>& x,
                                     const Eigen::MatrixBase<Derived>& z) {
  const ComplexVector<Real> xz = x * z;
  const Eigen::Index N = z.size();
  RealVector<Real> u(2 * N);
  u.head(N) = xz.imag();
  u.tail(N) = -xz.real();
  return u;
}

// D(z) = (1/n) [ (1/4) [[Re B, Im B], [Im B, -Re B]] + sum_m u_m u_m^T ].
template <typename Real, typename Derived>
RealMatrix<Real> compute_D(const Eigen::MatrixBase<Derived>& z, const BasicSystemSpec<Real>& spec) {
  const Eigen::Index N = z.size();
  if (N != spec.modes()) throw DimensionError("compute_D: z does not match H0");
  if (!(z.squaredNorm() > Real(0))) throw SingularityError("compute_D: |z| = 0");
  RealMatrix<Real> d = RealMatrix<Real>::Zero(2 * N, 2 * N);
  if (!spec.tensor.is_zero()) {
    const ComplexMatrix<Real> b = compute_B(z, spec.tensor);
    d.topLeftCorner(N, N) = Real(0.25) * b.real();
    d.topRightCorner(N, N) = Real(0.25) * b.imag();
    d.bottomLeftCorner(N, N) = Real(0.25) * b.imag();
    d.bottomRightCorner(N, N) = Real(-0.25) * b.real();
  }
  for (const auto& x : spec.Xs) {
    const RealVector<Real> u = diffusion_direction(x, z);
    d.noalias() += u * u.transpose();
  }
  return d / Real(spec.n);
}

// Projector sandwich (I - r r^T) D (I - r r^T); r must be unit norm.
template <typename DerivedD, typename DerivedR>
RealMatrix<typename DerivedD::Scalar> project_Dperp(const Eigen::MatrixBase<DerivedD>& d,
                                                    const Eigen::MatrixBase<DerivedR>& r) {
  using Real = typename DerivedD::Scalar;
  if (d.rows() != r.size() || d.cols() != r.size())
    throw DimensionError("project_Dperp: D and r disagree in dimension");
  if (std::abs(static_cast<double>(r.norm()) - 1.0) > kUnitNormTol)
    throw PreconditionError("project_Dperp: r is not unit norm");
  const RealVector<Real> dr = d * r;
  const Real rdr = r.dot(dr);
  RealMatrix<Real> out = d;
  out.noalias() -= r * dr.transpose();
  out.noalias() -= dr * r.transpose();
  out.noalias() += rdr * (r * r.transpose());
  return out;
}

template <typename Real>
struct DiffusionDecomposition {
  RealMatrix<Real> D;
  RealVector<Real> eigenvalues;   // descending
  RealMatrix<Real> eigenvectors;
  Real neg_mass = 0;              // sum of |negative eigenvalues|
};

template <typename Derived>
DiffusionDecomposition<typename Derived::Scalar> decompose(const Eigen::MatrixBase<Derived>& s) {
  using Real = typename Derived::Scalar;
  auto eig = sym_eig(s);
  Real mass = 0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
    mass += std::max(Real(0), -eig.eigenvalues(i));
  return {RealMatrix<Real>(s), std::move(eig.eigenvalues), std::move(eig.eigenvectors), mass};
}

// Absolute sum of the negative eigenvalues, equivalently ||S||_* - Tr S.
template <typename Derived>
typename Derived::Scalar neg_mass(const Eigen::MatrixBase<Derived>& s) {
  return decompose(s).neg_mass;
}

// PSD part: negative eigencomponents dropped.
template <typename Derived>
RealMatrix<typename Derived::Scalar> psd_part(const Eigen::MatrixBase<Derived>& s) {
  using Real = typename Derived::Scalar;
  const auto eig = sym_eig(s);
  const RealVector<Real> clipped = eig.eigenvalues.cwiseMax(Real(0));
  return eig.eigenvectors * clipped.asDiagonal() * eig.eigenvectors.transpose();
}

inline constexpr double kPsdClip = 1e-10;

// Symmetric G with G G^T = 2 D for PSD D. Eigenvalues in [-1e-10, 0) are
// treated as roundoff and clipped; anything more negative is rejected.
template <typename Derived>
RealMatrix<typename Derived::Scalar> sqrt_2D(const Eigen::MatrixBase<Derived>& d) {
  using Real = typename Derived::Scalar;
  const auto eig = sym_eig(d);
  RealVector<Real> root(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < root.size(); ++i) {
    const Real lam = eig.eigenvalues(i);
    if (lam < Real(-kPsdClip))
      throw NotPsdError("sqrt_2D: eigenvalue " + std::to_string(static_cast<double>(lam)) +
                        " below clipping threshold");
    root(i) = std::sqrt(Real(2) * std::max(lam, Real(0)));
  }
  return eig.eigenvectors * root.asDiagonal() * eig.eigenvectors.transpose();
}

// alpha(z) = neg_mass(D(z))
template <typename Real, typename Derived>
Real alpha(const Eigen::MatrixBase<Derived>& z, const BasicSystemSpec<Real>& spec) {
  return neg_mass(compute_D(z, spec));
}

// alpha_perp(z) = neg_mass(D_perp(z)), projecting along r/|r|.
template <typename Real, typename Derived>
Real alpha_perp(const Eigen::MatrixBase<Derived>& z, const BasicSystemSpec<Real>& spec) {
  const RealVector<Real> r = to_real(z);
  return neg_mass(project_Dperp(compute_D(z, spec), r / r.norm()));
}

// X = i w z^dag - i z w^dag + i (w^* . z) z z^dag. Requires |z| = 1 and
// Re(z^* . w) = 0; then X is Hermitian and -i X z = w.
ComplexMatrix<double> build_cancellation_X(const ModeVector& z, const ModeVector& w);

// Pauli matrices sigma_0 = x, sigma_1 = y, sigma_2 = z (that order).
std::array<ComplexMatrix<double>, 3> pauli_matrices();

// A_m = [[Im X, Re X], [-Re X, Im X]]; u_m(r) = A_m r.
RealMatrix<double> embedding_A(const ComplexMatrix<double>& x);

struct PauliCheckReport {
  double anticommutator_error = 0;  // max |{A_j, A_k} + 2 delta_jk I|
  double orthonormality_error = 0;  // max |u_j . u_k - delta_jk|
  double closed_form_error = 0;     // max |D - (1/n)(I - r r^T)|
  double projection_error = 0;      // max |D_perp - D|
  bool ok(double tol = 1e-12) const {
    return anticommutator_error <= tol && orthonormality_error <= tol &&
           closed_form_error <= tol && projection_error <= tol;
  }
};

// N = 2 demonstration with the three Pauli matrices as dissipators and no
// Hamiltonian; D(r) = D_perp(r) = (1/n)(I - r r^T) on the unit sphere.
struct PauliDemo {
  int n = 1;
  std::array<ComplexMatrix<double>, 3> Xs;

  SystemSpec spec() const;
  PauliCheckReport check(int samples, std::uint64_t seed) const;
};

PauliDemo pauli_demo(int n);

}  // namespace bosde
