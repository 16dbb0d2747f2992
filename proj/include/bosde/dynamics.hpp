#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "bosde/core.hpp"

namespace bosde {

// Dense two-body coefficients H_jklm, stored row-major in (j,k,l,m).
template <typename Real>
class BasicInteractionTensor {
 public:
  BasicInteractionTensor() = default;
  explicit BasicInteractionTensor(Eigen::Index modes)
      : modes_(modes), data_(static_cast<std::size_t>(modes * modes * modes * modes)) {}

  // H_jklm = delta_jk delta_kl delta_lm.
  static BasicInteractionTensor kronecker(Eigen::Index modes) {
    BasicInteractionTensor t(modes);
    for (Eigen::Index j = 0; j < modes; ++j) t(j, j, j, j) = Real(1);
    return t;
  }

  Eigen::Index modes() const { return modes_; }

  Complex<Real>& operator()(Eigen::Index j, Eigen::Index k, Eigen::Index l, Eigen::Index m) {
    return data_[offset(j, k, l, m)];
  }
  const Complex<Real>& operator()(Eigen::Index j, Eigen::Index k, Eigen::Index l,
                                  Eigen::Index m) const {
    return data_[offset(j, k, l, m)];
  }

  bool is_zero() const {
    for (const auto& v : data_)
      if (v != Complex<Real>(0)) return false;
    return true;
  }

 private:
  std::size_t offset(Eigen::Index j, Eigen::Index k, Eigen::Index l, Eigen::Index m) const {
    return static_cast<std::size_t>(((j * modes_ + k) * modes_ + l) * modes_ + m);
  }

  Eigen::Index modes_ = 0;
  std::vector<Complex<Real>> data_;
};

// The open bosonic system: one-body H0, unscaled two-body tensor, unscaled
// dissipators X_m and boson count n. The 1/(2n) and 1/sqrt(n) prefactors are
// applied by the operations, never stored.
template <typename Real>
struct BasicSystemSpec {
  ComplexMatrix<Real> H0;
  BasicInteractionTensor<Real> tensor;
  std::vector<ComplexMatrix<Real>> Xs;
  int n = 1;

  Eigen::Index modes() const { return H0.rows(); }

  // Dimension and Hermiticity checks on H0 and every X_m. The two-body
  // Hermiticity invariant lives on the Fock side (oracle::check_two_body).
  void validate() const {
    require_hermitian(H0, "system.H0");
    const Eigen::Index N = H0.rows();
    if (N < 1) throw DimensionError("system.H0: need at least one mode");
    if (tensor.modes() != N) {
      throw DimensionError("system.tensor: has " + std::to_string(tensor.modes()) +
                           " modes, H0 has " + std::to_string(N));
    }
    for (std::size_t m = 0; m < Xs.size(); ++m) {
      const std::string field = "system.Xs[" + std::to_string(m) + "]";
      if (Xs[m].rows() != N || Xs[m].cols() != N) throw DimensionError(field + ": wrong shape");
      require_hermitian(Xs[m], field);
    }
    if (n < 1) throw ValidationError("system.n: boson count must be positive");
  }
};

using InteractionTensor = BasicInteractionTensor<double>;
using SystemSpec = BasicSystemSpec<double>;

// B_jk(z) = -(i/2) (H_jklm + H_kjlm) z_l z_m
template <typename Real, typename Derived>
ComplexMatrix<Real> compute_B(const Eigen::MatrixBase<Derived>& z,
                              const BasicInteractionTensor<Real>& tensor) {
  const Eigen::Index N = z.size();
  if (tensor.modes() != N) {
    throw DimensionError("compute_B: tensor has " + std::to_string(tensor.modes()) +
                         " modes, z has " + std::to_string(N));
  }
  ComplexMatrix<Real> w = ComplexMatrix<Real>::Zero(N, N);
  for (Eigen::Index j = 0; j < N; ++j)
    for (Eigen::Index k = 0; k < N; ++k) {
      Complex<Real> acc(0);
      for (Eigen::Index l = 0; l < N; ++l)
        for (Eigen::Index m = 0; m < N; ++m) {
          const Complex<Real>& h = tensor(j, k, l, m);
          if (h != Complex<Real>(0)) acc += h * z(l) * z(m);
        }
      w(j, k) = acc;
    }
  const Complex<Real> minus_half_i(0, Real(-0.5));
  return minus_half_i * (w + w.transpose());
}

// Full drift F(z) = -i H0 z + B(z) z*/|z|^2 - (1/n) sum_m X_m^2 z.
// The |z|^-2 factor uses the current norm.
template <typename Real, typename Derived>
ComplexVector<Real> compute_drift(const Eigen::MatrixBase<Derived>& z,
                                  const BasicSystemSpec<Real>& spec) {
  const Real norm2 = z.squaredNorm();
  if (!(norm2 > Real(0))) throw SingularityError("compute_drift: |z| = 0");
  if (z.size() != spec.modes()) throw DimensionError("compute_drift: z does not match H0");
  const Complex<Real> i(0, 1);
  ComplexVector<Real> f = -i * (spec.H0 * z);
  if (!spec.tensor.is_zero()) f += compute_B(z, spec.tensor) * z.conjugate() / norm2;
  for (const auto& x : spec.Xs) f -= (x * (x * z)) / Real(spec.n);
  return f;
}

// n -> infinity limit of compute_drift: -i H0 z + B(z) z*/|z|^2.
template <typename Real, typename Derived>
ComplexVector<Real> meanfield_drift(const Eigen::MatrixBase<Derived>& z,
                                    const BasicSystemSpec<Real>& spec) {
  const Real norm2 = z.squaredNorm();
  if (!(norm2 > Real(0))) throw SingularityError("meanfield_drift: |z| = 0");
  const Complex<Real> i(0, 1);
  ComplexVector<Real> f = -i * (spec.H0 * z);
  if (!spec.tensor.is_zero()) f += compute_B(z, spec.tensor) * z.conjugate() / norm2;
  return f;
}

// Discrete nonlinear Schroedinger right-hand side,
// dz_j/dt = -i H0_jk z_k - i |z_j|^2 z_j / |z|^2.
template <typename Derived, typename MatDerived>
ComplexVector<typename Derived::RealScalar> dnse_rhs(const Eigen::MatrixBase<Derived>& z,
                                                     const Eigen::MatrixBase<MatDerived>& H0) {
  using Real = typename Derived::RealScalar;
  const Real norm2 = z.squaredNorm();
  if (!(norm2 > Real(0))) throw SingularityError("dnse_rhs: |z| = 0");
  const Complex<Real> i(0, 1);
  ComplexVector<Real> f = -i * (H0 * z);
  for (Eigen::Index j = 0; j < z.size(); ++j) f(j) -= i * std::norm(z(j)) * z(j) / norm2;
  return f;
}

// Real embedding of z -> -i H z acting on r = (x, y):
// [[Im H, Re H], [-Re H, Im H]]. Antisymmetric for Hermitian H.
template <typename Derived>
RealMatrix<typename Derived::RealScalar> real_linear_generator(
    const Eigen::MatrixBase<Derived>& h) {
  using Real = typename Derived::RealScalar;
  const Eigen::Index N = h.rows();
  RealMatrix<Real> a(2 * N, 2 * N);
  a.topLeftCorner(N, N) = h.imag();
  a.topRightCorner(N, N) = h.real();
  a.bottomLeftCorner(N, N) = -h.real();
  a.bottomRightCorner(N, N) = h.imag();
  return a;
}

struct OdeSolution {
  std::vector<double> times;
  std::vector<ModeVector> states;
};

enum class OdeStepper { kRk4, kEuler };

using ModeRhs = std::function<ModeVector(const ModeVector&)>;

// Fixed-step integration of dz/dt = rhs(z). The last step is shortened so
// t_final is hit exactly; every step boundary is recorded.
OdeSolution integrate_meanfield(const ModeVector& z0, const ModeRhs& rhs, double t_final,
                                double dt, OdeStepper stepper = OdeStepper::kRk4);

}  // namespace bosde
