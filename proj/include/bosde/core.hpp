#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bosde {

// Dense aliases, templated on the real scalar. Everything downstream of
// `core` is written against these.
template <typename Real>
using Complex = std::complex<Real>;
template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <typename Real>
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using ComplexMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

// Single-particle amplitudes z (length N) and their real embedding
// r = (Re z, Im z) (length 2N).
using ModeVector = ComplexVector<double>;
using RealState = RealVector<double>;
using cplx = std::complex<double>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitNormTol = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DimensionError : public Error {
 public:
  using Error::Error;
};
class ValidationError : public Error {
 public:
  using Error::Error;
};
class SingularityError : public Error {
 public:
  using Error::Error;
};
class PreconditionError : public Error {
 public:
  using Error::Error;
};
class NotPsdError : public Error {
 public:
  using Error::Error;
};
class ResourceError : public Error {
 public:
  using Error::Error;
};
class IntegrationAccuracyError : public Error {
 public:
  using Error::Error;
};

template <typename Derived>
RealVector<typename Derived::RealScalar> to_real(const Eigen::MatrixBase<Derived>& z) {
  using Real = typename Derived::RealScalar;
  const Eigen::Index n = z.size();
  RealVector<Real> r(2 * n);
  r.head(n) = z.real();
  r.tail(n) = z.imag();
  return r;
}

template <typename Derived>
ComplexVector<typename Derived::Scalar> to_complex(const Eigen::MatrixBase<Derived>& r) {
  using Real = typename Derived::Scalar;
  if (r.size() % 2 != 0) {
    throw DimensionError("to_complex: real state has odd length " + std::to_string(r.size()));
  }
  const Eigen::Index n = r.size() / 2;
  ComplexVector<Real> z(n);
  for (Eigen::Index j = 0; j < n; ++j) z(j) = Complex<Real>(r(j), r(n + j));
  return z;
}

// max_jk |M_jk - conj(M_kj)|, zero for non-square input never returned:
// callers check squareness first.
template <typename Derived>
typename Derived::RealScalar hermitian_defect(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double rel_tol = kHermitianTol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = std::max(1.0, static_cast<double>(m.cwiseAbs().maxCoeff()));
  return static_cast<double>(hermitian_defect(m)) <= rel_tol * scale;
}

// Throws ValidationError naming `field` unless `m` is square and Hermitian
// within the relative tolerance. Inputs are never symmetrized.
template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& m, const std::string& field,
                       double rel_tol = kHermitianTol) {
  if (m.rows() != m.cols()) {
    throw DimensionError(field + ": expected a square matrix, got " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()));
  }
  if (!is_hermitian(m, rel_tol)) {
    throw ValidationError(field + ": matrix is not Hermitian (defect " +
                          std::to_string(static_cast<double>(hermitian_defect(m))) + ")");
  }
}

template <typename Real>
struct SymEig {
  RealVector<Real> eigenvalues;   // descending
  RealMatrix<Real> eigenvectors;  // orthonormal columns, same order
};

// Eigendecomposition of a real symmetric matrix, eigenvalues sorted
// descending. Rejects input that is not symmetric to 1e-12 relative.
template <typename Derived>
SymEig<typename Derived::Scalar> sym_eig(const Eigen::MatrixBase<Derived>& s) {
  using Real = typename Derived::Scalar;
  require_hermitian(s, "sym_eig");
  Eigen::SelfAdjointEigenSolver<RealMatrix<Real>> solver(s);
  if (solver.info() != Eigen::Success) throw Error("sym_eig: eigensolver did not converge");
  const Eigen::Index n = s.rows();
  SymEig<Real> out{RealVector<Real>(n), RealMatrix<Real>(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
    out.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

// Sum of singular values. Hermitian input goes through the self-adjoint
// solver (sum of |eigenvalues|); anything else through an SVD.
template <typename Derived>
typename Derived::RealScalar trace_norm(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Derived::RealScalar;
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (m.rows() != m.cols()) {
    throw DimensionError("trace_norm: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
  if (m.size() == 0) return Real(0);
  const Mat a = m;
  if (is_hermitian(a, 1e-13)) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(a, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().sum();
  }
  Eigen::BDCSVD<Mat> svd(a);
  return svd.singularValues().sum();
}

// Spectral norm (largest singular value).
template <typename Derived>
typename Derived::RealScalar spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (m.size() == 0) return 0;
  const Mat a = m;
  Eigen::BDCSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

}  // namespace bosde
