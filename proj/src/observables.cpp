#include "bosde/observables.hpp"

#include <cmath>

namespace bosde {

OneBodyObservable population(int j, int modes) {
  if (j < 0 || j >= modes) throw DimensionError("population: mode index out of range");
  OneBodyObservable obs;
  obs.O = ComplexMatrix<double>::Zero(modes, modes);
  obs.O(j, j) = 1.0;
  return obs;
}

void validate_observable(const Observable& obs) {
  std::visit([](const auto& o) {
    using T = std::decay_t<decltype(o)>;
    if constexpr (std::is_same_v<T, OneBodyObservable>) {
      require_hermitian(o.O, "observables.one_body");
    } else {
      require_hermitian(o.M, "observables.fock_matrix");
    }
  }, obs);
}

ComplexMatrix<double> lifted(const Observable& obs, const FockBasis& basis) {
  if (const auto* one = std::get_if<OneBodyObservable>(&obs)) {
    ComplexMatrix<double> m = lift_one_body(one->O, basis);
    if (one->scaled_by_1_over_n) m /= static_cast<double>(basis.bosons());
    return m;
  }
  const auto& m = std::get<FockObservable>(obs).M;
  if (m.rows() != static_cast<Eigen::Index>(basis.size()) || m.cols() != m.rows())
    throw DimensionError("observable: Fock matrix does not match the basis");
  return m;
}

double expect_rho(const Observable& obs, const DensityMatrix& rho) {
  if (!rho.basis) throw DimensionError("expect_rho: density matrix without basis");
  if (rho.rho.rows() != static_cast<Eigen::Index>(rho.basis->size()))
    throw DimensionError("expect_rho: density matrix does not match its basis");
  const cplx value = (lifted(obs, *rho.basis) * rho.rho).trace();
  if (std::abs(value.imag()) > 1e-9)
    throw ValidationError("expect_rho: imaginary part " + std::to_string(value.imag()) +
                          " exceeds 1e-9");
  return value.real();
}

SampleEstimate expect_sde(const OneBodyObservable& obs, const RealMatrix<double>& states, int n) {
  const Eigen::Index samples = states.cols();
  if (samples == 0) throw ValidationError("expect_sde: empty ensemble");
  if (states.rows() != 2 * obs.O.rows())
    throw DimensionError("expect_sde: state length does not match the observable");
  const double scale = obs.scaled_by_1_over_n ? 1.0 : static_cast<double>(n);
  RealVector<double> y(samples);
  for (Eigen::Index k = 0; k < samples; ++k) {
    ModeVector z = to_complex(states.col(k));
    const double norm = z.norm();
    if (!(norm > 0)) throw SingularityError("expect_sde: sample with |z| = 0");
    z /= norm;
    y(k) = scale * z.dot(obs.O * z).real();
  }
  SampleEstimate est;
  est.mean = y.mean();
  if (samples > 1) {
    const double var = (y.array() - est.mean).square().sum() / static_cast<double>(samples - 1);
    est.std_error = std::sqrt(var / static_cast<double>(samples));
  }
  return est;
}

double output_error_bound(const Observable& obs, const FockBasis& basis, double trace_dist) {
  if (trace_dist < 0) throw ValidationError("output_error_bound: trace distance must be >= 0");
  if (trace_dist == 0) return 0;
  return spectral_norm(lifted(obs, basis)) * trace_dist;
}

}  // namespace bosde
