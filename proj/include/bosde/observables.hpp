#pragma once

#include <variant>

#include "bosde/core.hpp"
#include "bosde/oracle.hpp"

namespace bosde {

// sum_jk O_jk a_j^dag a_k, optionally divided by n.
struct OneBodyObservable {
  ComplexMatrix<double> O;
  bool scaled_by_1_over_n = true;
};

// An operator given directly on the occupation basis.
struct FockObservable {
  ComplexMatrix<double> M;
};

using Observable = std::variant<OneBodyObservable, FockObservable>;

// Occupation of mode j, per particle: e_j e_j^T / n.
OneBodyObservable population(int j, int modes);

void validate_observable(const Observable& obs);

// Matrix of the observable on `basis`.
ComplexMatrix<double> lifted(const Observable& obs, const FockBasis& basis);

// Re Tr(O rho); throws ValidationError when |Im| > 1e-9.
double expect_rho(const Observable& obs, const DensityMatrix& rho);

struct SampleEstimate {
  double mean = 0;
  double std_error = 0;
};

// Sample mean and standard error of y(z) = z^dag O z over the columns of
// `states`, each taken at z/|z|; multiplied by n when the observable is not
// scaled.
SampleEstimate expect_sde(const OneBodyObservable& obs, const RealMatrix<double>& states, int n);

// ||O_lift|| * trace_dist
double output_error_bound(const Observable& obs, const FockBasis& basis, double trace_dist);

}  // namespace bosde
