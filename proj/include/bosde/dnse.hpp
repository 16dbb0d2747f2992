#pragma once

#include <utility>

#include "bosde/core.hpp"
#include "bosde/dynamics.hpp"

namespace bosde::dnse {

// Stochastic discrete nonlinear Schroedinger example: Kronecker two-body
// tensor plus local number-operator dissipators of strength c.
struct DnseParams {
  int N = 2;
  int n = 2;
  ComplexMatrix<double> H0;
  double c = 0;          // measurement strength, >= 0
  double t_final = 1;
  double epsilon = 0.1;  // trace-norm error budget, > 0

  void validate() const;
};

// Nearest-neighbour ring: 1 on both off-diagonals with periodic wrap.
// For N = 2 the two neighbours coincide and the coupling stays 1.
ComplexMatrix<double> ring_hopping(int N);

SystemSpec build_dnse_spec(const DnseParams& p);

// 2x2 diffusion block on the (x_j, y_j) plane.
Eigen::Matrix2d dnse_block(cplx zj, double c, int n);

// Closed-form eigenvalues (lambda_plus, lambda_minus) of dnse_block.
std::pair<double, double> lambda_pm(cplx zj, double c, int n);

// c = 3 t / (8 eps)
double c_for_error(double t, double epsilon);

// 1 / (16 n c), the bound on alpha(z) over the unit sphere.
double alpha_upper_bound(double c, int n);

// (3/8) t / c, the resulting trace-norm bound.
double trace_error_bound(double t, double c);

}  // namespace bosde::dnse
