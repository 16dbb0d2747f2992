#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "bosde/core.hpp"
#include "bosde/dynamics.hpp"

namespace bosde {

using Occupation = std::vector<int>;

// Occupation-number basis of the symmetric n-boson, N-mode space, ordered
// lexicographically descending (first mode fullest first):
// n=2, N=2 -> (2,0), (1,1), (0,2).
class FockBasis {
 public:
  static constexpr std::size_t kDefaultCap = 20000;

  FockBasis(int bosons, int modes, std::size_t cap = kDefaultCap);

  int bosons() const { return bosons_; }
  int modes() const { return modes_; }
  std::size_t size() const { return states_.size(); }
  const Occupation& occupation(std::size_t i) const { return states_[i]; }
  const std::vector<Occupation>& occupations() const { return states_; }

  // Index of an occupation vector; throws DimensionError when absent.
  std::size_t index_of(const Occupation& occ) const;

 private:
  int bosons_;
  int modes_;
  std::vector<Occupation> states_;
  std::map<Occupation, std::size_t> index_;
};

using BasisPtr = std::shared_ptr<const FockBasis>;

// C(n + N - 1, n), saturating at SIZE_MAX.
std::size_t fock_dimension(int bosons, int modes);
BasisPtr fock_basis(int bosons, int modes, std::size_t cap = FockBasis::kDefaultCap);

struct DensityMatrix {
  BasisPtr basis;
  ComplexMatrix<double> rho;
};

struct PureState {
  BasisPtr basis;
  ComplexVector<double> amplitudes;
};

// sum_jk X_jk a_j^dag a_k in the occupation basis.
ComplexMatrix<double> lift_one_body(const ComplexMatrix<double>& x, const FockBasis& basis);

// (1/2n) sum H_jklm a_j^dag a_k^dag a_l a_m, prefactor included.
ComplexMatrix<double> lift_two_body(const InteractionTensor& tensor, int n, const FockBasis& basis);

// Throws ValidationError("system.tensor ...") if the lifted two-body
// operator is not Hermitian to 1e-10.
void check_two_body_hermitian(const InteractionTensor& tensor, int n, const FockBasis& basis);

// |z>^{(x)n}: amplitude sqrt(n!/prod nu_j!) prod z_j^nu_j. Requires |z| = 1.
PureState coherent_product_state(const ModeVector& z, const BasisPtr& basis);

// Same amplitudes without the unit-norm precondition.
ComplexVector<double> coherent_amplitudes(const ModeVector& z, const FockBasis& basis);

DensityMatrix pure_density(const PureState& psi);

// Lifted operators of a SystemSpec on its symmetric subspace: the full
// Hamiltonian and the dissipators with their 1/sqrt(n) prefactor.
class FockModel {
 public:
  explicit FockModel(const SystemSpec& spec, std::size_t cap = FockBasis::kDefaultCap);

  const BasisPtr& basis() const { return basis_; }
  const SystemSpec& spec() const { return spec_; }
  const ComplexMatrix<double>& hamiltonian() const { return hamiltonian_; }
  const std::vector<ComplexMatrix<double>>& dissipators() const { return dissipators_; }
  const std::vector<ComplexMatrix<double>>& dissipators_squared() const { return squared_; }

 private:
  SystemSpec spec_;
  BasisPtr basis_;
  ComplexMatrix<double> hamiltonian_;
  std::vector<ComplexMatrix<double>> dissipators_;
  std::vector<ComplexMatrix<double>> squared_;
};

// -i[H, rho] - sum_m [X_m, [X_m, rho]]
ComplexMatrix<double> lindblad_rhs(const ComplexMatrix<double>& rho, const FockModel& model);
DensityMatrix lindblad_rhs(const DensityMatrix& rho, const SystemSpec& spec);

struct DensityHealth {
  double trace_error = 0;      // |Tr rho - 1|
  double hermitian_defect = 0; // max |rho - rho^dag|
  double min_eigenvalue = 0;
};

DensityHealth density_health(const ComplexMatrix<double>& rho);

struct TimedDensity {
  double time = 0;
  DensityMatrix state;
};

// RK4 on lindblad_rhs. Each requested time is hit exactly, with steps no
// longer than dt in between. Throws IntegrationAccuracyError if a snapshot
// leaves the trace / Hermiticity / positivity tolerances.
std::vector<TimedDensity> integrate_lindblad(const DensityMatrix& rho0, const FockModel& model,
                                             double dt, const std::vector<double>& snapshot_times);

// Per-step unitaries of the random-walk unravelling: exp(-i H dt) followed
// by exp(-i sqrt(2 dt) Q_m X_m) for each m in kick_order, Q_m = +-1.
class RandomWalkStepper {
 public:
  RandomWalkStepper(const FockModel& model, double dt, std::vector<int> kick_order = {});

  double dt() const { return dt_; }
  std::size_t kicks() const { return order_.size(); }
  const std::vector<int>& kick_order() const { return order_; }

  // signs[m] is the sign of dissipator m (indexed by dissipator, not order).
  ComplexVector<double> step(const ComplexVector<double>& psi, std::span<const int> signs) const;

  // Exact average of U rho U^dag over all 2^M sign patterns for one step.
  ComplexMatrix<double> branch_average(const ComplexMatrix<double>& rho) const;

 private:
  double dt_;
  std::vector<int> order_;
  ComplexMatrix<double> hamiltonian_step_;
  std::vector<std::array<ComplexMatrix<double>, 2>> kick_;  // [m][0] for +1, [1] for -1
};

using SignStream = std::function<int(long step, int m)>;

// Signs from indexed_prng(seed, run, step, m).
SignStream indexed_signs(std::uint64_t seed, std::uint64_t run);

struct TimedState {
  double time = 0;
  PureState state;
};

// One trajectory; snapshots at the first step boundary >= each requested time.
std::vector<TimedState> random_walk_trajectory(const PureState& psi0, const FockModel& model,
                                               double dt, double t_final, const SignStream& signs,
                                               const std::vector<double>& snapshot_times);

// Average of |psi><psi| over `samples` trajectories (run index k uses
// indexed_signs(seed, k)).
std::vector<TimedDensity> random_walk_ensemble(const PureState& psi0, const FockModel& model,
                                               double dt, double t_final, int samples,
                                               std::uint64_t seed,
                                               const std::vector<double>& snapshot_times,
                                               int workers = 1);

// Deterministic evolution by the branch-averaged step channel.
std::vector<TimedDensity> branch_averaged_evolution(const DensityMatrix& rho0,
                                                    const FockModel& model, double dt,
                                                    double t_final,
                                                    const std::vector<double>& snapshot_times);

// How an off-sphere sample z contributes to the reconstructed rho.
enum class RadialWeight {
  kProjected,  // |z/|z|><z/|z||^{(x)n}: the SDE density pairs with |z|^{-2n}
  kPointMap,   // (|z><z|)^{(x)n} = |z|^{2n} (...)
};

// Columns of `states` are real states r = (x, y).
ComplexMatrix<double> ensemble_amplitudes(const RealMatrix<double>& states, const FockBasis& basis,
                                          RadialWeight weight = RadialWeight::kProjected);
DensityMatrix ensemble_to_rho(const RealMatrix<double>& states, const BasisPtr& basis,
                              RadialWeight weight = RadialWeight::kProjected);

// Full trace norm ||a - b||_* (not halved).
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// Spread of ||rho_boot - exact||_* over bootstrap resamples of the columns of
// `amplitudes` (one sample per column, rho = mean of a a^dag).
double bootstrap_trace_distance_std(const ComplexMatrix<double>& amplitudes,
                                    const ComplexMatrix<double>& exact, int resamples,
                                    std::uint64_t seed);

// Trace norm of the change in d(rho)/dt at rho = (|z><z|)^{(x)n} caused by
// unit diffusion along w. Requires |z| = |w| = 1 and Re(z^* . w) = 0.
double beta_witness(const ModeVector& z, const ModeVector& w, int n);

// Per-point upper bound 2[sqrt(2n(n-1))|b|^2 + n + 2 sqrt(n)|z^*.w||b|],
// b = w - (z^*.w) z; never exceeds 6n.
double beta_pointwise_bound(const ModeVector& z, const ModeVector& w, int n);

// Unit vectors from indexed normals; deterministic in (modes, count, seed).
std::vector<ModeVector> random_unit_grid(int modes, int count, std::uint64_t seed);

double alpha_perp_max(const SystemSpec& spec, std::span<const ModeVector> grid);

struct ErrorBoundReport {
  double alpha_perp_max = 0;
  double bound = 0;      // 6 n t max alpha_perp
  double empirical = 0;  // ||rho_plus - rho||_*
  double tolerance = 0;  // statistical allowance
  bool pass = false;
};

ErrorBoundReport error_bound_check(const SystemSpec& spec, double t,
                                   std::span<const ModeVector> grid, const DensityMatrix& rho_plus,
                                   const DensityMatrix& rho_exact, double statistical_tolerance);

}  // namespace bosde
