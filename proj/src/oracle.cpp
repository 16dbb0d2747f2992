#include "bosde/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "bosde/diffusion.hpp"
#include "bosde/parallel.hpp"
#include "bosde/sde.hpp"

namespace bosde {

namespace {

void enumerate(int remaining, int mode, Occupation& current, std::vector<Occupation>& out) {
  const int modes = static_cast<int>(current.size());
  if (mode == modes - 1) {
    current[mode] = remaining;
    out.push_back(current);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    current[mode] = k;
    enumerate(remaining - k, mode + 1, current, out);
  }
}

// exp(-i * scale * A) for Hermitian A.
ComplexMatrix<double> hermitian_exp(const ComplexMatrix<double>& a, double scale) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<double>> solver(a);
  const cplx i(0, 1);
  const ComplexVector<double> phases =
      (-i * scale * solver.eigenvalues().cast<cplx>()).array().exp().matrix();
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

void require_unit(const ModeVector& v, const char* what) {
  if (std::abs(v.norm() - 1.0) > kUnitNormTol)
    throw PreconditionError(std::string(what) + " is not unit norm");
}

}  // namespace

std::size_t fock_dimension(int bosons, int modes) {
  // C(bosons + modes - 1, bosons) with overflow saturation.
  std::size_t result = 1;
  const int k = std::min(bosons, modes - 1);
  const int top = bosons + modes - 1;
  for (int i = 1; i <= k; ++i) {
    const std::size_t factor = static_cast<std::size_t>(top - k + i);
    if (result > std::numeric_limits<std::size_t>::max() / factor)
      return std::numeric_limits<std::size_t>::max();
    result = result * factor / static_cast<std::size_t>(i);
  }
  return result;
}

FockBasis::FockBasis(int bosons, int modes, std::size_t cap) : bosons_(bosons), modes_(modes) {
  if (bosons < 1) throw ValidationError("fock_basis: n must be >= 1");
  if (modes < 1) throw ValidationError("fock_basis: N must be >= 1");
  const std::size_t dim = fock_dimension(bosons, modes);
  if (dim > cap) {
    throw ResourceError("fock_basis: dimension C(n+N-1, n) = " + std::to_string(dim) +
                        " exceeds cap " + std::to_string(cap));
  }
  states_.reserve(dim);
  Occupation current(static_cast<std::size_t>(modes), 0);
  enumerate(bosons, 0, current, states_);
  for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], i);
}

std::size_t FockBasis::index_of(const Occupation& occ) const {
  const auto it = index_.find(occ);
  if (it == index_.end()) throw DimensionError("FockBasis: occupation not in basis");
  return it->second;
}

BasisPtr fock_basis(int bosons, int modes, std::size_t cap) {
  return std::make_shared<const FockBasis>(bosons, modes, cap);
}

ComplexMatrix<double> lift_one_body(const ComplexMatrix<double>& x, const FockBasis& basis) {
  const int N = basis.modes();
  if (x.rows() != N || x.cols() != N)
    throw DimensionError("lift_one_body: operator is not N x N");
  const auto dim = static_cast<Eigen::Index>(basis.size());
  ComplexMatrix<double> out = ComplexMatrix<double>::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Occupation& nu = basis.occupation(static_cast<std::size_t>(col));
    for (int k = 0; k < N; ++k) {
      if (nu[k] == 0) continue;
      Occupation lowered = nu;
      const double a_k = std::sqrt(static_cast<double>(lowered[k]--));
      for (int j = 0; j < N; ++j) {
        if (x(j, k) == cplx(0)) continue;
        Occupation raised = lowered;
        const double a_j = std::sqrt(static_cast<double>(++raised[j]));
        out(static_cast<Eigen::Index>(basis.index_of(raised)), col) += x(j, k) * a_k * a_j;
      }
    }
  }
  return out;
}

ComplexMatrix<double> lift_two_body(const InteractionTensor& tensor, int n, const FockBasis& basis) {
  const int N = basis.modes();
  if (tensor.modes() != N) throw DimensionError("lift_two_body: tensor does not match basis");
  const auto dim = static_cast<Eigen::Index>(basis.size());
  ComplexMatrix<double> out = ComplexMatrix<double>::Zero(dim, dim);
  if (tensor.is_zero()) return out;
  const double pre = 1.0 / (2.0 * n);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Occupation& nu = basis.occupation(static_cast<std::size_t>(col));
    for (int m = 0; m < N; ++m) {
      if (nu[m] == 0) continue;
      Occupation s1 = nu;
      const double a_m = std::sqrt(static_cast<double>(s1[m]--));
      for (int l = 0; l < N; ++l) {
        if (s1[l] == 0) continue;
        Occupation s2 = s1;
        const double a_l = std::sqrt(static_cast<double>(s2[l]--));
        for (int k = 0; k < N; ++k) {
          Occupation s3 = s2;
          const double c_k = std::sqrt(static_cast<double>(++s3[k]));
          for (int j = 0; j < N; ++j) {
            const cplx h = tensor(j, k, l, m);
            if (h == cplx(0)) continue;
            Occupation s4 = s3;
            const double c_j = std::sqrt(static_cast<double>(++s4[j]));
            out(static_cast<Eigen::Index>(basis.index_of(s4)), col) += pre * h * a_m * a_l * c_k * c_j;
          }
        }
      }
    }
  }
  return out;
}

void check_two_body_hermitian(const InteractionTensor& tensor, int n, const FockBasis& basis) {
  const ComplexMatrix<double> lifted = lift_two_body(tensor, n, basis);
  if (!is_hermitian(lifted, 1e-10))
    throw ValidationError("system.tensor: lifted two-body operator is not Hermitian");
}

ComplexVector<double> coherent_amplitudes(const ModeVector& z, const FockBasis& basis) {
  if (z.size() != basis.modes()) throw DimensionError("coherent_amplitudes: z does not match basis");
  const int n = basis.bosons();
  const double log_n_fact = std::lgamma(n + 1.0);
  ComplexVector<double> amp(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Occupation& nu = basis.occupation(i);
    double log_multinomial = log_n_fact;
    cplx prod(1.0, 0.0);
    for (int j = 0; j < basis.modes(); ++j) {
      log_multinomial -= std::lgamma(nu[j] + 1.0);
      for (int p = 0; p < nu[j]; ++p) prod *= z(j);
    }
    amp(static_cast<Eigen::Index>(i)) = std::sqrt(std::exp(log_multinomial)) * prod;
  }
  return amp;
}

PureState coherent_product_state(const ModeVector& z, const BasisPtr& basis) {
  require_unit(z, "coherent_product_state: z");
  return {basis, coherent_amplitudes(z, *basis)};
}

DensityMatrix pure_density(const PureState& psi) {
  return {psi.basis, psi.amplitudes * psi.amplitudes.adjoint()};
}

FockModel::FockModel(const SystemSpec& spec, std::size_t cap) : spec_(spec) {
  spec_.validate();
  basis_ = fock_basis(spec_.n, static_cast<int>(spec_.modes()), cap);
  const ComplexMatrix<double> two_body = lift_two_body(spec_.tensor, spec_.n, *basis_);
  if (!is_hermitian(two_body, 1e-10))
    throw ValidationError("system.tensor: lifted two-body operator is not Hermitian");
  hamiltonian_ = lift_one_body(spec_.H0, *basis_) + two_body;
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec_.n));
  for (const auto& x : spec_.Xs) {
    dissipators_.push_back(scale * lift_one_body(x, *basis_));
    squared_.push_back(dissipators_.back() * dissipators_.back());
  }
}

ComplexMatrix<double> lindblad_rhs(const ComplexMatrix<double>& rho, const FockModel& model) {
  const auto& h = model.hamiltonian();
  if (rho.rows() != h.rows() || rho.cols() != h.cols())
    throw DimensionError("lindblad_rhs: rho does not match the Fock basis");
  const cplx i(0, 1);
  ComplexMatrix<double> out = -i * (h * rho - rho * h);
  const auto& xs = model.dissipators();
  const auto& x2 = model.dissipators_squared();
  for (std::size_t m = 0; m < xs.size(); ++m) {
    out.noalias() += 2.0 * (xs[m] * rho * xs[m]);
    out.noalias() -= x2[m] * rho;
    out.noalias() -= rho * x2[m];
  }
  return out;
}

DensityMatrix lindblad_rhs(const DensityMatrix& rho, const SystemSpec& spec) {
  const FockModel model(spec);
  if (rho.basis && (rho.basis->bosons() != spec.n || rho.basis->modes() != spec.modes()))
    throw DimensionError("lindblad_rhs: density matrix basis does not match the system");
  return {model.basis(), lindblad_rhs(rho.rho, model)};
}

DensityHealth density_health(const ComplexMatrix<double>& rho) {
  DensityHealth h;
  h.trace_error = std::abs(rho.trace() - cplx(1.0));
  h.hermitian_defect = hermitian_defect(rho);
  const ComplexMatrix<double> sym = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<double>> solver(sym, Eigen::EigenvaluesOnly);
  h.min_eigenvalue = solver.eigenvalues().size() ? solver.eigenvalues()(0) : 0.0;
  return h;
}

std::vector<TimedDensity> integrate_lindblad(const DensityMatrix& rho0, const FockModel& model,
                                             double dt, const std::vector<double>& snapshot_times) {
  if (!(dt > 0)) throw ValidationError("integrate_lindblad: dt must be > 0");
  const DensityHealth start = density_health(rho0.rho);
  if (start.trace_error > 1e-9 || start.hermitian_defect > 1e-10 || start.min_eigenvalue < -1e-8)
    throw ValidationError("integrate_lindblad: rho0 is not a valid density matrix");

  std::vector<TimedDensity> out;
  ComplexMatrix<double> rho = rho0.rho;
  double t = 0;
  for (double target : snapshot_times) {
    if (target < t - 1e-12) throw ValidationError("integrate_lindblad: snapshot times must be sorted");
    const double span = target - t;
    const long steps = std::max(0L, static_cast<long>(std::ceil(span / dt - 1e-9)));
    const double h = steps > 0 ? span / static_cast<double>(steps) : 0.0;
    for (long s = 0; s < steps; ++s) {
      const ComplexMatrix<double> k1 = lindblad_rhs(rho, model);
      const ComplexMatrix<double> k2 = lindblad_rhs(rho + 0.5 * h * k1, model);
      const ComplexMatrix<double> k3 = lindblad_rhs(rho + 0.5 * h * k2, model);
      const ComplexMatrix<double> k4 = lindblad_rhs(rho + h * k3, model);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    t = std::max(t, target);
    const DensityHealth health = density_health(rho);
    if (health.trace_error > 1e-9 || health.hermitian_defect > 1e-10 ||
        health.min_eigenvalue < -1e-8) {
      char msg[200];
      std::snprintf(msg, sizeof msg,
                    "integrate_lindblad: at t = %g trace error %.3e, hermitian defect %.3e, "
                    "min eigenvalue %.3e; try a smaller dt",
                    t, health.trace_error, health.hermitian_defect, health.min_eigenvalue);
      throw IntegrationAccuracyError(msg);
    }
    out.push_back({t, {model.basis(), rho}});
  }
  return out;
}

RandomWalkStepper::RandomWalkStepper(const FockModel& model, double dt, std::vector<int> kick_order)
    : dt_(dt), order_(std::move(kick_order)) {
  if (!(dt > 0)) throw ValidationError("RandomWalkStepper: dt must be > 0");
  const int kicks = static_cast<int>(model.dissipators().size());
  if (order_.empty()) {
    for (int m = 0; m < kicks; ++m) order_.push_back(m);
  }
  if (static_cast<int>(order_.size()) != kicks)
    throw DimensionError("RandomWalkStepper: kick order must list every dissipator once");
  std::vector<bool> seen(static_cast<std::size_t>(kicks), false);
  for (int m : order_) {
    if (m < 0 || m >= kicks || seen[m])
      throw DimensionError("RandomWalkStepper: kick order is not a permutation");
    seen[m] = true;
  }
  hamiltonian_step_ = hermitian_exp(model.hamiltonian(), dt);
  const double kick = std::sqrt(2.0 * dt);
  for (const auto& x : model.dissipators())
    kick_.push_back({hermitian_exp(x, kick), hermitian_exp(x, -kick)});
}

ComplexVector<double> RandomWalkStepper::step(const ComplexVector<double>& psi,
                                              std::span<const int> signs) const {
  if (signs.size() != kick_.size()) throw DimensionError("RandomWalkStepper::step: wrong sign count");
  ComplexVector<double> out = hamiltonian_step_ * psi;
  for (int m : order_) out = kick_[m][signs[m] > 0 ? 0 : 1] * out;
  return out;
}

ComplexMatrix<double> RandomWalkStepper::branch_average(const ComplexMatrix<double>& rho) const {
  // The sign average factorises over m because each kick is independent.
  ComplexMatrix<double> out = hamiltonian_step_ * rho * hamiltonian_step_.adjoint();
  for (int m : order_) {
    const auto& plus = kick_[m][0];
    const auto& minus = kick_[m][1];
    out = 0.5 * (plus * out * plus.adjoint() + minus * out * minus.adjoint());
  }
  return out;
}

SignStream indexed_signs(std::uint64_t seed, std::uint64_t run) {
  return [seed, run](long step, int m) {
    return indexed_prng(seed, run, static_cast<std::uint64_t>(step), static_cast<std::uint64_t>(m))
        .sign;
  };
}

std::vector<TimedState> random_walk_trajectory(const PureState& psi0, const FockModel& model,
                                               double dt, double t_final, const SignStream& signs,
                                               const std::vector<double>& snapshot_times) {
  if (std::abs(psi0.amplitudes.norm() - 1.0) > kUnitNormTol)
    throw PreconditionError("random_walk_trajectory: psi0 is not unit norm");
  if (psi0.amplitudes.size() != static_cast<Eigen::Index>(model.basis()->size()))
    throw DimensionError("random_walk_trajectory: psi0 does not match the Fock basis");
  const RandomWalkStepper stepper(model, dt);
  const long steps = total_steps(t_final, dt);
  const int kicks = static_cast<int>(model.dissipators().size());

  std::vector<TimedState> out;
  std::size_t next = 0;
  ComplexVector<double> psi = psi0.amplitudes;
  auto record = [&](long step) {
    while (next < snapshot_times.size() &&
           std::min(snapshot_step(snapshot_times[next], dt), steps) == step) {
      out.push_back({static_cast<double>(step) * dt, {model.basis(), psi}});
      ++next;
    }
  };
  record(0);
  std::vector<int> q(static_cast<std::size_t>(kicks));
  for (long s = 0; s < steps; ++s) {
    for (int m = 0; m < kicks; ++m) q[m] = signs(s, m);
    psi = stepper.step(psi, q);
    record(s + 1);
  }
  return out;
}

std::vector<TimedDensity> random_walk_ensemble(const PureState& psi0, const FockModel& model,
                                               double dt, double t_final, int samples,
                                               std::uint64_t seed,
                                               const std::vector<double>& snapshot_times,
                                               int workers) {
  if (samples < 1) throw ValidationError("random_walk_ensemble: samples must be positive");
  std::vector<std::vector<TimedState>> runs(static_cast<std::size_t>(samples));
  parallel_for(samples, workers, [&](long k) {
    runs[k] = random_walk_trajectory(psi0, model, dt, t_final,
                                     indexed_signs(seed, static_cast<std::uint64_t>(k)),
                                     snapshot_times);
  });
  std::vector<TimedDensity> out;
  const auto dim = static_cast<Eigen::Index>(model.basis()->size());
  for (std::size_t s = 0; s < snapshot_times.size(); ++s) {
    ComplexMatrix<double> rho = ComplexMatrix<double>::Zero(dim, dim);
    for (const auto& run : runs) rho.noalias() += run[s].state.amplitudes * run[s].state.amplitudes.adjoint();
    out.push_back({runs.front()[s].time, {model.basis(), rho / static_cast<double>(samples)}});
  }
  return out;
}

std::vector<TimedDensity> branch_averaged_evolution(const DensityMatrix& rho0,
                                                    const FockModel& model, double dt,
                                                    double t_final,
                                                    const std::vector<double>& snapshot_times) {
  const RandomWalkStepper stepper(model, dt);
  const long steps = total_steps(t_final, dt);
  std::vector<TimedDensity> out;
  std::size_t next = 0;
  ComplexMatrix<double> rho = rho0.rho;
  auto record = [&](long step) {
    while (next < snapshot_times.size() &&
           std::min(snapshot_step(snapshot_times[next], dt), steps) == step) {
      out.push_back({static_cast<double>(step) * dt, {model.basis(), rho}});
      ++next;
    }
  };
  record(0);
  for (long s = 0; s < steps; ++s) {
    rho = stepper.branch_average(rho);
    record(s + 1);
  }
  return out;
}

ComplexMatrix<double> ensemble_amplitudes(const RealMatrix<double>& states, const FockBasis& basis,
                                          RadialWeight weight) {
  if (states.rows() != 2 * basis.modes())
    throw DimensionError("ensemble_amplitudes: state length does not match the basis");
  const auto dim = static_cast<Eigen::Index>(basis.size());
  ComplexMatrix<double> amps(dim, states.cols());
  for (Eigen::Index k = 0; k < states.cols(); ++k) {
    const ModeVector z = to_complex(states.col(k));
    const double norm = z.norm();
    if (!(norm > 0)) throw SingularityError("ensemble_amplitudes: sample with |z| = 0");
    ComplexVector<double> amp = coherent_amplitudes(z / norm, basis);
    if (weight == RadialWeight::kPointMap) amp *= std::pow(norm, basis.bosons());
    amps.col(k) = amp;
  }
  return amps;
}

DensityMatrix ensemble_to_rho(const RealMatrix<double>& states, const BasisPtr& basis,
                              RadialWeight weight) {
  if (states.cols() == 0) throw ValidationError("ensemble_to_rho: empty ensemble");
  const ComplexMatrix<double> amps = ensemble_amplitudes(states, *basis, weight);
  ComplexMatrix<double> rho = amps * amps.adjoint() / static_cast<double>(states.cols());
  return {basis, rho};
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.rho.rows() != b.rho.rows() || a.rho.cols() != b.rho.cols())
    throw DimensionError("trace_distance: density matrices differ in dimension");
  return trace_norm(a.rho - b.rho);
}

double bootstrap_trace_distance_std(const ComplexMatrix<double>& amplitudes,
                                    const ComplexMatrix<double>& exact, int resamples,
                                    std::uint64_t seed) {
  const Eigen::Index samples = amplitudes.cols();
  if (samples == 0 || resamples < 2) throw ValidationError("bootstrap: need samples and >= 2 resamples");
  if (exact.rows() != amplitudes.rows()) throw DimensionError("bootstrap: dimension mismatch");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, samples - 1);
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(resamples));
  ComplexMatrix<double> rho(exact.rows(), exact.cols());
  for (int b = 0; b < resamples; ++b) {
    rho.setZero();
    for (Eigen::Index k = 0; k < samples; ++k) {
      const auto col = amplitudes.col(pick(rng));
      rho.noalias() += col * col.adjoint();
    }
    rho /= static_cast<double>(samples);
    dist.push_back(trace_norm(rho - exact));
  }
  double mean = 0;
  for (double d : dist) mean += d;
  mean /= static_cast<double>(dist.size());
  double var = 0;
  for (double d : dist) var += (d - mean) * (d - mean);
  return std::sqrt(var / static_cast<double>(dist.size() - 1));
}

double beta_witness(const ModeVector& z, const ModeVector& w, int n) {
  if (z.size() != w.size()) throw DimensionError("beta_witness: z and w differ in length");
  require_unit(z, "beta_witness: z");
  require_unit(w, "beta_witness: w");
  const cplx zw = z.dot(w);  // z^* . w
  if (std::abs(zw.real()) > kUnitNormTol)
    throw PreconditionError("beta_witness: Re(z^* . w) must vanish");
  const cplx i(0, 1);
  const FockBasis basis(n, static_cast<int>(z.size()));
  const ComplexVector<double> psi = coherent_amplitudes(z, basis);
  const ComplexMatrix<double> p = psi * psi.adjoint();
  const ModeVector b = w - zw * z;
  const ComplexMatrix<double> m = lift_one_body(i * b * z.adjoint(), basis);
  const auto eye = ComplexMatrix<double>::Identity(p.rows(), p.cols());
  const ComplexMatrix<double> e =
      (m - 2.0 * i * zw * eye) * m * p - m * p * m.adjoint() + static_cast<double>(n) * zw * zw * p;
  return trace_norm(e + e.adjoint());
}

double beta_pointwise_bound(const ModeVector& z, const ModeVector& w, int n) {
  const cplx zw = z.dot(w);
  const double b = (w - zw * z).norm();
  const double nn = n;
  return 2.0 * (std::sqrt(2.0 * nn * (nn - 1.0)) * b * b + nn + 2.0 * std::sqrt(nn) * std::abs(zw) * b);
}

std::vector<ModeVector> random_unit_grid(int modes, int count, std::uint64_t seed) {
  std::vector<ModeVector> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    ModeVector z = to_complex(step_noise(seed, static_cast<std::uint64_t>(k), 0, modes));
    z.normalize();
    grid.push_back(std::move(z));
  }
  return grid;
}

double alpha_perp_max(const SystemSpec& spec, std::span<const ModeVector> grid) {
  if (grid.empty()) throw ValidationError("alpha_perp_max: empty grid");
  double best = 0;
  for (const auto& z : grid) best = std::max(best, alpha_perp(z, spec));
  return best;
}

ErrorBoundReport error_bound_check(const SystemSpec& spec, double t,
                                   std::span<const ModeVector> grid, const DensityMatrix& rho_plus,
                                   const DensityMatrix& rho_exact, double statistical_tolerance) {
  ErrorBoundReport rep;
  rep.alpha_perp_max = alpha_perp_max(spec, grid);
  rep.bound = 6.0 * spec.n * t * rep.alpha_perp_max;
  rep.empirical = trace_distance(rho_plus, rho_exact);
  rep.tolerance = statistical_tolerance;
  rep.pass = rep.empirical <= rep.bound + statistical_tolerance;
  return rep;
}

}  // namespace bosde
