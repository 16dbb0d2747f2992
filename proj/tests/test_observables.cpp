#include <doctest.h>

#include "bosde/dnse.hpp"
#include "bosde/observables.hpp"
#include "bosde/oracle.hpp"
#include "bosde/sde.hpp"
#include "test_util.hpp"

using namespace bosde;

namespace {

DensityMatrix random_density(const BasisPtr& b) {
  // mixture of a few coherent states
  DensityMatrix rho{b, ComplexMatrix<double>::Zero(b->size(), b->size())};
  const double w[] = {0.5, 0.3, 0.2};
  for (double wk : w) {
    const auto psi = coherent_product_state(testutil::random_unit_z(b->modes()), b);
    rho.rho += wk * psi.amplitudes * psi.amplitudes.adjoint();
  }
  return rho;
}

}  // namespace

TEST_CASE("scaled number operator has expectation one") {
  const auto b = fock_basis(3, 3);
  const OneBodyObservable number{ComplexMatrix<double>::Identity(3, 3), true};
  CHECK(expect_rho(number, random_density(b)) == doctest::Approx(1.0).epsilon(1e-12));
  const OneBodyObservable raw{ComplexMatrix<double>::Identity(3, 3), false};
  CHECK(expect_rho(raw, random_density(b)) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("population on a coherent product state") {
  const auto b = fock_basis(4, 3);
  const ModeVector z = testutil::random_unit_z(3);
  const auto rho = pure_density(coherent_product_state(z, b));
  for (int j = 0; j < 3; ++j) CHECK(expect_rho(population(j, 3), rho) == doctest::Approx(std::norm(z(j))).epsilon(1e-12));
  const OneBodyObservable o{testutil::random_hermitian(3), true};
  CHECK(expect_rho(o, rho) == doctest::Approx(z.dot(o.O * z).real()).epsilon(1e-12));
}

TEST_CASE("expectation is linear") {
  const auto b = fock_basis(3, 2);
  const auto rho = random_density(b);
  const auto o1 = testutil::random_hermitian(2), o2 = testutil::random_hermitian(2);
  const double a = 0.7, c = -1.3;
  const double lhs = expect_rho(OneBodyObservable{a * o1 + c * o2}, rho);
  const double rhs = a * expect_rho(OneBodyObservable{o1}, rho) + c * expect_rho(OneBodyObservable{o2}, rho);
  CHECK(std::abs(lhs - rhs) <= 1e-12);
  const FockObservable f{lifted(OneBodyObservable{o1}, *b)};
  CHECK(std::abs(expect_rho(f, rho) - expect_rho(OneBodyObservable{o1}, rho)) <= 1e-12);
}

TEST_CASE("invalid observables are rejected") {
  const auto b = fock_basis(2, 2);
  ComplexMatrix<double> bad(2, 2);
  bad << 0, 1, 0, 0;
  CHECK_THROWS_AS(validate_observable(OneBodyObservable{bad}), ValidationError);
  CHECK_THROWS_AS(expect_rho(OneBodyObservable{ComplexMatrix<double>::Identity(3, 3)}, pure_density(coherent_product_state(testutil::random_unit_z(2), b))), DimensionError);
  CHECK_THROWS_AS(expect_rho(FockObservable{ComplexMatrix<double>::Identity(2, 2)}, pure_density(coherent_product_state(testutil::random_unit_z(2), b))), DimensionError);
  CHECK_THROWS_AS(expect_sde(population(0, 2), RealMatrix<double>(4, 0), 2), ValidationError);
}

TEST_CASE("delta ensemble gives y(z) with zero error") {
  const ModeVector z = testutil::random_unit_z(3);
  RealMatrix<double> states(6, 5);
  for (int k = 0; k < 5; ++k) states.col(k) = to_real(z);
  const OneBodyObservable o{testutil::random_hermitian(3)};
  const SampleEstimate est = expect_sde(o, states, 4);
  CHECK(est.mean == doctest::Approx(z.dot(o.O * z).real()).epsilon(1e-14));
  CHECK(est.std_error == 0);
  const SampleEstimate unscaled = expect_sde(OneBodyObservable{o.O, false}, states, 4);
  CHECK(unscaled.mean == doctest::Approx(4 * est.mean).epsilon(1e-14));
  CHECK(expect_sde(OneBodyObservable{ComplexMatrix<double>::Identity(3, 3)}, states, 4).mean == doctest::Approx(1.0));
}

TEST_CASE("sample and density estimators coincide on finite ensembles") {
  const int n = 3;
  const auto b = fock_basis(n, 3);
  RealMatrix<double> states(6, 40);
  for (int k = 0; k < 40; ++k) states.col(k) = to_real(ModeVector(testutil::random_z(3)));
  const OneBodyObservable o{testutil::random_hermitian(3)};
  const double via_rho = expect_rho(o, ensemble_to_rho(states, b));
  CHECK(std::abs(expect_sde(o, states, n).mean - via_rho) <= 1e-10);
  const OneBodyObservable raw{o.O, false};
  CHECK(std::abs(expect_sde(raw, states, n).mean - expect_rho(raw, ensemble_to_rho(states, b))) <= 1e-10);
}

TEST_CASE("output bound is the spectral norm times the distance") {
  const auto b = fock_basis(2, 2);
  CHECK(output_error_bound(population(0, 2), *b, 0.0) == 0.0);
  // |0><0| / n lifts to diag(1, 1/2, 0): norm 1
  CHECK(output_error_bound(population(0, 2), *b, 0.03) == doctest::Approx(0.03));
  CHECK(output_error_bound(OneBodyObservable{population(0, 2).O, false}, *b, 0.03) == doctest::Approx(0.06));
  CHECK_THROWS_AS(output_error_bound(population(0, 2), *b, -1.0), ValidationError);
}

TEST_CASE("Hoelder bound holds on the lattice benchmark") {
  dnse::DnseParams p;
  p.N = 2;
  p.n = 2;
  p.H0 = dnse::ring_hopping(2);
  p.c = 1.0;
  const SystemSpec s = dnse::build_dnse_spec(p);
  ModeVector z0(2);
  z0 << 1, 0;
  SdeConfig cfg;
  cfg.dt = 2e-3;
  cfg.t_final = 0.5;
  cfg.samples = 4000;
  cfg.seed = 17;
  cfg.snapshot_times = {0.25, 0.5};
  const auto ens = run_ensemble(z0, s, cfg);
  const FockModel model(s);
  const auto exact = integrate_lindblad(pure_density(coherent_product_state(z0, model.basis())), model, 1e-3, {0.25, 0.5});
  for (std::size_t k = 0; k < 2; ++k) {
    const auto rho = ensemble_to_rho(ens.snapshots[k].states, model.basis());
    const double dist = trace_distance(rho, exact[k].state);
    for (int j = 0; j < 2; ++j) {
      const SampleEstimate est = expect_sde(population(j, 2), ens.snapshots[k].states, 2);
      const double ref = expect_rho(population(j, 2), exact[k].state);
      CHECK(std::abs(est.mean - ref) <= output_error_bound(population(j, 2), *model.basis(), dist) + 3 * est.std_error);
    }
  }
}
