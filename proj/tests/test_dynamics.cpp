#include <doctest.h>

#include <numbers>

#include "bosde/dnse.hpp"
#include "bosde/dynamics.hpp"
#include "test_util.hpp"

using namespace bosde;
using testutil::max_abs;

namespace {

const cplx I(0, 1);

SystemSpec empty_spec(Eigen::Index N) {
  SystemSpec s;
  s.H0 = ComplexMatrix<double>::Zero(N, N);
  s.tensor = InteractionTensor(N);
  s.n = 1;
  return s;
}

ComplexMatrix<double> loop_B(const ModeVector& z, const InteractionTensor& h) {
  const Eigen::Index N = z.size();
  ComplexMatrix<double> b = ComplexMatrix<double>::Zero(N, N);
  for (Eigen::Index j = 0; j < N; ++j)
    for (Eigen::Index k = 0; k < N; ++k)
      for (Eigen::Index l = 0; l < N; ++l)
        for (Eigen::Index m = 0; m < N; ++m)
          b(j, k) += -0.5 * I * (h(j, k, l, m) + h(k, j, l, m)) * z(l) * z(m);
  return b;
}

}  // namespace

TEST_CASE("B vanishes for a zero tensor") {
  const ModeVector z = testutil::random_z(3);
  CHECK(max_abs(compute_B(z, InteractionTensor(3))) == 0);
}

TEST_CASE("B for the on-site tensor at a single occupied mode") {
  ModeVector z(2);
  z << 1, 0;
  const ComplexMatrix<double> b = compute_B(z, InteractionTensor::kronecker(2));
  CHECK(std::abs(b(0, 0) - (-I)) < 1e-15);
  CHECK(std::abs(b(0, 1)) == 0);
  CHECK(std::abs(b(1, 0)) == 0);
  CHECK(std::abs(b(1, 1)) == 0);
}

TEST_CASE("B matches a nested-loop reference") {
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = testutil::random_hermitian_tensor(3);
    const ModeVector z = testutil::random_z(3);
    CHECK(max_abs(compute_B(z, h) - loop_B(z, h)) <= 1e-12);
  }
  CHECK_THROWS_AS(compute_B(testutil::random_z(2), InteractionTensor(3)), DimensionError);
}

TEST_CASE("drift examples") {
  SystemSpec s = empty_spec(2);
  ModeVector z(2);
  z << 1, 0;
  CHECK(max_abs(compute_drift(z, s)) == 0);

  s.H0 << 1, 0, 0, -1;
  ModeVector f = compute_drift(z, s);
  CHECK(std::abs(f(0) - (-I)) < 1e-15);
  CHECK(std::abs(f(1)) == 0);

  for (double c : {0.5, 2.0}) {
    for (int n : {1, 3}) {
      dnse::DnseParams p;
      p.N = 2;
      p.n = n;
      p.H0 = ComplexMatrix<double>::Zero(2, 2);
      p.c = c;
      f = compute_drift(z, dnse::build_dnse_spec(p));
      CHECK(std::abs(f(0) - (-I - c / n)) < 1e-14);
      CHECK(std::abs(f(1)) < 1e-15);
    }
  }
  CHECK_THROWS_AS(compute_drift(ModeVector::Zero(2), s), SingularityError);
}

TEST_CASE("drift is -i H0 z without interactions or dissipators") {
  SystemSpec s = empty_spec(4);
  s.H0 = testutil::random_hermitian(4);
  const ModeVector z = testutil::random_z(4);
  CHECK(max_abs(compute_drift(z, s) - (-I * s.H0 * z)) <= 1e-14);
}

TEST_CASE("drift preserves |z| for Hermitian interactions") {
  for (int trial = 0; trial < 100; ++trial) {
    SystemSpec s = empty_spec(3);
    s.H0 = testutil::random_hermitian(3);
    s.tensor = testutil::random_hermitian_tensor(3);
    const ModeVector z = testutil::random_unit_z(3);
    CHECK(std::abs(z.dot(compute_drift(z, s)).real()) <= 1e-12);
  }
}

TEST_CASE("lattice right-hand side examples") {
  const auto H0 = ComplexMatrix<double>::Zero(2, 2);
  ModeVector z(2);
  z << 1, 0;
  ModeVector f = dnse_rhs(z, H0);
  CHECK(std::abs(f(0) - (-I)) < 1e-15);
  CHECK(std::abs(f(1)) == 0);
  z << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  f = dnse_rhs(z, H0);
  const cplx expect = -I / (2 * std::sqrt(2.0));
  CHECK(std::abs(f(0) - expect) < 1e-15);
  CHECK(std::abs(f(1) - expect) < 1e-15);
  CHECK_THROWS_AS(dnse_rhs(ModeVector::Zero(2), H0), SingularityError);
}

TEST_CASE("lattice right-hand side equals the large-n drift of the on-site spec") {
  for (int trial = 0; trial < 50; ++trial) {
    dnse::DnseParams p;
    p.N = 4;
    p.n = 3;
    p.H0 = testutil::random_hermitian(4);
    p.c = 1.5;
    const SystemSpec s = dnse::build_dnse_spec(p);
    const ModeVector z = testutil::random_z(4);
    CHECK(max_abs(meanfield_drift(z, s) - dnse_rhs(z, p.H0)) <= 1e-12);
    SystemSpec no_x = s;
    no_x.Xs.clear();
    CHECK(max_abs(compute_drift(z, no_x) - dnse_rhs(z, p.H0)) <= 1e-12);
  }
}

TEST_CASE("real linear generator is antisymmetric") {
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = testutil::random_hermitian(3);
    const RealMatrix<double> a = real_linear_generator(h);
    CHECK(max_abs(a + a.transpose()) <= 1e-12);
    const ModeVector z = testutil::random_z(3);
    CHECK(max_abs(a * to_real(z) - to_real(ModeVector(-I * h * z))) <= 1e-12);
  }
}

TEST_CASE("RK4 on a linear problem") {
  ComplexMatrix<double> H0(2, 2);
  H0 << 1, 0, 0, -1;
  ModeVector z0(2);
  z0 << 1, 0;
  const auto rhs = [&](const ModeVector& z) { return ModeVector(-I * H0 * z); };
  const OdeSolution sol = integrate_meanfield(z0, rhs, std::numbers::pi, 1e-3);
  CHECK(sol.times.back() == std::numbers::pi);
  CHECK(std::abs(sol.states.back()(0) - cplx(-1, 0)) <= 1e-8);
  CHECK(std::abs(sol.states.back()(1)) <= 1e-8);
  CHECK(sol.times.size() == sol.states.size());
  for (std::size_t k = 1; k < sol.times.size(); ++k) CHECK(sol.times[k] > sol.times[k - 1]);
}

TEST_CASE("RK4 global error is fourth order") {
  ComplexMatrix<double> H0(2, 2);
  H0 << 0.3, cplx(1, 0.5), cplx(1, -0.5), -0.7;
  ModeVector z0(2);
  z0 << 0.6, cplx(0, 0.8);
  const auto rhs = [&](const ModeVector& z) { return ModeVector(-I * H0 * z); };
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<double>> es(H0);
  const double t = 2.0;
  const ModeVector exact = es.eigenvectors() *
                           (-I * t * es.eigenvalues().cast<cplx>()).array().exp().matrix().asDiagonal() *
                           es.eigenvectors().adjoint() * z0;
  const double e1 = (integrate_meanfield(z0, rhs, t, 0.1).states.back() - exact).norm();
  const double e2 = (integrate_meanfield(z0, rhs, t, 0.05).states.back() - exact).norm();
  CHECK(e1 / e2 >= 12);
}

TEST_CASE("on-site phase rotation from a single occupied mode") {
  dnse::DnseParams p;
  p.N = 2;
  p.n = 1;
  p.H0 = ComplexMatrix<double>::Zero(2, 2);
  ModeVector z0(2);
  z0 << 1, 0;
  const auto rhs = [&](const ModeVector& z) { return dnse_rhs(z, p.H0); };
  const OdeSolution sol = integrate_meanfield(z0, rhs, 1.0, 1e-3);
  CHECK(std::abs(sol.states.back()(0) - std::exp(-I)) <= 1e-8);
  const SystemSpec s = dnse::build_dnse_spec(p);
  const OdeSolution sol2 =
      integrate_meanfield(z0, [&](const ModeVector& z) { return meanfield_drift(z, s); }, 1.0, 1e-3);
  CHECK(std::abs(sol2.states.back()(0) - std::exp(-I)) <= 1e-8);
}

TEST_CASE("mean-field norm drift stays below 1e-8 over t = 10") {
  for (int trial = 0; trial < 3; ++trial) {
    const ComplexMatrix<double> H0 = dnse::ring_hopping(3 + trial);
    const ModeVector z0 = testutil::random_unit_z(3 + trial);
    const OdeSolution sol =
        integrate_meanfield(z0, [&](const ModeVector& z) { return dnse_rhs(z, H0); }, 10.0, 1e-3);
    double worst = 0;
    for (const auto& z : sol.states) worst = std::max(worst, std::abs(z.norm() - 1));
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("final step is shortened to land on t_final") {
  ModeVector z0(1);
  z0 << 1;
  const auto rhs = [](const ModeVector& z) { return ModeVector(-I * z); };
  const OdeSolution sol = integrate_meanfield(z0, rhs, 0.25, 0.1);
  REQUIRE(sol.times.size() == 4);
  CHECK(sol.times.back() == 0.25);
  CHECK(std::abs(sol.states.back()(0) - std::exp(-0.25 * I)) < 1e-6);
  const OdeSolution euler = integrate_meanfield(z0, rhs, 0.2, 0.1, OdeStepper::kEuler);
  CHECK(std::abs(euler.states.back()(0) - (1.0 - 0.1 * I) * (1.0 - 0.1 * I)) < 1e-15);
}

TEST_CASE("spec validation names the offending field") {
  SystemSpec s = empty_spec(2);
  s.H0(0, 1) = 1.0;
  try {
    s.validate();
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("system.H0") != std::string::npos);
  }
  s = empty_spec(2);
  s.Xs.push_back(ComplexMatrix<double>::Zero(3, 3));
  CHECK_THROWS_AS(s.validate(), DimensionError);
  s = empty_spec(2);
  s.n = 0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
}
