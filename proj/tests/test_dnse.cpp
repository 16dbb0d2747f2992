#include <doctest.h>

#include "bosde/diffusion.hpp"
#include "bosde/dnse.hpp"
#include "test_util.hpp"

using namespace bosde;
using namespace bosde::dnse;
using testutil::max_abs;

namespace {

DnseParams params(int N, int n, double c) {
  DnseParams p;
  p.N = N;
  p.n = n;
  p.H0 = ring_hopping(N);
  p.c = c;
  return p;
}

}  // namespace

TEST_CASE("ring hopping") {
  const auto h3 = ring_hopping(3);
  CHECK(h3(0, 1) == cplx(1));
  CHECK(h3(0, 2) == cplx(1));
  CHECK(h3(0, 0) == cplx(0));
  const auto h2 = ring_hopping(2);
  CHECK(h2(0, 1) == cplx(1));
  CHECK(h2(1, 0) == cplx(1));
  CHECK(is_hermitian(ring_hopping(5)));
}

TEST_CASE("on-site spec builder") {
  const SystemSpec s = build_dnse_spec(params(2, 3, 4.0));
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m) {
          const bool diag = j == k && k == l && l == m;
          CHECK(s.tensor(j, k, l, m) == cplx(diag ? 1.0 : 0.0));
        }
  REQUIRE(s.Xs.size() == 2);
  CHECK(max_abs(s.Xs[0] - ComplexMatrix<double>(Eigen::Vector2cd(2, 0).asDiagonal())) == 0);
  CHECK(max_abs(s.Xs[1] - ComplexMatrix<double>(Eigen::Vector2cd(0, 2).asDiagonal())) == 0);
  CHECK(s.n == 3);
}

TEST_CASE("diffusion block examples") {
  CHECK(max_abs(dnse_block(0.0, 2.0, 3)) == 0);
  for (double c : {0.0, 1.0, 7.5})
    for (int n : {1, 4}) {
      Eigen::Matrix2d expect;
      expect << 0, -0.25, -0.25, c;
      CHECK(max_abs(dnse_block(1.0, c, n) - expect / n) <= 1e-15);
    }
}

TEST_CASE("block assembly matches the general D") {
  for (int trial = 0; trial < 50; ++trial) {
    const double c = testutil::uniform(0, 10);
    const int n = 1 + trial % 5;
    const SystemSpec s = build_dnse_spec(params(3, n, c));
    const ModeVector z = testutil::random_z(3);
    const RealMatrix<double> d = compute_D(z, s);
    double block_mass = 0;
    for (int j = 0; j < 3; ++j) {
      const Eigen::Matrix2d b = dnse_block(z(j), c, n);
      CHECK(std::abs(d(j, j) - b(0, 0)) <= 1e-12);
      CHECK(std::abs(d(j, 3 + j) - b(0, 1)) <= 1e-12);
      CHECK(std::abs(d(3 + j, j) - b(1, 0)) <= 1e-12);
      CHECK(std::abs(d(3 + j, 3 + j) - b(1, 1)) <= 1e-12);
      block_mass += neg_mass(RealMatrix<double>(b));
    }
    // off-block entries vanish
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        if (a % 3 != b % 3) CHECK(std::abs(d(a, b)) <= 1e-14);
    CHECK(std::abs(block_mass - neg_mass(d)) <= 1e-12);
  }
}

TEST_CASE("closed-form eigenvalues") {
  auto [p0, m0] = lambda_pm(1.0, 0.0, 1);
  CHECK(p0 == doctest::Approx(0.25));
  CHECK(m0 == doctest::Approx(-0.25));
  auto [p1, m1] = lambda_pm(1.0, 1.0, 2);
  CHECK(p1 == doctest::Approx((2 + std::sqrt(5.0)) / 8));
  CHECK(m1 == doctest::Approx((2 - std::sqrt(5.0)) / 8));
  for (int trial = 0; trial < 100; ++trial) {
    const cplx zj(testutil::gauss(), testutil::gauss());
    const double c = testutil::uniform(0, 10);
    const int n = 1 + trial % 8;
    const auto [lp, lm] = lambda_pm(zj, c, n);
    const auto eig = sym_eig(RealMatrix<double>(dnse_block(zj, c, n)));
    CHECK(std::abs(eig.eigenvalues(0) - lp) <= 1e-12);
    CHECK(std::abs(eig.eigenvalues(1) - lm) <= 1e-12);
    CHECK(lp > 0);
    CHECK(lm < 0);
    CHECK(std::abs(lm) <= std::norm(zj) / (16 * n * c) * (1 + 1e-12));
  }
}

TEST_CASE("accuracy dial") {
  CHECK(c_for_error(1.0, 0.1) == doctest::Approx(3.75));
  CHECK(c_for_error(0.0, 0.1) == 0);
  for (double t : {0.3, 1.0, 5.0})
    for (double eps : {0.01, 0.1, 0.5}) {
      const double c = c_for_error(t, eps);
      CHECK(trace_error_bound(t, c) == doctest::Approx(eps).epsilon(1e-14));
      CHECK(6.0 * 2 * t * alpha_upper_bound(c, 2) == doctest::Approx(eps).epsilon(1e-14));
    }
  CHECK_THROWS_AS(c_for_error(1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(c_for_error(1.0, -1.0), ValidationError);
  CHECK(alpha_upper_bound(3.75, 2) == doctest::Approx(1.0 / 120));
  CHECK(alpha_upper_bound(7.5, 2) == doctest::Approx(0.5 * alpha_upper_bound(3.75, 2)));
  CHECK_THROWS(alpha_upper_bound(0.0, 2));
}

TEST_CASE("general negative mass is below the closed-form bound on the sphere") {
  const SystemSpec s = build_dnse_spec(params(2, 2, 3.75));
  for (int trial = 0; trial < 100; ++trial) {
    const ModeVector z = testutil::random_unit_z(2);
    CHECK(neg_mass(compute_D(z, s)) <= alpha_upper_bound(3.75, 2) + 1e-15);
  }
}

TEST_CASE("parameter validation") {
  DnseParams p = params(2, 2, -1.0);
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = params(2, 2, 1.0);
  p.epsilon = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}
