#include <doctest.h>

#include <random>

#include "afrit/controller.hpp"
#include "afrit/errors.hpp"
#include "support.hpp"

using namespace afrit;

TEST_CASE("pure proportional passes the error through") {
  PidBasis basis(0.01);
  const ControllerParams p(1.0, 0.0, 0.0);
  for (double e : {0.3, -1.0, 7.5}) CHECK(control_step(p, basis, e) == e);
}

TEST_CASE("pure integral accumulates Ts per unit error") {
  PidBasis basis(0.01);
  const ControllerParams p(0.0, 1.0, 0.0);
  for (int k = 0; k < 100; ++k) CHECK(control_step(p, basis, 1.0) == doctest::Approx(0.01 * (k + 1)));
}

TEST_CASE("pure derivative differences and divides by Ts") {
  PidBasis basis(0.01);
  const ControllerParams p(0.0, 0.0, 1.0);
  CHECK(control_step(p, basis, 1.0) == doctest::Approx(100.0));
  CHECK(control_step(p, basis, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("regress_basis examples") {
  for (const auto& v : regress_basis(0.01, std::vector<double>(10, 0.0))) CHECK(v.isZero());
  const auto imp = regress_basis(0.01, std::vector<double>{1.0, 0.0, 0.0});
  CHECK(imp[0](0) == doctest::Approx(1.0));
  CHECK(imp[0](1) == doctest::Approx(0.01));
  CHECK(imp[0](2) == doctest::Approx(100.0));
  CHECK(imp[1](0) == 0.0);
  CHECK(imp[1](1) == doctest::Approx(0.01));
  CHECK(imp[1](2) == doctest::Approx(-100.0));
}

TEST_CASE("ts must be positive") {
  CHECK_THROWS_AS(PidBasis(0.0), ConfigError);
  CHECK_THROWS_AS(PidBasis(-0.01), ConfigError);
}

TEST_CASE("property: control stream equals theta^T regress_basis") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const ControllerParams p(testing::random_vec(rng));
    const auto e = testing::random_sequence(rng, 500);
    const auto phi = regress_basis(0.01, e);
    PidBasis basis(0.01);
    for (std::size_t k = 0; k < e.size(); ++k) {
      const double u = control_step(p, basis, e[k]);
      const double lin = p.theta.dot(phi[k]);
      CHECK(std::abs(u - lin) <= 1e-10 * std::max(1.0, std::abs(lin)));
    }
  }
}

TEST_CASE("property: linear in theta") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 a = testing::random_vec(rng), b = testing::random_vec(rng);
    const auto e = testing::random_sequence(rng, 300);
    PidBasis ba(0.01), bb(0.01), bs(0.01);
    for (double x : e) {
      const double ua = control_step(ControllerParams(a), ba, x);
      const double ub = control_step(ControllerParams(b), bb, x);
      const double us = control_step(ControllerParams(Vec3(a + b)), bs, x);
      CHECK(std::abs(us - (ua + ub)) <= 1e-12 * std::max(1.0, std::abs(us)) * 100);
    }
  }
}

TEST_CASE("single-filter PID matches the basis form") {
  std::mt19937_64 rng(23);
  const ControllerParams p(0.107, 0.1515, 0.0115);
  const auto e = testing::random_sequence(rng, 400);
  const auto single = pid_filter(p, 0.01).filter(e);
  PidBasis basis(0.01);
  for (std::size_t k = 0; k < e.size(); ++k)
    CHECK(single[k] == doctest::Approx(control_step(p, basis, e[k])).epsilon(1e-9));
  const auto filt = pid_filter(p, 0.01);
  const auto& n = filt.numerator();
  // Leading coefficient after normalization by Ts.
  CHECK(n[0] * 0.01 == doctest::Approx(0.107 * 0.01 + 0.1515 * 1e-4 + 0.0115));
}

TEST_CASE("positive orthant check") {
  CHECK(ControllerParams(0.1, 0.1, 0.01).in_positive_orthant());
  CHECK_FALSE(ControllerParams(0.1, -0.1, 0.01).in_positive_orthant());
}
