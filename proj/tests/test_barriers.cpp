#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "conipm/barrier.hpp"
#include "conipm/diagnostics.hpp"

using namespace conipm;

namespace {

ConeSpec orthant(int n) { return {{{BlockType::Orthant, n}}}; }
ConeSpec soc(int n) { return {{{BlockType::SecondOrder, n}}}; }

const std::vector<ConeSpec> kTestCones = {
    orthant(5),
    soc(4),
    {{{BlockType::Orthant, 2}, {BlockType::SecondOrder, 3}}},
};

}  // namespace

TEST_CASE("barrier values on reference points") {
  BarrierOracle orth3(orthant(3));
  REQUIRE(orth3.value(Vector::Ones(3)) == 0.0);
  REQUIRE(std::abs(orth3.value(2.0 * Vector::Ones(3)) - (-3.0 * std::log(2.0))) <= 1e-14);
  BarrierOracle q3(soc(3));
  Vector apex = Vector::Zero(3);
  apex(0) = 1.0;
  REQUIRE(q3.value(apex) == 0.0);
}

TEST_CASE("barrier gradients on orthant points") {
  BarrierOracle orth2(orthant(2));
  Vector x(2);
  x << 1, 1;
  REQUIRE((orth2.grad(x) - Vector::Constant(2, -1.0)).norm() <= 1e-15);
  x << 2, 4;
  Vector expected(2);
  expected << -0.5, -0.25;
  REQUIRE((orth2.grad(x) - expected).norm() <= 1e-15);
}

TEST_CASE("Hessian examples and scaling law") {
  BarrierOracle orth2(orthant(2));
  REQUIRE((orth2.hess(Vector::Ones(2)) - Matrix::Identity(2, 2)).norm() <= 1e-15);

  BarrierOracle q2(soc(2));
  Vector x(2);
  x << 1, 0;
  REQUIRE((q2.hess(x) - 2.0 * Matrix::Identity(2, 2)).norm() <= 1e-14);

  std::mt19937_64 rng(11);
  for (const auto& cone : kTestCones) {
    BarrierOracle barrier(cone);
    const Vector p = random_interior_point(cone, rng);
    const Matrix h1 = barrier.hess(p);
    const Matrix h3 = barrier.hess(3.0 * p);
    REQUIRE((h3 - h1 / 9.0).norm() <= 1e-12 * h1.norm());
  }
}

TEST_CASE("logarithmic homogeneity identities hold on random points") {
  std::mt19937_64 rng(2024);
  for (const auto& cone : kTestCones) {
    BarrierOracle barrier(cone);
    const double nu = barrier.nu();
    for (int i = 0; i < 1000; ++i) {
      const Vector x = random_interior_point(cone, rng);
      const Vector g = barrier.grad(x);
      const Matrix H = barrier.hess(x);
      REQUIRE(std::abs(g.dot(x) + nu) <= 1e-12 * nu);
      REQUIRE((H * x + g).norm() <= 1e-10 * g.norm());
      REQUIRE(std::abs(x.dot(H * x) - nu) <= 1e-10 * nu);
    }
    // Homogeneity of the value itself.
    const Vector x = random_interior_point(cone, rng);
    REQUIRE(std::abs(barrier.value(2.5 * x) - (barrier.value(x) - nu * std::log(2.5))) <= 1e-12);
  }
}

TEST_CASE("barrier inequality is tight for logarithmically homogeneous barriers") {
  std::mt19937_64 rng(99);
  for (const auto& cone : kTestCones) {
    BarrierOracle barrier(cone);
    const double nu = barrier.nu();
    for (int i = 0; i < 50; ++i) {
      const Vector x = random_interior_point(cone, rng);
      const Vector g = barrier.grad(x);
      const double val = g.dot(barrier.hess(x).llt().solve(g));
      REQUIRE(std::abs(val - nu) <= 1e-10 * nu);
    }
  }
}

TEST_CASE("dual barrier values") {
  BarrierOracle orth3(orthant(3));
  REQUIRE(std::abs(orth3.dual_value(Vector::Ones(3)) + 3.0) <= 1e-14);
  BarrierOracle q2(soc(2));
  Vector s(2);
  s << 1, 0;
  REQUIRE(std::abs(q2.dual_value(s) - (2.0 * std::log(2.0) - 2.0)) <= 1e-14);

  std::mt19937_64 rng(5);
  for (const auto& cone : kTestCones) {
    BarrierOracle barrier(cone);
    for (int i = 0; i < 100; ++i) {
      const Vector x = random_interior_point(cone, rng);
      REQUIRE(std::abs(barrier.value(x) + barrier.dual_value(-barrier.grad(x)) + barrier.nu()) <=
              1e-10 * barrier.nu());
    }
  }
}

TEST_CASE("conjugacy identities for gradient and Hessian") {
  BarrierOracle orth2(orthant(2));
  REQUIRE((orth2.dual_grad(Vector::Ones(2)) - Vector::Constant(2, -1.0)).norm() <= 1e-15);
  Vector x(2);
  x << 2, 3;
  REQUIRE((orth2.dual_grad(-orth2.grad(x)) + x).norm() <= 1e-14);
  x << 1, 2;
  const Matrix Hinv = orth2.hess(x).inverse();
  REQUIRE((orth2.dual_hess(-orth2.grad(x)) - Hinv).norm() <= 1e-12 * Hinv.norm());

  std::mt19937_64 rng(6);
  for (const auto& cone : kTestCones) {
    BarrierOracle barrier(cone);
    for (int i = 0; i < 100; ++i) {
      const Vector p = random_interior_point(cone, rng);
      const Vector s = -barrier.grad(p);
      REQUIRE((barrier.dual_grad(s) + p).norm() <= 1e-8 * (1.0 + p.norm()));
      const Matrix expect = barrier.hess(p).inverse();
      REQUIRE((barrier.dual_hess(s) - expect).norm() <= 1e-8 * (1.0 + expect.norm()));
    }
  }
}

TEST_CASE("interior membership") {
  BarrierOracle orth2(orthant(2));
  Vector x(2);
  x << 1, 0;
  REQUIRE_FALSE(orth2.is_interior(x));

  BarrierOracle q3(soc(3));
  Vector y(3);
  y << 1, 0.6, 0.6;  // ||(0.6, 0.6)|| ~ 0.8485 < 1
  REQUIRE(q3.is_interior(y));
  y << 1, 1, 1;
  REQUIRE_FALSE(q3.is_interior(y));
  REQUIRE_THROWS_AS(q3.value(y), NotInteriorError);
}

TEST_CASE("self-concordance finite-difference check") {
  BarrierOracle orth2(orthant(2));
  Vector e1 = Vector::Zero(2);
  e1(0) = 1.0;
  REQUIRE(orth2.scf_third_derivative_check(Vector::Ones(2), e1));
  REQUIRE(orth2.scf_third_derivative_check(Vector::Ones(2), Vector::Zero(2)));

  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto& cone : kTestCones) {
    BarrierOracle barrier(cone);
    for (int i = 0; i < 100; ++i) {
      const Vector x = random_interior_point(cone, rng);
      Vector h(barrier.dim());
      for (int j = 0; j < barrier.dim(); ++j) h(j) = normal(rng);
      REQUIRE(barrier.scf_third_derivative_check(x, h));
    }
  }
}

TEST_CASE("Dikin ellipsoid membership") {
  BarrierOracle orth1(orthant(1));
  REQUIRE(orth1.dikin_check(Vector::Ones(1), 0.0, 1, 0));
  // ||h||_x = |h| / x at x = 1: steps of 0.99 land at 0.01 and 1.99.
  REQUIRE(orth1.dikin_check(Vector::Ones(1), 0.99, 50, 1));

  std::mt19937_64 rng(8);
  for (const auto& cone : kTestCones) {
    BarrierOracle barrier(cone);
    const Vector x = random_interior_point(cone, rng);
    REQUIRE(barrier.dikin_check(x, 0.9, 100, 42));
  }
}

TEST_CASE("gradient and Hessian agree with finite differences") {
  std::mt19937_64 rng(9);
  for (const auto& cone : kTestCones) {
    BarrierOracle barrier(cone);
    const int n = barrier.dim();
    for (int trial = 0; trial < 5; ++trial) {
      const Vector x = random_interior_point(cone, rng);
      const Vector g = barrier.grad(x);
      const Matrix H = barrier.hess(x);
      const double step = 1e-5;
      for (int j = 0; j < n; ++j) {
        Vector e = Vector::Zero(n);
        e(j) = step;
        const double fd = (barrier.value(x + e) - barrier.value(x - e)) / (2.0 * step);
        REQUIRE(std::abs(fd - g(j)) <= 1e-6 * (1.0 + std::abs(g(j))));
        const Vector fd_row = (barrier.grad(x + e) - barrier.grad(x - e)) / (2.0 * step);
        REQUIRE((fd_row - H.col(j)).norm() <= 1e-5 * (1.0 + H.col(j).norm()));
      }
    }
  }
}

TEST_CASE("product cones concatenate blockwise") {
  ConeSpec prod = {{{BlockType::Orthant, 2}, {BlockType::SecondOrder, 3}}};
  BarrierOracle barrier(prod);
  BarrierOracle orth(orthant(2));
  BarrierOracle q(soc(3));
  REQUIRE(barrier.nu() == orth.nu() + q.nu());

  std::mt19937_64 rng(10);
  const Vector x = random_interior_point(prod, rng);
  const Vector xa = x.head(2);
  const Vector xb = x.tail(3);
  REQUIRE(std::abs(barrier.value(x) - (orth.value(xa) + q.value(xb))) <= 1e-14);
  Vector g(5);
  g.head(2) = orth.grad(xa);
  g.tail(3) = q.grad(xb);
  REQUIRE((barrier.grad(x) - g).norm() <= 1e-14);
  const Matrix H = barrier.hess(x);
  REQUIRE((H.block(0, 0, 2, 2) - orth.hess(xa)).norm() <= 1e-14);
  REQUIRE((H.block(2, 2, 3, 3) - q.hess(xb)).norm() <= 1e-14);
  REQUIRE(H.block(0, 2, 2, 3).norm() == 0.0);
}
