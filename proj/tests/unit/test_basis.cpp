#include <doctest.h>

#include "hjr/basis.hpp"

#include <cmath>
#include <numbers>

using namespace hjr;

TEST_CASE("registry") {
  CHECK(basis_names().size() == 3);
  for (auto name : basis_names()) CHECK(basis(name).name() == name);
  CHECK_THROWS_AS(basis("nope"), InvalidArgument);
  CHECK(basis("poly-trig-10").n() == 10);
  CHECK(basis("fourier-21").n() == 21);
  CHECK(basis("quad-monomial-3d").n() == 10);
  CHECK(basis("quad-monomial-3d").labels().size() == 10);
}

TEST_CASE("evaluation examples") {
  const Vector f = feature_row(basis("fourier-21"), 0.25);
  CHECK(f(0) == 1.0);
  CHECK(f(1) == doctest::Approx(1.0));
  CHECK(std::abs(f(2)) < 1e-15);

  const std::vector<double> x{1.0, 0.8, 0.5};
  Vector want(10);
  want << 1, 1, 0.8, 0.5, 1, 0.64, 0.25, 0.8, 0.4, 0.5;
  CHECK((feature_row(basis("quad-monomial-3d"), x) - want).cwiseAbs().maxCoeff() < 1e-15);

  Vector zero = Vector::Zero(10);
  zero(0) = 1.0;
  CHECK(feature_row(basis("poly-trig-10"), 0.0) == zero);
}

TEST_CASE("arity and derivative availability") {
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(feature_row(basis("quad-monomial-3d"), two), DimensionError);
  CHECK_THROWS_AS(feature_row(basis("fourier-21"), two), DimensionError);
  CHECK_FALSE(basis("quad-monomial-3d").has_derivatives());
  CHECK_THROWS_AS(residual_row(basis("quad-monomial-3d"), 0.1, 0.01, -1.0), InvalidArgument);
}

TEST_CASE("residual rows") {
  const Vector r = residual_row(basis("fourier-21"), 0.25, 0.01, -1.0);
  CHECK(r(0) == -1.0);
  CHECK(r(1) == doctest::Approx(-1.394784176).epsilon(1e-9));
  CHECK(std::abs(r(2)) < 1e-12);
}

TEST_CASE("property: analytic derivatives match finite differences") {
  for (auto name : {"poly-trig-10", "fourier-21"}) {
    const BasisSet& b = basis(name);
    REQUIRE(b.has_derivatives());
    for (double x : {0.0, 0.13, 0.5, 0.77, 1.0, 2.5}) {
      const double h = 1e-5;
      const Vector fd1 = (feature_row(b, x + h) - feature_row(b, x - h)) / (2 * h);
      const Vector fd2 = (b.d1(x + h) - b.d1(x - h)) / (2 * h);
      const double scale = 1.0 + b.d2(x).cwiseAbs().maxCoeff();
      CHECK((fd1 - b.d1(x)).cwiseAbs().maxCoeff() <= 1e-6 * scale);
      CHECK((fd2 - b.d2(x)).cwiseAbs().maxCoeff() <= 1e-6 * scale * 40);
    }
  }
}
