#include <doctest.h>

#include "hjr/basis.hpp"
#include "hjr/problems.hpp"

#include <cmath>
#include <numbers>

using namespace hjr;

TEST_CASE("rng is deterministic and well spread") {
  Rng a(123), b(123), c(124);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  CHECK(Rng(123).next() != c.next());
  Rng r(1);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.01);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("sin(10x) generator") {
  const GeneratedProblem p = gen_sin10x(100, 5, 1.0);
  const GeneratedProblem q = gen_sin10x(100, 5, 1.0);
  REQUIRE(p.blocks.size() == 100);
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    CHECK(p.blocks[i].phi == q.blocks[i].phi);
    CHECK(p.blocks[i].y == q.blocks[i].y);
  }
  const GeneratedProblem clean = gen_sin10x(50, 5, 0.0);
  for (std::size_t i = 0; i < clean.blocks.size(); ++i) {
    const double x = clean.sample_points[i];
    CHECK(x >= 0.0);
    CHECK(x < 10.0);
    CHECK(clean.blocks[i].y(0) == doctest::Approx(std::sin(10 * x)));
    CHECK(clean.blocks[i].phi.row(0).transpose() == feature_row(basis("poly-trig-10"), x));
  }
  CHECK(p.eval_grid.size() == 1001);
}

TEST_CASE("reaction-diffusion source") {
  const double w = 2 * std::numbers::pi;
  CHECK(reaction_f(0.25) == doctest::Approx(-0.03 * w * w - 1.0).epsilon(1e-14));
  CHECK(reaction_f(0.25) == doctest::Approx(-2.184352528).epsilon(1e-9));
  CHECK(reaction_f(0.0) == doctest::Approx(0.0));
  CHECK(reaction_u(0.25) == doctest::Approx(1.0));
  // f = D u'' + kappa u by central differences
  for (double x : {0.1, 0.37, 0.8}) {
    const double h = 1e-4;
    const double upp = (reaction_u(x + h) - 2 * reaction_u(x) + reaction_u(x - h)) / (h * h);
    CHECK(reaction_f(x) == doctest::Approx(kReactionD * upp + kReactionKappa * reaction_u(x)).epsilon(1e-6));
  }
}

TEST_CASE("reaction-diffusion generator layout") {
  const GeneratedProblem p = gen_reaction_diffusion(30, 2, 0.1, 5.0);
  REQUIRE(p.blocks.size() == 32);
  int boundary = 0;
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    if (p.groups[i] == 1) {
      ++boundary;
      CHECK(p.blocks[i].lambda == 5.0);
      CHECK(p.blocks[i].y(0) == 0.0);
    } else {
      CHECK(p.blocks[i].lambda == 1.0);
    }
  }
  CHECK(boundary == 2);
  CHECK(p.basis_name == "fourier-21");
  CHECK(p.truth.size() == 2);
}

TEST_CASE("K-O system") {
  const Eigen::Vector3d d = ko_rhs(kKoInitial);
  CHECK(d(0) == doctest::Approx(0.4));
  CHECK(d(1) == doctest::Approx(0.5));
  CHECK(d(2) == doctest::Approx(-1.6));

  const Trajectory traj(ko_rhs, kKoInitial, 10.0, 1e-3);
  const double c0 = kKoInitial(0) * kKoInitial(0) - kKoInitial(1) * kKoInitial(1);
  for (double t = 0.0; t <= 10.0; t += 0.137) {
    const Eigen::Vector3d x = traj.at(t);
    CHECK(std::abs(x(0) * x(0) - x(1) * x(1) - c0) <= 1e-6);
  }
}

TEST_CASE("K-O generator targets") {
  const GeneratedProblem p = gen_ko(50, 1e-4, 1e-3);
  REQUIRE(p.blocks.size() == 150);
  const Trajectory traj(ko_rhs, kKoInitial, 10.0, 1e-4);
  for (std::size_t j = 0; j < 50; ++j) {
    const double tau = p.sample_points[3 * j];
    const Eigen::Vector3d rhs = ko_rhs(traj.at(tau));
    for (int e = 0; e < 3; ++e) {
      CHECK(p.groups[3 * j + e] == e);
      CHECK(std::abs(p.blocks[3 * j + e].y(0) - rhs(e)) <= 1e-4);
    }
  }
  CHECK(p.sample_points[0] == doctest::Approx(10.0 / 51.0));
}

TEST_CASE("identified_rhs reproduces the true system") {
  Matrix c = Matrix::Zero(3, 10);
  c(0, 8) = 1.0;
  c(1, 9) = 1.0;
  c(2, 7) = -2.0;
  const OdeRhs f = identified_rhs(c);
  const Eigen::Vector3d x(0.3, -0.2, 0.9);
  CHECK((f(x) - ko_rhs(x)).norm() < 1e-15);
}

TEST_CASE("metrics") {
  Vector r(2);
  r << 3, 4;
  CHECK(relative_l2(r, r) == 0.0);
  CHECK(relative_l2(2 * r, r) == doctest::Approx(1.0));
  Vector v(2);
  v << 8, 4;
  CHECK(relative_l2(v, r) == doctest::Approx(1.0));
  Vector a(2), b(2);
  a << 1, 1;
  b << 1, 0;
  CHECK(relative_l1(b, b) == 0.0);
  CHECK(relative_l1(a, b) == doctest::Approx(1.0));
  Vector c(3), d(3);
  d << 1, -2, 3;
  c = d + 1e-7 * Vector::Ones(3);
  CHECK(relative_l1(c, d) == doctest::Approx(3e-7 / 6.0));
  CHECK(uniform_grid(0.0, 1.0, 5)(4) == 1.0);
  CHECK(uniform_grid(0.0, 1.0, 5)(1) == 0.25);
}
