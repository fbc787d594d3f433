#include "hjr/problems.hpp"

#include "hjr/basis.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace hjr {
namespace {

std::uint64_t splitmix64(std::uint64_t& z) {
  z += 0x9e3779b97f4a7c15ULL;
  std::uint64_t x = z;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

constexpr double kTwoPi = 2.0 * std::numbers::pi;

DataBlock scalar_block(const Vector& row, double y, double lambda) {
  DataBlock b;
  b.phi = row.transpose();
  b.y = Vector::Constant(1, y);
  b.lambda = lambda;
  return b;
}

} // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t z = seed;
  for (auto& word : s_) word = splitmix64(z);
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform(); // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  spare_ = radius * std::sin(kTwoPi * u2);
  has_spare_ = true;
  return radius * std::cos(kTwoPi * u2);
}

Vector uniform_grid(double lo, double hi, Index points) {
  if (points < 2) throw InvalidArgument("grid needs at least 2 points");
  return Vector::LinSpaced(points, lo, hi);
}

GeneratedProblem gen_sin10x(std::int64_t count, std::uint64_t seed, double noise_scale) {
  if (count < 0) throw InvalidArgument("count must be >= 0");
  const BasisSet& b = basis("poly-trig-10");
  Rng rng(seed);
  GeneratedProblem p;
  p.basis_name = std::string(b.name());
  p.seed = seed;
  p.blocks.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    const double x = rng.uniform(0.0, 10.0);
    const double y = std::sin(10.0 * x) + noise_scale * rng.normal();
    p.blocks.push_back(scalar_block(feature_row(b, x), y, 1.0));
    p.groups.push_back(0);
    p.sample_points.push_back(x);
  }
  p.eval_grid = uniform_grid(0.0, 10.0, 1001);
  p.truth.push_back({"y", p.eval_grid.unaryExpr([](double x) { return std::sin(10.0 * x); })});
  return p;
}

double reaction_u(double x) {
  const double s = std::sin(kTwoPi * x);
  return s * s * s;
}

double reaction_f(double x) {
  const double s = std::sin(kTwoPi * x);
  const double c = std::cos(kTwoPi * x);
  const double u2 = 3.0 * kTwoPi * kTwoPi * s * (2.0 * c * c - s * s);
  return kReactionD * u2 + kReactionKappa * s * s * s;
}

GeneratedProblem gen_reaction_diffusion(std::int64_t count, std::uint64_t seed, double noise_scale,
                                        double lambda_b) {
  if (count < 0) throw InvalidArgument("count must be >= 0");
  if (!(lambda_b >= 0.0)) throw InvalidArgument("boundary weight must be >= 0");
  const BasisSet& b = basis("fourier-21");
  Rng rng(seed);
  GeneratedProblem p;
  p.basis_name = std::string(b.name());
  p.seed = seed;
  for (std::int64_t i = 0; i < count; ++i) {
    const double x = rng.uniform();
    const double y = reaction_f(x) + noise_scale * rng.normal();
    p.blocks.push_back(scalar_block(residual_row(b, x, kReactionD, kReactionKappa), y, 1.0));
    p.groups.push_back(0);
    p.sample_points.push_back(x);
  }
  for (double x : {0.0, 1.0}) {
    p.blocks.push_back(scalar_block(feature_row(b, x), 0.0, lambda_b));
    p.groups.push_back(1);
    p.sample_points.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  p.eval_grid = uniform_grid(0.0, 1.0, 257);
  p.truth.push_back({"u", p.eval_grid.unaryExpr([](double x) { return reaction_u(x); })});
  p.truth.push_back({"f", p.eval_grid.unaryExpr([](double x) { return reaction_f(x); })});
  return p;
}

Eigen::Vector3d ko_rhs(const Eigen::Vector3d& x) {
  return {x(1) * x(2), x(0) * x(2), -2.0 * x(0) * x(1)};
}

Eigen::Vector3d rk4_ode_step(const OdeRhs& rhs, const Eigen::Vector3d& x, double h) {
  const Eigen::Vector3d k1 = rhs(x);
  const Eigen::Vector3d k2 = rhs(x + 0.5 * h * k1);
  const Eigen::Vector3d k3 = rhs(x + 0.5 * h * k2);
  const Eigen::Vector3d k4 = rhs(x + h * k3);
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory::Trajectory(const OdeRhs& rhs, const Eigen::Vector3d& x0, double t_end, double h)
    : rhs_(rhs), h_(h), t_end_(t_end) {
  if (!(h > 0.0) || !(t_end > 0.0)) throw InvalidArgument("trajectory needs h > 0 and t_end > 0");
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));
  grid_.reserve(steps + 1);
  grid_.push_back(x0);
  for (std::size_t k = 0; k < steps; ++k) {
    grid_.push_back(rk4_ode_step(rhs_, grid_.back(), h));
    if (!grid_.back().allFinite()) throw NumericalError("trajectory diverged at t = " + std::to_string((k + 1) * h));
  }
}

Eigen::Vector3d Trajectory::at(double t) const {
  if (t < 0.0 || t > t_end_ + 1e-12) throw InvalidArgument("time outside the integrated interval");
  auto k = static_cast<std::size_t>(std::floor(t / h_));
  if (k >= grid_.size()) k = grid_.size() - 1;
  const double dt = t - static_cast<double>(k) * h_;
  if (dt == 0.0) return grid_[k];
  return rk4_ode_step(rhs_, grid_[k], dt);
}

OdeRhs identified_rhs(const Matrix& coeffs) {
  if (coeffs.rows() != 3 || coeffs.cols() != 10) throw DimensionError("identified model must be 3 x 10");
  const BasisSet& b = basis("quad-monomial-3d");
  return [coeffs, &b](const Eigen::Vector3d& x) {
    const double xs[3] = {x(0), x(1), x(2)};
    const Vector phi = b.eval(xs);
    return Eigen::Vector3d(coeffs * phi);
  };
}

GeneratedProblem gen_ko(std::int64_t grid_count, double solver_h, double fd_h) {
  if (grid_count < 1) throw InvalidArgument("grid_count must be >= 1");
  if (!(solver_h > 0.0) || !(fd_h > 0.0)) throw InvalidArgument("solver_h and fd_h must be > 0");
  constexpr double kT = 10.0;
  const Trajectory traj(ko_rhs, kKoInitial, kT, solver_h);
  const BasisSet& b = basis("quad-monomial-3d");

  GeneratedProblem p;
  p.basis_name = std::string(b.name());
  for (std::int64_t j = 0; j < grid_count; ++j) {
    const double tau = kT * static_cast<double>(j + 1) / static_cast<double>(grid_count + 1);
    if (tau - fd_h < 0.0 || tau + fd_h > kT) {
      throw InvalidArgument("sample time " + std::to_string(tau) + " leaves [fd_h, 10 - fd_h]");
    }
    const Eigen::Vector3d x = traj.at(tau);
    const Eigen::Vector3d deriv = (traj.at(tau + fd_h) - traj.at(tau - fd_h)) / (2.0 * fd_h);
    const double xs[3] = {x(0), x(1), x(2)};
    const Vector row = feature_row(b, xs);
    for (int eq = 0; eq < 3; ++eq) {
      p.blocks.push_back(scalar_block(row, deriv(eq), 1.0));
      p.groups.push_back(eq);
      p.sample_points.push_back(tau);
    }
  }
  p.eval_grid = uniform_grid(0.0, kT, 10001);
  for (int c = 0; c < 3; ++c) {
    Vector v(p.eval_grid.size());
    for (Index i = 0; i < v.size(); ++i) v(i) = traj.at(p.eval_grid(i))(c);
    p.truth.push_back({"x" + std::to_string(c + 1), std::move(v)});
  }
  return p;
}

double relative_l2(const Vector& values, const Vector& reference) {
  if (values.size() != reference.size()) throw DimensionError("relative_l2 length mismatch");
  const double denom = reference.norm();
  if (denom == 0.0) throw InvalidArgument("relative_l2 reference is zero");
  return (values - reference).norm() / denom;
}

double relative_l1(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("relative_l1 length mismatch");
  const double denom = b.lpNorm<1>();
  if (denom == 0.0) throw InvalidArgument("relative_l1 reference is zero");
  return (a - b).lpNorm<1>() / denom;
}

} // namespace hjr
