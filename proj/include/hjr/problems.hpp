#pragma once

// Deterministic generators for the three experiment families, plus the error
// metrics used to score them.
//
// Randomness: xoshiro256++ seeded by running splitmix64 over the 64-bit seed
// four times. Uniforms take the top 53 bits of each draw; Gaussians use the
// Box-Muller transform and cache the second variate.

#include "hjr/core.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace hjr {

class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal.
  double normal();

private:
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct NamedSeries {
  std::string name;
  Vector values;
};

struct GeneratedProblem {
  std::vector<DataBlock> blocks;
  // Per-block group: 0 residual/data rows, 1 boundary rows; for the K-O
  // system, the equation index 0..2.
  std::vector<int> groups;
  std::vector<double> sample_points; // x (or tau) per data row; NaN for boundary rows
  std::string basis_name;
  Vector eval_grid;
  std::vector<NamedSeries> truth; // reference values on eval_grid
  std::uint64_t seed = 0;
};

inline constexpr double kReactionD = 0.01;
inline constexpr double kReactionKappa = -1.0;

/// y(x) = sin(10x) sampled at x ~ U[0, 10] with N(0, noise_scale^2) noise.
GeneratedProblem gen_sin10x(std::int64_t count, std::uint64_t seed, double noise_scale);

/// Residual rows D phi'' + kappa phi at x ~ U[0, 1] against f = D u'' + kappa u
/// (plus noise), u = sin^3(2 pi x); two noiseless boundary rows at 0 and 1
/// with weight lambda_b.
GeneratedProblem gen_reaction_diffusion(std::int64_t count, std::uint64_t seed, double noise_scale,
                                        double lambda_b);

double reaction_u(double x);
double reaction_f(double x);

/// Kraichnan-Orszag system from (1, 0.8, 0.5), sampled at grid_count interior
/// times with central-difference targets. Blocks are ordered by time, three
/// per sample (one per equation).
GeneratedProblem gen_ko(std::int64_t grid_count = 1000, double solver_h = 1e-4, double fd_h = 1e-3);

using OdeRhs = std::function<Eigen::Vector3d(const Eigen::Vector3d&)>;

Eigen::Vector3d ko_rhs(const Eigen::Vector3d& x);
inline const Eigen::Vector3d kKoInitial{1.0, 0.8, 0.5};

/// Fixed-step RK4 trajectory on [0, t_end]. Off-grid times are reached by one
/// partial step from the preceding grid point.
class Trajectory {
public:
  Trajectory(const OdeRhs& rhs, const Eigen::Vector3d& x0, double t_end, double h);

  Eigen::Vector3d at(double t) const;
  double h() const { return h_; }
  double t_end() const { return t_end_; }

private:
  OdeRhs rhs_;
  double h_;
  double t_end_;
  std::vector<Eigen::Vector3d> grid_;
};

Eigen::Vector3d rk4_ode_step(const OdeRhs& rhs, const Eigen::Vector3d& x, double h);

/// Right-hand side of a model identified on the quad-monomial-3d basis:
/// row i of coeffs (3 x 10) gives dx_i/dt.
OdeRhs identified_rhs(const Matrix& coeffs);

Vector uniform_grid(double lo, double hi, Index points);

/// |values - reference|_2 / |reference|_2
double relative_l2(const Vector& values, const Vector& reference);
/// sum |a - b| / sum |b|
double relative_l1(const Vector& a, const Vector& b);

} // namespace hjr
