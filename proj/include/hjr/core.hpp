#pragma once

// Shared value types for Riccati-based regularized regression.
//
// Loss being minimized throughout the library:
//
//   L(theta) = 1/2 sum_i lambda_i |Phi_i theta - y_i|^2
//            + 1/2 sum_k gamma_k (theta_k - theta0_k)^2
//
// Each data block contributes one Riccati piece of duration lambda_i. The
// state (P, q, r) is a sufficient statistic: theta* = P Gamma theta0 + q.

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hjr {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
// Row-major so that feature rows and P rows are contiguous for the kernels.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Shapes disagree (block vs model, vector lengths).
class DimensionError : public Error {
public:
  using Error::Error;
};

// A value violates a documented precondition (negative weight, gamma <= 0, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

// Integration blew up, a system matrix lost definiteness, or an iteration
// failed to converge.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// One data-fitting term: rows of features, targets, and its weight.
/// The weight doubles as the Riccati integration time for the block.
struct DataBlock {
  Matrix phi;          // m x n
  Vector y;            // m
  double lambda = 1.0; // >= 0

  Index rows() const { return phi.rows(); }
  Index cols() const { return phi.cols(); }

  static DataBlock row(std::span<const double> features, double target, double lambda = 1.0);
};

/// Regularization weights and prior bias.
struct Hyperparams {
  Vector gamma;  // strictly positive
  Vector theta0;

  Index n() const { return gamma.size(); }
  /// Evaluation point of the value function, Gamma * theta0.
  Vector x() const { return gamma.cwiseProduct(theta0); }
  void validate() const;

  static Hyperparams uniform(Index n, double gamma, double theta0 = 0.0);
};

struct RiccatiState {
  Matrix p;                // symmetric positive definite
  Vector q;
  std::optional<double> r; // loss accumulator; absent when not tracked
  double elapsed = 0.0;    // total integrated time

  Index n() const { return q.size(); }
};

struct ModelSolution {
  Vector theta_star;
  std::optional<double> data_fit;
  std::optional<double> reg_value;
  std::optional<double> total_loss;
};

struct PdhgState {
  Vector theta;
  Vector w;
  Vector theta_bar;
  double sigma_theta = 0.5;
  double sigma_w = 0.5;
  std::int64_t iteration = 0;
};

struct Checkpoint {
  std::string version = "1";
  Hyperparams hyper;
  RiccatiState state;
  std::map<std::string, std::string> metadata;

  Index n() const { return hyper.n(); }
};

/// Fresh state for the given hyperparameters: P = Gamma^-1, q = 0, r = 0.
RiccatiState new_state(const Hyperparams& hyper);

/// Throws DimensionError / InvalidArgument when the block cannot be used
/// with an n-parameter model.
void validate_block(const DataBlock& block, Index n);
void validate_blocks(std::span<const DataBlock> blocks, Index n);

// Direct evaluation of the loss pieces, used by oracles and diagnostics.
double data_fit(std::span<const DataBlock> blocks, const Vector& theta);
double reg_value(const Hyperparams& hyper, const Vector& theta);
double loss(const Hyperparams& hyper, std::span<const DataBlock> blocks, const Vector& theta);
Vector loss_gradient(const Hyperparams& hyper, std::span<const DataBlock> blocks, const Vector& theta);
/// Gradient of the data term only, sum_i lambda_i Phi_i^T (Phi_i theta - y_i).
Vector data_gradient(std::span<const DataBlock> blocks, const Vector& theta, Index n);

bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);

} // namespace hjr
