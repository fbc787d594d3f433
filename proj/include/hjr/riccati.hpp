#pragma once

// Fixed-step RK4 integration of the piecewise Riccati system
//
//   dP/dt = -P Phi^T Phi P
//   dq/dt = -P Phi^T (Phi q - y)
//   dr/dt = -1/2 |Phi q - y|^2
//
// and the incremental edits built on it (add/remove a block, reweight a
// block, retune gamma, shift the bias).

#include "hjr/core.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace hjr {

enum class Direction { forward, backward };

struct IntegrationConfig {
  double step_h = 1e-3;
  bool symmetrize = true; // keep P exactly symmetric by mirroring the upper triangle
  bool track_loss = true;

  void validate() const;
};

struct ParetoRecord {
  double effective_param = 0.0; // mean of the effective gamma diagonal
  Vector theta;
  double data_fit = 0.0;
  double reg_norm = 0.0;        // 1/2 |theta - theta0|^2
};

using ParetoTrace = std::vector<ParetoRecord>;

// Largest steps (scaled by the stiffness of the block) that keep RK4 inside
// the region where P stays positive definite.
inline constexpr double kMaxStepStiffness = 1.7;

/// Largest eigenvalue of Phi P Phi^T; the rate at which the block contracts P.
double block_stiffness(const Matrix& p, const Matrix& phi);

/// One RK4 step of signed size (+h or -h). Does not check stability.
RiccatiState rk4_step(const RiccatiState& state, const DataBlock& block, double h, Direction direction,
                      const IntegrationConfig& cfg = {});

/// Integrate one block for `duration` time units. The last step is shortened
/// so the signed time lands exactly on +-duration.
///
/// Throws NumericalError before any work when the step is too large for the
/// block's stiffness, or when a backward run would cross the singularity of P
/// (the block cannot have been part of the fit).
RiccatiState integrate_block(const RiccatiState& state, const DataBlock& block, double duration,
                             const IntegrationConfig& cfg, Direction direction);

/// Sequential fit from the prior: each block runs for lambda_i.
RiccatiState fit(const Hyperparams& hyper, std::span<const DataBlock> blocks, const IntegrationConfig& cfg);

/// theta* = P Gamma theta0 + q. With a tracked r, total_loss is recovered from
/// the value function; with blocks supplied, data_fit and reg_value are
/// evaluated directly.
ModelSolution extract_solution(const RiccatiState& state, const Hyperparams& hyper,
                               std::span<const DataBlock> blocks = {});

/// -S(x) + 1/2 x^T Gamma^-1 x with x = Gamma theta0, or nullopt when r is absent.
std::optional<double> recovered_loss(const RiccatiState& state, const Hyperparams& hyper);

RiccatiState add_block(const RiccatiState& state, const DataBlock& block, const IntegrationConfig& cfg);
RiccatiState remove_block(const RiccatiState& state, const DataBlock& block, const IntegrationConfig& cfg);
RiccatiState tune_lambda(const RiccatiState& state, const DataBlock& block, double old_lambda, double new_lambda,
                         const IntegrationConfig& cfg);

struct GammaTuneResult {
  RiccatiState state;
  Hyperparams hyper;
};

/// Move the regularization weights to new_gamma. Increases run forward with a
/// zero-target block Phi = diag(sqrt(gamma_plus)); decreases run the same form
/// backward with gamma_minus. Each phase takes unit time. When `trace` is set,
/// one record is appended per RK4 step.
GammaTuneResult tune_gamma(const RiccatiState& state, const Hyperparams& hyper, const Vector& new_gamma,
                           const IntegrationConfig& cfg, ParetoTrace* trace = nullptr);

/// Minimizer under a different bias. O(n^2), no integration.
ModelSolution shift_bias(const RiccatiState& state, const Hyperparams& hyper, const Vector& new_theta0);

} // namespace hjr
