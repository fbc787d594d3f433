#pragma once

// PDHG for  min_theta 1/2 sum lambda_i |Phi_i theta - y_i|^2 + R(theta) - <x, theta>.
//
// The primal step is a ridge solve with Gamma = I / sigma_theta around a
// moving bias, so the Riccati state is built once and every iterate is a bias
// shift. The dual step is the prox of R*.

#include "hjr/core.hpp"
#include "hjr/riccati.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hjr {

enum class ProxKind { weighted_l1, weighted_l2_squared };

struct ProxSpec {
  ProxKind kind = ProxKind::weighted_l1;
  Vector weights; // gamma_k > 0

  void validate(Index n) const;
  /// R(theta): sum gamma_k |theta_k| or sum gamma_k / 2 theta_k^2.
  double value(const Vector& theta) const;
};

struct PdhgConfig {
  double sigma_theta = 0.5;
  double sigma_w = 0.5;
  std::int64_t max_iters = 100000;
  double tol = 1e-10;
  Vector x_point;            // empty means zero
  bool record_history = false;

  void validate(Index n) const;
};

struct PdhgResult {
  ModelSolution solution;
  PdhgState state;
  bool converged = false;
  double residual = 0.0;              // |theta^{l+1} - theta^l|_inf at the returned iterate
  std::vector<double> residual_history;
};

/// Coefficients below this magnitude print as exact zeros.
inline constexpr double kSparsityThreshold = 1e-8;

Vector prox_dual(const ProxSpec& spec, const Vector& v, double sigma_w);

/// Build the primal Riccati state (Gamma = I / sigma_theta) for a PDHG run.
RiccatiState pdhg_primal_state(Index n, std::span<const DataBlock> blocks, double sigma_theta,
                               const IntegrationConfig& riccati_cfg);

/// Run PDHG from theta = w = 0 reusing a primal state built by pdhg_primal_state.
PdhgResult pdhg_iterate(const RiccatiState& primal, std::span<const DataBlock> blocks, const ProxSpec& spec,
                        const PdhgConfig& cfg);

PdhgResult pdhg_solve(Index n, std::span<const DataBlock> blocks, const ProxSpec& spec, const PdhgConfig& cfg,
                      const IntegrationConfig& riccati_cfg);

/// theta with entries below kSparsityThreshold set to zero.
Vector sparsified(const Vector& theta);

} // namespace hjr
