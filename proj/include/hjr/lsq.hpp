#pragma once

// Direct normal-equations solve of the regularized least-squares loss.

#include "hjr/core.hpp"

#include <span>

namespace hjr {

struct NormalEquations {
  Matrix a;             // Gamma + sum lambda_i Phi_i^T Phi_i
  Vector b;             // sum lambda_i Phi_i^T y_i
  double y_energy = 0.0; // 1/2 sum lambda_i |y_i|^2
  double elapsed = 0.0;  // sum lambda_i
};

NormalEquations normal_equations(const Hyperparams& hyper, std::span<const DataBlock> blocks);

/// theta* = (Gamma + sum lambda Phi^T Phi)^-1 (Gamma theta0 + sum lambda Phi^T y),
/// with every diagnostic evaluated directly.
ModelSolution solve_direct(const Hyperparams& hyper, std::span<const DataBlock> blocks);

/// The Riccati state the flow reaches at T_N, built in closed form:
/// P = A^-1, q = P b, r = 1/2 q^T b - y_energy.
RiccatiState closed_form_state(const Hyperparams& hyper, std::span<const DataBlock> blocks);

} // namespace hjr
