#pragma once

// Recursive least squares: the exact discrete-time counterpart of the Riccati
// flow. Each add/remove is a Woodbury update with an m x m Cholesky solve.

#include "hjr/core.hpp"

#include <span>

namespace hjr {

struct RlsState {
  Matrix p;
  Vector q;
  double y_energy = 0.0; // 1/2 sum lambda_i |y_i|^2 of the absorbed blocks
  double elapsed = 0.0;

  Index n() const { return q.size(); }
};

RlsState rls_new(const Hyperparams& hyper);
RlsState rls_add(const RlsState& state, const DataBlock& block);
/// Throws NumericalError when I - lambda Phi P Phi^T is not positive definite.
RlsState rls_remove(const RlsState& state, const DataBlock& block);
RlsState rls_fit(const Hyperparams& hyper, std::span<const DataBlock> blocks);

/// Same sufficient statistic in Riccati form, with r reconstructed exactly.
RiccatiState to_riccati(const RlsState& state);

} // namespace hjr
