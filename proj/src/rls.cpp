#include "hjr/rls.hpp"

#include <string>

namespace hjr {
namespace {

RlsState woodbury(const RlsState& state, const DataBlock& block, double lambda) {
  validate_block(block, state.n());
  if (lambda == 0.0 || block.rows() == 0) return state;

  const Index m = block.rows();
  const Matrix v = block.phi * state.p; // m x n, rows are P phi_i
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(m, m) + lambda * (v * block.phi.transpose());
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    if (lambda < 0.0) {
      throw NumericalError("block cannot be removed: I - lambda Phi P Phi^T is not positive definite");
    }
    throw NumericalError("RLS inner system I + lambda Phi P Phi^T is not positive definite");
  }
  const Eigen::MatrixXd k = llt.solve(Eigen::MatrixXd(v)); // m x n

  RlsState out;
  out.p = state.p - lambda * (v.transpose() * k);
  out.p = (0.5 * (out.p + out.p.transpose())).eval();
  const Vector phi_q = block.phi * state.q;
  out.q = state.q + lambda * (out.p * (block.phi.transpose() * block.y)) - lambda * (k.transpose() * phi_q);
  out.y_energy = state.y_energy + 0.5 * lambda * block.y.squaredNorm();
  out.elapsed = state.elapsed + lambda;
  if (!all_finite(out.p) || !all_finite(out.q)) throw NumericalError("non-finite value in RLS update");
  return out;
}

} // namespace

RlsState rls_new(const Hyperparams& hyper) {
  const RiccatiState s = new_state(hyper);
  return RlsState{s.p, s.q, 0.0, 0.0};
}

RlsState rls_add(const RlsState& state, const DataBlock& block) { return woodbury(state, block, block.lambda); }

RlsState rls_remove(const RlsState& state, const DataBlock& block) { return woodbury(state, block, -block.lambda); }

RlsState rls_fit(const Hyperparams& hyper, std::span<const DataBlock> blocks) {
  validate_blocks(blocks, hyper.n());
  RlsState s = rls_new(hyper);
  for (const auto& b : blocks) s = rls_add(s, b);
  return s;
}

RiccatiState to_riccati(const RlsState& state) {
  RiccatiState out;
  out.p = state.p;
  out.q = state.q;
  out.elapsed = state.elapsed;
  Eigen::LLT<Matrix> llt(state.p);
  if (llt.info() != Eigen::Success) throw NumericalError("RLS state P is not positive definite");
  out.r = 0.5 * state.q.dot(llt.solve(state.q)) - state.y_energy;
  return out;
}

} // namespace hjr
