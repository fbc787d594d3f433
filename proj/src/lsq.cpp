#include "hjr/lsq.hpp"

namespace hjr {

NormalEquations normal_equations(const Hyperparams& hyper, std::span<const DataBlock> blocks) {
  hyper.validate();
  validate_blocks(blocks, hyper.n());
  const Index n = hyper.n();
  NormalEquations ne;
  ne.a = Matrix::Zero(n, n);
  ne.a.diagonal() = hyper.gamma;
  ne.b = Vector::Zero(n);
  for (const auto& blk : blocks) {
    if (blk.lambda == 0.0) continue;
    ne.a.noalias() += blk.lambda * (blk.phi.transpose() * blk.phi);
    ne.b.noalias() += blk.lambda * (blk.phi.transpose() * blk.y);
    ne.y_energy += 0.5 * blk.lambda * blk.y.squaredNorm();
    ne.elapsed += blk.lambda;
  }
  return ne;
}

ModelSolution solve_direct(const Hyperparams& hyper, std::span<const DataBlock> blocks) {
  const NormalEquations ne = normal_equations(hyper, blocks);
  Eigen::LLT<Matrix> llt(ne.a);
  if (llt.info() != Eigen::Success) throw NumericalError("normal-equations matrix is not positive definite");
  ModelSolution sol;
  sol.theta_star = llt.solve(Vector(hyper.x() + ne.b));
  if (!all_finite(sol.theta_star)) throw NumericalError("normal-equations solve produced non-finite values");
  sol.data_fit = data_fit(blocks, sol.theta_star);
  sol.reg_value = reg_value(hyper, sol.theta_star);
  sol.total_loss = *sol.data_fit + *sol.reg_value;
  return sol;
}

RiccatiState closed_form_state(const Hyperparams& hyper, std::span<const DataBlock> blocks) {
  const NormalEquations ne = normal_equations(hyper, blocks);
  Eigen::LLT<Matrix> llt(ne.a);
  if (llt.info() != Eigen::Success) throw NumericalError("normal-equations matrix is not positive definite");
  RiccatiState s;
  s.p = llt.solve(Matrix::Identity(hyper.n(), hyper.n()));
  s.p = (0.5 * (s.p + s.p.transpose())).eval();
  s.q = s.p * ne.b;
  s.r = 0.5 * s.q.dot(ne.b) - ne.y_energy;
  s.elapsed = ne.elapsed;
  return s;
}

} // namespace hjr
