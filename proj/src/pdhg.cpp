#include "hjr/pdhg.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hjr {

void ProxSpec::validate(Index n) const {
  if (weights.size() != n) {
    throw DimensionError("regularization weights have length " + std::to_string(weights.size()) + ", model has " +
                         std::to_string(n));
  }
  for (Index k = 0; k < n; ++k) {
    if (!(weights(k) > 0.0) || !std::isfinite(weights(k))) {
      throw InvalidArgument("regularization weight " + std::to_string(k) + " must be finite and > 0");
    }
  }
}

double ProxSpec::value(const Vector& theta) const {
  if (kind == ProxKind::weighted_l1) return weights.dot(theta.cwiseAbs());
  return 0.5 * weights.dot(theta.cwiseAbs2());
}

void PdhgConfig::validate(Index n) const {
  if (!(sigma_theta > 0.0) || !(sigma_w > 0.0)) throw InvalidArgument("PDHG step sizes must be > 0");
  if (!(sigma_theta * sigma_w < 1.0)) {
    throw InvalidArgument("PDHG step sizes must satisfy sigma_theta * sigma_w < 1");
  }
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be > 0");
  if (x_point.size() != 0 && x_point.size() != n) throw DimensionError("x_point length does not match model");
}

Vector prox_dual(const ProxSpec& spec, const Vector& v, double sigma_w) {
  if (v.size() != spec.weights.size()) throw DimensionError("prox input length does not match weights");
  if (spec.kind == ProxKind::weighted_l1) return v.cwiseMax(-spec.weights).cwiseMin(spec.weights);
  return v.cwiseProduct(spec.weights).cwiseQuotient((spec.weights.array() + sigma_w).matrix());
}

RiccatiState pdhg_primal_state(Index n, std::span<const DataBlock> blocks, double sigma_theta,
                               const IntegrationConfig& riccati_cfg) {
  if (!(sigma_theta > 0.0)) throw InvalidArgument("sigma_theta must be > 0");
  return fit(Hyperparams::uniform(n, 1.0 / sigma_theta), blocks, riccati_cfg);
}

PdhgResult pdhg_iterate(const RiccatiState& primal, std::span<const DataBlock> blocks, const ProxSpec& spec,
                        const PdhgConfig& cfg) {
  const Index n = primal.n();
  spec.validate(n);
  cfg.validate(n);
  const Vector x = cfg.x_point.size() == n ? cfg.x_point : Vector::Zero(n);
  const double inv_sigma = 1.0 / cfg.sigma_theta;

  PdhgResult res;
  PdhgState& st = res.state;
  st.theta = Vector::Zero(n);
  st.w = Vector::Zero(n);
  st.theta_bar = Vector::Zero(n);
  st.sigma_theta = cfg.sigma_theta;
  st.sigma_w = cfg.sigma_w;

  PdhgState best = st;
  double best_residual = std::numeric_limits<double>::infinity();
  Vector bias(n), next(n);
  for (std::int64_t it = 1; it <= cfg.max_iters; ++it) {
    bias = st.theta - cfg.sigma_theta * (st.w - x);
    next.noalias() = primal.p * (inv_sigma * bias);
    next += primal.q;
    st.theta_bar = 2.0 * next - st.theta;
    st.w = prox_dual(spec, st.w + cfg.sigma_w * st.theta_bar, cfg.sigma_w);
    const double residual = (next - st.theta).lpNorm<Eigen::Infinity>();
    st.theta = next;
    st.iteration = it;
    if (!std::isfinite(residual)) throw NumericalError("PDHG iterate became non-finite");
    if (cfg.record_history) res.residual_history.push_back(residual);
    if (residual < best_residual) {
      best_residual = residual;
      best = st;
    }
    if (residual <= cfg.tol) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) st = best;
  res.residual = best_residual;

  res.solution.theta_star = st.theta;
  res.solution.data_fit = data_fit(blocks, st.theta);
  res.solution.reg_value = spec.value(st.theta);
  res.solution.total_loss = *res.solution.data_fit + *res.solution.reg_value - x.dot(st.theta);
  return res;
}

PdhgResult pdhg_solve(Index n, std::span<const DataBlock> blocks, const ProxSpec& spec, const PdhgConfig& cfg,
                      const IntegrationConfig& riccati_cfg) {
  spec.validate(n);
  cfg.validate(n);
  const RiccatiState primal = pdhg_primal_state(n, blocks, cfg.sigma_theta, riccati_cfg);
  return pdhg_iterate(primal, blocks, spec, cfg);
}

Vector sparsified(const Vector& theta) {
  return theta.unaryExpr([](double v) { return std::abs(v) < kSparsityThreshold ? 0.0 : v; });
}

} // namespace hjr
