#include "hjr/core.hpp"

#include <cmath>
#include <string>

namespace hjr {

DataBlock DataBlock::row(std::span<const double> features, double target, double lambda) {
  DataBlock b;
  b.phi.resize(1, static_cast<Index>(features.size()));
  for (std::size_t k = 0; k < features.size(); ++k) b.phi(0, static_cast<Index>(k)) = features[k];
  b.y.resize(1);
  b.y(0) = target;
  b.lambda = lambda;
  return b;
}

void Hyperparams::validate() const {
  if (gamma.size() != theta0.size()) {
    throw DimensionError("gamma has length " + std::to_string(gamma.size()) + " but theta0 has length " +
                         std::to_string(theta0.size()));
  }
  for (Index k = 0; k < gamma.size(); ++k) {
    if (!(gamma(k) > 0.0) || !std::isfinite(gamma(k))) {
      throw InvalidArgument("gamma[" + std::to_string(k) + "] must be finite and > 0");
    }
  }
  if (!all_finite(theta0)) throw InvalidArgument("theta0 has non-finite entries");
}

Hyperparams Hyperparams::uniform(Index n, double gamma, double theta0) {
  return Hyperparams{Vector::Constant(n, gamma), Vector::Constant(n, theta0)};
}

RiccatiState new_state(const Hyperparams& hyper) {
  hyper.validate();
  const Index n = hyper.n();
  RiccatiState s;
  s.p = Matrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) s.p(k, k) = 1.0 / hyper.gamma(k);
  s.q = Vector::Zero(n);
  s.r = 0.0;
  s.elapsed = 0.0;
  return s;
}

void validate_block(const DataBlock& block, Index n) {
  if (block.phi.cols() != n) {
    throw DimensionError("block has " + std::to_string(block.phi.cols()) + " feature columns, model has " +
                         std::to_string(n));
  }
  if (block.y.size() != block.phi.rows()) {
    throw DimensionError("block target length " + std::to_string(block.y.size()) + " != feature rows " +
                         std::to_string(block.phi.rows()));
  }
  if (!std::isfinite(block.lambda)) throw InvalidArgument("block weight is not finite");
  if (block.lambda < 0.0) throw InvalidArgument("negative block weight " + std::to_string(block.lambda));
  if (!all_finite(block.phi) || !all_finite(block.y)) throw InvalidArgument("block has non-finite entries");
}

void validate_blocks(std::span<const DataBlock> blocks, Index n) {
  for (const auto& b : blocks) validate_block(b, n);
}

double data_fit(std::span<const DataBlock> blocks, const Vector& theta) {
  double acc = 0.0;
  for (const auto& b : blocks) {
    if (b.lambda == 0.0) continue;
    acc += 0.5 * b.lambda * (b.phi * theta - b.y).squaredNorm();
  }
  return acc;
}

double reg_value(const Hyperparams& hyper, const Vector& theta) {
  const Vector d = theta - hyper.theta0;
  return 0.5 * d.dot(hyper.gamma.cwiseProduct(d));
}

double loss(const Hyperparams& hyper, std::span<const DataBlock> blocks, const Vector& theta) {
  return data_fit(blocks, theta) + reg_value(hyper, theta);
}

Vector data_gradient(std::span<const DataBlock> blocks, const Vector& theta, Index n) {
  Vector g = Vector::Zero(n);
  for (const auto& b : blocks) {
    if (b.lambda == 0.0) continue;
    g.noalias() += b.lambda * (b.phi.transpose() * (b.phi * theta - b.y));
  }
  return g;
}

Vector loss_gradient(const Hyperparams& hyper, std::span<const DataBlock> blocks, const Vector& theta) {
  Vector g = data_gradient(blocks, theta, hyper.n());
  g += hyper.gamma.cwiseProduct(theta - hyper.theta0);
  return g;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

} // namespace hjr
