#include "hjr/riccati.hpp"

#include "hjr/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace hjr {
namespace {

using Observer = std::function<void(const RiccatiState&, double)>;

// RK4 on (P, q, r) for one fixed block.
//
// Every stage slope of P is -V_s^T V_s with V_s = Phi P_s, and V_s stays in
// the row space of V = Phi P: V_s = A_s V for an m x m matrix A_s. Likewise
// the stage residuals Phi q_s - y are e_s = e_1 - c M A_{s-1}^T e_{s-1} with
// M = Phi P Phi^T. The step therefore needs one product Phi P, m x m algebra,
// and a single rank-m update
//
//   P <- P - V^T W V,  q <- q - V^T g,
//   W = h/6 sum_s w_s A_s^T A_s,  g = h/6 sum_s w_s A_s^T e_s.
//
// Buffers are sized once so the step loop does not allocate.
class Rk4Runner {
public:
  Rk4Runner(const Matrix& phi, const Vector& y)
      : phi_(phi), y_(y), n_(static_cast<std::size_t>(phi.cols())), m_(static_cast<std::size_t>(phi.rows())),
        k_(kernels::active_kernels()), v_(m_ * n_), u_(m_ * n_), mm_(m_ * m_), a_(4 * m_ * m_), e_(4 * m_),
        gram_(m_ * m_), w_(m_ * m_), g_(m_), t_(m_) {}

  void step(double* p, double* q, double* r, double h, bool upper_only) {
    const std::size_t n = n_;
    const std::size_t m = m_;
    const double* phi = phi_.data();

    k_.sym_multi_matvec(v_.data(), p, n, phi, n, m);
    for (std::size_t a = 0; a < m; ++a) {
      e_[a] = k_.dot(phi + a * n, q, n) - y_[static_cast<Index>(a)];
      for (std::size_t b = a; b < m; ++b) {
        const double val = k_.dot(v_.data() + a * n, phi + b * n, n);
        mm_[a * m + b] = val;
        mm_[b * m + a] = val;
      }
    }

    std::fill(a_.begin(), a_.begin() + static_cast<std::ptrdiff_t>(m * m), 0.0);
    for (std::size_t a = 0; a < m; ++a) a_[a * m + a] = 1.0;
    std::fill(w_.begin(), w_.end(), 0.0);
    std::fill(g_.begin(), g_.end(), 0.0);
    double kr = 0.0;

    static constexpr double kWeight[4] = {1.0, 2.0, 2.0, 1.0};
    const double advance[3] = {0.5 * h, 0.5 * h, h};
    for (int s = 0; s < 4; ++s) {
      const double* as = a_.data() + static_cast<std::size_t>(s) * m * m;
      const double* es = e_.data() + static_cast<std::size_t>(s) * m;
      // gram = A_s^T A_s, t = A_s^T e_s
      for (std::size_t i = 0; i < m; ++i) {
        double ti = 0.0;
        for (std::size_t l = 0; l < m; ++l) ti += as[l * m + i] * es[l];
        t_[i] = ti;
        for (std::size_t j = i; j < m; ++j) {
          double acc = 0.0;
          for (std::size_t l = 0; l < m; ++l) acc += as[l * m + i] * as[l * m + j];
          gram_[i * m + j] = acc;
          gram_[j * m + i] = acc;
        }
      }
      double es2 = 0.0;
      for (std::size_t i = 0; i < m; ++i) es2 += es[i] * es[i];
      kr += kWeight[s] * (-0.5 * es2);
      for (std::size_t i = 0; i < m * m; ++i) w_[i] += kWeight[s] * gram_[i];
      for (std::size_t i = 0; i < m; ++i) g_[i] += kWeight[s] * t_[i];
      if (s == 3) break;

      // A_{s+1} = I - c M gram, e_{s+1} = e_1 - c M t
      const double c = advance[s];
      double* an = a_.data() + static_cast<std::size_t>(s + 1) * m * m;
      double* en = e_.data() + static_cast<std::size_t>(s + 1) * m;
      for (std::size_t i = 0; i < m; ++i) {
        double mt = 0.0;
        for (std::size_t l = 0; l < m; ++l) mt += mm_[i * m + l] * t_[l];
        en[i] = e_[i] - c * mt;
        for (std::size_t j = 0; j < m; ++j) {
          double acc = 0.0;
          for (std::size_t l = 0; l < m; ++l) acc += mm_[i * m + l] * gram_[l * m + j];
          an[i * m + j] = (i == j ? 1.0 : 0.0) - c * acc;
        }
      }
    }

    // U = -(h/6) W V; P += V^T U; q -= (h/6) V^T g
    const double scale = h / 6.0;
    for (std::size_t a = 0; a < m; ++a) {
      double* ua = u_.data() + a * n;
      std::fill(ua, ua + n, 0.0);
      for (std::size_t b = 0; b < m; ++b) k_.axpy(ua, ua, v_.data() + b * n, -scale * w_[a * m + b], n);
    }
    k_.rank_update(p, p, n, v_.data(), u_.data(), m, upper_only);
    for (std::size_t a = 0; a < m; ++a) k_.axpy(q, q, v_.data() + a * n, -scale * g_[a], n);
    if (r != nullptr) *r += scale * kr;
  }

private:
  const Matrix& phi_;
  const Vector& y_;
  std::size_t n_;
  std::size_t m_;
  const kernels::KernelTable& k_;
  std::vector<double> v_;    // m x n, Phi P
  std::vector<double> u_;    // m x n
  std::vector<double> mm_;   // m x m, Phi P Phi^T
  std::vector<double> a_;    // 4 stages of m x m
  std::vector<double> e_;    // 4 stages of m
  std::vector<double> gram_; // m x m
  std::vector<double> w_;    // m x m
  std::vector<double> g_;    // m
  std::vector<double> t_;    // m
};

bool step_finite(const RiccatiState& s) {
  if (s.r && !std::isfinite(*s.r)) return false;
  for (Index k = 0; k < s.p.rows(); ++k) {
    if (!std::isfinite(s.p(k, k)) || !std::isfinite(s.q(k))) return false;
  }
  return true;
}

void check_shapes(const RiccatiState& state, const DataBlock& block) {
  if (state.p.rows() != state.n() || state.p.cols() != state.n()) {
    throw DimensionError("state P is not " + std::to_string(state.n()) + "x" + std::to_string(state.n()));
  }
  validate_block(block, state.n());
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

RiccatiState integrate_impl(const RiccatiState& state, const DataBlock& block, double duration,
                            const IntegrationConfig& cfg, Direction direction, const Observer& observer) {
  cfg.validate();
  check_shapes(state, block);
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw InvalidArgument("integration duration must be finite and >= 0");
  }
  RiccatiState out = state;
  if (!cfg.track_loss) out.r.reset();
  if (duration == 0.0 || block.rows() == 0) return out;

  const double h = cfg.step_h;
  const double mu = block_stiffness(state.p, block.phi);
  double mu_max = mu;
  if (direction == Direction::backward) {
    if (mu * duration >= 1.0) {
      throw NumericalError("block cannot be removed: P would become singular (stiffness " + fmt(mu) +
                           " x duration " + fmt(duration) + " >= 1); was it part of the fit?");
    }
    mu_max = mu / (1.0 - mu * duration);
  }
  if (h * mu_max > kMaxStepStiffness) {
    throw NumericalError("step size too large for this block (h * stiffness = " + fmt(h * mu_max) + " > " +
                         fmt(kMaxStepStiffness) + "); retry with --step-size <= " +
                         fmt(kMaxStepStiffness / mu_max));
  }

  const auto steps = static_cast<std::int64_t>(std::ceil(duration / h - 1e-9));
  const double last = duration - static_cast<double>(steps - 1) * h;
  const double sign = direction == Direction::forward ? 1.0 : -1.0;

  Rk4Runner runner(block.phi, block.y);
  double r = out.r.value_or(0.0);
  double* rp = out.r ? &r : nullptr;
  for (std::int64_t s = 0; s < steps; ++s) {
    const double hs = (s + 1 == steps ? last : h) * sign;
    runner.step(out.p.data(), out.q.data(), rp, hs, cfg.symmetrize);
    if (out.r) out.r = r;
    if (!step_finite(out)) {
      throw NumericalError("non-finite value during Riccati integration; retry with a smaller --step-size");
    }
    if (observer) observer(out, s + 1 == steps ? duration : static_cast<double>(s + 1) * h);
  }
  if (!all_finite(out.p)) {
    throw NumericalError("non-finite value in P after integration; retry with a smaller --step-size");
  }
  out.elapsed = state.elapsed + sign * duration;
  return out;
}

DataBlock gamma_block(const Vector& g) {
  Index rows = 0;
  for (Index k = 0; k < g.size(); ++k) rows += g(k) > 0.0 ? 1 : 0;
  DataBlock b;
  b.phi = Matrix::Zero(rows, g.size());
  b.y = Vector::Zero(rows);
  b.lambda = 1.0;
  Index row = 0;
  for (Index k = 0; k < g.size(); ++k) {
    if (g(k) > 0.0) b.phi(row++, k) = std::sqrt(g(k));
  }
  return b;
}

ParetoRecord pareto_record(const RiccatiState& s, const Vector& theta0, const Vector& gamma_eff) {
  ParetoRecord rec;
  rec.effective_param = gamma_eff.mean();
  const Vector x = gamma_eff.cwiseProduct(theta0);
  rec.theta = s.p * x + s.q;
  const Vector d = rec.theta - theta0;
  rec.reg_norm = 0.5 * d.squaredNorm();
  if (s.r) {
    const double value = 0.5 * x.dot(s.p * x) + s.q.dot(x) + *s.r;
    const double total = -value + 0.5 * theta0.dot(x);
    rec.data_fit = total - 0.5 * d.dot(gamma_eff.cwiseProduct(d));
  } else {
    rec.data_fit = std::nan("");
  }
  return rec;
}

} // namespace

void IntegrationConfig::validate() const {
  if (!(step_h > 0.0) || !std::isfinite(step_h)) throw InvalidArgument("step size must be finite and > 0");
}

double block_stiffness(const Matrix& p, const Matrix& phi) {
  if (phi.rows() == 0) return 0.0;
  if (phi.rows() == 1) {
    const Vector row = phi.row(0).transpose();
    return row.dot(p * row);
  }
  const Eigen::MatrixXd m = phi * p * phi.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solve failed for block stiffness");
  return es.eigenvalues().maxCoeff();
}

RiccatiState rk4_step(const RiccatiState& state, const DataBlock& block, double h, Direction direction,
                      const IntegrationConfig& cfg) {
  check_shapes(state, block);
  if (!(h > 0.0)) throw InvalidArgument("step size must be > 0");
  RiccatiState out = state;
  if (!cfg.track_loss) out.r.reset();
  const double hs = direction == Direction::forward ? h : -h;
  if (block.rows() > 0) {
    Rk4Runner runner(block.phi, block.y);
    double r = out.r.value_or(0.0);
    runner.step(out.p.data(), out.q.data(), out.r ? &r : nullptr, hs, cfg.symmetrize);
    if (out.r) out.r = r;
    if (!all_finite(out.p) || !step_finite(out)) throw NumericalError("non-finite value in RK4 step");
  }
  out.elapsed += hs;
  return out;
}

RiccatiState integrate_block(const RiccatiState& state, const DataBlock& block, double duration,
                             const IntegrationConfig& cfg, Direction direction) {
  return integrate_impl(state, block, duration, cfg, direction, nullptr);
}

RiccatiState fit(const Hyperparams& hyper, std::span<const DataBlock> blocks, const IntegrationConfig& cfg) {
  cfg.validate();
  validate_blocks(blocks, hyper.n());
  RiccatiState s = new_state(hyper);
  for (const auto& b : blocks) s = add_block(s, b, cfg);
  return s;
}

std::optional<double> recovered_loss(const RiccatiState& state, const Hyperparams& hyper) {
  if (!state.r) return std::nullopt;
  const Vector x = hyper.x();
  const double value = 0.5 * x.dot(state.p * x) + state.q.dot(x) + *state.r;
  return -value + 0.5 * hyper.theta0.dot(x);
}

ModelSolution extract_solution(const RiccatiState& state, const Hyperparams& hyper,
                               std::span<const DataBlock> blocks) {
  if (hyper.n() != state.n()) throw DimensionError("hyperparameters and state disagree on n");
  ModelSolution sol;
  sol.theta_star = state.p * hyper.x() + state.q;
  if (!blocks.empty()) {
    validate_blocks(blocks, hyper.n());
    sol.data_fit = data_fit(blocks, sol.theta_star);
    sol.reg_value = reg_value(hyper, sol.theta_star);
    sol.total_loss = *sol.data_fit + *sol.reg_value;
  } else {
    sol.total_loss = recovered_loss(state, hyper);
  }
  return sol;
}

RiccatiState add_block(const RiccatiState& state, const DataBlock& block, const IntegrationConfig& cfg) {
  return integrate_block(state, block, block.lambda, cfg, Direction::forward);
}

RiccatiState remove_block(const RiccatiState& state, const DataBlock& block, const IntegrationConfig& cfg) {
  return integrate_block(state, block, block.lambda, cfg, Direction::backward);
}

RiccatiState tune_lambda(const RiccatiState& state, const DataBlock& block, double old_lambda, double new_lambda,
                         const IntegrationConfig& cfg) {
  if (!(old_lambda >= 0.0) || !(new_lambda >= 0.0)) throw InvalidArgument("block weights must be >= 0");
  if (new_lambda > old_lambda) return integrate_block(state, block, new_lambda - old_lambda, cfg, Direction::forward);
  if (new_lambda < old_lambda) {
    return integrate_block(state, block, old_lambda - new_lambda, cfg, Direction::backward);
  }
  check_shapes(state, block);
  return state;
}

GammaTuneResult tune_gamma(const RiccatiState& state, const Hyperparams& hyper, const Vector& new_gamma,
                           const IntegrationConfig& cfg, ParetoTrace* trace) {
  hyper.validate();
  cfg.validate();
  if (new_gamma.size() != hyper.n()) {
    throw DimensionError("new gamma has length " + std::to_string(new_gamma.size()) + ", model has " +
                         std::to_string(hyper.n()));
  }
  Hyperparams next{new_gamma, hyper.theta0};
  next.validate();

  const Vector plus = (new_gamma - hyper.gamma).cwiseMax(0.0);
  const Vector minus = (hyper.gamma - new_gamma).cwiseMax(0.0);
  RiccatiState s = state;
  if (!cfg.track_loss) s.r.reset();

  if ((plus.array() > 0.0).any()) {
    Observer obs;
    if (trace != nullptr) {
      obs = [&](const RiccatiState& cur, double t) {
        trace->push_back(pareto_record(cur, hyper.theta0, hyper.gamma + t * plus));
      };
    }
    s = integrate_impl(s, gamma_block(plus), 1.0, cfg, Direction::forward, obs);
  }
  if ((minus.array() > 0.0).any()) {
    const Vector base = hyper.gamma + plus;
    Observer obs;
    if (trace != nullptr) {
      obs = [&](const RiccatiState& cur, double t) {
        trace->push_back(pareto_record(cur, hyper.theta0, base - t * minus));
      };
    }
    s = integrate_impl(s, gamma_block(minus), 1.0, cfg, Direction::backward, obs);
  }
  // Gamma edits are not data time.
  s.elapsed = state.elapsed;
  return {std::move(s), std::move(next)};
}

ModelSolution shift_bias(const RiccatiState& state, const Hyperparams& hyper, const Vector& new_theta0) {
  if (new_theta0.size() != hyper.n()) {
    throw DimensionError("new theta0 has length " + std::to_string(new_theta0.size()) + ", model has " +
                         std::to_string(hyper.n()));
  }
  const Hyperparams shifted{hyper.gamma, new_theta0};
  shifted.validate();
  return extract_solution(state, shifted);
}

} // namespace hjr
