#include "infoasym/numerics/optimizer.hpp"

#include <cmath>
#include <string>

#include "infoasym/errors.hpp"
#include "infoasym/numerics/matrix.hpp"

namespace infoasym {

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

Optimizer::Optimizer(OptimizerConfig config, std::size_t param_count) : config_(config) {
  if (!(config_.learning_rate > 0.0)) throw InvalidInput("learning rate must be positive");
  if (config_.kind == OptimizerKind::Adam) {
    m_.assign(param_count, 0.0);
    v_.assign(param_count, 0.0);
  }
}

void Optimizer::step(std::span<double> params, std::span<const double> grad) {
  if (grad.size() != params.size()) throw InvalidInput("optimizer: gradient length does not match parameters");
  if (config_.kind == OptimizerKind::Adam && m_.size() != params.size())
    throw InvalidInput("optimizer: state was sized for a different parameter vector");
  if (!all_finite(grad)) throw NumericError("optimizer: non-finite gradient rejected");

  std::span<const double> g = grad;
  if (config_.max_grad_norm > 0.0) {
    double sq = 0.0;
    for (double x : grad) sq += x * x;
    const double norm = std::sqrt(sq);
    if (norm > config_.max_grad_norm) {
      scratch_.assign(grad.begin(), grad.end());
      const double scale = config_.max_grad_norm / norm;
      for (double& x : scratch_) x *= scale;
      g = scratch_;
    }
  }

  ++steps_;
  const double lr = config_.learning_rate;
  if (config_.kind == OptimizerKind::Sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * g[i];
    return;
  }
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1 * m_[i] + (1.0 - b1) * g[i];
    v_[i] = b2 * v_[i] + (1.0 - b2) * g[i] * g[i];
    const double mhat = m_[i] / c1;
    const double vhat = v_[i] / c2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + config_.epsilon);
  }
}

}  // namespace infoasym
