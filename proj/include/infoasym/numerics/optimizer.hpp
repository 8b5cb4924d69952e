#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace infoasym {

enum class OptimizerKind { Sgd, Adam };

OptimizerKind parse_optimizer(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Global-norm gradient clipping; 0 disables it.
  double max_grad_norm = 0.0;
};

/// Gradient-descent state for one parameter vector (minimizes).
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerConfig config, std::size_t param_count);

  const OptimizerConfig& config() const noexcept { return config_; }
  std::uint64_t step_count() const noexcept { return steps_; }
  std::span<const double> first_moment() const noexcept { return m_; }
  std::span<const double> second_moment() const noexcept { return v_; }

  /// Throws NumericError (and leaves params untouched) if any gradient entry is non-finite.
  void step(std::span<double> params, std::span<const double> grad);

 private:
  OptimizerConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::vector<double> scratch_;
  std::uint64_t steps_ = 0;
};

}  // namespace infoasym
