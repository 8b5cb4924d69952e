#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "infoasym/numerics/rng.hpp"

namespace infoasym {

enum class Activation { Elu, Tanh, Identity };

Activation parse_activation(std::string_view name);
std::string_view to_string(Activation a) noexcept;

/// Where one affine layer lives inside the flat parameter vector.
/// Weights are row-major (out x in), followed by the bias.
struct LayerLayout {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;
};

/// Activations cached by one forward pass. Backward consumes it; a second
/// backward on the same tape is a contract violation.
class GradTape {
 public:
  bool used() const noexcept { return used_; }

 private:
  friend class Mlp;
  std::vector<std::vector<double>> activations_;  // [0] = input, [l+1] = output of layer l
  std::vector<std::vector<double>> pre_;          // pre-activation of layer l
  bool used_ = false;
};

struct ForwardResult {
  std::vector<double> output;
  GradTape tape;
};

struct BackwardResult {
  std::vector<double> param_grad;
  std::vector<double> input_grad;
};

/// Feedforward network: affine layers with a per-hidden-layer activation and an
/// identity readout. A zero-width input layer is allowed; the output is then a
/// learned constant (used for unconditional default policies).
class Mlp {
 public:
  Mlp() = default;
  /// All parameters zero.
  Mlp(std::vector<std::size_t> layer_sizes, std::vector<Activation> hidden_activations);

  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static Mlp glorot(std::vector<std::size_t> layer_sizes, std::vector<Activation> hidden_activations, Rng& rng);
  /// Same activation on every hidden layer.
  static Mlp glorot(std::vector<std::size_t> layer_sizes, Activation hidden, Rng& rng);

  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  const std::vector<Activation>& activations() const noexcept { return acts_; }
  const std::vector<LayerLayout>& layout() const noexcept { return layout_; }
  std::size_t input_size() const noexcept { return sizes_.empty() ? 0 : sizes_.front(); }
  std::size_t output_size() const noexcept { return sizes_.empty() ? 0 : sizes_.back(); }
  std::size_t param_count() const noexcept { return params_.size(); }

  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }
  void set_params(std::span<const double> p);

  bool same_layout(const Mlp& other) const noexcept {
    return sizes_ == other.sizes_ && acts_ == other.acts_;
  }

  ForwardResult forward(std::span<const double> input) const;
  /// Forward pass without caching.
  std::vector<double> predict(std::span<const double> input) const;

  /// Exact gradients of <output, output_grad> w.r.t. params and input.
  BackwardResult backward(GradTape& tape, std::span<const double> output_grad) const;
  /// As backward, but adds the parameter gradient into `param_grad` and returns the input gradient.
  std::vector<double> backward_into(GradTape& tape, std::span<const double> output_grad, std::span<double> param_grad) const;

 private:
  void check_input(std::span<const double> input) const;

  std::vector<std::size_t> sizes_;
  std::vector<Activation> acts_;
  std::vector<LayerLayout> layout_;
  std::vector<double> params_;
};

}  // namespace infoasym
