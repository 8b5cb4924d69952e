#include "infoasym/numerics/mlp.hpp"

#include <cmath>
#include <string>

#include "infoasym/errors.hpp"
#include "infoasym/numerics/matrix.hpp"

namespace infoasym {

namespace {

inline double activate(Activation a, double x) noexcept {
  switch (a) {
    case Activation::Elu: return x > 0.0 ? x : std::expm1(x);
    case Activation::Tanh: return std::tanh(x);
    case Activation::Identity: return x;
  }
  return x;
}

// Derivative expressed through the pre-activation x and the output y.
inline double activate_grad(Activation a, double x, double y) noexcept {
  switch (a) {
    case Activation::Elu: return x > 0.0 ? 1.0 : y + 1.0;
    case Activation::Tanh: return 1.0 - y * y;
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

}  // namespace

Activation parse_activation(std::string_view name) {
  if (name == "elu") return Activation::Elu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity" || name == "linear") return Activation::Identity;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::Elu: return "elu";
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
  }
  return "identity";
}

Mlp::Mlp(std::vector<std::size_t> layer_sizes, std::vector<Activation> hidden_activations)
    : sizes_(std::move(layer_sizes)), acts_(std::move(hidden_activations)) {
  if (sizes_.size() < 2) throw InvalidInput("mlp needs at least an input and an output size");
  if (acts_.size() != sizes_.size() - 2)
    throw InvalidInput("mlp needs one activation per hidden layer");
  for (std::size_t l = 1; l < sizes_.size(); ++l)
    if (sizes_[l] == 0) throw InvalidInput("mlp layer widths after the input must be positive");
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    LayerLayout layer{sizes_[l], sizes_[l + 1], offset, offset + sizes_[l] * sizes_[l + 1]};
    offset = layer.bias_offset + layer.out;
    layout_.push_back(layer);
  }
  params_.assign(offset, 0.0);
}

Mlp Mlp::glorot(std::vector<std::size_t> layer_sizes, std::vector<Activation> hidden_activations, Rng& rng) {
  Mlp net(std::move(layer_sizes), std::move(hidden_activations));
  for (const auto& layer : net.layout_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    for (std::size_t i = 0; i < layer.in * layer.out; ++i)
      net.params_[layer.weight_offset + i] = rng.uniform(-limit, limit);
  }
  return net;
}

Mlp Mlp::glorot(std::vector<std::size_t> layer_sizes, Activation hidden, Rng& rng) {
  std::vector<Activation> acts(layer_sizes.size() >= 2 ? layer_sizes.size() - 2 : 0, hidden);
  return glorot(std::move(layer_sizes), std::move(acts), rng);
}

void Mlp::set_params(std::span<const double> p) {
  if (p.size() != params_.size()) throw InvalidInput("set_params: parameter count mismatch");
  params_.assign(p.begin(), p.end());
}

void Mlp::check_input(std::span<const double> input) const {
  if (input.size() != input_size())
    throw InvalidInput("mlp input has length " + std::to_string(input.size()) + ", expected " +
                       std::to_string(input_size()));
}

ForwardResult Mlp::forward(std::span<const double> input) const {
  check_input(input);
  ForwardResult result;
  auto& tape = result.tape;
  tape.activations_.reserve(layout_.size() + 1);
  tape.pre_.reserve(layout_.size());
  tape.activations_.emplace_back(input.begin(), input.end());
  for (std::size_t l = 0; l < layout_.size(); ++l) {
    const auto& layer = layout_[l];
    const auto& x = tape.activations_.back();
    std::vector<double> z(params_.begin() + static_cast<std::ptrdiff_t>(layer.bias_offset),
                          params_.begin() + static_cast<std::ptrdiff_t>(layer.bias_offset + layer.out));
    const double* w = params_.data() + layer.weight_offset;
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double* row = w + o * layer.in;
      double acc = 0.0;
      for (std::size_t i = 0; i < layer.in; ++i) acc += row[i] * x[i];
      z[o] += acc;
    }
    const Activation act = l + 1 < layout_.size() ? acts_[l] : Activation::Identity;
    std::vector<double> y(z.size());
    for (std::size_t o = 0; o < z.size(); ++o) y[o] = activate(act, z[o]);
    tape.pre_.push_back(std::move(z));
    tape.activations_.push_back(std::move(y));
  }
  result.output = tape.activations_.back();
  if (!all_finite(result.output)) throw NumericError("mlp forward produced a non-finite output");
  return result;
}

std::vector<double> Mlp::predict(std::span<const double> input) const {
  check_input(input);
  std::vector<double> x(input.begin(), input.end());
  for (std::size_t l = 0; l < layout_.size(); ++l) {
    const auto& layer = layout_[l];
    const Activation act = l + 1 < layout_.size() ? acts_[l] : Activation::Identity;
    std::vector<double> y(layer.out);
    const double* w = params_.data() + layer.weight_offset;
    const double* b = params_.data() + layer.bias_offset;
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double* row = w + o * layer.in;
      double acc = b[o];
      for (std::size_t i = 0; i < layer.in; ++i) acc += row[i] * x[i];
      y[o] = activate(act, acc);
    }
    x = std::move(y);
  }
  if (!all_finite(x)) throw NumericError("mlp forward produced a non-finite output");
  return x;
}

std::vector<double> Mlp::backward_into(GradTape& tape, std::span<const double> output_grad,
                                       std::span<double> param_grad) const {
  if (tape.used_) throw ContractViolation("gradient tape already consumed by a backward pass");
  if (tape.activations_.size() != layout_.size() + 1) throw ContractViolation("tape was not produced by this network");
  if (output_grad.size() != output_size()) throw InvalidInput("output gradient has the wrong length");
  if (param_grad.size() != params_.size()) throw InvalidInput("parameter gradient buffer has the wrong length");
  tape.used_ = true;

  std::vector<double> delta(output_grad.begin(), output_grad.end());
  for (std::size_t l = layout_.size(); l-- > 0;) {
    const auto& layer = layout_[l];
    const Activation act = l + 1 < layout_.size() ? acts_[l] : Activation::Identity;
    const auto& z = tape.pre_[l];
    const auto& y = tape.activations_[l + 1];
    const auto& x = tape.activations_[l];
    if (act != Activation::Identity)
      for (std::size_t o = 0; o < layer.out; ++o) delta[o] *= activate_grad(act, z[o], y[o]);

    double* gw = param_grad.data() + layer.weight_offset;
    double* gb = param_grad.data() + layer.bias_offset;
    const double* w = params_.data() + layer.weight_offset;
    std::vector<double> next(layer.in, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      if (d == 0.0) continue;
      double* grow = gw + o * layer.in;
      const double* wrow = w + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) {
        grow[i] += d * x[i];
        next[i] += d * wrow[i];
      }
    }
    delta = std::move(next);
  }
  return delta;
}

BackwardResult Mlp::backward(GradTape& tape, std::span<const double> output_grad) const {
  BackwardResult result;
  result.param_grad.assign(params_.size(), 0.0);
  result.input_grad = backward_into(tape, output_grad, result.param_grad);
  return result;
}

}  // namespace infoasym
