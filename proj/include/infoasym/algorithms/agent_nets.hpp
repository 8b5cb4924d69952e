#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "infoasym/algorithms/hyperparams.hpp"
#include "infoasym/distributions.hpp"
#include "infoasym/envs/env.hpp"
#include "infoasym/numerics/mlp.hpp"

namespace infoasym {

enum class CriticKind { ActionValue, StateValue };

struct NetArchitecture {
  std::size_t feature_size = 0;          // width of x_t
  std::size_t default_feature_size = 0;  // width of x^D_t
  ActionSpace action_space;
  std::vector<std::size_t> policy_hidden{64, 64};
  std::vector<std::size_t> critic_hidden{64, 64};
  std::vector<std::size_t> default_hidden{64, 64};
  Activation activation = Activation::Elu;
  CriticKind critic = CriticKind::ActionValue;
  /// When false the default net is absent (entropy variants).
  bool has_default = true;
};

/// Online and target copies of the policy (theta), default policy (phi) and critic (psi).
struct AgentNets {
  NetArchitecture arch;
  Mlp policy, policy_target;
  Mlp default_policy, default_target;
  Mlp critic, critic_target;

  static AgentNets make(const NetArchitecture& arch, Rng& rng);

  bool discrete() const noexcept { return arch.action_space.discrete(); }
  bool has_default() const noexcept { return arch.has_default; }
  std::size_t num_actions() const noexcept { return arch.action_space.size; }

  void sync_agent_targets();
  void sync_default_target();
};

/// Critic input for a continuous action-value critic: [features..., action...].
std::vector<double> critic_input(std::span<const double> features, std::span<const double> action);

Categorical categorical_head(const Mlp& net, std::span<const double> input);
SquashedGaussian gaussian_head(const Mlp& net, std::span<const double> input, SquashSpec spec);

/// Log-probability of an action under the policy net (behavior log-prob recomputation).
double policy_log_prob(const AgentNets& nets, const Mlp& policy, std::span<const double> features, const Action& a,
                       SquashSpec spec);

/// Samples an action and its log-probability from a policy net.
struct SampledAction {
  Action action;
  double log_prob = 0.0;
};
SampledAction sample_action(const Mlp& policy, const ActionSpace& space, std::span<const double> features,
                            SquashSpec spec, Rng& rng);

}  // namespace infoasym
