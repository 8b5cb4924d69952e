#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "infoasym/algorithms/agent_nets.hpp"
#include "infoasym/algorithms/hyperparams.hpp"
#include "infoasym/algorithms/targets.hpp"
#include "infoasym/algorithms/trajectory.hpp"

namespace infoasym {

/// A loss averaged over the windows of a batch (sum over steps inside a window,
/// each window scaled by its weight) and its gradient w.r.t. one parameter vector.
struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
  std::vector<double> per_step;  // per-step loss contributions, flattened over the batch
};

/// Policy loss: minus the per-step objective E_pi[Q_T] + regularizer term (or the
/// V-trace advantage times log pi(a|s)). Gradient w.r.t. the online policy only;
/// the target critic and target default are constants. Gaussian policies use
/// hp.mc_samples reparameterized samples drawn from `noise_seed`.
LossGrad actor_loss(std::span<const Window> batch, std::span<const WindowTargets> targets, const AgentNets& nets,
                    const HyperParams& hp, std::uint64_t noise_seed);

/// Sum of squared errors between the targets and the online critic. Gradient w.r.t. the critic only.
LossGrad critic_loss(std::span<const Window> batch, std::span<const WindowTargets> targets, const AgentNets& nets);

/// Distillation of the (constant) online policy into the online default policy.
/// Gradient w.r.t. the default net only. Zero for variants without a learned default.
LossGrad default_policy_loss(std::span<const Window> batch, const AgentNets& nets, const HyperParams& hp);

}  // namespace infoasym
