#pragma once

#include <cstdint>
#include <span>

#include "infoasym/algorithms/agent_nets.hpp"
#include "infoasym/algorithms/hyperparams.hpp"
#include "infoasym/algorithms/losses.hpp"
#include "infoasym/algorithms/trajectory.hpp"
#include "infoasym/numerics/optimizer.hpp"

namespace infoasym {

/// Hard target copies: theta, psi every P_a steps; phi every P_d steps unless frozen.
/// Under KlToOldPolicy the default (online and target) is replaced by a copy of the
/// policy every old_policy_period steps instead.
void sync_targets(AgentNets& nets, std::size_t learner_step, const HyperParams& hp, bool freeze_default = false);

struct UpdateStats {
  double loss_pi = 0.0;
  double loss_q = 0.0;
  double loss_pi0 = 0.0;
};

struct BatchStatistics {
  double mean_kl = 0.0;          // KL[pi || pi0] (or to uniform when there is no default)
  double default_entropy = 0.0;  // H(pi0); ln|A| for the implicit uniform default
};
BatchStatistics batch_statistics(std::span<const Window> batch, const AgentNets& nets, const HyperParams& hp);

/// Owns the online parameters and runs one step of alternating updates:
/// targets from target nets, then the actor, critic and default-policy steps.
class Learner {
 public:
  Learner(AgentNets nets, HyperParams hp, std::uint64_t seed, bool freeze_default = false);

  UpdateStats update(std::span<const Window> batch);

  const AgentNets& nets() const noexcept { return nets_; }
  AgentNets& nets() noexcept { return nets_; }
  const HyperParams& hyper() const noexcept { return hp_; }
  std::size_t step() const noexcept { return step_; }
  bool default_frozen() const noexcept { return freeze_default_; }

 private:
  AgentNets nets_;
  HyperParams hp_;
  Optimizer opt_policy_, opt_critic_, opt_default_;
  Rng rng_;
  std::size_t step_ = 0;
  bool freeze_default_ = false;
};

}  // namespace infoasym
