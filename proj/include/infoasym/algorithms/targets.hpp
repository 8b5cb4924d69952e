#pragma once

#include <span>
#include <vector>

#include "infoasym/algorithms/agent_nets.hpp"
#include "infoasym/algorithms/hyperparams.hpp"
#include "infoasym/algorithms/trajectory.hpp"

namespace infoasym {

struct WindowTargets {
  std::vector<double> values;      // Q-hat per step, or v_s for a state-value critic
  std::vector<double> advantages;  // V-trace policy-gradient advantages (empty for the other algorithms)
  std::vector<double> reward_reg;  // regularizer added to each step's reward, e.g. -alpha * KL_T
  double bootstrap = 0.0;          // V-hat of the state after the window (0 when terminal)
};

/// Input of the default net for one step: x^D, or the full history when the
/// default is a copy of the policy.
std::span<const double> default_input(const AgentNets& nets, const HyperParams& hp, std::span<const double> features,
                                      std::span<const double> default_features);

/// Regularized soft value V-hat(s) = E_{pi_T}[Q_T(s, a)] + reward regularizer at s.
/// Exact for categorical policies, hp.mc_samples reparameterized samples for Gaussian ones.
double soft_value(const AgentNets& nets, const HyperParams& hp, std::span<const double> features,
                  std::span<const double> default_features, Rng& mc);

WindowTargets kstep_targets(const Window& w, const AgentNets& nets, const HyperParams& hp, Rng& mc);
WindowTargets retrace_targets(const Window& w, const AgentNets& nets, const HyperParams& hp, Rng& mc);
WindowTargets vtrace_targets(const Window& w, const AgentNets& nets, const HyperParams& hp, Rng& mc);

/// Dispatches on hp.algorithm.
WindowTargets compute_targets(const Window& w, const AgentNets& nets, const HyperParams& hp, Rng& mc);

}  // namespace infoasym
