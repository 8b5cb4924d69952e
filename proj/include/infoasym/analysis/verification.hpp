#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "infoasym/algorithms/agent_nets.hpp"
#include "infoasym/algorithms/hyperparams.hpp"
#include "infoasym/algorithms/trajectory.hpp"
#include "infoasym/envs/tabular_mdp.hpp"

namespace infoasym {

// ---- tabular agents on TabularMdp ----------------------------------------------

/// Linear net from a one-hot input of width `rows` to `cols` outputs; with zero
/// bias its output for input e_r is row r of the table.
Mlp tabular_net(const Matrix& table);
/// Policy net whose logits are log(table).
Mlp tabular_policy_net(const PolicyTable& table);
/// Reads the table back (output for every one-hot input).
Matrix read_tabular(const Mlp& net);

/// Agent nets for a TabularMdp: one-hot state features for the policy and critic,
/// one-hot mask values for the default.
AgentNets tabular_agent(const TabularMdp& mdp, const PolicyTable& pi, const PolicyTable& pi0, CriticKind critic);

/// Every window of `length` steps (cut short at terminal states) starting in each
/// non-terminal state, with actions drawn from `behavior`. Window weights are
/// start_weight[s] times the path probability; behavior log-probs are recorded.
std::vector<Window> enumerate_windows(const TabularMdp& mdp, const PolicyTable& behavior, std::size_t length,
                                      std::span<const double> start_weight);

// ---- verification suites ------------------------------------------------------

struct SuiteLine {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct SuiteReport {
  std::vector<SuiteLine> lines;
  bool passed() const noexcept;
  std::string format() const;
};

/// Finite-difference checks of the actor, critic and default losses over random
/// instances cycling through discrete/continuous heads, every regularizer variant
/// and every critic algorithm.
SuiteReport run_gradcheck_suite(std::size_t instances, std::uint64_t seed, double tolerance = 1e-4);

/// Gradient-descent distillation of a tabular default against optimal_default_policy
/// on random MDPs; reports the worst per-group L1 distance.
SuiteReport run_distillation_suite(std::size_t instances, std::uint64_t seed, double tolerance = 1e-2);

/// Iterated Retrace / V-trace target fitting with behavior != target policy,
/// compared against regularized dynamic programming.
SuiteReport run_offpolicy_suite(std::size_t instances, std::uint64_t seed, double tolerance = 1e-3);

}  // namespace infoasym
