#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "infoasym/envs/tabular_mdp.hpp"

namespace infoasym {

/// Discounted occupancy d(s) = sum_t gamma^t Pr[s_t = s], t < horizon.
struct VisitationWeights {
  std::vector<double> weight;
  std::size_t horizon = 0;

  double total() const noexcept;
};

/// Horizon 0 means "truncate once gamma^t < 1e-10" (requires gamma < 1).
VisitationWeights discounted_visitation(const TabularMdp& mdp, const PolicyTable& pi, double gamma,
                                        std::size_t horizon = 0);

/// Visitation-weighted average of pi within each mask group; terminal states never act and are skipped.
struct DefaultPolicyOracle {
  PolicyTable pi0;                  // rows indexed by mask value
  std::vector<bool> unvisited;      // mask values with zero weight (rows set to uniform)
  std::vector<double> group_weight; // total weight per mask value
};

DefaultPolicyOracle optimal_default_policy(const TabularMdp& mdp, const PolicyTable& pi, const VisitationWeights& d);
DefaultPolicyOracle optimal_default_policy(const TabularMdp& mdp, const PolicyTable& pi, double gamma);

/// Objective sum_s d(s) KL(pi(.|s) || q(.|m(s))) over non-terminal states.
double distillation_objective(const TabularMdp& mdp, const PolicyTable& pi, const PolicyTable& q,
                              const VisitationWeights& d);

struct RegularizedValues {
  Matrix q;               // num_states x num_actions
  std::vector<double> v;  // num_states
  std::size_t iterations = 0;
};

/// Fixed point of V(s) = E_pi[Q(s,a)] - alpha KL[pi(.|s) || pi0(.|m(s))],
/// Q(s,a) = r(s,a) + gamma E[V(s')], with V = 0 at terminal states.
/// gamma = 1 is accepted only if every state reaches a terminal state under pi.
RegularizedValues regularized_dp_eval(const TabularMdp& mdp, const PolicyTable& pi, const PolicyTable& pi0,
                                      double alpha, double gamma, double tol = 1e-10);
/// Entropy-regularized counterpart: V(s) = E_pi[Q(s,a)] + alpha H(pi(.|s)).
RegularizedValues entropy_dp_eval(const TabularMdp& mdp, const PolicyTable& pi, double alpha, double gamma,
                                  double tol = 1e-10);

/// Optimal default policy over histories: the default sees the sequence of mask values and actions
/// (m(s_1), a_1, ..., m(s_t)); the agent acts on the state. Histories are enumerated
/// explicitly up to `horizon` steps (at most 6).
struct HistoryDefaultOracle {
  std::map<std::vector<std::size_t>, std::vector<double>> pi0;  // masked history -> action distribution
  std::map<std::vector<std::size_t>, double> weight;
};
HistoryDefaultOracle optimal_history_default_policy(const TabularMdp& mdp, const PolicyTable& pi, double gamma,
                                                    std::size_t horizon);

}  // namespace infoasym
