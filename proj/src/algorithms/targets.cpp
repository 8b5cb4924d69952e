#include "infoasym/algorithms/targets.hpp"

#include <algorithm>
#include <cmath>

#include "infoasym/algorithms/regularizer.hpp"
#include "infoasym/errors.hpp"

namespace infoasym {

std::span<const double> default_input(const AgentNets& nets, const HyperParams& hp, std::span<const double> features,
                                      std::span<const double> default_features) {
  (void)nets;
  if (default_source(hp.variant.kind) == DefaultSource::OldPolicy) return features;
  return default_features;
}

namespace {

// Reward-path regularizer at one state: online policy against the target default.
double reward_reg(const AgentNets& nets, const HyperParams& hp, std::span<const double> x, std::span<const double> xd) {
  if (!regularizes_reward(hp.variant.kind)) return 0.0;
  const bool with_default = default_source(hp.variant.kind) != DefaultSource::None;
  const auto din = default_input(nets, hp, x, xd);
  if (nets.discrete()) {
    const auto pi = categorical_head(nets.policy, x);
    if (!with_default) return regularizer_term(hp, pi, nullptr).reward;
    const auto pi0 = categorical_head(nets.default_target, din);
    return regularizer_term(hp, pi, &pi0).reward;
  }
  const auto pi = gaussian_head(nets.policy, x, hp.squash);
  if (!with_default) return regularizer_term(hp, pi.dist, nullptr).reward;
  const auto pi0 = gaussian_head(nets.default_target, din, hp.squash);
  return regularizer_term(hp, pi.dist, &pi0.dist).reward;
}

double expected_target_q(const AgentNets& nets, const HyperParams& hp, std::span<const double> x, Rng& mc) {
  if (nets.discrete()) {
    const auto pi = categorical_head(nets.policy_target, x);
    const auto q = nets.critic_target.predict(x);
    double e = 0.0;
    for (std::size_t a = 0; a < q.size(); ++a) e += pi.probs()[a] * q[a];
    return e;
  }
  const auto pi = gaussian_head(nets.policy_target, x, hp.squash);
  double e = 0.0;
  for (std::size_t m = 0; m < hp.mc_samples; ++m) {
    const auto s = rsample(pi.dist, mc);
    e += nets.critic_target.predict(critic_input(x, s.action))[0];
  }
  return e / static_cast<double>(hp.mc_samples);
}

double target_q(const AgentNets& nets, std::span<const double> x, const Action& a) {
  if (nets.discrete()) return nets.critic_target.predict(x)[a.index];
  return nets.critic_target.predict(critic_input(x, a.value))[0];
}

void check_window(const Window& w) {
  if (w.steps.empty()) throw InvalidInput("window must contain at least one step");
  for (std::size_t i = 0; i + 1 < w.steps.size(); ++i)
    if (w.steps[i].terminal || w.steps[i].truncated)
      throw ContractViolation("only the last step of a window may end the episode");
  if (!w.ends_terminal() && w.bootstrap_features.empty())
    throw ContractViolation("non-terminal window needs bootstrap features");
}

// Clipped ratio min(bar, pi(a|s) / mu(a|s)).
double clipped_ratio(const AgentNets& nets, const Mlp& policy, const HyperParams& hp, const TrajectoryStep& s,
                     double bar) {
  if (!std::isfinite(s.behavior_log_prob)) throw ContractViolation("behavior probability of a taken action is zero");
  const double lp = policy_log_prob(nets, policy, s.features, s.action, hp.squash);
  const double log_ratio = lp - s.behavior_log_prob;
  return std::min(bar, std::exp(std::min(log_ratio, 700.0)));
}

WindowTargets action_value_targets(const Window& w, const AgentNets& nets, const HyperParams& hp, Rng& mc,
                                   bool retrace) {
  check_window(w);
  if (nets.arch.critic != CriticKind::ActionValue) throw ContractViolation("action-value targets need a Q critic");
  const std::size_t n = w.size();
  WindowTargets t;
  t.values.assign(n, 0.0);
  t.reward_reg.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    t.reward_reg[j] = reward_reg(nets, hp, w.steps[j].features, w.steps[j].default_features);
  if (!w.ends_terminal())
    t.bootstrap = soft_value(nets, hp, w.bootstrap_features, w.bootstrap_default_features, mc);

  t.values[n - 1] = w.steps[n - 1].reward + hp.gamma * t.bootstrap;
  for (std::size_t jj = n - 1; jj-- > 0;) {
    const auto& next = w.steps[jj + 1];
    double tail;
    if (retrace) {
      const double v_next = expected_target_q(nets, hp, next.features, mc) + t.reward_reg[jj + 1];
      const double c = hp.retrace_lambda * clipped_ratio(nets, nets.policy_target, hp, next, 1.0);
      tail = v_next + c * (t.values[jj + 1] - target_q(nets, next.features, next.action));
    } else {
      tail = t.reward_reg[jj + 1] + t.values[jj + 1];
    }
    t.values[jj] = w.steps[jj].reward + hp.gamma * tail;
  }
  return t;
}

}  // namespace

double soft_value(const AgentNets& nets, const HyperParams& hp, std::span<const double> features,
                  std::span<const double> default_features, Rng& mc) {
  if (nets.arch.critic == CriticKind::StateValue) return nets.critic_target.predict(features)[0];
  return expected_target_q(nets, hp, features, mc) + reward_reg(nets, hp, features, default_features);
}

WindowTargets kstep_targets(const Window& w, const AgentNets& nets, const HyperParams& hp, Rng& mc) {
  return action_value_targets(w, nets, hp, mc, false);
}

WindowTargets retrace_targets(const Window& w, const AgentNets& nets, const HyperParams& hp, Rng& mc) {
  return action_value_targets(w, nets, hp, mc, true);
}

WindowTargets vtrace_targets(const Window& w, const AgentNets& nets, const HyperParams& hp, Rng& mc) {
  (void)mc;
  check_window(w);
  if (nets.arch.critic != CriticKind::StateValue) throw ContractViolation("v-trace targets need a state-value critic");
  const std::size_t n = w.size();
  WindowTargets t;
  t.values.assign(n, 0.0);
  t.advantages.assign(n, 0.0);
  t.reward_reg.assign(n, 0.0);
  std::vector<double> v(n + 1, 0.0), rho(n), c(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& s = w.steps[j];
    t.reward_reg[j] = reward_reg(nets, hp, s.features, s.default_features);
    v[j] = nets.critic_target.predict(s.features)[0];
    rho[j] = clipped_ratio(nets, nets.policy, hp, s, hp.vtrace_rho_bar);
    c[j] = hp.retrace_lambda * clipped_ratio(nets, nets.policy, hp, s, hp.vtrace_c_bar);
  }
  if (!w.ends_terminal()) v[n] = nets.critic_target.predict(w.bootstrap_features)[0];
  t.bootstrap = v[n];

  double vs_next = v[n];
  for (std::size_t jj = n; jj-- > 0;) {
    const double r = w.steps[jj].reward + t.reward_reg[jj];
    const double delta = r + hp.gamma * v[jj + 1] - v[jj];
    t.advantages[jj] = rho[jj] * (r + hp.gamma * vs_next - v[jj]);
    const double vs = v[jj] + rho[jj] * delta + hp.gamma * c[jj] * (vs_next - v[jj + 1]);
    t.values[jj] = vs;
    vs_next = vs;
  }
  return t;
}

WindowTargets compute_targets(const Window& w, const AgentNets& nets, const HyperParams& hp, Rng& mc) {
  switch (hp.algorithm) {
    case CriticAlgorithm::Retrace: return retrace_targets(w, nets, hp, mc);
    case CriticAlgorithm::VTrace: return vtrace_targets(w, nets, hp, mc);
    case CriticAlgorithm::KStep: return kstep_targets(w, nets, hp, mc);
  }
  throw ContractViolation("unknown critic algorithm");
}

}  // namespace infoasym
