#include "infoasym/algorithms/learner.hpp"

#include <cmath>
#include <limits>

#include "infoasym/algorithms/regularizer.hpp"
#include "infoasym/algorithms/targets.hpp"
#include "infoasym/errors.hpp"

namespace infoasym {

void sync_targets(AgentNets& nets, std::size_t learner_step, const HyperParams& hp, bool freeze_default) {
  if (learner_step == 0) return;
  if (learner_step % hp.target_period_agent == 0) nets.sync_agent_targets();
  switch (default_source(hp.variant.kind)) {
    case DefaultSource::Learned:
      if (!freeze_default && learner_step % hp.target_period_default == 0) nets.sync_default_target();
      break;
    case DefaultSource::OldPolicy:
      if (learner_step % hp.variant.old_policy_period == 0) {
        nets.default_policy = nets.policy;
        nets.default_target = nets.policy;
      }
      break;
    case DefaultSource::None: break;
  }
}

BatchStatistics batch_statistics(std::span<const Window> batch, const AgentNets& nets, const HyperParams& hp) {
  BatchStatistics st;
  std::size_t count = 0;
  const bool with_default = default_source(hp.variant.kind) != DefaultSource::None;
  for (const auto& w : batch) {
    for (const auto& s : w.steps) {
      const auto din = default_input(nets, hp, s.features, s.default_features);
      if (nets.discrete()) {
        const auto pi = categorical_head(nets.policy, s.features);
        const auto pi0 = with_default ? categorical_head(nets.default_policy, din) : Categorical::uniform(pi.size());
        st.mean_kl += kl_per_step(pi, pi0);
        st.default_entropy += categorical_entropy(pi0);
      } else if (with_default) {
        const auto pi = gaussian_head(nets.policy, s.features, hp.squash);
        const auto pi0 = gaussian_head(nets.default_policy, din, hp.squash);
        st.mean_kl += kl_per_step(pi.dist, pi0.dist);
        st.default_entropy += gaussian_entropy(pi0.dist);
      } else {
        st.mean_kl = st.default_entropy = std::numeric_limits<double>::quiet_NaN();
      }
      ++count;
    }
  }
  if (count > 0) {
    st.mean_kl /= static_cast<double>(count);
    st.default_entropy /= static_cast<double>(count);
  }
  return st;
}

Learner::Learner(AgentNets nets, HyperParams hp, std::uint64_t seed, bool freeze_default)
    : nets_(std::move(nets)), hp_(hp), rng_(seed), freeze_default_(freeze_default) {
  hp_.validate();
  if (default_source(hp_.variant.kind) == DefaultSource::OldPolicy) {
    nets_.default_policy = nets_.policy;
    nets_.default_target = nets_.policy;
    nets_.arch.has_default = true;
  }
  if (default_source(hp_.variant.kind) == DefaultSource::Learned && !nets_.has_default())
    throw ConfigError("variant " + std::string(to_string(hp_.variant.kind)) + " needs a default-policy net",
                      "hyper.variant");
  const bool v_critic = nets_.arch.critic == CriticKind::StateValue;
  if (v_critic != (hp_.algorithm == CriticAlgorithm::VTrace))
    throw ConfigError("v-trace pairs with a state-value critic, retrace and kstep with an action-value critic",
                      "agent.algorithm");
  auto cfg = [&](double lr) {
    OptimizerConfig c;
    c.kind = hp_.optimizer;
    c.learning_rate = lr;
    c.max_grad_norm = hp_.max_grad_norm;
    return c;
  };
  opt_policy_ = Optimizer(cfg(hp_.lr_policy), nets_.policy.param_count());
  opt_critic_ = Optimizer(cfg(hp_.lr_critic), nets_.critic.param_count());
  opt_default_ = Optimizer(cfg(hp_.lr_default), nets_.default_policy.param_count());
}

UpdateStats Learner::update(std::span<const Window> batch) {
  std::vector<WindowTargets> targets;
  targets.reserve(batch.size());
  for (const auto& w : batch) targets.push_back(compute_targets(w, nets_, hp_, rng_));

  const auto pi = actor_loss(batch, targets, nets_, hp_, rng_.next_u64());
  const auto q = critic_loss(batch, targets, nets_);
  UpdateStats st{pi.loss, q.loss, 0.0};
  const bool train_default = default_source(hp_.variant.kind) == DefaultSource::Learned && !freeze_default_;
  LossGrad d;
  if (train_default) {
    d = default_policy_loss(batch, nets_, hp_);
    st.loss_pi0 = d.loss;
  }
  if (!std::isfinite(st.loss_pi) || !std::isfinite(st.loss_q) || !std::isfinite(st.loss_pi0))
    throw NumericError("non-finite loss at learner step " + std::to_string(step_) + " (pi " +
                       std::to_string(st.loss_pi) + ", q " + std::to_string(st.loss_q) + ", pi0 " +
                       std::to_string(st.loss_pi0) + ")");

  opt_policy_.step(nets_.policy.params(), pi.grad);
  opt_critic_.step(nets_.critic.params(), q.grad);
  if (train_default) opt_default_.step(nets_.default_policy.params(), d.grad);
  ++step_;
  sync_targets(nets_, step_, hp_, freeze_default_);
  return st;
}

}  // namespace infoasym
