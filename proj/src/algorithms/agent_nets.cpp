#include "infoasym/algorithms/agent_nets.hpp"

#include "infoasym/errors.hpp"

namespace infoasym {

namespace {

std::vector<std::size_t> sizes(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
  std::vector<std::size_t> s{in};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(out);
  return s;
}

}  // namespace

AgentNets AgentNets::make(const NetArchitecture& arch, Rng& rng) {
  if (arch.action_space.size == 0) throw InvalidInput("action space is empty");
  if (arch.feature_size == 0) throw InvalidInput("policy needs at least one input feature");
  AgentNets n;
  n.arch = arch;
  const std::size_t a = arch.action_space.size;
  const std::size_t head = arch.action_space.discrete() ? a : 2 * a;
  n.policy = Mlp::glorot(sizes(arch.feature_size, arch.policy_hidden, head), arch.activation, rng);
  std::size_t critic_in = arch.feature_size;
  std::size_t critic_out = 1;
  if (arch.critic == CriticKind::ActionValue) {
    if (arch.action_space.discrete())
      critic_out = a;
    else
      critic_in += a;
  }
  n.critic = Mlp::glorot(sizes(critic_in, arch.critic_hidden, critic_out), arch.activation, rng);
  if (arch.has_default) {
    // An input-free default is a learned vector of logits; hidden layers would add nothing.
    const auto& hidden = arch.default_feature_size == 0 ? std::vector<std::size_t>{} : arch.default_hidden;
    n.default_policy = Mlp::glorot(sizes(arch.default_feature_size, hidden, head), arch.activation, rng);
  }
  n.policy_target = n.policy;
  n.critic_target = n.critic;
  n.default_target = n.default_policy;
  return n;
}

void AgentNets::sync_agent_targets() {
  policy_target = policy;
  critic_target = critic;
}

void AgentNets::sync_default_target() { default_target = default_policy; }

std::vector<double> critic_input(std::span<const double> features, std::span<const double> action) {
  std::vector<double> x(features.begin(), features.end());
  x.insert(x.end(), action.begin(), action.end());
  return x;
}

Categorical categorical_head(const Mlp& net, std::span<const double> input) {
  return Categorical::from_logits(net.predict(input));
}

SquashedGaussian gaussian_head(const Mlp& net, std::span<const double> input, SquashSpec spec) {
  return squash_head(net.predict(input), spec);
}

double policy_log_prob(const AgentNets& nets, const Mlp& policy, std::span<const double> features, const Action& a,
                       SquashSpec spec) {
  if (nets.discrete()) return categorical_head(policy, features).log_prob(a.index);
  return log_prob(gaussian_head(policy, features, spec).dist, a.value);
}

SampledAction sample_action(const Mlp& policy, const ActionSpace& space, std::span<const double> features,
                            SquashSpec spec, Rng& rng) {
  SampledAction out;
  if (space.discrete()) {
    const auto dist = categorical_head(policy, features);
    out.action = Action::discrete(sample(dist, rng));
    out.log_prob = dist.log_prob(out.action.index);
  } else {
    const auto head = gaussian_head(policy, features, spec);
    out.action = Action::continuous(sample(head.dist, rng));
    out.log_prob = log_prob(head.dist, out.action.value);
  }
  return out;
}

}  // namespace infoasym
