#include "infoasym/algorithms/losses.hpp"

#include <cmath>

#include "infoasym/algorithms/regularizer.hpp"
#include "infoasym/errors.hpp"

namespace infoasym {

namespace {

double batch_scale(std::span<const Window> batch) {
  if (batch.empty()) throw InvalidInput("empty batch");
  return 1.0 / static_cast<double>(batch.size());
}

void check_targets(std::span<const Window> batch, std::span<const WindowTargets> targets) {
  if (targets.size() != batch.size()) throw InvalidInput("one target set per window is required");
  for (std::size_t i = 0; i < batch.size(); ++i)
    if (targets[i].values.size() != batch[i].size()) throw InvalidInput("target length does not match its window");
}

}  // namespace

LossGrad actor_loss(std::span<const Window> batch, std::span<const WindowTargets> targets, const AgentNets& nets,
                    const HyperParams& hp, std::uint64_t noise_seed) {
  const double scale = batch_scale(batch);
  const bool vtrace = nets.arch.critic == CriticKind::StateValue;
  if (vtrace) check_targets(batch, targets);
  const bool with_default = default_source(hp.variant.kind) != DefaultSource::None;
  Rng noise(noise_seed);
  LossGrad out;
  out.grad.assign(nets.policy.param_count(), 0.0);

  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& w = batch[b];
    for (std::size_t j = 0; j < w.size(); ++j) {
      const auto& s = w.steps[j];
      const double k = scale * w.weight;
      auto fwd = nets.policy.forward(s.features);
      const auto din = default_input(nets, hp, s.features, s.default_features);
      double obj = 0.0;
      std::vector<double> d_head;  // d obj / d raw policy output

      if (nets.discrete()) {
        const auto pi = Categorical::from_logits(fwd.output);
        std::vector<double> d_logits(pi.size(), 0.0);
        if (vtrace) {
          const double adv = targets[b].advantages[j];
          obj += adv * pi.log_prob(s.action.index);
          const auto g = categorical_log_prob_grad(pi, s.action.index);
          for (std::size_t a = 0; a < g.size(); ++a) d_logits[a] += adv * g[a];
        } else {
          const auto q = nets.critic_target.predict(s.features);
          double eq = 0.0;
          for (std::size_t a = 0; a < q.size(); ++a) eq += pi.probs()[a] * q[a];
          obj += eq;
          for (std::size_t a = 0; a < q.size(); ++a) d_logits[a] += pi.probs()[a] * (q[a] - eq);
        }
        RegularizerTerm reg;
        if (with_default) {
          const auto pi0 = categorical_head(nets.default_target, din);
          reg = regularizer_term(hp, pi, &pi0);
        } else {
          reg = regularizer_term(hp, pi, nullptr);
        }
        obj += reg.actor;
        for (std::size_t a = 0; a < d_logits.size(); ++a) d_logits[a] += reg.d_actor[a];
        d_head = std::move(d_logits);
      } else {
        const auto head = squash_head(fwd.output, hp.squash);
        const std::size_t d = head.dist.dim();
        std::vector<double> d_mean(d, 0.0), d_std(d, 0.0);
        if (vtrace) {
          const double adv = targets[b].advantages[j];
          obj += adv * log_prob(head.dist, s.action.value);
          const auto g = gaussian_log_prob_grad(head.dist, s.action.value);
          for (std::size_t i = 0; i < d; ++i) {
            d_mean[i] += adv * g.d_mean[i];
            d_std[i] += adv * g.d_std[i];
          }
        } else {
          // SVG(0): differentiate Q_T through its action input along reparameterized samples.
          const double inv_m = 1.0 / static_cast<double>(hp.mc_samples);
          for (std::size_t m = 0; m < hp.mc_samples; ++m) {
            const auto smp = rsample(head.dist, noise);
            auto qf = nets.critic_target.forward(critic_input(s.features, smp.action));
            obj += inv_m * qf.output[0];
            const double one = 1.0;
            const auto bg = nets.critic_target.backward(qf.tape, std::span<const double>(&one, 1));
            const std::size_t off = s.features.size();
            for (std::size_t i = 0; i < d; ++i) {
              d_mean[i] += inv_m * bg.input_grad[off + i];
              d_std[i] += inv_m * bg.input_grad[off + i] * smp.noise[i];
            }
          }
        }
        RegularizerTerm reg;
        if (with_default) {
          const auto pi0 = gaussian_head(nets.default_target, din, hp.squash);
          reg = regularizer_term(hp, head.dist, &pi0.dist);
        } else {
          reg = regularizer_term(hp, head.dist, nullptr);
        }
        obj += reg.actor;
        for (std::size_t i = 0; i < d; ++i) {
          d_mean[i] += reg.d_actor[i];
          d_std[i] += reg.d_actor[d + i];
        }
        d_head = head.backward(d_mean, d_std);
      }

      out.loss -= k * obj;
      out.per_step.push_back(-obj);
      for (auto& g : d_head) g *= -k;
      nets.policy.backward_into(fwd.tape, d_head, out.grad);
    }
  }
  return out;
}

LossGrad critic_loss(std::span<const Window> batch, std::span<const WindowTargets> targets, const AgentNets& nets) {
  const double scale = batch_scale(batch);
  check_targets(batch, targets);
  const bool q_critic = nets.arch.critic == CriticKind::ActionValue;
  LossGrad out;
  out.grad.assign(nets.critic.param_count(), 0.0);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& w = batch[b];
    for (std::size_t j = 0; j < w.size(); ++j) {
      const auto& s = w.steps[j];
      const double k = scale * w.weight;
      const bool cont_q = q_critic && !nets.discrete();
      auto fwd = cont_q ? nets.critic.forward(critic_input(s.features, s.action.value)) : nets.critic.forward(s.features);
      const std::size_t slot = (q_critic && nets.discrete()) ? s.action.index : 0;
      const double err = fwd.output[slot] - targets[b].values[j];
      out.loss += k * err * err;
      out.per_step.push_back(err * err);
      std::vector<double> og(fwd.output.size(), 0.0);
      og[slot] = 2.0 * k * err;
      nets.critic.backward_into(fwd.tape, og, out.grad);
    }
  }
  return out;
}

LossGrad default_policy_loss(std::span<const Window> batch, const AgentNets& nets, const HyperParams& hp) {
  const double scale = batch_scale(batch);
  LossGrad out;
  out.grad.assign(nets.default_policy.param_count(), 0.0);
  if (default_source(hp.variant.kind) != DefaultSource::Learned) return out;
  for (const auto& w : batch) {
    for (const auto& s : w.steps) {
      const double k = scale * w.weight;
      auto fwd = nets.default_policy.forward(s.default_features);
      std::vector<double> d_head;
      double value;
      if (nets.discrete()) {
        const auto pi = categorical_head(nets.policy, s.features);
        const auto pi0 = Categorical::from_logits(fwd.output);
        auto t = distill_term(hp.variant.kind, pi, pi0);
        value = t.value;
        d_head = std::move(t.d_default);
      } else {
        const auto pi = gaussian_head(nets.policy, s.features, hp.squash);
        const auto pi0 = squash_head(fwd.output, hp.squash);
        const auto t = distill_term(hp.variant.kind, pi.dist, pi0.dist);
        value = t.value;
        const std::size_t d = pi0.dist.dim();
        d_head = pi0.backward(std::span<const double>(t.d_default).subspan(0, d),
                              std::span<const double>(t.d_default).subspan(d, d));
      }
      out.loss += k * value;
      out.per_step.push_back(value);
      for (auto& g : d_head) g *= k;
      nets.default_policy.backward_into(fwd.tape, d_head, out.grad);
    }
  }
  return out;
}

}  // namespace infoasym
