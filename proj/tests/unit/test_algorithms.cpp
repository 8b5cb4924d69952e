#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "infoasym/algorithms/agent_nets.hpp"
#include "infoasym/algorithms/learner.hpp"
#include "infoasym/algorithms/losses.hpp"
#include "infoasym/algorithms/regularizer.hpp"
#include "infoasym/algorithms/targets.hpp"
#include "infoasym/analysis/oracles.hpp"
#include "infoasym/analysis/verification.hpp"
#include "infoasym/errors.hpp"
#include "infoasym/numerics/gradcheck.hpp"
#include "infoasym/observation.hpp"

using namespace infoasym;

namespace {

NetArchitecture small_arch(std::size_t actions = 4, CriticKind critic = CriticKind::ActionValue) {
  NetArchitecture a;
  a.feature_size = 5;
  a.default_feature_size = 2;
  a.action_space = {ActionKind::Discrete, actions};
  a.policy_hidden = a.critic_hidden = a.default_hidden = {6};
  a.critic = critic;
  return a;
}

std::vector<double> rvec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

Window random_window(Rng& rng, const NetArchitecture& a, std::size_t len, bool terminal) {
  Window w;
  for (std::size_t i = 0; i < len; ++i) {
    TrajectoryStep s;
    s.features = rvec(rng, a.feature_size);
    s.default_features = rvec(rng, a.default_feature_size);
    s.action = Action::discrete(rng.below(a.action_space.size));
    s.reward = rng.normal();
    s.behavior_log_prob = std::log(1.0 / static_cast<double>(a.action_space.size));
    w.steps.push_back(std::move(s));
  }
  w.steps.back().terminal = terminal;
  if (!terminal) {
    w.bootstrap_features = rvec(rng, a.feature_size);
    w.bootstrap_default_features = rvec(rng, a.default_feature_size);
  }
  return w;
}

void zero(Mlp& net) {
  for (auto& p : net.params()) p = 0.0;
}

// Index of the one-hot entry.
std::size_t hot(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), 1.0) - v.begin());
}

}  // namespace

TEST_SUITE("algorithms") {
  TEST_CASE("kl per step") {
    Rng rng(1);
    const auto p = Categorical::from_logits(rvec(rng, 5));
    CHECK(kl_per_step(p, p) == doctest::Approx(0.0).scale(1).epsilon(1e-15));
    CHECK(kl_per_step(p, Categorical::uniform(5)) ==
          doctest::Approx(std::log(5.0) - categorical_entropy(p)).epsilon(1e-13));
    auto nets = AgentNets::make(small_arch(), rng);
    for (int t = 0; t < 20; ++t) {
      const auto x = rvec(rng, 5), xd = rvec(rng, 2);
      const auto pl = nets.policy.predict(x), ql = nets.default_policy.predict(xd);
      double zp = 0, zq = 0, kl = 0;
      for (std::size_t a = 0; a < 4; ++a) {
        zp += std::exp(pl[a]);
        zq += std::exp(ql[a]);
      }
      for (std::size_t a = 0; a < 4; ++a) {
        const double pa = std::exp(pl[a]) / zp, qa = std::exp(ql[a]) / zq;
        kl += pa * std::log(pa / qa);
      }
      CHECK(std::abs(kl_per_step(categorical_head(nets.policy, x), categorical_head(nets.default_policy, xd)) - kl) <
            1e-12);
    }
  }

  TEST_CASE("k-step targets reduce to window sums") {
    Rng rng(2);
    const auto arch = small_arch();
    auto nets = AgentNets::make(arch, rng);
    HyperParams hp;
    hp.alpha = 0.0;
    hp.gamma = 1.0;
    hp.algorithm = CriticAlgorithm::KStep;
    zero(nets.critic);
    zero(nets.critic_target);
    const auto w = random_window(rng, arch, 4, false);
    Rng mc(0);
    const auto t = kstep_targets(w, nets, hp, mc);
    for (std::size_t j = 0; j < 4; ++j) {
      double sum = 0;
      for (std::size_t k = j; k < 4; ++k) sum += w.steps[k].reward;
      CHECK(t.values[j] == doctest::Approx(sum).epsilon(1e-14));
    }
  }

  TEST_CASE("k-step targets with zero rewards are discounted bootstraps") {
    Rng rng(3);
    const auto arch = small_arch();
    auto nets = AgentNets::make(arch, rng);
    HyperParams hp;
    hp.alpha = 0.0;
    hp.gamma = 0.9;
    auto w = random_window(rng, arch, 3, false);
    for (auto& s : w.steps) s.reward = 0.0;
    Rng mc(0);
    const auto t = kstep_targets(w, nets, hp, mc);
    const auto pi = categorical_head(nets.policy_target, w.bootstrap_features);
    const auto q = nets.critic_target.predict(w.bootstrap_features);
    double v = 0;
    for (std::size_t a = 0; a < 4; ++a) v += pi.prob(a) * q[a];
    CHECK(t.bootstrap == doctest::Approx(v).epsilon(1e-13));
    for (std::size_t j = 0; j < 3; ++j) CHECK(t.values[j] == doctest::Approx(std::pow(0.9, 3 - j) * v).epsilon(1e-13));
    // terminal windows bootstrap from zero
    auto term = random_window(rng, arch, 3, true);
    CHECK(kstep_targets(term, nets, hp, mc).bootstrap == 0.0);
    CHECK_THROWS_AS(kstep_targets(Window{}, nets, hp, mc), InvalidInput);
  }

  TEST_CASE("k-step target fitting reaches the regularized DP values") {
    Rng rng(4);
    RandomMdpOptions o;
    o.states = 5;
    o.actions = 3;
    o.mask_values = 2;
    o.gamma = 0.7;
    const auto mdp = make_random_mdp(o, rng);
    const auto pi = random_policy(mdp.num_states, mdp.num_actions, rng);
    const auto pi0 = random_policy(mdp.num_mask_values, mdp.num_actions, rng);
    HyperParams hp;
    hp.alpha = 0.3;
    hp.gamma = mdp.gamma;
    hp.algorithm = CriticAlgorithm::KStep;
    const auto dp = regularized_dp_eval(mdp, pi, pi0, hp.alpha, hp.gamma);
    auto nets = tabular_agent(mdp, pi, pi0, CriticKind::ActionValue);
    const std::vector<double> start(mdp.num_states, 1.0);
    const auto windows = enumerate_windows(mdp, pi, 2, start);
    Rng mc(0);
    Matrix q(mdp.num_states, mdp.num_actions, 0.0);
    for (int it = 0; it < 300; ++it) {
      Matrix sum(mdp.num_states, mdp.num_actions, 0.0), wt(mdp.num_states, mdp.num_actions, 0.0);
      for (const auto& w : windows) {
        const auto t = kstep_targets(w, nets, hp, mc);
        for (std::size_t j = 0; j < w.size(); ++j) {
          const std::size_t s = hot(w.steps[j].features), a = w.steps[j].action.index;
          sum(s, a) += w.weight * t.values[j];
          wt(s, a) += w.weight;
        }
      }
      for (std::size_t s = 0; s < mdp.num_states; ++s)
        for (std::size_t a = 0; a < mdp.num_actions; ++a)
          if (wt(s, a) > 0) q(s, a) = sum(s, a) / wt(s, a);
      nets.critic = nets.critic_target = tabular_net(q);
    }
    for (std::size_t s = 0; s < mdp.num_states; ++s)
      for (std::size_t a = 0; a < mdp.num_actions; ++a) CHECK(std::abs(q(s, a) - dp.q(s, a)) < 1e-6);
  }

  TEST_CASE("retrace fixed point and one-step reduction") {
    Rng rng(5);
    RandomMdpOptions o;
    o.states = 5;
    o.actions = 3;
    o.gamma = 0.8;
    o.terminal_states = 1;
    const auto mdp = make_random_mdp(o, rng);
    const auto pi = random_policy(mdp.num_states, mdp.num_actions, rng);
    const auto pi0 = random_policy(mdp.num_mask_values, mdp.num_actions, rng);
    HyperParams hp;
    hp.alpha = 0.25;
    hp.gamma = mdp.gamma;
    const auto dp = regularized_dp_eval(mdp, pi, pi0, hp.alpha, hp.gamma);
    auto nets = tabular_agent(mdp, pi, pi0, CriticKind::ActionValue);
    nets.critic = nets.critic_target = tabular_net(dp.q);
    const std::vector<double> start(mdp.num_states, 1.0);
    const auto windows = enumerate_windows(mdp, pi, 3, start);
    Rng mc(0);
    // the correction terms vanish in expectation over each window's continuations
    Matrix sum(mdp.num_states, mdp.num_actions, 0.0), wt(mdp.num_states, mdp.num_actions, 0.0);
    for (const auto& w : windows) {
      const auto t = retrace_targets(w, nets, hp, mc);
      const std::size_t s = hot(w.steps[0].features), a = w.steps[0].action.index;
      sum(s, a) += w.weight * t.values[0];
      wt(s, a) += w.weight;
    }
    for (std::size_t s = 0; s < mdp.num_states; ++s)
      for (std::size_t a = 0; a < mdp.num_actions; ++a)
        if (!mdp.terminal[s]) CHECK(std::abs(sum(s, a) / wt(s, a) - dp.q(s, a)) < 1e-9);

    // lambda = 0: every target is r + gamma * V-hat(next)
    hp.retrace_lambda = 0.0;
    Matrix q(mdp.num_states, mdp.num_actions);
    for (auto& x : q.data()) x = rng.normal();
    nets.critic = nets.critic_target = tabular_net(q);
    const auto mu = random_policy(mdp.num_states, mdp.num_actions, rng);
    for (const auto& w : enumerate_windows(mdp, mu, 3, start)) {
      const auto t = retrace_targets(w, nets, hp, mc);
      for (std::size_t j = 0; j < w.size(); ++j) {
        const auto& st = w.steps[j];
        double next = 0.0;
        if (j + 1 < w.size()) {
          next = soft_value(nets, hp, w.steps[j + 1].features, w.steps[j + 1].default_features, mc);
        } else if (!st.terminal) {
          next = soft_value(nets, hp, w.bootstrap_features, w.bootstrap_default_features, mc);
        }
        CHECK(t.values[j] == doctest::Approx(st.reward + hp.gamma * next).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("v-trace fixed point and zero discount") {
    Rng rng(6);
    RandomMdpOptions o;
    o.states = 5;
    o.actions = 3;
    o.gamma = 0.8;
    const auto mdp = make_random_mdp(o, rng);
    const auto pi = random_policy(mdp.num_states, mdp.num_actions, rng);
    const auto pi0 = random_policy(mdp.num_mask_values, mdp.num_actions, rng);
    HyperParams hp;
    hp.alpha = 0.25;
    hp.gamma = mdp.gamma;
    hp.algorithm = CriticAlgorithm::VTrace;
    const auto dp = regularized_dp_eval(mdp, pi, pi0, hp.alpha, hp.gamma);
    auto nets = tabular_agent(mdp, pi, pi0, CriticKind::StateValue);
    Matrix v(mdp.num_states, 1);
    for (std::size_t s = 0; s < mdp.num_states; ++s) v(s, 0) = dp.v[s];
    nets.critic = nets.critic_target = tabular_net(v);
    const std::vector<double> start(mdp.num_states, 1.0);
    Rng mc(0);
    std::vector<double> sum(mdp.num_states, 0.0), wt(mdp.num_states, 0.0);
    for (const auto& w : enumerate_windows(mdp, pi, 3, start)) {
      const auto t = vtrace_targets(w, nets, hp, mc);
      const std::size_t s = hot(w.steps[0].features);
      sum[s] += w.weight * t.values[0];
      wt[s] += w.weight;
    }
    for (std::size_t s = 0; s < mdp.num_states; ++s)
      if (!mdp.terminal[s]) CHECK(std::abs(sum[s] / wt[s] - dp.v[s]) < 1e-9);

    hp.gamma = 0.0;
    for (auto& x : v.data()) x = rng.normal();
    nets.critic = nets.critic_target = tabular_net(v);
    const auto mu = random_policy(mdp.num_states, mdp.num_actions, rng);
    for (const auto& w : enumerate_windows(mdp, mu, 2, start)) {
      const auto t = vtrace_targets(w, nets, hp, mc);
      for (std::size_t j = 0; j < w.size(); ++j) {
        const auto& st = w.steps[j];
        const std::size_t s = hot(st.features);
        const double rho = std::min(1.0, pi(s, st.action.index) / mu(s, st.action.index));
        const double kl = kl_per_step(categorical_head(nets.policy, st.features),
                                      categorical_head(nets.default_target, st.default_features));
        CHECK(t.values[j] == doctest::Approx(v(s, 0) + rho * (st.reward - hp.alpha * kl - v(s, 0))).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("off-policy fitting suite") {
    const auto r = run_offpolicy_suite(4, 11);
    CHECK_MESSAGE(r.passed(), r.format());
  }

  TEST_CASE("actor loss special cases") {
    Rng rng(7);
    const auto arch = small_arch();
    auto nets = AgentNets::make(arch, rng);
    HyperParams hp;
    hp.alpha = 0.0;
    hp.variant.kind = RegularizerKind::KlReg;
    // constant Q: the bias-only readout
    for (auto& p : nets.critic_target.params()) p = 0.0;
    const auto& last = nets.critic_target.layout().back();
    for (std::size_t a = 0; a < 4; ++a) nets.critic_target.params()[last.bias_offset + a] = 2.5;
    std::vector<Window> batch{random_window(rng, arch, 3, false), random_window(rng, arch, 2, true)};
    Rng mc(0);
    std::vector<WindowTargets> t;
    for (const auto& w : batch) t.push_back(compute_targets(w, nets, hp, mc));
    const auto g0 = actor_loss(batch, t, nets, hp, 1);
    for (double x : g0.grad) CHECK(std::abs(x) < 1e-14);

    // Q = 0, uniform default: loss is alpha * (ln|A| - H)
    hp.alpha = 0.3;
    zero(nets.critic_target);
    zero(nets.default_target);
    const auto g = actor_loss(batch, t, nets, hp, 1);
    auto expected = [&](const Mlp& policy) {
      double total = 0;
      for (const auto& w : batch) {
        double s = 0;
        for (const auto& st : w.steps) s += hp.alpha * (std::log(4.0) - categorical_entropy(categorical_head(policy, st.features)));
        total += s;
      }
      return total / static_cast<double>(batch.size());
    };
    CHECK(g.loss == doctest::Approx(expected(nets.policy)).epsilon(1e-12));
    const std::vector<double> p(nets.policy.params().begin(), nets.policy.params().end());
    const auto fd = test::numeric_grad(
        [&](const std::vector<double>& x) {
          Mlp m = nets.policy;
          m.set_params(x);
          return expected(m);
        },
        p);
    CHECK(max_relative_error(g.grad, fd) < 1e-6);
  }

  TEST_CASE("critic loss examples") {
    Rng rng(8);
    auto arch = small_arch();
    auto nets = AgentNets::make(arch, rng);
    std::vector<Window> batch{random_window(rng, arch, 3, true)};
    WindowTargets t;
    for (const auto& st : batch[0].steps) t.values.push_back(nets.critic.predict(st.features)[st.action.index]);
    const auto exact = critic_loss(batch, std::span<const WindowTargets>(&t, 1), nets);
    CHECK(exact.loss == doctest::Approx(0.0).scale(1).epsilon(1e-20));
    for (double x : exact.grad) CHECK(x == doctest::Approx(0.0).scale(1));

    zero(nets.critic);
    std::vector<Window> one{random_window(rng, arch, 1, true)};
    WindowTargets t1;
    t1.values = {1.0};
    CHECK(critic_loss(one, std::span<const WindowTargets>(&t1, 1), nets).loss == doctest::Approx(1.0));
  }

  TEST_CASE("default loss vanishes when the default copies the policy") {
    Rng rng(9);
    auto arch = small_arch();
    arch.default_feature_size = arch.feature_size;
    arch.default_hidden = arch.policy_hidden;
    auto nets = AgentNets::make(arch, rng);
    nets.default_policy = nets.policy;
    std::vector<Window> batch{random_window(rng, arch, 3, false)};
    for (auto& st : batch[0].steps) st.default_features = st.features;
    HyperParams hp;
    const auto g = default_policy_loss(batch, nets, hp);
    CHECK(std::abs(g.loss) < 1e-12);
    for (double x : g.grad) CHECK(std::abs(x) < 1e-12);
  }

  TEST_CASE("losses only move their own parameters") {
    Rng rng(10);
    const auto arch = small_arch();
    auto nets = AgentNets::make(arch, rng);
    HyperParams hp;
    hp.alpha = 0.2;
    std::vector<Window> batch{random_window(rng, arch, 3, false)};
    Rng mc(0);
    std::vector<WindowTargets> t{compute_targets(batch[0], nets, hp, mc)};
    const auto actor = actor_loss(batch, t, nets, hp, 1);
    const auto critic = critic_loss(batch, t, nets);
    const auto dflt = default_policy_loss(batch, nets, hp);
    CHECK(actor.grad.size() == nets.policy.param_count());
    CHECK(critic.grad.size() == nets.critic.param_count());
    CHECK(dflt.grad.size() == nets.default_policy.param_count());

    auto perturbed = nets;
    for (auto& p : perturbed.default_policy.params()) p += 0.3;
    for (auto& p : perturbed.critic.params()) p -= 0.2;
    CHECK(actor_loss(batch, t, perturbed, hp, 1).grad == actor.grad);
    auto pol = nets;
    for (auto& p : pol.policy.params()) p += 0.3;
    for (auto& p : pol.default_policy.params()) p += 0.1;
    CHECK(critic_loss(batch, t, pol).grad == critic.grad);
    auto crit = nets;
    for (auto& p : crit.critic.params()) p += 0.3;
    for (auto& p : crit.critic_target.params()) p += 0.3;
    CHECK(default_policy_loss(batch, crit, hp).grad == dflt.grad);
  }

  TEST_CASE("gradient suite over every variant") {
    const auto r = run_gradcheck_suite(100, 5);
    CHECK_MESSAGE(r.passed(), r.format());
  }

  TEST_CASE("entropy regularization equals kl to a uniform default") {
    Rng rng(11);
    const auto arch = small_arch(5);
    auto nets = AgentNets::make(arch, rng);
    zero(nets.default_policy);
    zero(nets.default_target);
    std::vector<Window> batch{random_window(rng, arch, 4, false), random_window(rng, arch, 3, true)};
    HyperParams kl;
    kl.alpha = 0.37;
    kl.variant.kind = RegularizerKind::KlReg;
    HyperParams ent = kl;
    ent.variant.kind = RegularizerKind::EntropyReg;
    Rng mc(0);
    std::vector<WindowTargets> tk, te;
    for (const auto& w : batch) {
      tk.push_back(compute_targets(w, nets, kl, mc));
      te.push_back(compute_targets(w, nets, ent, mc));
    }
    const auto a = actor_loss(batch, tk, nets, kl, 1);
    const auto b = actor_loss(batch, te, nets, ent, 1);
    REQUIRE(a.per_step.size() == b.per_step.size());
    for (std::size_t i = 0; i < a.per_step.size(); ++i)
      CHECK(std::abs((a.per_step[i] - b.per_step[i]) - kl.alpha * std::log(5.0)) < 1e-12);
    CHECK(test::max_abs_diff(a.grad, b.grad) < 1e-10);
  }

  TEST_CASE("single state distillation matches the action marginal") {
    NetArchitecture a;
    a.feature_size = 3;
    a.default_feature_size = 0;
    a.action_space = {ActionKind::Discrete, 3};
    a.policy_hidden = {4};
    a.critic_hidden = {4};
    Rng rng(12);
    auto nets = AgentNets::make(a, rng);
    const std::vector<double> x{1.0, -0.5, 0.25};
    Window w;
    TrajectoryStep st;
    st.features = x;
    st.action = Action::discrete(0);
    st.terminal = true;
    w.steps.push_back(st);
    std::vector<Window> batch{w};
    HyperParams hp;
    OptimizerConfig oc;
    oc.learning_rate = 0.05;
    Optimizer opt(oc, nets.default_policy.param_count());
    for (int i = 0; i < 3000; ++i) opt.step(nets.default_policy.params(), default_policy_loss(batch, nets, hp).grad);
    const auto pi = categorical_head(nets.policy, x);
    const auto pi0 = categorical_head(nets.default_policy, {});
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(pi.prob(k) - pi0.prob(k)) < 1e-6);
  }

  TEST_CASE("reversed kl distillation seeks a mode") {
    // Two equally visited states sharing one mask value.
    const Categorical p1 = Categorical::from_logits(std::vector<double>{std::log(0.9), std::log(0.1)});
    const Categorical p2 = Categorical::from_logits(std::vector<double>{std::log(0.2), std::log(0.8)});
    auto fit = [&](RegularizerKind kind) {
      std::vector<double> logits{0.0, 0.0};
      OptimizerConfig oc;
      oc.learning_rate = 0.02;
      Optimizer opt(oc, 2);
      for (int i = 0; i < 5000; ++i) {
        const auto q = Categorical::from_logits(logits);
        const auto a = distill_term(kind, p1, q), b = distill_term(kind, p2, q);
        const std::vector<double> g{0.5 * (a.d_default[0] + b.d_default[0]), 0.5 * (a.d_default[1] + b.d_default[1])};
        opt.step(logits, g);
      }
      return Categorical::from_logits(logits).prob(0);
    };
    // exact optimization by a fine scan over q = (x, 1 - x)
    auto scan = [&](bool reversed) {
      double best = 0, best_val = INFINITY;
      for (int i = 1; i < 1000000; ++i) {
        const double x = i / 1e6;
        const auto q = Categorical::from_logits(std::vector<double>{std::log(x), std::log(1 - x)});
        const double v = reversed ? categorical_kl(q, p1) + categorical_kl(q, p2) : categorical_kl(p1, q) + categorical_kl(p2, q);
        if (v < best_val) {
          best_val = v;
          best = x;
        }
      }
      return best;
    };
    const double forward = fit(RegularizerKind::KlReg);
    const double reversed = fit(RegularizerKind::ReversedKlReg);
    CHECK(forward == doctest::Approx(0.55).epsilon(1e-4));
    CHECK(std::abs(forward - scan(false)) < 1e-5);
    CHECK(std::abs(reversed - scan(true)) < 1e-5);
    CHECK(std::abs(reversed - forward) > 0.02);
  }

  TEST_CASE("target synchronisation periods") {
    Rng rng(13);
    auto nets = AgentNets::make(small_arch(), rng);
    const auto snapshot = nets;
    for (auto& p : nets.policy.params()) p += 1.0;
    for (auto& p : nets.critic.params()) p += 1.0;
    for (auto& p : nets.default_policy.params()) p += 1.0;
    HyperParams hp;
    hp.target_period_agent = 100;
    hp.target_period_default = 50;
    sync_targets(nets, 50, hp);
    CHECK(std::equal(nets.policy_target.params().begin(), nets.policy_target.params().end(),
                     snapshot.policy_target.params().begin()));
    CHECK(std::equal(nets.default_target.params().begin(), nets.default_target.params().end(),
                     nets.default_policy.params().begin()));
    sync_targets(nets, 100, hp);
    CHECK(std::equal(nets.policy_target.params().begin(), nets.policy_target.params().end(), nets.policy.params().begin()));
    CHECK(std::equal(nets.critic_target.params().begin(), nets.critic_target.params().end(), nets.critic.params().begin()));

    auto frozen = snapshot;
    for (auto& p : frozen.default_policy.params()) p += 1.0;
    sync_targets(frozen, 100, hp, true);
    CHECK(std::equal(frozen.default_target.params().begin(), frozen.default_target.params().end(),
                     snapshot.default_target.params().begin()));
  }

  TEST_CASE("kl to the old policy is zero right after a refresh") {
    Rng rng(14);
    auto arch = small_arch();
    arch.default_feature_size = arch.feature_size;
    arch.default_hidden = arch.policy_hidden;
    auto nets = AgentNets::make(arch, rng);
    HyperParams hp;
    hp.variant.kind = RegularizerKind::KlToOldPolicy;
    hp.variant.old_policy_period = 10;
    for (auto& p : nets.policy.params()) p += 0.5;
    sync_targets(nets, 10, hp);
    std::vector<Window> batch{random_window(rng, arch, 3, false)};
    for (auto& st : batch[0].steps) st.default_features = st.features;
    CHECK(batch_statistics(batch, nets, hp).mean_kl == doctest::Approx(0.0).scale(1).epsilon(1e-14));
  }

  TEST_CASE("learner updates are deterministic and finite") {
    Rng rng(15);
    const auto arch = small_arch();
    const auto nets = AgentNets::make(arch, rng);
    std::vector<Window> batch;
    for (int i = 0; i < 4; ++i) batch.push_back(random_window(rng, arch, 3, i % 2 == 0));
    HyperParams hp;
    hp.target_period_agent = 2;
    Learner a(nets, hp, 3), b(nets, hp, 3);
    for (int i = 0; i < 5; ++i) {
      const auto sa = a.update(batch), sb = b.update(batch);
      CHECK(sa.loss_pi == sb.loss_pi);
      CHECK(std::isfinite(sa.loss_q));
    }
    CHECK(a.step() == 5);
    CHECK(std::equal(a.nets().policy.params().begin(), a.nets().policy.params().end(), b.nets().policy.params().begin()));

    Learner frozen(nets, hp, 3, true);
    frozen.update(batch);
    CHECK(std::equal(frozen.nets().default_policy.params().begin(), frozen.nets().default_policy.params().end(),
                     nets.default_policy.params().begin()));

    HyperParams vt = hp;
    vt.algorithm = CriticAlgorithm::VTrace;
    CHECK_THROWS_AS(Learner(nets, vt, 1), ConfigError);
  }

  TEST_CASE("hyperparameter validation and names") {
    HyperParams hp;
    hp.validate();
    hp.alpha = -1;
    CHECK_THROWS_AS(hp.validate(), ConfigError);
    hp = HyperParams{};
    hp.unroll = 0;
    CHECK_THROWS_AS(hp.validate(), ConfigError);
    for (auto k : kAllRegularizers) CHECK(parse_regularizer(to_string(k)) == k);
    CHECK_THROWS_AS(parse_regularizer("kl"), ConfigError);
    CHECK(default_source(RegularizerKind::EntropyBonus) == DefaultSource::None);
    CHECK(default_source(RegularizerKind::KlToOldPolicy) == DefaultSource::OldPolicy);
    CHECK(regularizes_reward(RegularizerKind::KlReg));
    CHECK_FALSE(regularizes_reward(RegularizerKind::KlBonus));
  }
}
