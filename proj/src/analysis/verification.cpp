#include "infoasym/analysis/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "infoasym/algorithms/losses.hpp"
#include "infoasym/algorithms/targets.hpp"
#include "infoasym/analysis/oracles.hpp"
#include "infoasym/errors.hpp"
#include "infoasym/numerics/gradcheck.hpp"
#include "infoasym/numerics/optimizer.hpp"
#include "infoasym/observation.hpp"

namespace infoasym {

Mlp tabular_net(const Matrix& table) {
  Mlp net({table.rows(), table.cols()}, {});
  auto p = net.params();
  for (std::size_t r = 0; r < table.rows(); ++r)
    for (std::size_t c = 0; c < table.cols(); ++c) p[c * table.rows() + r] = table(r, c);
  return net;
}

Mlp tabular_policy_net(const PolicyTable& table) {
  Matrix logits(table.rows(), table.cols());
  for (std::size_t r = 0; r < table.rows(); ++r)
    for (std::size_t c = 0; c < table.cols(); ++c)
      logits(r, c) = table(r, c) > 0.0 ? std::log(table(r, c)) : -1e300;
  return tabular_net(logits);
}

Matrix read_tabular(const Mlp& net) {
  const std::size_t rows = net.input_size(), cols = net.output_size();
  Matrix t(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto out = net.predict(one_hot(r, rows));
    for (std::size_t c = 0; c < cols; ++c) t(r, c) = out[c];
  }
  return t;
}

AgentNets tabular_agent(const TabularMdp& mdp, const PolicyTable& pi, const PolicyTable& pi0, CriticKind critic) {
  AgentNets n;
  n.arch.feature_size = mdp.num_states;
  n.arch.default_feature_size = mdp.num_mask_values;
  n.arch.action_space = {ActionKind::Discrete, mdp.num_actions};
  n.arch.policy_hidden = n.arch.critic_hidden = n.arch.default_hidden = {};
  n.arch.critic = critic;
  n.arch.has_default = true;
  n.policy = n.policy_target = tabular_policy_net(pi);
  n.default_policy = n.default_target = tabular_policy_net(pi0);
  n.critic = n.critic_target =
      tabular_net(Matrix(mdp.num_states, critic == CriticKind::ActionValue ? mdp.num_actions : 1, 0.0));
  return n;
}

std::vector<Window> enumerate_windows(const TabularMdp& mdp, const PolicyTable& behavior, std::size_t length,
                                      std::span<const double> start_weight) {
  if (length == 0) throw InvalidInput("window length must be positive");
  const std::size_t S = mdp.num_states, G = mdp.num_mask_values;
  std::vector<Window> out;
  struct Partial {
    Window w;
    std::size_t state;
  };
  std::vector<Partial> stack;
  for (std::size_t s = 0; s < S; ++s) {
    if (mdp.terminal[s] || start_weight[s] <= 0.0) continue;
    Partial p;
    p.w.weight = start_weight[s];
    p.state = s;
    stack.push_back(std::move(p));
  }
  while (!stack.empty()) {
    Partial p = std::move(stack.back());
    stack.pop_back();
    for (std::size_t a = 0; a < mdp.num_actions; ++a) {
      const double mu = behavior(p.state, a);
      if (mu <= 0.0) continue;
      for (const auto& o : mdp.outcomes(p.state, a)) {
        if (o.prob <= 0.0) continue;
        Partial q = p;
        TrajectoryStep st;
        st.features = one_hot(p.state, S);
        st.default_features = one_hot(mdp.mask_value[p.state], G);
        st.action = Action::discrete(a);
        st.reward = mdp.reward(p.state, a);
        st.behavior_log_prob = std::log(mu);
        st.terminal = mdp.terminal[o.next];
        q.w.steps.push_back(std::move(st));
        q.w.weight *= mu * o.prob;
        q.state = o.next;
        if (mdp.terminal[o.next] || q.w.steps.size() == length) {
          if (!mdp.terminal[o.next]) {
            q.w.bootstrap_features = one_hot(o.next, S);
            q.w.bootstrap_default_features = one_hot(mdp.mask_value[o.next], G);
          }
          out.push_back(std::move(q.w));
        } else {
          stack.push_back(std::move(q));
        }
      }
    }
  }
  return out;
}

bool SuiteReport::passed() const noexcept {
  return std::all_of(lines.begin(), lines.end(), [](const SuiteLine& l) { return l.passed; });
}

std::string SuiteReport::format() const {
  std::string s;
  for (const auto& l : lines) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-4s %-48s %.3e (tolerance %.1e)\n", l.passed ? "ok" : "FAIL", l.name.c_str(),
                  l.value, l.tolerance);
    s += buf;
  }
  return s;
}

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

double loss_with(const std::function<double()>& f, std::span<double> params, std::span<const double> p) {
  std::copy(p.begin(), p.end(), params.begin());
  return f();
}

// Max relative FD error of `grad` for the loss `f` over `params` (restored afterwards).
double fd_error(std::span<double> params, std::span<const double> grad, const std::function<double()>& f) {
  const std::vector<double> saved(params.begin(), params.end());
  const auto fd = finite_diff_grad([&](std::span<const double> p) { return loss_with(f, params, p); }, saved);
  std::copy(saved.begin(), saved.end(), params.begin());
  return max_relative_error(grad, fd);
}

}  // namespace

SuiteReport run_gradcheck_suite(std::size_t instances, std::uint64_t seed, double tolerance) {
  const Rng root(seed);
  double worst_actor_d = 0.0, worst_actor_c = 0.0, worst_critic = 0.0, worst_default = 0.0;
  std::vector<double> worst_variant(std::size(kAllRegularizers), 0.0);
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng = root.split(i);
    const bool discrete = i % 2 == 0;
    const auto kind = kAllRegularizers[(i / 2) % std::size(kAllRegularizers)];
    const auto algo = static_cast<CriticAlgorithm>((i / 14) % 3);
    HyperParams hp;
    hp.alpha = 0.05 + 0.5 * rng.uniform();
    hp.entropy_bonus = 0.01 + 0.1 * rng.uniform();
    hp.gamma = 0.5 + 0.49 * rng.uniform();
    hp.variant.kind = kind;
    hp.algorithm = algo;
    hp.mc_samples = 3;
    hp.retrace_lambda = 0.5 + 0.5 * rng.uniform();

    NetArchitecture arch;
    arch.feature_size = 2 + rng.below(3);
    arch.default_feature_size = rng.below(3);
    arch.action_space = discrete ? ActionSpace{ActionKind::Discrete, 2 + rng.below(3)}
                                 : ActionSpace{ActionKind::Continuous, 1 + rng.below(2)};
    arch.policy_hidden = {3 + rng.below(3)};
    arch.critic_hidden = {3 + rng.below(3)};
    arch.default_hidden = {3};
    arch.activation = rng.below(2) ? Activation::Elu : Activation::Tanh;
    arch.critic = algo == CriticAlgorithm::VTrace ? CriticKind::StateValue : CriticKind::ActionValue;
    arch.has_default = default_source(kind) != DefaultSource::None;
    if (default_source(kind) == DefaultSource::OldPolicy) {
      arch.default_feature_size = arch.feature_size;
      arch.default_hidden = arch.policy_hidden;
    }
    Rng init = rng.split(1);
    AgentNets nets = AgentNets::make(arch, init);
    // Distinct target nets so online/target separation is exercised.
    Rng init2 = rng.split(2);
    const AgentNets other = AgentNets::make(arch, init2);
    nets.policy_target = other.policy;
    nets.critic_target = other.critic;
    nets.default_target = other.default_policy;

    std::vector<Window> batch(2);
    for (auto& w : batch) {
      const std::size_t n = 1 + rng.below(3);
      for (std::size_t j = 0; j < n; ++j) {
        TrajectoryStep s;
        s.features = random_vec(rng, arch.feature_size);
        s.default_features = random_vec(rng, arch.default_feature_size);
        if (discrete) {
          s.action = Action::discrete(rng.below(arch.action_space.size));
          s.behavior_log_prob = std::log(0.2 + 0.6 * rng.uniform());
        } else {
          s.action = Action::continuous(random_vec(rng, arch.action_space.size, 0.5));
          s.behavior_log_prob = -0.5 - rng.uniform();
        }
        s.reward = rng.normal();
        w.steps.push_back(std::move(s));
      }
      w.steps.back().terminal = rng.below(3) == 0;
      if (!w.ends_terminal()) {
        w.bootstrap_features = random_vec(rng, arch.feature_size);
        w.bootstrap_default_features = random_vec(rng, arch.default_feature_size);
      }
      w.weight = 0.5 + rng.uniform();
    }
    std::vector<WindowTargets> targets;
    Rng mc = rng.split(3);
    for (const auto& w : batch) targets.push_back(compute_targets(w, nets, hp, mc));
    const std::uint64_t noise_seed = rng.next_u64();

    const auto a = actor_loss(batch, targets, nets, hp, noise_seed);
    const double ea =
        fd_error(nets.policy.params(), a.grad, [&] { return actor_loss(batch, targets, nets, hp, noise_seed).loss; });
    (discrete ? worst_actor_d : worst_actor_c) = std::max(discrete ? worst_actor_d : worst_actor_c, ea);
    auto& wv = worst_variant[(i / 2) % std::size(kAllRegularizers)];
    wv = std::max(wv, ea);

    const auto q = critic_loss(batch, targets, nets);
    worst_critic =
        std::max(worst_critic, fd_error(nets.critic.params(), q.grad, [&] { return critic_loss(batch, targets, nets).loss; }));

    if (default_source(kind) == DefaultSource::Learned) {
      const auto d = default_policy_loss(batch, nets, hp);
      const double ed = fd_error(nets.default_policy.params(), d.grad,
                                 [&] { return default_policy_loss(batch, nets, hp).loss; });
      worst_default = std::max(worst_default, ed);
      wv = std::max(wv, ed);
    }
  }
  SuiteReport r;
  auto line = [&](std::string name, double v) { r.lines.push_back({std::move(name), v, tolerance, v <= tolerance}); };
  line("actor loss, categorical heads", worst_actor_d);
  line("actor loss, gaussian heads", worst_actor_c);
  line("critic loss (Q and V)", worst_critic);
  line("default-policy loss", worst_default);
  for (std::size_t k = 0; k < std::size(kAllRegularizers); ++k)
    line("variant " + std::string(to_string(kAllRegularizers[k])), worst_variant[k]);
  r.lines.push_back({"instances checked", static_cast<double>(instances), 100.0, instances >= 100});
  return r;
}

SuiteReport run_distillation_suite(std::size_t instances, std::uint64_t seed, double tolerance) {
  const Rng root(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng = root.split(i);
    RandomMdpOptions opt;
    opt.states = 4 + rng.below(7);
    opt.actions = 2 + rng.below(3);
    opt.terminal_states = rng.below(2);
    opt.mask_values = 2 + rng.below(std::min<std::size_t>(3, opt.states - opt.terminal_states - 1));
    opt.gamma = 0.9;
    const auto mdp = make_random_mdp(opt, rng);
    const auto pi = random_policy(mdp.num_states, mdp.num_actions, rng);
    const auto d = discounted_visitation(mdp, pi, mdp.gamma);
    const auto oracle = optimal_default_policy(mdp, pi, d);

    AgentNets nets = tabular_agent(mdp, pi, uniform_policy(mdp.num_mask_values, mdp.num_actions),
                                   CriticKind::ActionValue);
    std::vector<Window> batch;
    for (std::size_t s = 0; s < mdp.num_states; ++s) {
      if (mdp.terminal[s] || d.weight[s] <= 0.0) continue;
      Window w;
      TrajectoryStep st;
      st.features = one_hot(s, mdp.num_states);
      st.default_features = one_hot(mdp.mask_value[s], mdp.num_mask_values);
      st.terminal = true;
      w.steps.push_back(std::move(st));
      w.weight = d.weight[s];
      batch.push_back(std::move(w));
    }
    HyperParams hp;
    OptimizerConfig oc;
    oc.learning_rate = 0.05;
    Optimizer opt_d(oc, nets.default_policy.param_count());
    for (std::size_t it = 0; it < 4000; ++it) {
      const auto l = default_policy_loss(batch, nets, hp);
      double gn = 0.0;
      for (double g : l.grad) gn = std::max(gn, std::abs(g));
      if (gn < 1e-10) break;
      opt_d.step(nets.default_policy.params(), l.grad);
    }
    for (std::size_t m = 0; m < mdp.num_mask_values; ++m) {
      if (oracle.unvisited[m]) continue;
      const auto q = Categorical::from_logits(nets.default_policy.predict(one_hot(m, mdp.num_mask_values)));
      double l1 = 0.0;
      for (std::size_t a = 0; a < mdp.num_actions; ++a) l1 += std::abs(q.probs()[a] - oracle.pi0(m, a));
      worst = std::max(worst, l1);
    }
  }
  SuiteReport r;
  r.lines.push_back({"distilled default vs visitation-weighted oracle (L1)", worst, tolerance, worst <= tolerance});
  r.lines.push_back({"random MDPs", static_cast<double>(instances), 20.0, instances >= 20});
  return r;
}

namespace {

// Weighted least-squares fit of a tabular critic to per-step targets (exact minimizer of critic_loss).
void fit_tabular_critic(AgentNets& nets, const std::vector<Window>& windows, const std::vector<WindowTargets>& targets,
                        std::size_t states, std::size_t cols) {
  Matrix sum(states, cols, 0.0), weight(states, cols, 0.0);
  for (std::size_t b = 0; b < windows.size(); ++b) {
    for (std::size_t j = 0; j < windows[b].size(); ++j) {
      const auto& st = windows[b].steps[j];
      const auto s = static_cast<std::size_t>(std::find(st.features.begin(), st.features.end(), 1.0) - st.features.begin());
      const std::size_t c = cols == 1 ? 0 : st.action.index;
      sum(s, c) += windows[b].weight * targets[b].values[j];
      weight(s, c) += windows[b].weight;
    }
  }
  Matrix table = read_tabular(nets.critic);
  for (std::size_t s = 0; s < states; ++s)
    for (std::size_t c = 0; c < cols; ++c)
      if (weight(s, c) > 0.0) table(s, c) = sum(s, c) / weight(s, c);
  nets.critic = tabular_net(table);
  nets.critic_target = nets.critic;
}

}  // namespace

SuiteReport run_offpolicy_suite(std::size_t instances, std::uint64_t seed, double tolerance) {
  const Rng root(seed);
  double worst_retrace = 0.0, worst_vtrace = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng = root.split(i);
    RandomMdpOptions opt;
    opt.states = 4 + rng.below(3);
    opt.actions = 2 + rng.below(2);
    opt.mask_values = 2;
    opt.gamma = 0.8;
    opt.terminal_states = rng.below(2);
    const auto mdp = make_random_mdp(opt, rng);
    const auto pi = random_policy(mdp.num_states, mdp.num_actions, rng);
    const auto mu = random_policy(mdp.num_states, mdp.num_actions, rng);
    const auto pi0 = random_policy(mdp.num_mask_values, mdp.num_actions, rng);
    HyperParams hp;
    hp.alpha = 0.2;
    hp.gamma = mdp.gamma;
    hp.retrace_lambda = 1.0;
    const auto dp = regularized_dp_eval(mdp, pi, pi0, hp.alpha, hp.gamma);
    const std::vector<double> start(mdp.num_states, 1.0);
    const auto windows = enumerate_windows(mdp, mu, 3, start);

    // Retrace with the action-value critic.
    {
      AgentNets nets = tabular_agent(mdp, pi, pi0, CriticKind::ActionValue);
      Rng mc(1);
      for (std::size_t it = 0; it < 400; ++it) {
        const auto before = read_tabular(nets.critic);
        std::vector<WindowTargets> t;
        for (const auto& w : windows) t.push_back(retrace_targets(w, nets, hp, mc));
        fit_tabular_critic(nets, windows, t, mdp.num_states, mdp.num_actions);
        const auto after = read_tabular(nets.critic);
        double change = 0.0;
        for (std::size_t k = 0; k < after.data().size(); ++k) change = std::max(change, std::abs(after.data()[k] - before.data()[k]));
        if (change < 1e-12) break;
      }
      const auto q = read_tabular(nets.critic);
      for (std::size_t s = 0; s < mdp.num_states; ++s)
        if (!mdp.terminal[s])
          for (std::size_t a = 0; a < mdp.num_actions; ++a)
            worst_retrace = std::max(worst_retrace, std::abs(q(s, a) - dp.q(s, a)));
    }
    // V-trace with the state-value critic; truncation levels above every ratio.
    {
      AgentNets nets = tabular_agent(mdp, pi, pi0, CriticKind::StateValue);
      HyperParams hv = hp;
      hv.algorithm = CriticAlgorithm::VTrace;
      double max_ratio = 1.0;
      for (std::size_t s = 0; s < mdp.num_states; ++s)
        for (std::size_t a = 0; a < mdp.num_actions; ++a) max_ratio = std::max(max_ratio, pi(s, a) / mu(s, a));
      hv.vtrace_rho_bar = hv.vtrace_c_bar = max_ratio;
      Rng mc(1);
      for (std::size_t it = 0; it < 400; ++it) {
        const auto before = read_tabular(nets.critic);
        std::vector<WindowTargets> t;
        for (const auto& w : windows) t.push_back(vtrace_targets(w, nets, hv, mc));
        fit_tabular_critic(nets, windows, t, mdp.num_states, 1);
        const auto after = read_tabular(nets.critic);
        double change = 0.0;
        for (std::size_t k = 0; k < after.data().size(); ++k) change = std::max(change, std::abs(after.data()[k] - before.data()[k]));
        if (change < 1e-12) break;
      }
      const auto v = read_tabular(nets.critic);
      for (std::size_t s = 0; s < mdp.num_states; ++s)
        if (!mdp.terminal[s]) worst_vtrace = std::max(worst_vtrace, std::abs(v(s, 0) - dp.v[s]));
    }
  }
  SuiteReport r;
  r.lines.push_back({"retrace fixed point vs regularized DP Q", worst_retrace, tolerance, worst_retrace <= tolerance});
  r.lines.push_back({"v-trace fixed point vs regularized DP V", worst_vtrace, tolerance, worst_vtrace <= tolerance});
  return r;
}

}  // namespace infoasym
