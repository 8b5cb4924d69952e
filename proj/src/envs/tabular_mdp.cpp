#include "infoasym/envs/tabular_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <string>

#include "infoasym/errors.hpp"

namespace infoasym {

void TabularMdp::validate(double tol) const {
  if (transitions.size() != num_states * num_actions) throw InvalidInput("transition table has the wrong size");
  if (reward.rows() != num_states || reward.cols() != num_actions) throw InvalidInput("reward table has the wrong shape");
  if (initial.size() != num_states || terminal.size() != num_states) throw InvalidInput("state vectors have the wrong size");
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    double sum = 0.0;
    for (const auto& o : transitions[i]) {
      if (o.next >= num_states || o.prob < 0.0) throw InvalidInput("transition outcome out of range");
      sum += o.prob;
    }
    if (std::abs(sum - 1.0) > tol)
      throw InvalidInput("transition row " + std::to_string(i) + " sums to " + std::to_string(sum));
  }
  double init = 0.0;
  for (double p : initial) init += p;
  if (std::abs(init - 1.0) > 1e-9) throw InvalidInput("initial distribution does not sum to one");
}

void TabularMdp::assign_mask_values(const MaskIndex& mask) {
  if (features.size() != num_states) throw InvalidInput("mask assignment needs per-state features");
  std::map<std::vector<double>, std::size_t> ids;
  mask_value.assign(num_states, 0);
  for (std::size_t s = 0; s < num_states; ++s) {
    auto key = default_features(features[s], mask);
    auto [it, inserted] = ids.try_emplace(std::move(key), ids.size());
    mask_value[s] = it->second;
  }
  num_mask_values = ids.size();
}

std::size_t TabularMdp::sample_next(std::size_t s, std::size_t a, Rng& rng) const {
  const auto& row = outcomes(s, a);
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& o : row) {
    acc += o.prob;
    if (u < acc) return o.next;
  }
  return row.back().next;
}

std::size_t TabularMdp::sample_initial(Rng& rng) const { return rng.categorical(initial); }

PolicyTable uniform_policy(std::size_t rows, std::size_t actions) {
  return PolicyTable(rows, actions, 1.0 / static_cast<double>(actions));
}

PolicyTable random_policy(std::size_t rows, std::size_t actions, Rng& rng, double concentration) {
  PolicyTable p(rows, actions);
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t a = 0; a < actions; ++a) {
      // Gamma(1)-style weights raised to 1/concentration give Dirichlet-like rows.
      const double w = std::pow(-std::log(1.0 - rng.uniform()), 1.0 / concentration) + 1e-3;
      p(r, a) = w;
      sum += w;
    }
    for (std::size_t a = 0; a < actions; ++a) p(r, a) /= sum;
  }
  return p;
}

TabularMdp make_random_mdp(const RandomMdpOptions& o, Rng& rng) {
  if (o.states < 1 || o.actions < 2 || o.terminal_states >= o.states || o.mask_values < 1 ||
      o.mask_values > o.states - o.terminal_states)
    throw InvalidInput("random mdp options are inconsistent");
  TabularMdp m;
  m.num_states = o.states;
  m.num_actions = o.actions;
  m.gamma = o.gamma;
  m.reward = Matrix(o.states, o.actions);
  m.terminal.assign(o.states, false);
  m.transitions.resize(o.states * o.actions);
  const std::size_t first_terminal = o.states - o.terminal_states;
  for (std::size_t s = first_terminal; s < o.states; ++s) m.terminal[s] = true;
  for (std::size_t s = 0; s < o.states; ++s) {
    for (std::size_t a = 0; a < o.actions; ++a) {
      auto& row = m.transitions[s * o.actions + a];
      if (m.terminal[s]) {
        row.push_back({s, 1.0});
        continue;
      }
      m.reward(s, a) = rng.uniform(-1.0, 1.0);
      const std::size_t branches = std::min(o.branching, o.states);
      std::vector<double> w;
      for (std::size_t b = 0; b < branches; ++b) {
        std::size_t next = static_cast<std::size_t>(rng.below(o.states));
        bool dup = false;
        for (auto& existing : row)
          if (existing.next == next) dup = true;
        if (dup) continue;
        row.push_back({next, 0.0});
        w.push_back(rng.uniform() + 0.05);
      }
      double sum = 0.0;
      for (double x : w) sum += x;
      for (std::size_t i = 0; i < row.size(); ++i) row[i].prob = w[i] / sum;
    }
  }
  m.initial.assign(o.states, 0.0);
  double sum = 0.0;
  for (std::size_t s = 0; s < first_terminal; ++s) sum += (m.initial[s] = rng.uniform() + 0.1);
  for (std::size_t s = 0; s < first_terminal; ++s) m.initial[s] /= sum;
  m.num_mask_values = o.mask_values;
  m.mask_value.assign(o.states, 0);
  for (std::size_t s = 0; s < first_terminal; ++s)
    m.mask_value[s] = s < o.mask_values ? s : static_cast<std::size_t>(rng.below(o.mask_values));
  // Shuffle so mask groups are not aligned with low state indices.
  for (std::size_t s = first_terminal; s-- > 1;) {
    const auto j = static_cast<std::size_t>(rng.below(s + 1));
    std::swap(m.mask_value[s], m.mask_value[j]);
  }
  m.features.resize(o.states);
  for (std::size_t s = 0; s < o.states; ++s) m.features[s] = one_hot(s, o.states);
  return m;
}

namespace {

std::vector<int> grid_key(const GridNav::State& s) {
  std::vector<int> k{s.agent.x, s.agent.y, static_cast<int>(s.phase)};
  for (const auto& t : s.targets) {
    k.push_back(t.x);
    k.push_back(t.y);
  }
  k.push_back(static_cast<int>(s.task));
  k.push_back(static_cast<int>(s.on_target_count));
  return k;
}

struct RawOutcome {
  GridNav::State next;
  bool terminal = false;
  double prob = 1.0;
};

}  // namespace

std::size_t GridNavEnumeration::index_of(const GridNav::State& s) const {
  if (s.done) return terminal_index;
  auto it = index.find(grid_key(s));
  if (it == index.end()) throw InvalidInput("state not present in the enumeration");
  return it->second;
}

GridNavEnumeration enumerate(const GridNav& env, double gamma, std::size_t max_states) {
  const auto& c = env.config();
  const std::size_t cells = c.size * c.size;
  double bound = static_cast<double>(cells * c.gait_phases * c.num_targets);
  for (std::size_t k = 0; k < c.num_targets; ++k) bound *= static_cast<double>(cells - 1 - k);
  if (c.variant == GridVariant::MovingTarget) bound *= static_cast<double>(c.consecutive_steps);
  else if (c.fixed_targets) bound = static_cast<double>(cells * c.gait_phases * c.num_targets);
  bound += 1.0;
  if (bound > static_cast<double>(max_states))
    throw InvalidInput("state space too large to enumerate: " + std::to_string(static_cast<long long>(bound)) +
                       " states (limit " + std::to_string(max_states) + ")");

  GridNavEnumeration e;
  auto cell_of = [&](std::size_t i) { return Cell{static_cast<int>(i % c.size), static_cast<int>(i / c.size)}; };

  // Initial distribution: agent uniform, targets an ordered draw without
  // replacement from the remaining cells, task uniform, gait phase 0.
  std::vector<std::pair<GridNav::State, double>> starts;
  std::function<void(GridNav::State&, double, std::vector<bool>&)> place = [&](GridNav::State& s, double p,
                                                                                 std::vector<bool>& used) {
    if (s.targets.size() == c.num_targets) {
      for (std::size_t k = 0; k < c.num_targets; ++k) {
        GridNav::State t = s;
        t.task = k;
        starts.emplace_back(t, p / static_cast<double>(c.num_targets));
      }
      return;
    }
    const double remaining = static_cast<double>(cells - 1 - s.targets.size());
    for (std::size_t i = 0; i < cells; ++i) {
      if (used[i]) continue;
      used[i] = true;
      s.targets.push_back(cell_of(i));
      place(s, p / remaining, used);
      s.targets.pop_back();
      used[i] = false;
    }
  };
  if (c.fixed_targets) {
    const auto& fixed = env.fixed_targets();
    const double free = static_cast<double>(cells - fixed.size());
    for (std::size_t a = 0; a < cells; ++a) {
      GridNav::State s;
      s.agent = cell_of(a);
      if (std::find(fixed.begin(), fixed.end(), s.agent) != fixed.end()) continue;
      s.targets = fixed;
      for (std::size_t k = 0; k < c.num_targets; ++k) {
        s.task = k;
        starts.emplace_back(s, 1.0 / (free * static_cast<double>(c.num_targets)));
      }
    }
  } else {
    for (std::size_t a = 0; a < cells; ++a) {
      GridNav::State s;
      s.agent = cell_of(a);
      std::vector<bool> used(cells, false);
      used[a] = true;
      place(s, 1.0 / static_cast<double>(cells), used);
    }
  }

  const std::size_t n_actions = env.num_actions();
  auto successors = [&](const GridNav::State& s, std::size_t action, double& reward) {
    GridNav::State n = s;
    n.steps = 0;
    n.last_action.reset();
    if (action != env.stay_action()) {
      const std::size_t dir = action / c.gait_phases;
      const std::size_t key = action % c.gait_phases;
      if (key == n.phase) {
        n.agent = env.moved(n.agent, dir);
        n.phase = (n.phase + 1) % c.gait_phases;
      }
    }
    const bool on = n.agent == n.targets[n.task];
    reward = c.reward_mode == RewardMode::Dense ? env.dense_reward(n.agent, n.targets[n.task]) : 0.0;
    std::vector<RawOutcome> out;
    if (c.variant == GridVariant::TerminateOnGoal) {
      if (on && c.reward_mode == RewardMode::Sparse) {
        reward = c.target_reward;
        out.push_back({n, true, 1.0});
      } else {
        out.push_back({n, false, 1.0});
      }
      return out;
    }
    if (!on) {
      n.on_target_count = 0;
      out.push_back({n, false, 1.0});
      return out;
    }
    if (c.reward_mode == RewardMode::Sparse) reward = c.moving_reward;
    if (n.on_target_count + 1 < c.consecutive_steps) {
      ++n.on_target_count;
      out.push_back({n, false, 1.0});
      return out;
    }
    std::vector<Cell> free;
    for (std::size_t i = 0; i < cells; ++i) {
      const Cell cell = cell_of(i);
      if (cell == n.agent) continue;
      bool taken = false;
      for (const auto& t : n.targets)
        if (t == cell) taken = true;
      if (!taken) free.push_back(cell);
    }
    for (const auto& cell : free) {
      GridNav::State m = n;
      m.targets[m.task] = cell;
      m.on_target_count = 0;
      out.push_back({m, false, 1.0 / static_cast<double>(free.size())});
    }
    return out;
  };

  std::deque<std::size_t> frontier;
  auto intern = [&](const GridNav::State& s) {
    auto [it, inserted] = e.index.try_emplace(grid_key(s), e.states.size());
    if (inserted) {
      e.states.push_back(s);
      frontier.push_back(it->second);
    }
    return it->second;
  };
  std::vector<std::pair<std::size_t, double>> initial;
  for (const auto& [s, p] : starts) initial.emplace_back(intern(s), p);

  struct Row {
    std::vector<std::pair<std::size_t, double>> next;  // SIZE_MAX = terminal
    double reward = 0.0;
  };
  std::vector<std::vector<Row>> rows;
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop_front();
    if (rows.size() <= i) rows.resize(i + 1);
    rows[i].resize(n_actions);
    for (std::size_t a = 0; a < n_actions; ++a) {
      double reward = 0.0;
      const GridNav::State src = e.states[i];
      for (auto& o : successors(src, a, reward)) {
        const std::size_t j = o.terminal ? SIZE_MAX : intern(o.next);
        rows[i][a].next.emplace_back(j, o.prob);
      }
      rows[i][a].reward = reward;
    }
    if (e.states.size() + 1 > max_states)
      throw InvalidInput("state space too large to enumerate: more than " + std::to_string(max_states) + " states");
  }

  e.terminal_index = e.states.size();
  GridNav::State done_state;
  done_state.done = true;
  e.states.push_back(done_state);

  auto& m = e.mdp;
  m.num_states = e.states.size();
  m.num_actions = n_actions;
  m.gamma = gamma;
  m.reward = Matrix(m.num_states, n_actions);
  m.transitions.resize(m.num_states * n_actions);
  m.terminal.assign(m.num_states, false);
  m.terminal[e.terminal_index] = true;
  m.initial.assign(m.num_states, 0.0);
  for (auto [i, p] : initial) m.initial[i] += p;
  for (std::size_t i = 0; i < e.terminal_index; ++i)
    for (std::size_t a = 0; a < n_actions; ++a) {
      m.reward(i, a) = rows[i][a].reward;
      for (auto [j, p] : rows[i][a].next)
        m.transitions[i * n_actions + a].push_back({j == SIZE_MAX ? e.terminal_index : j, p});
    }
  for (std::size_t a = 0; a < n_actions; ++a) m.transitions[e.terminal_index * n_actions + a].push_back({e.terminal_index, 1.0});
  m.features.resize(m.num_states);
  for (std::size_t i = 0; i < e.terminal_index; ++i) m.features[i] = env.observe(e.states[i]);
  m.features[e.terminal_index].assign(env.observation_spec().step_size(), 0.0);
  m.num_mask_values = 1;
  m.mask_value.assign(m.num_states, 0);
  return e;
}

std::size_t FactoredMazeEnumeration::index_of(const FactoredMaze::State& s) const {
  if (s.done) return terminal_index;
  auto it = index.find({s.agent.x, s.agent.y, static_cast<int>(s.heading), s.goal.x, s.goal.y});
  if (it == index.end()) throw InvalidInput("state not present in the enumeration");
  return it->second;
}

FactoredMazeEnumeration enumerate(const FactoredMaze& env, double gamma, std::size_t max_states) {
  const auto& free = env.free_cells();
  const std::size_t count = free.size() * 4 * (free.size() - 1) + 1;
  if (count > max_states)
    throw InvalidInput("state space too large to enumerate: " + std::to_string(count) + " states (limit " +
                       std::to_string(max_states) + ")");
  FactoredMazeEnumeration e;
  for (const auto& a : free)
    for (std::size_t h = 0; h < 4; ++h)
      for (const auto& g : free) {
        if (a == g) continue;
        FactoredMaze::State s;
        s.agent = a;
        s.heading = h;
        s.goal = g;
        e.index.emplace(std::vector<int>{a.x, a.y, static_cast<int>(h), g.x, g.y}, e.states.size());
        e.states.push_back(s);
      }
  e.terminal_index = e.states.size();
  FactoredMaze::State done_state;
  done_state.done = true;
  e.states.push_back(done_state);

  auto& m = e.mdp;
  const std::size_t n_actions = env.num_actions();
  m.num_states = e.states.size();
  m.num_actions = n_actions;
  m.gamma = gamma;
  m.reward = Matrix(m.num_states, n_actions);
  m.transitions.resize(m.num_states * n_actions);
  m.terminal.assign(m.num_states, false);
  m.terminal[e.terminal_index] = true;
  m.initial.assign(m.num_states, 0.0);
  const double p0 = 1.0 / static_cast<double>(free.size() * 4 * (free.size() - 1));
  static constexpr std::array<Cell, 4> headings{Cell{0, 1}, Cell{1, 0}, Cell{0, -1}, Cell{-1, 0}};
  for (std::size_t i = 0; i < e.terminal_index; ++i) {
    m.initial[i] = p0;
    const auto& s = e.states[i];
    for (std::size_t a = 0; a < n_actions; ++a) {
      const auto eff = env.effect(a);
      Cell pos = s.agent;
      if (eff.move != 0) {
        const Cell to{pos.x + eff.move * headings[s.heading].x, pos.y + eff.move * headings[s.heading].y};
        if (!env.is_wall(to)) pos = to;
      }
      const std::size_t heading = eff.turn == 0 ? s.heading : (s.heading + (eff.turn > 0 ? 1 : 3)) % 4;
      std::size_t next;
      if (pos == s.goal) {
        m.reward(i, a) = env.config().goal_reward;
        next = e.terminal_index;
      } else {
        next = e.index.at({pos.x, pos.y, static_cast<int>(heading), s.goal.x, s.goal.y});
      }
      m.transitions[i * n_actions + a].push_back({next, 1.0});
    }
  }
  for (std::size_t a = 0; a < n_actions; ++a) m.transitions[e.terminal_index * n_actions + a].push_back({e.terminal_index, 1.0});
  m.features.resize(m.num_states);
  for (std::size_t i = 0; i < e.terminal_index; ++i) m.features[i] = env.observe(e.states[i]);
  m.features[e.terminal_index].assign(env.observation_spec().step_size(), 0.0);
  m.num_mask_values = 1;
  m.mask_value.assign(m.num_states, 0);
  return e;
}

}  // namespace infoasym
