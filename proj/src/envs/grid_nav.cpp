#include "infoasym/envs/grid_nav.hpp"

#include <algorithm>
#include <cmath>

#include "infoasym/errors.hpp"

namespace infoasym {

namespace {

ObservationSpec make_spec(const GridNavConfig& c) {
  std::vector<FeatureGroup> groups{
      {"proprio", 2 + (c.gait_phases > 1 ? c.gait_phases : 0)},
      {"targets", 2 * c.num_targets},
      {"task_id", c.num_targets},
  };
  if (c.include_last_action) groups.push_back({"last_action", 4 * c.gait_phases + 1});
  return ObservationSpec(std::move(groups), 1);
}

}  // namespace

GridNav::GridNav(GridNavConfig config) : config_(config), spec_(make_spec(config)) {
  if (config_.size < 2) throw ConfigError("grid size must be at least 2", "environment.grid_nav.size");
  if (config_.num_targets < 1) throw ConfigError("need at least one target", "environment.grid_nav.targets");
  if (config_.num_targets + 1 > config_.size * config_.size)
    throw ConfigError("too many targets for the grid", "environment.grid_nav.targets");
  if (config_.gait_phases < 1) throw ConfigError("gait_phases must be at least 1", "environment.grid_nav.gait_phases");
  if (config_.episode_length < 1) throw ConfigError("episode length must be positive", "environment.grid_nav.episode_length");
  if (config_.variant == GridVariant::MovingTarget && config_.consecutive_steps < 1)
    throw ConfigError("consecutive_steps must be positive", "environment.grid_nav.consecutive_steps");
  if (config_.fixed_targets) {
    Rng rng(config_.target_seed);
    while (fixed_targets_.size() < config_.num_targets) {
      const auto c = static_cast<std::size_t>(rng.below(config_.size * config_.size));
      const Cell cell{static_cast<int>(c % config_.size), static_cast<int>(c / config_.size)};
      if (std::find(fixed_targets_.begin(), fixed_targets_.end(), cell) == fixed_targets_.end()) fixed_targets_.push_back(cell);
    }
  }
}

Cell GridNav::moved(Cell from, std::size_t direction) const noexcept {
  const Cell d = kGridDirections[direction];
  const Cell to{from.x + d.x, from.y + d.y};
  const int n = static_cast<int>(config_.size);
  if (to.x < 0 || to.y < 0 || to.x >= n || to.y >= n) return from;
  return to;
}

double GridNav::dense_reward(Cell agent, Cell target) const noexcept {
  const double dx = normalize_coordinate(agent.x, config_.size) - normalize_coordinate(target.x, config_.size);
  const double dy = normalize_coordinate(agent.y, config_.size) - normalize_coordinate(target.y, config_.size);
  return std::exp(-(dx * dx + dy * dy));
}

GridNav::State GridNav::initial_state(Rng& rng) const {
  const std::size_t cells = config_.size * config_.size;
  // Partial Fisher-Yates draws the agent and the targets without collision.
  std::vector<std::size_t> pool(cells);
  for (std::size_t i = 0; i < cells; ++i) pool[i] = i;
  auto draw = [&](std::size_t k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.below(cells - k));
    std::swap(pool[k], pool[j]);
    const std::size_t c = pool[k];
    return Cell{static_cast<int>(c % config_.size), static_cast<int>(c / config_.size)};
  };
  State s;
  if (config_.fixed_targets) {
    s.targets = fixed_targets_;
    do {
      s.agent = draw(0);
    } while (std::find(s.targets.begin(), s.targets.end(), s.agent) != s.targets.end());
  } else {
    s.agent = draw(0);
    for (std::size_t k = 0; k < config_.num_targets; ++k) s.targets.push_back(draw(k + 1));
  }
  s.task = static_cast<std::size_t>(rng.below(config_.num_targets));
  s.rng = Rng(rng.next_u64());
  return s;
}

StepResult GridNav::transition(State& s, std::size_t action) const {
  if (s.done) throw ContractViolation("step called on a finished episode");
  if (action >= num_actions()) throw InvalidInput("grid action index out of range");
  const std::size_t g = config_.gait_phases;
  if (action != stay_action()) {
    const std::size_t direction = action / g;
    const std::size_t key = action % g;
    if (key == s.phase) {
      s.agent = moved(s.agent, direction);
      s.phase = (s.phase + 1) % g;
    }
  }
  ++s.steps;
  s.last_action = action;

  StepResult r;
  r.on_target = s.agent == s.targets[s.task];
  if (config_.reward_mode == RewardMode::Dense) r.reward = dense_reward(s.agent, s.targets[s.task]);

  if (config_.variant == GridVariant::TerminateOnGoal) {
    if (r.on_target && config_.reward_mode == RewardMode::Sparse) {
      r.reward = config_.target_reward;
      r.terminal = true;
    }
  } else {
    if (r.on_target) {
      if (config_.reward_mode == RewardMode::Sparse) r.reward = config_.moving_reward;
      if (++s.on_target_count >= config_.consecutive_steps) {
        std::vector<Cell> free;
        for (int y = 0; y < static_cast<int>(config_.size); ++y)
          for (int x = 0; x < static_cast<int>(config_.size); ++x) {
            const Cell c{x, y};
            if (c == s.agent) continue;
            if (std::find(s.targets.begin(), s.targets.end(), c) != s.targets.end()) continue;
            free.push_back(c);
          }
        s.targets[s.task] = free[static_cast<std::size_t>(s.rng.below(free.size()))];
        s.on_target_count = 0;
      }
    } else {
      s.on_target_count = 0;
    }
  }
  r.truncated = !r.terminal && s.steps >= config_.episode_length;
  s.done = r.done();
  r.observation = observe(s);
  return r;
}

std::vector<double> GridNav::observe(const State& s) const {
  std::vector<double> f;
  f.reserve(spec_.step_size());
  f.push_back(normalize_coordinate(s.agent.x, config_.size));
  f.push_back(normalize_coordinate(s.agent.y, config_.size));
  if (config_.gait_phases > 1)
    for (std::size_t p = 0; p < config_.gait_phases; ++p) f.push_back(p == s.phase ? 1.0 : 0.0);
  for (const auto& t : s.targets) {
    f.push_back(normalize_coordinate(t.x, config_.size));
    f.push_back(normalize_coordinate(t.y, config_.size));
  }
  for (std::size_t k = 0; k < config_.num_targets; ++k) f.push_back(k == s.task ? 1.0 : 0.0);
  if (config_.include_last_action)
    for (std::size_t a = 0; a < num_actions(); ++a) f.push_back(s.last_action && *s.last_action == a ? 1.0 : 0.0);
  return f;
}

std::vector<double> GridNav::reset(Rng& rng) {
  state_ = initial_state(rng);
  return observe(state_);
}

StepResult GridNav::step(const Action& action) { return transition(state_, action.index); }

}  // namespace infoasym
