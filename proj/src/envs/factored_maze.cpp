#include "infoasym/envs/factored_maze.hpp"

#include <algorithm>

#include "infoasym/errors.hpp"

namespace infoasym {

namespace {

constexpr std::array<Cell, 4> kHeadings{Cell{0, 1}, Cell{1, 0}, Cell{0, -1}, Cell{-1, 0}};

}  // namespace

FactoredMaze::FactoredMaze(FactoredActionConfig config) : config_(std::move(config)) {
  if (config_.axes.empty()) throw ConfigError("factored action space needs at least one axis", "environment.factored_maze.axes");
  for (std::size_t i = 0; i < config_.axes.size(); ++i) {
    const auto& axis = config_.axes[i];
    if (axis.count < 1) throw ConfigError("axis '" + axis.name + "' has no values", "environment.factored_maze.axes");
    num_actions_ *= axis.count;
    if (axis.name == "move") move_axis_ = i;
    if (axis.name == "turn") turn_axis_ = i;
  }
  if (num_actions_ < 2) throw ConfigError("factored action space needs at least two composites");
  if (config_.lattice < 1) throw ConfigError("lattice must be at least 1", "environment.factored_maze.lattice");

  // Carve a perfect maze over the room lattice, then knock out extra walls.
  side_ = 2 * config_.lattice + 1;
  walls_.assign(side_ * side_, true);
  auto at = [&](int x, int y) { return static_cast<std::size_t>(y) * side_ + static_cast<std::size_t>(x); };
  Rng rng(config_.layout_seed);
  const int n = static_cast<int>(config_.lattice);
  std::vector<bool> visited(config_.lattice * config_.lattice, false);
  std::vector<std::pair<int, int>> stack{{0, 0}};
  visited[0] = true;
  walls_[at(1, 1)] = false;
  while (!stack.empty()) {
    auto [rx, ry] = stack.back();
    std::vector<std::pair<int, int>> options;
    for (const auto& d : kHeadings) {
      const int nx = rx + d.x;
      const int ny = ry + d.y;
      if (nx < 0 || ny < 0 || nx >= n || ny >= n) continue;
      if (!visited[static_cast<std::size_t>(ny * n + nx)]) options.emplace_back(nx, ny);
    }
    if (options.empty()) {
      stack.pop_back();
      continue;
    }
    auto [nx, ny] = options[static_cast<std::size_t>(rng.below(options.size()))];
    visited[static_cast<std::size_t>(ny * n + nx)] = true;
    walls_[at(2 * nx + 1, 2 * ny + 1)] = false;
    walls_[at(rx + nx + 1, ry + ny + 1)] = false;
    stack.emplace_back(nx, ny);
  }
  std::vector<Cell> closed;
  for (int y = 1; y + 1 < static_cast<int>(side_); ++y)
    for (int x = 1; x + 1 < static_cast<int>(side_); ++x) {
      const bool between_rooms = (x % 2 == 1) != (y % 2 == 1);
      if (between_rooms && walls_[at(x, y)]) closed.push_back({x, y});
    }
  for (std::size_t k = 0; k < config_.extra_openings && !closed.empty(); ++k) {
    const auto j = static_cast<std::size_t>(rng.below(closed.size()));
    walls_[at(closed[j].x, closed[j].y)] = false;
    closed.erase(closed.begin() + static_cast<std::ptrdiff_t>(j));
  }
  for (int y = 0; y < static_cast<int>(side_); ++y)
    for (int x = 0; x < static_cast<int>(side_); ++x)
      if (!walls_[at(x, y)]) free_.push_back({x, y});

  std::vector<FeatureGroup> groups{{"proprio", 7}};
  if (config_.include_position) groups.push_back({"position", 2});
  groups.push_back({"goal", config_.goal_in_view_only ? 3u : 2u});
  if (config_.include_last_action) groups.push_back({"last_action", num_actions_});
  spec_ = ObservationSpec(std::move(groups), 1);
}

bool FactoredMaze::is_wall(Cell c) const noexcept {
  if (c.x < 0 || c.y < 0 || c.x >= static_cast<int>(side_) || c.y >= static_cast<int>(side_)) return true;
  return walls_[static_cast<std::size_t>(c.y) * side_ + static_cast<std::size_t>(c.x)];
}

std::vector<std::size_t> FactoredMaze::decompose(std::size_t action) const {
  if (action >= num_actions_) throw InvalidInput("composite action index out of range");
  std::vector<std::size_t> values(config_.axes.size());
  for (std::size_t i = config_.axes.size(); i-- > 0;) {
    values[i] = action % config_.axes[i].count;
    action /= config_.axes[i].count;
  }
  return values;
}

std::size_t FactoredMaze::compose(std::span<const std::size_t> values) const {
  if (values.size() != config_.axes.size()) throw InvalidInput("wrong number of axis values");
  std::size_t action = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] >= config_.axes[i].count) throw InvalidInput("axis value out of range");
    action = action * config_.axes[i].count + values[i];
  }
  return action;
}

FactoredMaze::Effect FactoredMaze::effect(std::size_t action) const {
  const auto v = decompose(action);
  Effect e;
  if (move_axis_) e.move = v[*move_axis_] == 0 ? 1 : v[*move_axis_] == 1 ? -1 : 0;
  if (turn_axis_) e.turn = v[*turn_axis_] == 0 ? -1 : v[*turn_axis_] == 1 ? 1 : 0;
  return e;
}

std::vector<std::vector<std::size_t>> FactoredMaze::alias_classes() const {
  std::vector<std::vector<std::size_t>> classes(9);
  for (std::size_t a = 0; a < num_actions_; ++a) {
    const auto e = effect(a);
    classes[static_cast<std::size_t>((e.move + 1) * 3 + (e.turn + 1))].push_back(a);
  }
  std::erase_if(classes, [](const auto& c) { return c.empty(); });
  return classes;
}

std::optional<std::size_t> FactoredMaze::axis_index(std::string_view name) const {
  for (std::size_t i = 0; i < config_.axes.size(); ++i)
    if (config_.axes[i].name == name) return i;
  return std::nullopt;
}

FactoredMaze::State FactoredMaze::initial_state(Rng& rng) const {
  State s;
  s.agent = free_[static_cast<std::size_t>(rng.below(free_.size()))];
  s.heading = static_cast<std::size_t>(rng.below(4));
  do {
    s.goal = free_[static_cast<std::size_t>(rng.below(free_.size()))];
  } while (s.goal == s.agent);
  return s;
}

StepResult FactoredMaze::transition(State& s, std::size_t action) const {
  if (s.done) throw ContractViolation("step called on a finished episode");
  const Effect e = effect(action);
  if (e.move != 0) {
    const Cell d = kHeadings[s.heading];
    const Cell to{s.agent.x + e.move * d.x, s.agent.y + e.move * d.y};
    if (!is_wall(to)) s.agent = to;
  }
  if (e.turn != 0) s.heading = (s.heading + (e.turn > 0 ? 1 : 3)) % 4;
  ++s.steps;
  s.last_action = action;

  StepResult r;
  r.on_target = s.agent == s.goal;
  if (r.on_target) {
    r.reward = config_.goal_reward;
    r.terminal = true;
  }
  r.truncated = !r.terminal && s.steps >= config_.episode_length;
  s.done = r.done();
  r.observation = observe(s);
  return r;
}

std::vector<double> FactoredMaze::observe(const State& s) const {
  std::vector<double> f;
  f.reserve(spec_.step_size());
  for (std::size_t h = 0; h < 4; ++h) f.push_back(h == s.heading ? 1.0 : 0.0);
  const Cell ahead = kHeadings[s.heading];
  const Cell left = kHeadings[(s.heading + 3) % 4];
  const Cell right = kHeadings[(s.heading + 1) % 4];
  for (const Cell d : {ahead, left, right}) f.push_back(is_wall({s.agent.x + d.x, s.agent.y + d.y}) ? 1.0 : 0.0);
  if (config_.include_position) {
    f.push_back(normalize_coordinate(s.agent.x, side_));
    f.push_back(normalize_coordinate(s.agent.y, side_));
  }
  const double dx = s.goal.x - s.agent.x;
  const double dy = s.goal.y - s.agent.y;
  const double scale = static_cast<double>(side_ - 1);
  const double fwd = (dx * ahead.x + dy * ahead.y) / scale;
  const double side = (dx * right.x + dy * right.y) / scale;
  if (!config_.goal_in_view_only) {
    f.push_back(fwd);
    f.push_back(side);
  } else {
    const bool seen = fwd > 0.0;
    f.push_back(seen ? fwd : 0.0);
    f.push_back(seen ? side : 0.0);
    f.push_back(seen ? 1.0 : 0.0);
  }
  if (config_.include_last_action)
    for (std::size_t a = 0; a < num_actions_; ++a) f.push_back(s.last_action && *s.last_action == a ? 1.0 : 0.0);
  return f;
}

std::vector<double> FactoredMaze::reset(Rng& rng) {
  state_ = initial_state(rng);
  return observe(state_);
}

StepResult FactoredMaze::step(const Action& action) { return transition(state_, action.index); }

}  // namespace infoasym
