#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "infoasym/envs/env.hpp"
#include "infoasym/envs/grid_nav.hpp"

namespace infoasym {

struct ActionAxis {
  std::string name;
  std::size_t count = 3;
};

/// Composite action space over named axes. Axis semantics: "move" values
/// {forward, back, none...}, "turn" values {left, right, none...}; every other
/// axis (strafe, look, ...) has no effect on the agent, so composites that only
/// differ there alias each other.
struct FactoredActionConfig {
  std::vector<ActionAxis> axes{{"move", 3}, {"turn", 3}, {"strafe", 3}, {"look", 3}};
  std::uint64_t layout_seed = 7;
  /// Rooms per maze side; the grid side is 2 * lattice + 1.
  std::size_t lattice = 3;
  /// Walls knocked out after carving, creating loops.
  std::size_t extra_openings = 2;
  std::size_t episode_length = 500;
  double goal_reward = 10.0;
  bool include_position = true;
  /// The goal is seen only when it lies strictly ahead; the goal group then
  /// carries a third "visible" feature and zeros otherwise.
  bool goal_in_view_only = false;
  bool include_last_action = false;
};

/// Heading-based maze walker with a flat factored action space.
/// Feature groups: proprio (heading one-hot, wall sensors ahead/left/right),
/// position (normalized cell, unless include_position is off), goal (egocentric
/// forward/right offset to the goal, see goal_in_view_only),
/// optionally last_action.
class FactoredMaze : public Environment {
 public:
  struct State {
    Cell agent;
    std::size_t heading = 0;  // 0 north, 1 east, 2 south, 3 west
    Cell goal;
    std::size_t steps = 0;
    bool done = false;
    std::optional<std::size_t> last_action;
  };

  struct Effect {
    int move = 0;  // +1 forward, -1 back, 0 none
    int turn = 0;  // -1 left, +1 right, 0 none
  };

  explicit FactoredMaze(FactoredActionConfig config);

  const FactoredActionConfig& config() const noexcept { return config_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  std::size_t side() const noexcept { return side_; }
  bool is_wall(Cell c) const noexcept;
  const std::vector<Cell>& free_cells() const noexcept { return free_; }

  /// Per-axis value indices of a composite action (first axis most significant).
  std::vector<std::size_t> decompose(std::size_t action) const;
  std::size_t compose(std::span<const std::size_t> values) const;
  Effect effect(std::size_t action) const;
  /// Groups of composite actions with identical effect.
  std::vector<std::vector<std::size_t>> alias_classes() const;
  std::optional<std::size_t> axis_index(std::string_view name) const;

  State initial_state(Rng& rng) const;
  StepResult transition(State& state, std::size_t action) const;
  std::vector<double> observe(const State& state) const;

  std::string name() const override { return "factored_maze"; }
  const ObservationSpec& observation_spec() const override { return spec_; }
  ActionSpace action_space() const override { return {ActionKind::Discrete, num_actions_}; }
  std::size_t time_limit() const override { return config_.episode_length; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(const Action& action) override;
  bool done() const override { return state_.done; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<FactoredMaze>(*this); }

  const State& state() const noexcept { return state_; }
  void set_state(State s) { state_ = std::move(s); }

 private:
  FactoredActionConfig config_;
  std::size_t num_actions_ = 1;
  std::size_t side_ = 0;
  std::vector<bool> walls_;
  std::vector<Cell> free_;
  std::optional<std::size_t> move_axis_;
  std::optional<std::size_t> turn_axis_;
  ObservationSpec spec_;
  State state_;
};

}  // namespace infoasym
