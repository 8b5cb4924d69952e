#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "infoasym/envs/env.hpp"

namespace infoasym {

enum class RewardMode { Sparse, Dense };
enum class GridVariant { TerminateOnGoal, MovingTarget };

struct GridNavConfig {
  std::size_t size = 8;
  std::size_t num_targets = 1;
  RewardMode reward_mode = RewardMode::Sparse;
  GridVariant variant = GridVariant::TerminateOnGoal;
  double target_reward = 60.0;
  /// Per-step reward while on the target in the moving-target variant.
  double moving_reward = 1.0;
  std::size_t consecutive_steps = 10;
  std::size_t episode_length = 100;
  /// Body complexity: moves succeed only when the action's gait key matches the
  /// body's current phase. 1 gives a plain four-direction walker.
  std::size_t gait_phases = 1;
  /// When set, the targets sit at the same cells in every episode (drawn once
  /// from target_seed) and only the agent start and the commanded task vary.
  bool fixed_targets = false;
  std::uint64_t target_seed = 11;
  bool include_last_action = false;
};

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Multi-target navigation on a walled grid.
///
/// Actions are (direction, gait key) pairs laid out as dir * gait_phases + key for
/// dir in {north, south, east, west}, followed by one "stay" action. Feature groups:
/// proprio (normalized position, plus gait phase one-hot when gait_phases > 1),
/// targets (normalized positions of all K targets), task_id (one-hot commanded
/// target) and optionally last_action.
class GridNav : public Environment {
 public:
  struct State {
    Cell agent;
    std::size_t phase = 0;
    std::vector<Cell> targets;
    std::size_t task = 0;
    std::size_t on_target_count = 0;
    std::size_t steps = 0;
    bool done = false;
    std::optional<std::size_t> last_action;
    Rng rng;  // stream for within-episode randomness (target respawns)
  };

  explicit GridNav(GridNavConfig config);

  const GridNavConfig& config() const noexcept { return config_; }
  std::size_t num_actions() const noexcept { return 4 * config_.gait_phases + 1; }
  std::size_t stay_action() const noexcept { return 4 * config_.gait_phases; }
  /// Target cells shared by every episode; empty unless fixed_targets is set.
  const std::vector<Cell>& fixed_targets() const noexcept { return fixed_targets_; }

  State initial_state(Rng& rng) const;
  /// Advances `state` in place; deterministic given the state (including its rng stream).
  StepResult transition(State& state, std::size_t action) const;
  std::vector<double> observe(const State& state) const;

  /// Position after attempting a move; walls leave it unchanged.
  Cell moved(Cell from, std::size_t direction) const noexcept;
  double dense_reward(Cell agent, Cell target) const noexcept;

  std::string name() const override { return "grid_nav"; }
  const ObservationSpec& observation_spec() const override { return spec_; }
  ActionSpace action_space() const override { return {ActionKind::Discrete, num_actions()}; }
  std::size_t time_limit() const override { return config_.episode_length; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(const Action& action) override;
  bool done() const override { return state_.done; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<GridNav>(*this); }

  const State& state() const noexcept { return state_; }
  void set_state(State s) { state_ = std::move(s); }

 private:
  GridNavConfig config_;
  std::vector<Cell> fixed_targets_;
  ObservationSpec spec_;
  State state_;
};

inline constexpr std::array<Cell, 4> kGridDirections{Cell{0, 1}, Cell{0, -1}, Cell{1, 0}, Cell{-1, 0}};

}  // namespace infoasym
