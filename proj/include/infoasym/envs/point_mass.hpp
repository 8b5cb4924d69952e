#pragma once

#include <array>
#include <vector>

#include "infoasym/envs/env.hpp"
#include "infoasym/envs/grid_nav.hpp"

namespace infoasym {

struct PointMassConfig {
  std::size_t num_targets = 3;
  RewardMode reward_mode = RewardMode::Sparse;
  double target_radius = 0.15;
  double target_reward = 60.0;
  std::size_t episode_length = 200;
  double damping = 0.9;
  double force_gain = 0.02;
};

/// 2-D point mass in the box [-1, 1]^2 driven by a force in [-1, 1]^2 (actions are
/// clipped). Velocity is zeroed on the wall it hits. Feature groups: proprio
/// (position, velocity), targets (K positions), task_id (commanded target one-hot).
class PointMass : public Environment {
 public:
  struct State {
    std::array<double, 2> position{};
    std::array<double, 2> velocity{};
    std::vector<std::array<double, 2>> targets;
    std::size_t task = 0;
    std::size_t steps = 0;
    bool done = false;
  };

  explicit PointMass(PointMassConfig config);

  const PointMassConfig& config() const noexcept { return config_; }

  State initial_state(Rng& rng) const;
  StepResult transition(State& state, std::span<const double> force) const;
  std::vector<double> observe(const State& state) const;

  std::string name() const override { return "point_mass"; }
  const ObservationSpec& observation_spec() const override { return spec_; }
  ActionSpace action_space() const override { return {ActionKind::Continuous, 2}; }
  std::size_t time_limit() const override { return config_.episode_length; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(const Action& action) override;
  bool done() const override { return state_.done; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<PointMass>(*this); }

  const State& state() const noexcept { return state_; }

 private:
  PointMassConfig config_;
  ObservationSpec spec_;
  State state_;
};

}  // namespace infoasym
