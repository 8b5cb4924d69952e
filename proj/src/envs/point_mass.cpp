#include "infoasym/envs/point_mass.hpp"

#include <algorithm>
#include <cmath>

#include "infoasym/errors.hpp"

namespace infoasym {

PointMass::PointMass(PointMassConfig config)
    : config_(config),
      spec_({{"proprio", 4}, {"targets", 2 * config.num_targets}, {"task_id", config.num_targets}}, 1) {
  if (config_.num_targets < 1) throw ConfigError("need at least one target", "environment.point_mass.targets");
  if (!(config_.target_radius > 0.0)) throw ConfigError("target radius must be positive", "environment.point_mass.target_radius");
}

PointMass::State PointMass::initial_state(Rng& rng) const {
  State s;
  for (auto& p : s.position) p = rng.uniform(-0.8, 0.8);
  // Targets keep clear of the start and of each other by at least two radii.
  const double clearance = 2.0 * config_.target_radius;
  while (s.targets.size() < config_.num_targets) {
    std::array<double, 2> t{rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
    auto far = [&](const std::array<double, 2>& o) { return std::hypot(t[0] - o[0], t[1] - o[1]) > clearance; };
    if (!far(s.position)) continue;
    if (!std::all_of(s.targets.begin(), s.targets.end(), far)) continue;
    s.targets.push_back(t);
  }
  s.task = static_cast<std::size_t>(rng.below(config_.num_targets));
  return s;
}

StepResult PointMass::transition(State& s, std::span<const double> force) const {
  if (s.done) throw ContractViolation("step called on a finished episode");
  if (force.size() != 2) throw InvalidInput("point mass expects a 2-D force");
  for (std::size_t i = 0; i < 2; ++i) {
    if (!std::isfinite(force[i])) throw InvalidInput("point mass force must be finite");
    const double f = std::clamp(force[i], -1.0, 1.0);
    s.velocity[i] = config_.damping * s.velocity[i] + config_.force_gain * f;
    s.position[i] += s.velocity[i];
    if (s.position[i] > 1.0 || s.position[i] < -1.0) {
      s.position[i] = std::clamp(s.position[i], -1.0, 1.0);
      s.velocity[i] = 0.0;
    }
  }
  ++s.steps;
  StepResult r;
  const auto& t = s.targets[s.task];
  const double d2 = std::pow(s.position[0] - t[0], 2) + std::pow(s.position[1] - t[1], 2);
  r.on_target = d2 <= config_.target_radius * config_.target_radius;
  if (config_.reward_mode == RewardMode::Dense) {
    r.reward = std::exp(-d2);
  } else if (r.on_target) {
    r.reward = config_.target_reward;
    r.terminal = true;
  }
  r.truncated = !r.terminal && s.steps >= config_.episode_length;
  s.done = r.done();
  r.observation = observe(s);
  return r;
}

std::vector<double> PointMass::observe(const State& s) const {
  std::vector<double> f{s.position[0], s.position[1], s.velocity[0] / (config_.force_gain / (1.0 - config_.damping)),
                        s.velocity[1] / (config_.force_gain / (1.0 - config_.damping))};
  for (const auto& t : s.targets) {
    f.push_back(t[0]);
    f.push_back(t[1]);
  }
  for (std::size_t k = 0; k < config_.num_targets; ++k) f.push_back(k == s.task ? 1.0 : 0.0);
  return f;
}

std::vector<double> PointMass::reset(Rng& rng) {
  state_ = initial_state(rng);
  return observe(state_);
}

StepResult PointMass::step(const Action& action) { return transition(state_, action.value); }

}  // namespace infoasym
