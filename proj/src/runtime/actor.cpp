#include "infoasym/runtime/actor.hpp"

#include "infoasym/algorithms/agent_nets.hpp"
#include "infoasym/errors.hpp"

namespace infoasym {

Actor::Actor(std::size_t id, std::unique_ptr<Environment> env, FeatureMap features, std::size_t unroll,
             SquashSpec squash, Rng rng)
    : id_(id),
      env_(std::move(env)),
      map_(std::move(features)),
      history_(map_.spec),
      unroll_(unroll),
      squash_(squash),
      rng_(rng) {
  if (unroll_ == 0) throw InvalidInput("unroll length must be positive");
}

void Actor::begin_episode() {
  history_.reset();
  features_ = history_.push(env_->reset(rng_));
  pending_.clear();
  current_ = EpisodeRecord{id_, episodes_++, 0.0, 0, false, 0};
  in_episode_ = true;
}

void Actor::flush(ReplayBuffer& replay, bool episode_over, bool terminal) {
  if (pending_.empty()) return;
  Window w;
  w.steps = std::move(pending_);
  pending_.clear();
  if (!(episode_over && terminal)) {
    w.bootstrap_features = features_;
    w.bootstrap_default_features = default_features(features_, map_.mask);
  }
  replay.push(std::move(w));
}

std::vector<EpisodeRecord> Actor::run(const ParamSnapshot& snapshot, std::size_t n_steps, ReplayBuffer& replay) {
  std::vector<EpisodeRecord> finished;
  const auto space = env_->action_space();
  for (std::size_t i = 0; i < n_steps; ++i) {
    if (!in_episode_) begin_episode();
    TrajectoryStep step;
    step.features = features_;
    step.default_features = default_features(features_, map_.mask);
    const auto sampled = sample_action(snapshot.policy, space, features_, squash_, rng_);
    step.action = sampled.action;
    step.behavior_log_prob = sampled.log_prob;
    const auto res = env_->step(step.action);
    ++env_steps_;
    step.reward = res.reward;
    step.terminal = res.terminal;
    step.truncated = res.truncated && !res.terminal;
    step.on_target = res.on_target;
    current_.episode_return += res.reward;
    ++current_.length;
    if (res.on_target) ++current_.on_target_steps;
    features_ = history_.push(res.observation);
    pending_.push_back(std::move(step));
    const bool over = res.done();
    if (over || pending_.size() == unroll_) flush(replay, over, res.terminal);
    if (over) {
      current_.terminal = res.terminal;
      finished.push_back(current_);
      in_episode_ = false;
    }
  }
  return finished;
}

EpisodeRecord rollout_episode(Environment& env, const FeatureMap& map, const Mlp& policy, SquashSpec squash, Rng& rng,
                              std::vector<TrajectoryStep>* trajectory) {
  HistoryEncoder history(map.spec);
  auto features = history.push(env.reset(rng));
  const auto space = env.action_space();
  EpisodeRecord rec;
  for (std::size_t t = 0;; ++t) {
    if (t > env.time_limit() + 1) throw ContractViolation("environment ignored its time limit");
    const auto sampled = sample_action(policy, space, features, squash, rng);
    const auto res = env.step(sampled.action);
    rec.episode_return += res.reward;
    ++rec.length;
    if (res.on_target) ++rec.on_target_steps;
    if (trajectory != nullptr) {
      TrajectoryStep s;
      s.features = features;
      s.default_features = default_features(features, map.mask);
      s.action = sampled.action;
      s.reward = res.reward;
      s.behavior_log_prob = sampled.log_prob;
      s.terminal = res.terminal;
      s.truncated = res.truncated && !res.terminal;
      s.on_target = res.on_target;
      trajectory->push_back(std::move(s));
    }
    features = history.push(res.observation);
    if (res.done()) {
      rec.terminal = res.terminal;
      return rec;
    }
  }
}

}  // namespace infoasym
