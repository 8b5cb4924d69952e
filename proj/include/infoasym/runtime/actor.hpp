#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "infoasym/algorithms/trajectory.hpp"
#include "infoasym/distributions.hpp"
#include "infoasym/envs/env.hpp"
#include "infoasym/observation.hpp"
#include "infoasym/runtime/replay.hpp"

namespace infoasym {

struct EpisodeRecord {
  std::size_t actor = 0;
  std::uint64_t episode = 0;
  double episode_return = 0.0;
  std::size_t length = 0;
  bool terminal = false;
  std::size_t on_target_steps = 0;
};

/// Turns environment observations into (x_t, x^D_t) pairs.
struct FeatureMap {
  ObservationSpec spec;  // with the history window
  MaskIndex mask;
};

/// One acting loop: samples from the snapshot policy, records behavior
/// log-probabilities and cuts episodes into windows of at most `unroll` steps.
class Actor {
 public:
  Actor(std::size_t id, std::unique_ptr<Environment> env, FeatureMap features, std::size_t unroll, SquashSpec squash,
        Rng rng);

  /// Takes n environment steps. Windows go to replay as soon as they are complete;
  /// episodes finished along the way are returned.
  std::vector<EpisodeRecord> run(const ParamSnapshot& snapshot, std::size_t n_steps, ReplayBuffer& replay);

  std::uint64_t env_steps() const noexcept { return env_steps_; }
  std::size_t id() const noexcept { return id_; }

 private:
  void begin_episode();
  void flush(ReplayBuffer& replay, bool episode_over, bool terminal);

  std::size_t id_;
  std::unique_ptr<Environment> env_;
  FeatureMap map_;
  HistoryEncoder history_;
  std::size_t unroll_;
  SquashSpec squash_;
  Rng rng_;
  bool in_episode_ = false;
  std::vector<double> features_;
  std::vector<TrajectoryStep> pending_;
  EpisodeRecord current_;
  std::uint64_t episodes_ = 0;
  std::uint64_t env_steps_ = 0;
};

/// Plays one full episode with a stochastic policy. When `trajectory` is given the
/// visited steps are appended to it (behavior log-probs included).
EpisodeRecord rollout_episode(Environment& env, const FeatureMap& map, const Mlp& policy, SquashSpec squash, Rng& rng,
                              std::vector<TrajectoryStep>* trajectory = nullptr);

}  // namespace infoasym
