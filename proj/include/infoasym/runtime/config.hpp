#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "infoasym/algorithms/agent_nets.hpp"
#include "infoasym/algorithms/hyperparams.hpp"
#include "infoasym/envs/factored_maze.hpp"
#include "infoasym/envs/grid_nav.hpp"
#include "infoasym/envs/point_mass.hpp"
#include "infoasym/observation.hpp"

namespace infoasym {

enum class EnvKind { GridNav, FactoredMaze, PointMass };

struct EnvironmentConfig {
  EnvKind kind = EnvKind::GridNav;
  GridNavConfig grid_nav;
  FactoredActionConfig factored_maze;
  PointMassConfig point_mass;
};

struct AgentConfig {
  std::vector<std::size_t> policy_hidden{64, 64};
  std::vector<std::size_t> critic_hidden{64, 64};
  std::vector<std::size_t> default_hidden{64, 64};
  Activation activation = Activation::Elu;
};

struct RuntimeConfig {
  std::size_t actors = 4;
  std::size_t learner_steps = 1000;
  /// Single-threaded round-robin mode; bit-reproducible.
  bool deterministic = true;
  /// Transitions kept in replay.
  std::size_t replay_capacity = 100000;
  /// Transitions collected before the first learner step.
  std::size_t min_replay = 1000;
  /// Environment steps (summed over actors) per learner step.
  std::size_t env_steps_per_learner_step = 8;
  std::size_t snapshot_period = 10;
  std::size_t eval_period = 500;
  std::size_t eval_episodes = 20;
};

struct LoggingConfig {
  std::string dir = "runs";
  std::string name = "run";
  bool events = true;
  bool checkpoints = true;
};

struct TransferConfig {
  std::string default_checkpoint;  // empty: train from scratch
  bool freeze = true;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  EnvironmentConfig environment;
  std::size_t window = 1;
  bool include_last_action = false;
  MaskSpec mask = MaskSpec::proprio_only();
  AgentConfig agent;
  HyperParams hyper;
  RuntimeConfig runtime;
  LoggingConfig logging;
  TransferConfig transfer;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  std::filesystem::path run_dir() const;
};

/// Parses the YAML config format. Unknown keys and malformed values raise
/// ConfigError with the dotted field path.
ExperimentConfig parse_config(std::string_view yaml_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string dump_config(const ExperimentConfig& config);

/// Environment variable that overrides logging.dir.
inline constexpr const char* kLogDirEnv = "INFOASYM_LOG_DIR";
void apply_environment_overrides(ExperimentConfig& config);

std::unique_ptr<Environment> make_environment(const ExperimentConfig& config);
/// Observation spec with the configured history window.
ObservationSpec history_spec(const Environment& env, const ExperimentConfig& config);
NetArchitecture make_architecture(const Environment& env, const ExperimentConfig& config);

}  // namespace infoasym
