#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "infoasym/algorithms/agent_nets.hpp"
#include "infoasym/analysis/diagnostics.hpp"
#include "infoasym/runtime/actor.hpp"
#include "infoasym/runtime/config.hpp"

namespace infoasym {

inline constexpr const char* kCsvHeader =
    "learner_step,env_steps,eval_return_mean,eval_return_median,mean_kl,default_entropy,loss_pi,loss_q,loss_pi0,"
    "wall_ms";

struct LogRow {
  std::size_t learner_step = 0;
  std::uint64_t env_steps = 0;
  double eval_return_mean = 0.0;
  double eval_return_median = 0.0;
  double mean_kl = 0.0;
  double default_entropy = 0.0;
  double loss_pi = 0.0;  // averaged over the learner steps since the previous row
  double loss_q = 0.0;
  double loss_pi0 = 0.0;
  double wall_ms = 0.0;  // always 0 in deterministic mode
};

std::string format_csv_row(const LogRow& row);

struct EvalStats {
  std::vector<double> returns;
  double mean = 0.0;
  double median = 0.0;
};

/// Stochastic-policy evaluation on fresh episodes.
EvalStats evaluate_policy(const ExperimentConfig& config, const Mlp& policy, std::size_t episodes, Rng& rng);

struct RunResult {
  AgentNets nets;
  std::vector<LogRow> rows;
  std::vector<MarginalReport> marginals;  // one per log row, for input-free defaults on the factored maze
  std::uint64_t env_steps = 0;
  std::filesystem::path dir;

  /// First logged learner step whose median evaluation return reaches `threshold`.
  std::optional<std::size_t> first_step_reaching(double threshold) const;
};

struct RunOptions {
  /// Write metrics.csv, events.jsonl, config.yaml and checkpoints under config.run_dir().
  bool write_files = true;
  /// Called after every log row (progress reporting).
  std::function<void(const LogRow&)> on_row;
  /// Start from these nets instead of a fresh initialization.
  std::optional<AgentNets> initial_nets;
};

/// Builds the fresh networks a config describes (seeded from config.seed).
AgentNets initial_nets(const ExperimentConfig& config);
FeatureMap feature_map(const Environment& env, const ExperimentConfig& config);

/// Trains per the config: actors fill replay, the learner alternates actor,
/// critic and default updates, with periodic target syncs, snapshots,
/// evaluation and log rows. Honors config.transfer when a checkpoint is set.
/// Throws NumericError (after writing a diagnostic file) on a non-finite loss.
RunResult run_learner(const ExperimentConfig& config, const RunOptions& options = {});

/// run_learner with a required pretrained default checkpoint.
RunResult transfer_run(const ExperimentConfig& config, const RunOptions& options = {});

/// Loads the checkpoint into the default nets, checking the layout (ConfigError on mismatch).
void load_default_checkpoint(AgentNets& nets, const std::filesystem::path& path);

void save_nets(const AgentNets& nets, const std::filesystem::path& dir);
/// Loads whichever of policy/default/critic checkpoints exist in `dir` into `nets`.
void load_nets(AgentNets& nets, const std::filesystem::path& dir);

}  // namespace infoasym
