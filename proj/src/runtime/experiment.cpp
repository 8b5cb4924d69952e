#include "infoasym/runtime/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "infoasym/algorithms/learner.hpp"
#include "infoasym/errors.hpp"
#include "infoasym/numerics/checkpoint.hpp"

namespace infoasym {

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::shared_ptr<const ParamSnapshot> snapshot_of(const AgentNets& nets, std::uint64_t version) {
  auto s = std::make_shared<ParamSnapshot>();
  s->version = version;
  s->policy = nets.policy;
  s->default_policy = nets.default_policy;
  return s;
}

// Event stream writer; a no-op when disabled.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw ConfigError("cannot write " + path.string(), "logging.dir");
  }
  void write(const nlohmann::json& j) {
    if (out_.is_open()) out_ << j.dump() << '\n';
  }

 private:
  std::ofstream out_;
};

void write_episode(EventLog& log, const EpisodeRecord& e, std::size_t learner_step, std::uint64_t env_steps) {
  log.write({{"event", "episode"},
             {"actor", e.actor},
             {"episode", e.episode},
             {"return", e.episode_return},
             {"length", e.length},
             {"terminal", e.terminal},
             {"on_target_steps", e.on_target_steps},
             {"learner_step", learner_step},
             {"env_steps", env_steps}});
}

std::string describe_batch(const std::vector<Window>& batch) {
  std::string s;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& w = batch[i];
    s += "window " + std::to_string(i) + ": steps " + std::to_string(w.size()) + ", rewards";
    for (const auto& st : w.steps) s += " " + num(st.reward);
    s += ", behavior log-probs";
    for (const auto& st : w.steps) s += " " + num(st.behavior_log_prob);
    s += w.ends_terminal() ? ", terminal\n" : "\n";
  }
  return s;
}

}  // namespace

std::string format_csv_row(const LogRow& r) {
  return std::to_string(r.learner_step) + "," + std::to_string(r.env_steps) + "," + num(r.eval_return_mean) + "," +
         num(r.eval_return_median) + "," + num(r.mean_kl) + "," + num(r.default_entropy) + "," + num(r.loss_pi) + "," +
         num(r.loss_q) + "," + num(r.loss_pi0) + "," + num(r.wall_ms);
}

std::optional<std::size_t> RunResult::first_step_reaching(double threshold) const {
  for (const auto& r : rows)
    if (r.eval_return_median >= threshold) return r.learner_step;
  return std::nullopt;
}

FeatureMap feature_map(const Environment& env, const ExperimentConfig& config) {
  FeatureMap m;
  m.spec = history_spec(env, config);
  m.mask = compile_mask(m.spec, config.mask);
  return m;
}

EvalStats evaluate_policy(const ExperimentConfig& config, const Mlp& policy, std::size_t episodes, Rng& rng) {
  auto env = make_environment(config);
  const auto map = feature_map(*env, config);
  EvalStats st;
  for (std::size_t i = 0; i < episodes; ++i)
    st.returns.push_back(rollout_episode(*env, map, policy, config.hyper.squash, rng).episode_return);
  if (!st.returns.empty()) {
    for (double r : st.returns) st.mean += r;
    st.mean /= static_cast<double>(st.returns.size());
    st.median = median(st.returns);
  }
  return st;
}

AgentNets initial_nets(const ExperimentConfig& config) {
  auto env = make_environment(config);
  Rng rng = Rng(config.seed).split(1);
  return AgentNets::make(make_architecture(*env, config), rng);
}

void load_default_checkpoint(AgentNets& nets, const std::filesystem::path& path) {
  Mlp loaded;
  try {
    loaded = load_checkpoint(path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot load default checkpoint: ") + e.what(), "transfer.default_checkpoint");
  }
  if (!nets.has_default() || !loaded.same_layout(nets.default_policy))
    throw ConfigError("checkpoint layout does not match the default-policy net of this run",
                      "transfer.default_checkpoint");
  nets.default_policy = loaded;
  nets.default_target = loaded;
}

void save_nets(const AgentNets& nets, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_checkpoint(dir / "policy.ckpt", nets.policy);
  save_checkpoint(dir / "critic.ckpt", nets.critic);
  if (nets.has_default()) save_checkpoint(dir / "default.ckpt", nets.default_policy);
}

void load_nets(AgentNets& nets, const std::filesystem::path& dir) {
  auto load_into = [&](const char* file, Mlp& net, Mlp& target) {
    const auto p = dir / file;
    if (!std::filesystem::exists(p)) return;
    auto m = load_checkpoint(p);
    if (!m.same_layout(net)) throw ConfigError(std::string(file) + " does not match the configured network", file);
    net = m;
    target = m;
  };
  load_into("policy.ckpt", nets.policy, nets.policy_target);
  load_into("critic.ckpt", nets.critic, nets.critic_target);
  if (nets.has_default()) load_into("default.ckpt", nets.default_policy, nets.default_target);
}

RunResult run_learner(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto& rt = config.runtime;
  const auto& hp = config.hyper;
  const auto clock_start = std::chrono::steady_clock::now();
  auto wall_ms = [&]() -> double {
    if (rt.deterministic) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - clock_start).count();
  };

  auto probe = make_environment(config);
  const auto map = feature_map(*probe, config);
  const Rng root(config.seed);

  AgentNets nets = options.initial_nets ? *options.initial_nets : initial_nets(config);
  const bool transfer = !config.transfer.default_checkpoint.empty();
  if (transfer) load_default_checkpoint(nets, config.transfer.default_checkpoint);
  Learner learner(std::move(nets), hp, root.split(2).next_u64(), transfer && config.transfer.freeze);

  RunResult result;
  result.dir = config.run_dir();
  std::ofstream csv;
  std::ofstream marg_csv;
  EventLog events;
  const bool maze_vector_default = config.environment.kind == EnvKind::FactoredMaze && learner.nets().has_default() &&
                                   learner.nets().default_policy.input_size() == 0;
  if (options.write_files) {
    std::filesystem::create_directories(result.dir);
    csv.open(result.dir / "metrics.csv");
    if (!csv) throw ConfigError("cannot write " + (result.dir / "metrics.csv").string(), "logging.dir");
    csv << kCsvHeader << '\n';
    csv.flush();
    std::ofstream(result.dir / "config.yaml") << dump_config(config);
    if (config.logging.events) events = EventLog(result.dir / "events.jsonl");
    if (maze_vector_default) marg_csv.open(result.dir / "marginals.csv");
  }

  ReplayBuffer replay(rt.replay_capacity);
  SnapshotStore store(snapshot_of(learner.nets(), 0));
  std::uint64_t version = 0;

  std::vector<Actor> actors;
  for (std::size_t i = 0; i < rt.actors; ++i)
    actors.emplace_back(i, make_environment(config), map, hp.unroll, hp.squash, root.split(100 + i));

  Rng sample_rng = root.split(3);
  double sum_pi = 0.0, sum_q = 0.0, sum_pi0 = 0.0;
  std::size_t since_row = 0;
  std::vector<Window> last_batch;
  std::atomic<std::uint64_t> env_steps{0};

  auto record_row = [&](std::size_t step) {
    Rng eval_rng = root.split(0x5EED0000ULL + step);
    const auto ev = evaluate_policy(config, learner.nets().policy, rt.eval_episodes, eval_rng);
    LogRow row;
    row.learner_step = step;
    row.env_steps = env_steps.load();
    row.eval_return_mean = ev.mean;
    row.eval_return_median = ev.median;
    if (!last_batch.empty()) {
      const auto bs = batch_statistics(last_batch, learner.nets(), hp);
      row.mean_kl = bs.mean_kl;
      row.default_entropy = bs.default_entropy;
    }
    const double denom = since_row > 0 ? static_cast<double>(since_row) : 1.0;
    row.loss_pi = sum_pi / denom;
    row.loss_q = sum_q / denom;
    row.loss_pi0 = sum_pi0 / denom;
    sum_pi = sum_q = sum_pi0 = 0.0;
    since_row = 0;
    row.wall_ms = wall_ms();
    result.rows.push_back(row);
    if (csv.is_open()) {
      csv << format_csv_row(row) << '\n';
      csv.flush();
    }
    events.write({{"event", "eval"}, {"learner_step", step}, {"returns", ev.returns}});
    if (maze_vector_default) {
      const auto pi0 = categorical_head(learner.nets().default_policy, {});
      const auto rep = default_marginals(pi0, config.environment.factored_maze.axes);
      result.marginals.push_back(rep);
      if (marg_csv.is_open()) write_marginals_csv(marg_csv, step, rep, result.marginals.size() == 1);
    }
    if (options.on_row) options.on_row(row);
  };

  auto learn_step = [&]() {
    auto batch = replay.sample(hp.batch_size, sample_rng);
    UpdateStats st;
    try {
      st = learner.update(batch);
    } catch (const NumericError& e) {
      if (options.write_files) {
        std::ofstream dump(result.dir / "numeric_abort.txt");
        dump << "learner step " << learner.step() << ": " << e.what() << '\n' << describe_batch(batch);
      }
      throw;
    }
    sum_pi += st.loss_pi;
    sum_q += st.loss_q;
    sum_pi0 += st.loss_pi0;
    ++since_row;
    last_batch = std::move(batch);
    if (learner.step() % rt.snapshot_period == 0) store.publish(snapshot_of(learner.nets(), ++version));
    if (learner.step() % rt.eval_period == 0) record_row(learner.step());
  };

  if (rt.learner_steps > 0) {
    if (rt.deterministic) {
      std::size_t next_actor = 0;
      auto act = [&](std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
          auto& a = actors[next_actor];
          next_actor = (next_actor + 1) % actors.size();
          const auto snap = store.latest();
          for (const auto& e : a.run(*snap, 1, replay)) write_episode(events, e, learner.step(), env_steps.load() + 1);
          env_steps.fetch_add(1);
        }
      };
      while (replay.windows() == 0 || replay.transitions() < rt.min_replay) act(1);
      for (std::size_t s = 0; s < rt.learner_steps; ++s) {
        act(rt.env_steps_per_learner_step);
        learn_step();
      }
    } else {
      std::atomic<bool> stop{false};
      std::atomic<std::size_t> learner_steps_done{0};
      std::mutex event_mu;
      std::vector<std::thread> threads;
      const std::uint64_t per_actor_budget = rt.env_steps_per_learner_step;
      for (auto& a : actors) {
        threads.emplace_back([&, per_actor_budget] {
          while (!stop.load()) {
            // Keep the collection rate near the configured ratio.
            const std::uint64_t allowed =
                rt.min_replay + per_actor_budget * (learner_steps_done.load() + 1) + actors.size();
            if (env_steps.load() >= allowed) {
              std::this_thread::yield();
              continue;
            }
            const auto snap = store.latest();
            const auto done = a.run(*snap, 1, replay);
            const auto n = env_steps.fetch_add(1) + 1;
            if (!done.empty()) {
              std::lock_guard lock(event_mu);
              for (const auto& e : done) write_episode(events, e, learner_steps_done.load(), n);
            }
          }
        });
      }
      try {
        while (replay.windows() == 0 || replay.transitions() < rt.min_replay) std::this_thread::yield();
        for (std::size_t s = 0; s < rt.learner_steps; ++s) {
          std::unique_lock lock(event_mu);
          learn_step();
          lock.unlock();
          learner_steps_done.fetch_add(1);
        }
      } catch (...) {
        stop.store(true);
        for (auto& t : threads) t.join();
        throw;
      }
      stop.store(true);
      for (auto& t : threads) t.join();
    }
  }

  result.env_steps = env_steps.load();
  result.nets = learner.nets();
  if (options.write_files && config.logging.checkpoints) save_nets(result.nets, result.dir);
  return result;
}

RunResult transfer_run(const ExperimentConfig& config, const RunOptions& options) {
  if (config.transfer.default_checkpoint.empty())
    throw ConfigError("transfer needs a pretrained default checkpoint", "transfer.default_checkpoint");
  return run_learner(config, options);
}

}  // namespace infoasym
