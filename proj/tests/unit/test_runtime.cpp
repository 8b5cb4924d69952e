#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "infoasym/algorithms/agent_nets.hpp"
#include "infoasym/errors.hpp"
#include "infoasym/numerics/checkpoint.hpp"
#include "infoasym/runtime/actor.hpp"
#include "infoasym/runtime/config.hpp"
#include "infoasym/runtime/experiment.hpp"
#include "infoasym/runtime/replay.hpp"

using namespace infoasym;

namespace {

Window window_of(std::size_t n, double tag) {
  Window w;
  for (std::size_t i = 0; i < n; ++i) {
    TrajectoryStep s;
    s.features = {tag, static_cast<double>(i)};
    w.steps.push_back(s);
  }
  return w;
}

const char* kTinyYaml = R"(
seed: 3
environment:
  kind: grid_nav
  grid_nav: {size: 4, num_targets: 2, episode_length: 12, gait_phases: 2}
mask: proprio_only
agent: {policy_hidden: [8], critic_hidden: [8], default_hidden: [8]}
hyper: {alpha: 0.1, unroll: 3, batch_size: 4, target_period_agent: 5, target_period_default: 5}
runtime: {actors: 2, learner_steps: 20, min_replay: 30, env_steps_per_learner_step: 2, eval_period: 10, eval_episodes: 3, snapshot_period: 3}
logging: {name: tiny, events: true, checkpoints: true}
)";

ExperimentConfig tiny(const std::string& dir_name) {
  auto c = parse_config(kTinyYaml);
  c.logging.dir = test::tmp_dir(dir_name).string();
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> copy_params(const Mlp& m) { return {m.params().begin(), m.params().end()}; }

}  // namespace

TEST_SUITE("runtime") {
  TEST_CASE("replay evicts whole windows once capacity is exceeded") {
    ReplayBuffer rb(7);
    rb.push(window_of(3, 0));
    rb.push(window_of(3, 1));
    CHECK(rb.transitions() == 6);
    rb.push(window_of(3, 2));
    CHECK(rb.windows() == 2);
    CHECK(rb.transitions() == 6);
    CHECK(rb.total_appended() == 9);
    Rng rng(5);
    for (const auto& w : rb.sample(50, rng)) {
      CHECK(w.size() == 3);
      CHECK(w.steps[0].features[0] != 0.0);  // the oldest window is gone
      for (std::size_t i = 0; i < 3; ++i) CHECK(w.steps[i].features[1] == static_cast<double>(i));
    }
  }

  TEST_CASE("empty replay refuses to sample") {
    ReplayBuffer rb(10);
    Rng rng(1);
    CHECK_THROWS_AS(rb.sample(1, rng), ContractViolation);
  }

  TEST_CASE("snapshot versions must increase") {
    auto c = tiny("snap");
    const auto nets = initial_nets(c);
    SnapshotStore store(std::make_shared<const ParamSnapshot>(ParamSnapshot{0, nets.policy, nets.default_policy}));
    auto first = store.latest();
    store.publish(std::make_shared<const ParamSnapshot>(ParamSnapshot{1, nets.policy, nets.default_policy}));
    CHECK(store.latest()->version == 1);
    CHECK(first->version == 0);  // readers keep what they fetched
    CHECK_THROWS_AS(store.publish(std::make_shared<const ParamSnapshot>(ParamSnapshot{1, nets.policy, nets.default_policy})),
                    ContractViolation);
  }

  TEST_CASE("actor windows respect unroll and episode boundaries") {
    auto c = tiny("actor");
    auto env = make_environment(c);
    const auto map = feature_map(*env, c);
    const auto nets = initial_nets(c);
    ParamSnapshot snap{0, nets.policy, nets.default_policy};
    ReplayBuffer replay(1000000);
    Actor actor(0, std::move(env), map, 3, c.hyper.squash, Rng(9));
    const auto eps = actor.run(snap, 200, replay);
    CHECK(actor.env_steps() == 200);
    CHECK(!eps.empty());
    std::size_t finished_steps = 0;
    for (const auto& e : eps) {
      CHECK(e.length <= 12);
      finished_steps += e.length;
    }
    CHECK(finished_steps <= 200);
    // Every completed transition is in replay; a partial window may still be pending.
    CHECK(replay.total_appended() >= finished_steps);
    CHECK(replay.total_appended() <= 200);

    Rng rng(2);
    for (const auto& w : replay.sample(500, rng)) {
      REQUIRE(w.size() >= 1);
      CHECK(w.size() <= 3);
      for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        CHECK(!w.steps[i].terminal);
        CHECK(!w.steps[i].truncated);
      }
      if (w.ends_terminal()) {
        CHECK(w.bootstrap_features.empty());
      } else {
        CHECK(w.bootstrap_features.size() == w.steps[0].features.size());
        CHECK(w.bootstrap_default_features.size() == w.steps[0].default_features.size());
      }
      // A short window only happens at the end of an episode.
      if (w.size() < 3) CHECK((w.steps.back().terminal || w.steps.back().truncated));
    }
  }

  TEST_CASE("behavior log-probs match a recomputation from the snapshot policy") {
    auto c = tiny("logp");
    auto env = make_environment(c);
    const auto map = feature_map(*env, c);
    const auto nets = initial_nets(c);
    ParamSnapshot snap{0, nets.policy, nets.default_policy};
    ReplayBuffer replay(100000);
    Actor actor(0, std::move(env), map, 3, c.hyper.squash, Rng(4));
    actor.run(snap, 100, replay);
    Rng rng(6);
    for (const auto& w : replay.sample(100, rng))
      for (const auto& s : w.steps) {
        const auto p = categorical_head(nets.policy, s.features);
        CHECK(s.behavior_log_prob == doctest::Approx(p.log_prob(s.action.index)).epsilon(1e-12));
        CHECK(s.default_features == default_features(s.features, map.mask));
      }
  }

  TEST_CASE("actors with equal seeds produce identical streams") {
    auto c = tiny("det_actor");
    const auto nets = initial_nets(c);
    ParamSnapshot snap{0, nets.policy, nets.default_policy};
    auto run = [&](std::uint64_t seed) {
      auto env = make_environment(c);
      const auto map = feature_map(*env, c);
      ReplayBuffer replay(100000);
      Actor actor(0, std::move(env), map, 3, c.hyper.squash, Rng(seed));
      const auto eps = actor.run(snap, 150, replay);
      Rng rng(1);
      std::vector<double> trace;
      for (const auto& e : eps) trace.push_back(e.episode_return + 1000.0 * static_cast<double>(e.length));
      for (const auto& w : replay.sample(40, rng))
        for (const auto& s : w.steps) {
          trace.push_back(static_cast<double>(s.action.index));
          trace.push_back(s.reward);
          trace.insert(trace.end(), s.features.begin(), s.features.end());
        }
      return trace;
    };
    CHECK(run(21) == run(21));
    CHECK(run(21) != run(22));
  }

  TEST_CASE("zero learner steps write a header-only log and leave the nets untouched") {
    auto c = tiny("zero");
    c.runtime.learner_steps = 0;
    const auto before = initial_nets(c);
    const auto res = run_learner(c);
    CHECK(res.rows.empty());
    CHECK(res.env_steps == 0);
    CHECK(slurp(c.run_dir() / "metrics.csv") == std::string(kCsvHeader) + "\n");
    CHECK(copy_params(res.nets.policy) == copy_params(before.policy));
    CHECK(copy_params(res.nets.critic) == copy_params(before.critic));
    CHECK(copy_params(res.nets.default_policy) == copy_params(before.default_policy));
  }

  TEST_CASE("two deterministic runs give byte-identical logs") {
    auto a = tiny("det_a");
    auto b = tiny("det_b");
    run_learner(a);
    run_learner(b);
    const auto ca = slurp(a.run_dir() / "metrics.csv");
    CHECK(ca == slurp(b.run_dir() / "metrics.csv"));
    // header + rows at steps 10 and 20
    CHECK(std::count(ca.begin(), ca.end(), '\n') == 3);
    CHECK(ca.find(",0\n") != std::string::npos);  // wall_ms is 0

    auto other = tiny("det_c");
    other.seed = 4;
    run_learner(other);
    CHECK(slurp(other.run_dir() / "metrics.csv") != ca);
  }

  TEST_CASE("written config parses back to the same dump") {
    auto c = tiny("dump");
    run_learner(c);
    const auto written = slurp(c.run_dir() / "config.yaml");
    CHECK(dump_config(parse_config(written)) == written);
    CHECK(std::filesystem::exists(c.run_dir() / "policy.ckpt"));
    CHECK(std::filesystem::exists(c.run_dir() / "default.ckpt"));
    CHECK(std::filesystem::file_size(c.run_dir() / "events.jsonl") > 0);
  }

  TEST_CASE("a frozen transferred default stays byte-identical") {
    auto pre = tiny("pre");
    pre.environment.grid_nav.num_targets = 1;
    run_learner(pre);
    const auto ckpt = pre.run_dir() / "default.ckpt";
    const auto loaded = load_checkpoint(ckpt);

    auto c = tiny("xfer");
    c.transfer.default_checkpoint = ckpt.string();
    c.transfer.freeze = true;
    const auto res = transfer_run(c);
    CHECK(copy_params(res.nets.default_policy) == copy_params(loaded));
    CHECK(copy_params(res.nets.policy) != copy_params(initial_nets(c).policy));

    c.transfer.freeze = false;
    c.logging.name = "unfrozen";
    const auto moved = transfer_run(c);
    CHECK(copy_params(moved.nets.default_policy) != copy_params(loaded));
  }

  TEST_CASE("transfer rejects a mismatched or missing checkpoint") {
    auto pre = tiny("pre_wide");
    pre.agent.default_hidden = {16};
    pre.runtime.learner_steps = 0;
    run_learner(pre);

    auto c = tiny("xfer_bad");
    c.transfer.default_checkpoint = (pre.run_dir() / "default.ckpt").string();
    CHECK_THROWS_AS(run_learner(c), ConfigError);
    c.transfer.default_checkpoint = (pre.run_dir() / "nope.ckpt").string();
    CHECK_THROWS_AS(run_learner(c), ConfigError);
    c.transfer.default_checkpoint.clear();
    CHECK_THROWS_AS(transfer_run(c), ConfigError);
  }

  TEST_CASE("config errors carry the field path") {
    auto field_of = [](const std::string& yaml) -> std::string {
      try {
        parse_config(yaml);
      } catch (const ConfigError& e) {
        return e.field();
      }
      return "<none>";
    };
    CHECK(field_of("hyper: {alpah: 1}") == "hyper.alpah");
    CHECK(field_of("environment: {grid_nav: {reward: shiny}}") == "environment.grid_nav.reward");
    CHECK(field_of("runtime: {actors: -1}") == "runtime.actors");
    CHECK(field_of("hyper: {alpha: [1, 2]}") == "hyper.alpha");
    CHECK(field_of("seed: [") == "<file>");
    CHECK(field_of("mask: sideways") == "mask");
    CHECK(field_of("seed: 2") == "<none>");

    CHECK(field_of("runtime: {actors: 0}") == "runtime.actors");  // parsing validates
    CHECK_THROWS_AS(load_config(test::tmp_dir("cfg") / "missing.yaml"), ConfigError);
  }

  TEST_CASE("defaults survive an empty file") {
    const auto c = parse_config("");
    const ExperimentConfig d;
    CHECK(dump_config(c) == dump_config(d));
    CHECK(c.logging.dir == "runs");
  }

  TEST_CASE("log directory can be overridden from the environment") {
    auto c = parse_config("logging: {dir: somewhere}");
    ::unsetenv(kLogDirEnv);
    apply_environment_overrides(c);
    CHECK(c.logging.dir == "somewhere");
    ::setenv(kLogDirEnv, "/tmp/elsewhere", 1);
    apply_environment_overrides(c);
    CHECK(c.logging.dir == "/tmp/elsewhere");
    CHECK(c.run_dir() == std::filesystem::path("/tmp/elsewhere") / "run");
    ::unsetenv(kLogDirEnv);
  }
}
