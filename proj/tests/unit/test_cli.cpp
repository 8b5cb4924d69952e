#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "infoasym/cli.hpp"
#include "infoasym/runtime/experiment.hpp"

using namespace infoasym;

namespace {

int call(std::vector<std::string> args) {
  args.insert(args.begin(), "infoasym");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return dispatch(static_cast<int>(argv.size()), argv.data());
}

std::filesystem::path write_config(const std::filesystem::path& dir, const std::string& body) {
  const auto p = dir / "config.yaml";
  std::ofstream(p) << body;
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string small_config(const std::filesystem::path& logs, std::size_t steps) {
  return "seed: 2\n"
         "environment: {kind: grid_nav, grid_nav: {size: 4, num_targets: 2, episode_length: 10}}\n"
         "agent: {policy_hidden: [8], critic_hidden: [8], default_hidden: [8]}\n"
         "hyper: {unroll: 3, batch_size: 4}\n"
         "runtime: {actors: 1, learner_steps: " +
         std::to_string(steps) +
         ", min_replay: 20, env_steps_per_learner_step: 2, eval_period: 5, eval_episodes: 2}\n"
         "logging: {dir: " +
         logs.string() + ", name: cli}\n";
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage and parse errors") {
    CHECK(call({"--help"}) == kExitOk);
    CHECK(call({}) == kExitConfig);
    CHECK(call({"fly"}) == kExitConfig);
    CHECK(call({"train"}) == kExitConfig);
  }

  TEST_CASE("bad configs exit with the config status") {
    const auto dir = test::tmp_dir("cli_bad");
    CHECK(call({"train", (dir / "absent.yaml").string()}) == kExitConfig);
    CHECK(call({"train", write_config(dir, "hyper: {alpah: 1}\n").string()}) == kExitConfig);
    CHECK(call({"train", write_config(dir, "runtime: {actors: 0}\n").string()}) == kExitConfig);
    CHECK(call({"transfer", write_config(dir, small_config(dir, 0)).string()}) == kExitConfig);
    CHECK(call({"report", (dir / "absent.csv").string()}) == kExitConfig);
  }

  TEST_CASE("train with zero steps leaves a header-only log") {
    const auto dir = test::tmp_dir("cli_zero");
    const auto cfg = write_config(dir, small_config(dir / "logs", 0));
    REQUIRE(call({"train", cfg.string(), "--quiet"}) == kExitOk);
    CHECK(slurp(dir / "logs" / "cli" / "metrics.csv") == std::string(kCsvHeader) + "\n");
  }

  TEST_CASE("train, eval and report on a short run") {
    const auto dir = test::tmp_dir("cli_short");
    const auto cfg = write_config(dir, small_config(dir / "logs", 10));
    REQUIRE(call({"train", cfg.string(), "--quiet"}) == kExitOk);
    const auto csv = dir / "logs" / "cli" / "metrics.csv";
    const auto text = slurp(csv);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(call({"eval", cfg.string(), "--episodes", "3"}) == kExitOk);
    CHECK(call({"eval", cfg.string(), "--checkpoints", (dir / "nowhere").string()}) == kExitConfig);
    CHECK(call({"report", csv.string()}) == kExitOk);

    // A checkpoint from this run can be reused as a frozen default.
    const auto xcfg = write_config(dir, small_config(dir / "xlogs", 5));
    CHECK(call({"transfer", xcfg.string(), "--quiet", "--default", (dir / "logs" / "cli" / "default.ckpt").string()}) ==
          kExitOk);
  }

  TEST_CASE("verification commands report pass and fail through the exit status") {
    CHECK(call({"bounds-check", "--instances", "50"}) == kExitOk);
    CHECK(call({"gradcheck", "--instances", "100"}) == kExitOk);
    // Too few instances to meet the coverage requirement.
    CHECK(call({"gradcheck", "--instances", "3"}) == kExitCheckFailed);
  }
}
