#include "infoasym/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "infoasym/analysis/bounds.hpp"
#include "infoasym/analysis/verification.hpp"
#include "infoasym/errors.hpp"
#include "infoasym/runtime/experiment.hpp"

namespace infoasym {

namespace {

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> actors;
  bool quiet = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("config", f.config, "Experiment config (YAML)")->required();
  cmd->add_option("--seed", f.seed, "Override the config seed");
  cmd->add_option("--actors", f.actors, "Override the actor count");
  cmd->add_flag("--quiet", f.quiet, "Do not print log rows");
}

ExperimentConfig load_with_overrides(const RunFlags& f) {
  auto c = load_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (f.actors) {
    c.runtime.actors = *f.actors;
    c.validate();
  }
  apply_environment_overrides(c);
  return c;
}

RunOptions printing_options(bool quiet) {
  RunOptions o;
  if (!quiet)
    o.on_row = [](const LogRow& r) {
      std::printf("step %zu  env_steps %llu  eval_return %.3f (median %.3f)  kl %.4f  pi0_entropy %.4f\n",
                  r.learner_step, static_cast<unsigned long long>(r.env_steps), r.eval_return_mean,
                  r.eval_return_median, r.mean_kl, r.default_entropy);
      std::fflush(stdout);
    };
  return o;
}

int finish(const SuiteReport& r) {
  std::cout << r.format();
  std::cout << (r.passed() ? "all checks passed\n" : "some checks FAILED\n");
  return r.passed() ? kExitOk : kExitCheckFailed;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path, "report");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

int run_report(const std::vector<std::string>& files, double threshold) {
  std::printf("%-40s %8s %12s %12s %14s %10s\n", "run", "rows", "final_eval", "best_eval", "first>=thresh", "final_kl");
  for (const auto& f : files) {
    const auto rows = read_csv(f);
    if (rows.empty() || rows[0].size() < 10 || rows[0][0] != "learner_step")
      throw ConfigError("not a metrics CSV: " + f, "report");
    double best = -INFINITY, final_eval = NAN, final_kl = NAN;
    std::string first = "-";
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() < 10) continue;
      const double ev = std::stod(rows[i][2]);
      best = std::max(best, ev);
      final_eval = ev;
      final_kl = std::stod(rows[i][4]);
      if (first == "-" && std::stod(rows[i][3]) >= threshold) first = rows[i][0];
    }
    std::printf("%-40s %8zu %12.3f %12.3f %14s %10.4f\n", f.c_str(), rows.size() - 1, final_eval, best, first.c_str(),
                final_kl);
  }
  return kExitOk;
}

}  // namespace

int dispatch(int argc, char** argv) {
  CLI::App app{"Information-asymmetric KL-regularized RL"};
  app.require_subcommand(1);

  RunFlags train_f, eval_f, transfer_f, ablation_f;
  auto* train = app.add_subcommand("train", "Train an agent from a config");
  add_run_flags(train, train_f);

  auto* eval = app.add_subcommand("eval", "Evaluate saved checkpoints");
  add_run_flags(eval, eval_f);
  std::string eval_dir;
  std::size_t eval_episodes = 0;
  eval->add_option("--checkpoints", eval_dir, "Directory with policy.ckpt (default: the config's run directory)");
  eval->add_option("--episodes", eval_episodes, "Episodes (default: runtime.eval_episodes)");

  auto* transfer = app.add_subcommand("transfer", "Train against a pretrained default policy");
  add_run_flags(transfer, transfer_f);
  std::string transfer_ckpt;
  bool no_freeze = false;
  transfer->add_option("--default", transfer_ckpt, "Pretrained default checkpoint (overrides the config)");
  transfer->add_flag("--no-freeze", no_freeze, "Keep training the loaded default");

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of every loss");
  std::size_t gc_instances = 140;
  std::uint64_t gc_seed = 1;
  gradcheck->add_option("--instances", gc_instances, "Random instances");
  gradcheck->add_option("--seed", gc_seed, "Seed");

  auto* oracle = app.add_subcommand("oracle-check", "Default-policy and off-policy target oracles");
  std::size_t oc_instances = 20, oc_offpolicy = 5;
  std::uint64_t oc_seed = 1;
  oracle->add_option("--instances", oc_instances, "Random MDPs for the distillation check");
  oracle->add_option("--offpolicy-instances", oc_offpolicy, "Random MDPs for the Retrace / V-trace check");
  oracle->add_option("--seed", oc_seed, "Seed");

  auto* bounds = app.add_subcommand("bounds-check", "Information-bound inequalities on random joints");
  std::size_t b_instances = 1000;
  std::uint64_t b_seed = 1;
  bounds->add_option("--instances", b_instances, "Random joints (and latent stacks)");
  bounds->add_option("--seed", b_seed, "Seed");

  auto* ablation = app.add_subcommand("ablation", "Run every regularizer variant on one config");
  add_run_flags(ablation, ablation_f);
  std::vector<std::uint64_t> ab_seeds;
  double ab_threshold = 40.0;
  ablation->add_option("--seeds", ab_seeds, "Seeds shared by all variants (default: the config seed)")->delimiter(',');
  ablation->add_option("--threshold", ab_threshold, "Return threshold for the steps-to-threshold column");

  auto* report = app.add_subcommand("report", "Summarize metrics CSV files");
  std::vector<std::string> report_files;
  double report_threshold = 40.0;
  report->add_option("files", report_files, "metrics.csv files")->required();
  report->add_option("--threshold", report_threshold, "Return threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (train->parsed()) {
      const auto c = load_with_overrides(train_f);
      const auto r = run_learner(c, printing_options(train_f.quiet));
      std::printf("trained %zu learner steps, %llu env steps; logs in %s\n", c.runtime.learner_steps,
                  static_cast<unsigned long long>(r.env_steps), r.dir.string().c_str());
      return kExitOk;
    }
    if (transfer->parsed()) {
      auto c = load_with_overrides(transfer_f);
      if (!transfer_ckpt.empty()) c.transfer.default_checkpoint = transfer_ckpt;
      if (no_freeze) c.transfer.freeze = false;
      const auto r = transfer_run(c, printing_options(transfer_f.quiet));
      std::printf("transfer run finished; logs in %s\n", r.dir.string().c_str());
      return kExitOk;
    }
    if (eval->parsed()) {
      const auto c = load_with_overrides(eval_f);
      auto nets = initial_nets(c);
      const std::filesystem::path dir = eval_dir.empty() ? c.run_dir() : std::filesystem::path(eval_dir);
      if (!std::filesystem::exists(dir / "policy.ckpt")) throw ConfigError("no policy.ckpt in " + dir.string(), "--checkpoints");
      load_nets(nets, dir);
      Rng rng = Rng(c.seed).split(0xE7A1);
      const auto st = evaluate_policy(c, nets.policy, eval_episodes ? eval_episodes : c.runtime.eval_episodes, rng);
      double lo = INFINITY, hi = -INFINITY;
      for (double x : st.returns) lo = std::min(lo, x), hi = std::max(hi, x);
      std::printf("episodes %zu  mean %.4f  median %.4f  min %.4f  max %.4f\n", st.returns.size(), st.mean, st.median,
                  lo, hi);
      return kExitOk;
    }
    if (gradcheck->parsed()) return finish(run_gradcheck_suite(gc_instances, gc_seed));
    if (oracle->parsed()) {
      auto r = run_distillation_suite(oc_instances, oc_seed);
      const auto o = run_offpolicy_suite(oc_offpolicy, oc_seed);
      r.lines.insert(r.lines.end(), o.lines.begin(), o.lines.end());
      return finish(r);
    }
    if (bounds->parsed()) {
      const auto b = run_bound_suite(b_instances, b_seed);
      SuiteReport r;
      r.lines.push_back({"min (bound - mi)", b.min_gap, -1e-9, b.min_gap >= -1e-9});
      r.lines.push_back({"max |gap - KL(marginal || pi0)|", b.max_identity_error, 1e-9, b.max_identity_error <= 1e-9});
      r.lines.push_back({"min (latent bound - mi)", b.min_latent_gap, -1e-9, b.min_latent_gap >= -1e-9});
      r.lines.push_back({"min (latent bound - action bound)", b.min_latent_chain_gap, -1e-9,
                         b.min_latent_chain_gap >= -1e-9});
      std::printf("%zu instances\n", b.instances);
      return finish(r);
    }
    if (ablation->parsed()) {
      const auto base = load_with_overrides(ablation_f);
      if (ab_seeds.empty()) ab_seeds.push_back(base.seed);
      std::printf("%-20s %6s %12s %16s\n", "variant", "seed", "final_eval", "first>=threshold");
      for (auto kind : kAllRegularizers) {
        for (auto seed : ab_seeds) {
          auto c = base;
          c.seed = seed;
          c.hyper.variant.kind = kind;
          c.logging.name = base.logging.name + "_" + std::string(to_string(kind)) + "_s" + std::to_string(seed);
          const auto r = run_learner(c, printing_options(true));
          const auto first = r.first_step_reaching(ab_threshold);
          std::printf("%-20s %6llu %12.3f %16s\n", std::string(to_string(kind)).c_str(),
                      static_cast<unsigned long long>(seed), r.rows.empty() ? 0.0 : r.rows.back().eval_return_mean,
                      first ? std::to_string(*first).c_str() : "-");
          std::fflush(stdout);
        }
      }
      return kExitOk;
    }
    if (report->parsed()) return run_report(report_files, report_threshold);
  } catch (const ConfigError& e) {
    std::cerr << "config error in " << e.field() << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric abort: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitConfig;
}

}  // namespace infoasym
