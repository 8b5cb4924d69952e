// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Exit status is 0 when the run completed; pass --strict to make any FAIL exit 4.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "infoasym/algorithms/agent_nets.hpp"
#include "infoasym/algorithms/losses.hpp"
#include "infoasym/algorithms/targets.hpp"
#include "infoasym/analysis/bounds.hpp"
#include "infoasym/analysis/diagnostics.hpp"
#include "infoasym/analysis/verification.hpp"
#include "infoasym/runtime/actor.hpp"
#include "infoasym/runtime/config.hpp"
#include "infoasym/runtime/experiment.hpp"
#include "infoasym/runtime/replay.hpp"

using namespace infoasym;

namespace {

constexpr double kThreshold = 40.0;
constexpr std::size_t kSeeds = 5;
const std::filesystem::path kConfigs = INFOASYM_CONFIG_DIR;
const std::filesystem::path kRuns = INFOASYM_ACCEPTANCE_RUNS;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ExperimentConfig config(const std::string& file, std::uint64_t seed, const std::string& name) {
  auto c = load_config(kConfigs / file);
  c.seed = seed;
  c.logging.dir = kRuns.string();
  c.logging.name = name;
  c.logging.events = false;
  return c;
}

// Steps to threshold; a run that never gets there counts as infinitely slow.
double steps_to_threshold(const RunResult& r) {
  const auto s = r.first_step_reaching(kThreshold);
  return s ? static_cast<double>(*s) : std::numeric_limits<double>::infinity();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + (std::isinf(x) ? std::string("never") : fmt("%.0f", x));
  return s;
}

std::vector<double> sweep(const std::string& file, const std::string& tag) {
  std::vector<double> steps;
  for (std::size_t s = 1; s <= kSeeds; ++s) {
    const auto r = run_learner(config(file, s, tag + "_s" + std::to_string(s)));
    steps.push_back(steps_to_threshold(r));
  }
  return steps;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_1() {
  const auto t0 = Clock::now();
  const auto r = run_gradcheck_suite(100, 2024);
  const double t = seconds_since(t0);
  double worst = 0.0;
  for (const auto& l : r.lines)
    if (l.name != "instances checked") worst = std::max(worst, l.value);
  report(1, r.passed() && t < 60.0, "100 instances, worst relative error " + fmt("%.2e", worst) + ", " + fmt("%.1f s", t));
}

void criterion_2() {
  const auto t0 = Clock::now();
  const auto r = run_distillation_suite(20, 2024);
  const double t = seconds_since(t0);
  const double worst = r.lines.front().value;
  report(2, r.passed() && t < 60.0, "20 MDPs, worst per-group L1 " + fmt("%.2e", worst) + ", " + fmt("%.1f s", t));
}

// KL to a frozen uniform default against entropy regularization, on windows
// collected in the GridNav task.
void criterion_3() {
  const auto t0 = Clock::now();
  auto c = config("gridnav_k3_kl.yaml", 1, "identity");
  auto env = make_environment(c);
  const auto map = feature_map(*env, c);
  auto nets = initial_nets(c);
  for (auto& p : nets.default_policy.params()) p = 0.0;
  nets.default_target = nets.default_policy;
  ReplayBuffer replay(100000);
  Actor actor(0, std::move(env), map, c.hyper.unroll, c.hyper.squash, Rng(7));
  actor.run(ParamSnapshot{0, nets.policy, nets.default_policy}, 400, replay);
  Rng pick(8);
  const auto batch = replay.sample(32, pick);

  HyperParams kl = c.hyper;
  kl.variant.kind = RegularizerKind::KlReg;
  HyperParams ent = kl;
  ent.variant.kind = RegularizerKind::EntropyReg;
  Rng mc(0);
  std::vector<WindowTargets> tk, te;
  for (const auto& w : batch) {
    tk.push_back(compute_targets(w, nets, kl, mc));
    te.push_back(compute_targets(w, nets, ent, mc));
  }
  const auto a = actor_loss(batch, tk, nets, kl, 1);
  const auto b = actor_loss(batch, te, nets, ent, 1);
  const double shift = kl.alpha * std::log(static_cast<double>(nets.num_actions()));
  double loss_err = a.per_step.size() == b.per_step.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < std::min(a.per_step.size(), b.per_step.size()); ++i)
    loss_err = std::max(loss_err, std::abs(a.per_step[i] - b.per_step[i] - shift));
  double grad_err = 0.0;
  for (std::size_t i = 0; i < a.grad.size(); ++i) grad_err = std::max(grad_err, std::abs(a.grad[i] - b.grad[i]));
  const double t = seconds_since(t0);
  report(3, loss_err <= 1e-10 && grad_err <= 1e-10 && t < 1.0,
         "per-step loss difference minus alpha ln|A|: " + fmt("%.1e", loss_err) + ", gradient difference " +
             fmt("%.1e", grad_err) + ", " + fmt("%.2f s", t));
}

void criterion_4() {
  const auto t0 = Clock::now();
  const auto b = run_bound_suite(1000, 2024);
  const double t = seconds_since(t0);
  report(4, b.passed && t < 30.0,
         "1000 joints and latent stacks, min gap " + fmt("%.2e", std::min(b.min_gap, b.min_latent_gap)) +
             ", identity error " + fmt("%.1e", b.max_identity_error) + ", " + fmt("%.1f s", t));
}

void criterion_5() {
  const auto t0 = Clock::now();
  const auto r = run_offpolicy_suite(8, 2024);
  const double t = seconds_since(t0);
  double worst = 0.0;
  for (const auto& l : r.lines) worst = std::max(worst, l.value);
  report(5, r.passed() && t < 120.0, "8 MDPs, Retrace and V-trace, worst error " + fmt("%.2e", worst) + ", " + fmt("%.1f s", t));
}

struct GridResults {
  std::vector<double> kl, entropy, full;
};

GridResults criteria_6_7() {
  const auto t0 = Clock::now();
  GridResults g;
  g.kl = sweep("gridnav_k3_kl.yaml", "k3_kl");
  g.entropy = sweep("gridnav_k3_entropy.yaml", "k3_entropy");
  g.full = sweep("gridnav_k3_full_info.yaml", "k3_full_info");
  const double t = seconds_since(t0);
  const double kl = median(g.kl), ent = median(g.entropy), full = median(g.full);
  const double margin = std::isinf(ent) ? (std::isinf(kl) ? 0.0 : 1.0) : 1.0 - kl / ent;
  report(6, margin >= 0.2 && t <= 900.0,
         "median steps to " + fmt("%.0f", kThreshold) + ": kl " + fmt("%.0f", kl) + " [" + list(g.kl) + "], entropy " +
             fmt("%.0f", ent) + " [" + list(g.entropy) + "], margin " + fmt("%.0f%%", 100.0 * margin) + ", " +
             fmt("%.0f s", t));
  // Same baseline for both, so a smaller speed-up means more steps.
  const double su_asym = ent / kl, su_full = ent / full;
  report(7, full > kl && t <= 900.0,
         "full information median " + fmt("%.0f", full) + " [" + list(g.full) + "], speed-up over entropy " +
             fmt("%.2f", su_full) + " vs " + fmt("%.2f", su_asym) + " with the task hidden");
  return g;
}

void criterion_8(const std::vector<double>& scratch) {
  const auto t0 = Clock::now();
  std::vector<double> xfer;
  for (std::size_t s = 1; s <= kSeeds; ++s) {
    const auto pre = config("gridnav_k1_pretrain.yaml", s, "k1_pretrain_s" + std::to_string(s));
    run_learner(pre);
    auto c = config("gridnav_k3_transfer.yaml", s, "k3_transfer_s" + std::to_string(s));
    c.transfer.default_checkpoint = (pre.run_dir() / "default.ckpt").string();
    c.transfer.freeze = true;
    xfer.push_back(steps_to_threshold(transfer_run(c)));
  }
  const double t = seconds_since(t0);
  const double m = median(xfer), base = median(scratch);
  report(8, m < base && t <= 900.0,
         "frozen K=1 default median " + fmt("%.0f", m) + " [" + list(xfer) + "] vs joint from scratch " +
             fmt("%.0f", base) + ", " + fmt("%.0f s", t));
}

void criterion_9() {
  const auto t0 = Clock::now();
  bool ok = true;
  double fwd = 0.0, back = 0.0;
  std::string per_seed;
  for (std::size_t s = 1; s <= kSeeds; ++s) {
    const auto r = run_learner(config("maze_vector_default.yaml", s, "maze_s" + std::to_string(s)));
    if (r.marginals.empty()) {
      ok = false;
      continue;
    }
    const auto& m = r.marginals.back();
    const auto& move = m.axis("move").probs;  // forward, back, none
    const double red = m.entropy_reduction();
    ok = ok && red >= 0.3 && move[0] > move[1];
    fwd += move[0] / kSeeds;
    back += move[1] / kSeeds;
    per_seed += (per_seed.empty() ? "" : "; ") + fmt("-%.0f%%", 100.0 * red) + fmt(" fwd %.2f", move[0]) +
                fmt(" back %.2f", move[1]);
  }
  const double t = seconds_since(t0);
  report(9, ok && t <= 1200.0,
         "entropy drop and move marginals per seed [" + per_seed + "], mean forward " + fmt("%.2f", fwd) +
             " backward " + fmt("%.2f", back) + " (full-scale reference 0.70 / 0.10), " + fmt("%.0f s", t));
}

void criterion_10() {
  const auto t0 = Clock::now();
  bool same = true;
  for (const char* file : {"gridnav_k3_kl.yaml", "maze_vector_default.yaml"}) {
    std::string logs[2];
    for (int k = 0; k < 2; ++k) {
      auto c = config(file, 3, std::string("det_") + std::to_string(k));
      c.runtime.learner_steps = 400;
      c.runtime.eval_period = 100;
      run_learner(c);
      logs[k] = slurp(c.run_dir() / "metrics.csv");
    }
    same = same && !logs[0].empty() && logs[0] == logs[1];
  }
  const double t = seconds_since(t0);
  report(10, same && t < 300.0, "two runs each of the GridNav and maze configs, byte-identical logs: " +
                                    std::string(same ? "yes" : "no") + ", " + fmt("%.0f s", t));
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--strict") == 0) strict = true;
  std::filesystem::create_directories(kRuns);
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  const auto g = criteria_6_7();
  criterion_8(g.kl);
  criterion_9();
  criterion_10();
  std::printf("%d of 10 criteria failed\n", failures);
  return strict && failures > 0 ? 4 : 0;
}
