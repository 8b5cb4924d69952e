#include "infoasym/runtime/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "infoasym/errors.hpp"

namespace infoasym {

namespace {

std::string join(const std::string& prefix, const std::string& key) { return prefix.empty() ? key : prefix + "." + key; }

void check_keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) throw ConfigError("expected a mapping", path.empty() ? "<root>" : path);
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!ok.count(key)) throw ConfigError("unknown key", join(path, key));
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, const std::string& path, T& out) {
  const auto v = node[key];
  if (!v) return;
  try {
    out = v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("malformed value", join(path, key));
  }
}

void read_size(const YAML::Node& node, const char* key, const std::string& path, std::size_t& out) {
  const auto v = node[key];
  if (!v) return;
  long long x;
  try {
    x = v.as<long long>();
  } catch (const YAML::Exception&) {
    throw ConfigError("expected a non-negative integer", join(path, key));
  }
  if (x < 0) throw ConfigError("expected a non-negative integer", join(path, key));
  out = static_cast<std::size_t>(x);
}

void read_sizes(const YAML::Node& node, const char* key, const std::string& path, std::vector<std::size_t>& out) {
  const auto v = node[key];
  if (!v) return;
  if (!v.IsSequence()) throw ConfigError("expected a list of layer widths", join(path, key));
  out.clear();
  for (const auto& e : v) {
    long long x;
    try {
      x = e.as<long long>();
    } catch (const YAML::Exception&) {
      throw ConfigError("expected a list of layer widths", join(path, key));
    }
    if (x <= 0) throw ConfigError("layer widths must be positive", join(path, key));
    out.push_back(static_cast<std::size_t>(x));
  }
}

template <class F>
void read_enum(const YAML::Node& node, const char* key, const std::string& path, F&& assign) {
  const auto v = node[key];
  if (!v) return;
  std::string s;
  try {
    s = v.as<std::string>();
  } catch (const YAML::Exception&) {
    throw ConfigError("expected a name", join(path, key));
  }
  try {
    assign(s);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), join(path, key));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), join(path, key));
  }
}

void parse_grid(const YAML::Node& n, GridNavConfig& c) {
  const std::string p = "environment.grid_nav";
  check_keys(n, p, {"size", "num_targets", "reward", "variant", "target_reward", "moving_reward", "consecutive_steps", "episode_length",
                    "gait_phases", "fixed_targets", "target_seed"});
  read_size(n, "size", p, c.size);
  read_size(n, "num_targets", p, c.num_targets);
  read_enum(n, "reward", p, [&](const std::string& s) {
    if (s == "sparse") c.reward_mode = RewardMode::Sparse;
    else if (s == "dense") c.reward_mode = RewardMode::Dense;
    else throw ConfigError("expected sparse or dense", "");
  });
  read_enum(n, "variant", p, [&](const std::string& s) {
    if (s == "terminate") c.variant = GridVariant::TerminateOnGoal;
    else if (s == "moving_target") c.variant = GridVariant::MovingTarget;
    else throw ConfigError("expected terminate or moving_target", "");
  });
  read(n, "target_reward", p, c.target_reward);
  read(n, "moving_reward", p, c.moving_reward);
  read_size(n, "consecutive_steps", p, c.consecutive_steps);
  read_size(n, "episode_length", p, c.episode_length);
  read_size(n, "gait_phases", p, c.gait_phases);
  read(n, "fixed_targets", p, c.fixed_targets);
  read(n, "target_seed", p, c.target_seed);
}

void parse_maze(const YAML::Node& n, FactoredActionConfig& c) {
  const std::string p = "environment.factored_maze";
  check_keys(n, p, {"axes", "layout_seed", "lattice", "extra_openings", "episode_length", "goal_reward", "include_position",
                    "goal_in_view_only"});
  if (const auto axes = n["axes"]) {
    if (!axes.IsSequence()) throw ConfigError("expected a list of axes", p + ".axes");
    c.axes.clear();
    for (const auto& a : axes) {
      check_keys(a, p + ".axes[]", {"name", "count"});
      ActionAxis axis;
      read(a, "name", p + ".axes[]", axis.name);
      read_size(a, "count", p + ".axes[]", axis.count);
      c.axes.push_back(axis);
    }
  }
  read(n, "layout_seed", p, c.layout_seed);
  read_size(n, "lattice", p, c.lattice);
  read_size(n, "extra_openings", p, c.extra_openings);
  read_size(n, "episode_length", p, c.episode_length);
  read(n, "goal_reward", p, c.goal_reward);
  read(n, "include_position", p, c.include_position);
  read(n, "goal_in_view_only", p, c.goal_in_view_only);
}

void parse_point(const YAML::Node& n, PointMassConfig& c) {
  const std::string p = "environment.point_mass";
  check_keys(n, p, {"num_targets", "reward", "target_radius", "target_reward", "episode_length", "damping",
                    "force_gain"});
  read_size(n, "num_targets", p, c.num_targets);
  read_enum(n, "reward", p, [&](const std::string& s) {
    if (s == "sparse") c.reward_mode = RewardMode::Sparse;
    else if (s == "dense") c.reward_mode = RewardMode::Dense;
    else throw ConfigError("expected sparse or dense", "");
  });
  read(n, "target_radius", p, c.target_radius);
  read(n, "target_reward", p, c.target_reward);
  read_size(n, "episode_length", p, c.episode_length);
  read(n, "damping", p, c.damping);
  read(n, "force_gain", p, c.force_gain);
}

std::string_view env_name(EnvKind k) {
  switch (k) {
    case EnvKind::GridNav: return "grid_nav";
    case EnvKind::FactoredMaze: return "factored_maze";
    case EnvKind::PointMass: return "point_mass";
  }
  return "?";
}

}  // namespace

void ExperimentConfig::validate() const {
  hyper.validate();
  if (window < 1) throw ConfigError("history window must be at least 1", "observation.window");
  if (runtime.actors < 1) throw ConfigError("need at least one actor", "runtime.actors");
  if (runtime.snapshot_period < 1) throw ConfigError("snapshot period must be at least 1", "runtime.snapshot_period");
  if (runtime.eval_period < 1) throw ConfigError("evaluation period must be at least 1", "runtime.eval_period");
  if (runtime.env_steps_per_learner_step < 1)
    throw ConfigError("need at least one environment step per learner step", "runtime.env_steps_per_learner_step");
  if (runtime.replay_capacity < hyper.unroll)
    throw ConfigError("replay must hold at least one window", "runtime.replay_capacity");
  if (runtime.min_replay > runtime.replay_capacity)
    throw ConfigError("min_replay exceeds the replay capacity", "runtime.min_replay");
  for (auto* sizes : {&agent.policy_hidden, &agent.critic_hidden, &agent.default_hidden})
    for (auto w : *sizes)
      if (w == 0) throw ConfigError("layer widths must be positive", "agent");
  const auto& g = environment.grid_nav;
  if (environment.kind == EnvKind::GridNav) {
    if (g.size < 2) throw ConfigError("grid needs at least 2 cells per side", "environment.grid_nav.size");
    if (g.num_targets < 1 || g.num_targets + 1 > g.size * g.size)
      throw ConfigError("target count does not fit the grid", "environment.grid_nav.num_targets");
    if (g.gait_phases < 1) throw ConfigError("gait_phases must be at least 1", "environment.grid_nav.gait_phases");
    if (g.episode_length < 1) throw ConfigError("episode length must be positive", "environment.grid_nav.episode_length");
  }
  if (environment.kind == EnvKind::PointMass && include_last_action)
    throw ConfigError("point_mass has no last-action feature", "observation.include_last_action");
}

std::filesystem::path ExperimentConfig::run_dir() const { return std::filesystem::path(logging.dir) / logging.name; }

ExperimentConfig parse_config(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML syntax error: ") + e.what(), "<file>");
  }
  ExperimentConfig c;
  if (root.IsNull()) return c;
  check_keys(root, "", {"seed", "environment", "observation", "mask", "agent", "hyper", "runtime", "logging", "transfer"});
  read(root, "seed", "", c.seed);

  if (const auto env = root["environment"]) {
    check_keys(env, "environment", {"kind", "grid_nav", "factored_maze", "point_mass"});
    read_enum(env, "kind", "environment", [&](const std::string& s) {
      if (s == "grid_nav") c.environment.kind = EnvKind::GridNav;
      else if (s == "factored_maze") c.environment.kind = EnvKind::FactoredMaze;
      else if (s == "point_mass") c.environment.kind = EnvKind::PointMass;
      else throw ConfigError("expected grid_nav, factored_maze or point_mass", "");
    });
    if (env["grid_nav"]) parse_grid(env["grid_nav"], c.environment.grid_nav);
    if (env["factored_maze"]) parse_maze(env["factored_maze"], c.environment.factored_maze);
    if (env["point_mass"]) parse_point(env["point_mass"], c.environment.point_mass);
  }
  if (const auto obs = root["observation"]) {
    check_keys(obs, "observation", {"window", "include_last_action"});
    read_size(obs, "window", "observation", c.window);
    read(obs, "include_last_action", "observation", c.include_last_action);
  }
  if (const auto mask = root["mask"]) {
    if (mask.IsScalar()) {
      read_enum(root, "mask", "", [&](const std::string& s) { c.mask = MaskSpec::from_preset_name(s); });
    } else if (mask.IsSequence()) {
      std::vector<std::string> groups;
      for (const auto& g : mask) groups.push_back(g.as<std::string>());
      c.mask = MaskSpec::custom(std::move(groups));
    } else {
      throw ConfigError("expected a preset name or a list of feature groups", "mask");
    }
  }
  if (const auto a = root["agent"]) {
    check_keys(a, "agent", {"algorithm", "policy_hidden", "critic_hidden", "default_hidden", "activation"});
    read_enum(a, "algorithm", "agent", [&](const std::string& s) { c.hyper.algorithm = parse_critic_algorithm(s); });
    read_sizes(a, "policy_hidden", "agent", c.agent.policy_hidden);
    read_sizes(a, "critic_hidden", "agent", c.agent.critic_hidden);
    read_sizes(a, "default_hidden", "agent", c.agent.default_hidden);
    read_enum(a, "activation", "agent", [&](const std::string& s) { c.agent.activation = parse_activation(s); });
  }
  if (const auto h = root["hyper"]) {
    const std::string p = "hyper";
    check_keys(h, p, {"alpha", "gamma", "unroll", "batch_size", "lr_policy", "lr_critic", "lr_default", "optimizer",
                      "max_grad_norm", "target_period_agent", "target_period_default", "entropy_bonus", "mc_samples",
                      "retrace_lambda", "vtrace_rho_bar", "vtrace_c_bar", "variant", "old_policy_period", "sigma_max"});
    auto& hp = c.hyper;
    read(h, "alpha", p, hp.alpha);
    read(h, "gamma", p, hp.gamma);
    read_size(h, "unroll", p, hp.unroll);
    read_size(h, "batch_size", p, hp.batch_size);
    read(h, "lr_policy", p, hp.lr_policy);
    read(h, "lr_critic", p, hp.lr_critic);
    read(h, "lr_default", p, hp.lr_default);
    read_enum(h, "optimizer", p, [&](const std::string& s) { hp.optimizer = parse_optimizer(s); });
    read(h, "max_grad_norm", p, hp.max_grad_norm);
    read_size(h, "target_period_agent", p, hp.target_period_agent);
    read_size(h, "target_period_default", p, hp.target_period_default);
    read(h, "entropy_bonus", p, hp.entropy_bonus);
    read_size(h, "mc_samples", p, hp.mc_samples);
    read(h, "retrace_lambda", p, hp.retrace_lambda);
    read(h, "vtrace_rho_bar", p, hp.vtrace_rho_bar);
    read(h, "vtrace_c_bar", p, hp.vtrace_c_bar);
    read_enum(h, "variant", p, [&](const std::string& s) { hp.variant.kind = parse_regularizer(s); });
    read_size(h, "old_policy_period", p, hp.variant.old_policy_period);
    read(h, "sigma_max", p, hp.squash.sigma_max);
  }
  if (const auto r = root["runtime"]) {
    const std::string p = "runtime";
    check_keys(r, p, {"actors", "learner_steps", "deterministic", "replay_capacity", "min_replay",
                      "env_steps_per_learner_step", "snapshot_period", "eval_period", "eval_episodes"});
    auto& rt = c.runtime;
    read_size(r, "actors", p, rt.actors);
    read_size(r, "learner_steps", p, rt.learner_steps);
    read(r, "deterministic", p, rt.deterministic);
    read_size(r, "replay_capacity", p, rt.replay_capacity);
    read_size(r, "min_replay", p, rt.min_replay);
    read_size(r, "env_steps_per_learner_step", p, rt.env_steps_per_learner_step);
    read_size(r, "snapshot_period", p, rt.snapshot_period);
    read_size(r, "eval_period", p, rt.eval_period);
    read_size(r, "eval_episodes", p, rt.eval_episodes);
  }
  if (const auto l = root["logging"]) {
    check_keys(l, "logging", {"dir", "name", "events", "checkpoints"});
    read(l, "dir", "logging", c.logging.dir);
    read(l, "name", "logging", c.logging.name);
    read(l, "events", "logging", c.logging.events);
    read(l, "checkpoints", "logging", c.logging.checkpoints);
  }
  if (const auto t = root["transfer"]) {
    check_keys(t, "transfer", {"default_checkpoint", "freeze"});
    read(t, "default_checkpoint", "transfer", c.transfer.default_checkpoint);
    read(t, "freeze", "transfer", c.transfer.freeze);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string(), "<file>");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  e << YAML::Key << "environment" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << std::string(env_name(c.environment.kind));
  const auto& g = c.environment.grid_nav;
  e << YAML::Key << "grid_nav" << YAML::Value << YAML::BeginMap << YAML::Key << "size" << YAML::Value << g.size
    << YAML::Key << "num_targets" << YAML::Value << g.num_targets << YAML::Key << "reward" << YAML::Value
    << (g.reward_mode == RewardMode::Sparse ? "sparse" : "dense") << YAML::Key << "variant" << YAML::Value
    << (g.variant == GridVariant::TerminateOnGoal ? "terminate" : "moving_target") << YAML::Key << "target_reward"
    << YAML::Value << g.target_reward << YAML::Key << "moving_reward" << YAML::Value << g.moving_reward
    << YAML::Key << "consecutive_steps" << YAML::Value << g.consecutive_steps
    << YAML::Key << "episode_length" << YAML::Value << g.episode_length << YAML::Key << "gait_phases" << YAML::Value
    << g.gait_phases << YAML::Key << "fixed_targets" << YAML::Value << g.fixed_targets << YAML::Key << "target_seed"
    << YAML::Value << g.target_seed << YAML::EndMap;
  const auto& m = c.environment.factored_maze;
  e << YAML::Key << "factored_maze" << YAML::Value << YAML::BeginMap << YAML::Key << "axes" << YAML::Value
    << YAML::BeginSeq;
  for (const auto& a : m.axes)
    e << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value << a.name << YAML::Key << "count"
      << YAML::Value << a.count << YAML::EndMap;
  e << YAML::EndSeq << YAML::Key << "layout_seed" << YAML::Value << m.layout_seed << YAML::Key << "lattice"
    << YAML::Value << m.lattice << YAML::Key << "extra_openings" << YAML::Value << m.extra_openings << YAML::Key
    << "episode_length" << YAML::Value << m.episode_length << YAML::Key << "goal_reward" << YAML::Value
    << m.goal_reward << YAML::Key << "include_position" << YAML::Value << m.include_position << YAML::Key
    << "goal_in_view_only" << YAML::Value << m.goal_in_view_only << YAML::EndMap;
  const auto& pm = c.environment.point_mass;
  e << YAML::Key << "point_mass" << YAML::Value << YAML::BeginMap << YAML::Key << "num_targets" << YAML::Value
    << pm.num_targets << YAML::Key << "reward" << YAML::Value
    << (pm.reward_mode == RewardMode::Sparse ? "sparse" : "dense") << YAML::Key << "target_radius" << YAML::Value
    << pm.target_radius << YAML::Key << "target_reward" << YAML::Value << pm.target_reward << YAML::Key
    << "episode_length" << YAML::Value << pm.episode_length << YAML::Key << "damping" << YAML::Value << pm.damping
    << YAML::Key << "force_gain" << YAML::Value << pm.force_gain << YAML::EndMap;
  e << YAML::EndMap;
  e << YAML::Key << "observation" << YAML::Value << YAML::BeginMap << YAML::Key << "window" << YAML::Value << c.window
    << YAML::Key << "include_last_action" << YAML::Value << c.include_last_action << YAML::EndMap;
  if (c.mask.preset() == MaskPreset::Custom || c.mask.preset() == MaskPreset::TaskSubset) {
    auto groups = c.mask.extra_groups();
    if (c.mask.preset() == MaskPreset::TaskSubset) groups.insert(groups.begin(), "proprio");
    e << YAML::Key << "mask" << YAML::Value << YAML::Flow << groups;
  } else {
    e << YAML::Key << "mask" << YAML::Value << c.mask.describe();
  }
  auto seq = [&](const std::vector<std::size_t>& v) {
    e << YAML::Flow << YAML::BeginSeq;
    for (auto x : v) e << x;
    e << YAML::EndSeq;
  };
  e << YAML::Key << "agent" << YAML::Value << YAML::BeginMap << YAML::Key << "algorithm" << YAML::Value
    << std::string(to_string(c.hyper.algorithm)) << YAML::Key << "policy_hidden" << YAML::Value;
  seq(c.agent.policy_hidden);
  e << YAML::Key << "critic_hidden" << YAML::Value;
  seq(c.agent.critic_hidden);
  e << YAML::Key << "default_hidden" << YAML::Value;
  seq(c.agent.default_hidden);
  e << YAML::Key << "activation" << YAML::Value << std::string(to_string(c.agent.activation)) << YAML::EndMap;
  const auto& h = c.hyper;
  e << YAML::Key << "hyper" << YAML::Value << YAML::BeginMap << YAML::Key << "alpha" << YAML::Value << h.alpha
    << YAML::Key << "gamma" << YAML::Value << h.gamma << YAML::Key << "unroll" << YAML::Value << h.unroll << YAML::Key
    << "batch_size" << YAML::Value << h.batch_size << YAML::Key << "lr_policy" << YAML::Value << h.lr_policy
    << YAML::Key << "lr_critic" << YAML::Value << h.lr_critic << YAML::Key << "lr_default" << YAML::Value
    << h.lr_default << YAML::Key << "optimizer" << YAML::Value
    << (h.optimizer == OptimizerKind::Adam ? "adam" : "sgd") << YAML::Key << "max_grad_norm" << YAML::Value
    << h.max_grad_norm << YAML::Key << "target_period_agent" << YAML::Value << h.target_period_agent << YAML::Key
    << "target_period_default" << YAML::Value << h.target_period_default << YAML::Key << "entropy_bonus"
    << YAML::Value << h.entropy_bonus << YAML::Key << "mc_samples" << YAML::Value << h.mc_samples << YAML::Key
    << "retrace_lambda" << YAML::Value << h.retrace_lambda << YAML::Key << "vtrace_rho_bar" << YAML::Value
    << h.vtrace_rho_bar << YAML::Key << "vtrace_c_bar" << YAML::Value << h.vtrace_c_bar << YAML::Key << "variant"
    << YAML::Value << std::string(to_string(h.variant.kind)) << YAML::Key << "old_policy_period" << YAML::Value
    << h.variant.old_policy_period << YAML::Key << "sigma_max" << YAML::Value << h.squash.sigma_max << YAML::EndMap;
  const auto& r = c.runtime;
  e << YAML::Key << "runtime" << YAML::Value << YAML::BeginMap << YAML::Key << "actors" << YAML::Value << r.actors
    << YAML::Key << "learner_steps" << YAML::Value << r.learner_steps << YAML::Key << "deterministic" << YAML::Value
    << r.deterministic << YAML::Key << "replay_capacity" << YAML::Value << r.replay_capacity << YAML::Key
    << "min_replay" << YAML::Value << r.min_replay << YAML::Key << "env_steps_per_learner_step" << YAML::Value
    << r.env_steps_per_learner_step << YAML::Key << "snapshot_period" << YAML::Value << r.snapshot_period
    << YAML::Key << "eval_period" << YAML::Value << r.eval_period << YAML::Key << "eval_episodes" << YAML::Value
    << r.eval_episodes << YAML::EndMap;
  e << YAML::Key << "logging" << YAML::Value << YAML::BeginMap << YAML::Key << "dir" << YAML::Value << c.logging.dir
    << YAML::Key << "name" << YAML::Value << c.logging.name << YAML::Key << "events" << YAML::Value
    << c.logging.events << YAML::Key << "checkpoints" << YAML::Value << c.logging.checkpoints << YAML::EndMap;
  e << YAML::Key << "transfer" << YAML::Value << YAML::BeginMap << YAML::Key << "default_checkpoint" << YAML::Value
    << c.transfer.default_checkpoint << YAML::Key << "freeze" << YAML::Value << c.transfer.freeze << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

void apply_environment_overrides(ExperimentConfig& config) {
  if (const char* dir = std::getenv(kLogDirEnv); dir != nullptr && *dir != '\0') config.logging.dir = dir;
}

std::unique_ptr<Environment> make_environment(const ExperimentConfig& config) {
  switch (config.environment.kind) {
    case EnvKind::GridNav: {
      auto g = config.environment.grid_nav;
      g.include_last_action = config.include_last_action;
      return std::make_unique<GridNav>(g);
    }
    case EnvKind::FactoredMaze: {
      auto m = config.environment.factored_maze;
      m.include_last_action = config.include_last_action;
      return std::make_unique<FactoredMaze>(m);
    }
    case EnvKind::PointMass: return std::make_unique<PointMass>(config.environment.point_mass);
  }
  throw ConfigError("unknown environment kind", "environment.kind");
}

ObservationSpec history_spec(const Environment& env, const ExperimentConfig& config) {
  return env.observation_spec().with_window(config.window);
}

NetArchitecture make_architecture(const Environment& env, const ExperimentConfig& config) {
  const auto spec = history_spec(env, config);
  const auto mask = compile_mask(spec, config.mask);
  NetArchitecture a;
  a.feature_size = spec.total_size();
  a.default_feature_size = mask.default_size();
  a.action_space = env.action_space();
  a.policy_hidden = config.agent.policy_hidden;
  a.critic_hidden = config.agent.critic_hidden;
  a.default_hidden = config.agent.default_hidden;
  a.activation = config.agent.activation;
  a.critic = config.hyper.algorithm == CriticAlgorithm::VTrace ? CriticKind::StateValue : CriticKind::ActionValue;
  a.has_default = default_source(config.hyper.variant.kind) != DefaultSource::None;
  if (default_source(config.hyper.variant.kind) == DefaultSource::OldPolicy) {
    a.default_feature_size = a.feature_size;
    a.default_hidden = a.policy_hidden;
  }
  return a;
}

}  // namespace infoasym
