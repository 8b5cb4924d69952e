#pragma once

#include <vector>

#include "infoasym/envs/env.hpp"

namespace infoasym {

struct TrajectoryStep {
  std::vector<double> features;          // full history x_t
  std::vector<double> default_features;  // goal-agnostic part x^D_t
  Action action;
  double reward = 0.0;
  double behavior_log_prob = 0.0;
  bool terminal = false;   // the episode terminated after this step
  bool truncated = false;  // the time limit cut the episode after this step
  bool on_target = false;
};

/// Up to K consecutive steps of one episode. Only the last step may be terminal or
/// truncated; when it is not terminal the window carries the features of the
/// following state for bootstrapping.
struct Window {
  std::vector<TrajectoryStep> steps;
  std::vector<double> bootstrap_features;
  std::vector<double> bootstrap_default_features;
  double weight = 1.0;

  bool ends_terminal() const noexcept { return !steps.empty() && steps.back().terminal; }
  std::size_t size() const noexcept { return steps.size(); }
};

}  // namespace infoasym
