#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "infoasym/numerics/rng.hpp"
#include "infoasym/observation.hpp"

namespace infoasym {

enum class ActionKind { Discrete, Continuous };

struct ActionSpace {
  ActionKind kind = ActionKind::Discrete;
  /// Number of actions (discrete) or action dimension (continuous).
  std::size_t size = 0;

  bool discrete() const noexcept { return kind == ActionKind::Discrete; }
};

struct Action {
  std::size_t index = 0;
  std::vector<double> value;

  static Action discrete(std::size_t i) { return Action{i, {}}; }
  static Action continuous(std::vector<double> v) { return Action{0, std::move(v)}; }
};

struct StepResult {
  std::vector<double> observation;  // per-step features after the transition
  double reward = 0.0;
  bool terminal = false;   // the task ended the episode
  bool truncated = false;  // the time limit ended the episode
  bool on_target = false;  // agent sits on its commanded target (event annotation)

  bool done() const noexcept { return terminal || truncated; }
};

/// Stateful episode driver used by actors and evaluation. Concrete environments
/// also expose their state as a value type for tabular enumeration.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  /// Per-step feature layout (window 1).
  virtual const ObservationSpec& observation_spec() const = 0;
  virtual ActionSpace action_space() const = 0;
  virtual std::size_t time_limit() const = 0;

  /// Starts an episode; all randomness of the episode is drawn from streams split off `rng`.
  virtual std::vector<double> reset(Rng& rng) = 0;
  /// Throws ContractViolation if the episode is already over.
  virtual StepResult step(const Action& action) = 0;
  virtual bool done() const = 0;

  virtual std::unique_ptr<Environment> clone() const = 0;
};

}  // namespace infoasym
