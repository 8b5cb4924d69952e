#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "infoasym/envs/factored_maze.hpp"
#include "infoasym/envs/grid_nav.hpp"
#include "infoasym/numerics/matrix.hpp"
#include "infoasym/numerics/rng.hpp"

namespace infoasym {

struct Outcome {
  std::size_t next = 0;
  double prob = 0.0;
};

/// Finite MDP with sparse transitions. Terminal states absorb, pay nothing and
/// never act; values there are zero by definition.
struct TabularMdp {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::vector<std::vector<Outcome>> transitions;  // index s * num_actions + a
  Matrix reward;                                  // num_states x num_actions
  std::vector<double> initial;
  double gamma = 0.99;
  std::vector<bool> terminal;
  /// m(s): which default-policy input value each state shows.
  std::vector<std::size_t> mask_value;
  std::size_t num_mask_values = 0;
  /// Per-state feature vectors (window 1); empty when the MDP is abstract.
  std::vector<std::vector<double>> features;

  const std::vector<Outcome>& outcomes(std::size_t s, std::size_t a) const { return transitions[s * num_actions + a]; }
  /// Throws InvalidInput if any row fails to sum to one within tol or sizes disagree.
  void validate(double tol = 1e-12) const;
  /// Groups states by their masked feature vector.
  void assign_mask_values(const MaskIndex& mask);
  /// Samples s' ~ P(. | s, a).
  std::size_t sample_next(std::size_t s, std::size_t a, Rng& rng) const;
  std::size_t sample_initial(Rng& rng) const;
};

/// Row-stochastic table pi(a | s) (or pi0(a | mask value)).
using PolicyTable = Matrix;

PolicyTable uniform_policy(std::size_t rows, std::size_t actions);
PolicyTable random_policy(std::size_t rows, std::size_t actions, Rng& rng, double concentration = 1.0);

struct RandomMdpOptions {
  std::size_t states = 6;
  std::size_t actions = 3;
  std::size_t mask_values = 2;
  double gamma = 0.9;
  /// Successors per (s, a).
  std::size_t branching = 2;
  std::size_t terminal_states = 0;
};

/// Random MDP with one-hot state features and a random mask grouping.
TabularMdp make_random_mdp(const RandomMdpOptions& options, Rng& rng);

/// Exact enumeration of a small GridNav configuration. The episode time limit is
/// not part of the state; the tabular model is the discounted infinite-horizon view.
struct GridNavEnumeration {
  TabularMdp mdp;
  std::vector<GridNav::State> states;  // the terminal state is the last entry
  std::size_t terminal_index = 0;
  std::map<std::vector<int>, std::size_t> index;

  std::size_t index_of(const GridNav::State& s) const;
};

GridNavEnumeration enumerate(const GridNav& env, double gamma, std::size_t max_states = 100000);

struct FactoredMazeEnumeration {
  TabularMdp mdp;
  std::vector<FactoredMaze::State> states;
  std::size_t terminal_index = 0;
  std::map<std::vector<int>, std::size_t> index;

  std::size_t index_of(const FactoredMaze::State& s) const;
};

FactoredMazeEnumeration enumerate(const FactoredMaze& env, double gamma, std::size_t max_states = 100000);

}  // namespace infoasym
