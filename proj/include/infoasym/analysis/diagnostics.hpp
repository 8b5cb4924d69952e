#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "infoasym/algorithms/agent_nets.hpp"
#include "infoasym/algorithms/hyperparams.hpp"
#include "infoasym/algorithms/trajectory.hpp"
#include "infoasym/distributions.hpp"
#include "infoasym/envs/factored_maze.hpp"

namespace infoasym {

struct KlPoint {
  std::size_t t = 0;
  double kl = 0.0;
  double reward = 0.0;
  bool on_target = false;
  bool terminal = false;
};

/// KL[pi(.|x_t) || pi0(.|x^D_t)] along one trajectory under the online nets.
/// Without a default net the reference is the uniform distribution.
std::vector<KlPoint> kl_timeseries(std::span<const TrajectoryStep> trajectory, const AgentNets& nets,
                                   const HyperParams& hp);
void write_kl_csv(std::ostream& os, std::span<const KlPoint> series);

struct KlSpikeStats {
  double mean = 0.0;
  double stddev = 0.0;
  double max = 0.0;
  std::size_t spikes = 0;  // points above mean + 2 stddev
  double mean_on_target = 0.0;
  double mean_off_target = 0.0;
};
KlSpikeStats spike_statistics(std::span<const KlPoint> series);

struct AxisMarginal {
  std::string name;
  std::vector<double> probs;
};

struct MarginalReport {
  std::vector<AxisMarginal> axes;
  double entropy = 0.0;      // H(pi0) over composite actions
  double max_entropy = 0.0;  // ln |A|

  /// Entropy drop relative to ln|A|, in [0, 1].
  double entropy_reduction() const noexcept { return max_entropy > 0.0 ? 1.0 - entropy / max_entropy : 0.0; }
  const AxisMarginal& axis(std::string_view name) const;
};

/// Per-axis marginals of an unconditional default over composite actions
/// (first axis most significant). Throws ConfigError if the axes do not multiply to |A|.
MarginalReport default_marginals(const Categorical& pi0, std::span<const ActionAxis> axes);
void write_marginals_csv(std::ostream& os, std::size_t learner_step, const MarginalReport& r, bool header);

}  // namespace infoasym
