#include "infoasym/analysis/diagnostics.hpp"

#include <cmath>
#include <ostream>

#include "infoasym/algorithms/regularizer.hpp"
#include "infoasym/algorithms/targets.hpp"
#include "infoasym/errors.hpp"

namespace infoasym {

std::vector<KlPoint> kl_timeseries(std::span<const TrajectoryStep> trajectory, const AgentNets& nets,
                                   const HyperParams& hp) {
  std::vector<KlPoint> out;
  out.reserve(trajectory.size());
  const bool with_default = nets.has_default() && default_source(hp.variant.kind) != DefaultSource::None;
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const auto& s = trajectory[t];
    KlPoint p{t, 0.0, s.reward, s.on_target, s.terminal};
    const auto din = default_input(nets, hp, s.features, s.default_features);
    if (nets.discrete()) {
      const auto pi = categorical_head(nets.policy, s.features);
      p.kl = with_default ? kl_per_step(pi, categorical_head(nets.default_policy, din))
                          : kl_per_step(pi, Categorical::uniform(pi.size()));
    } else {
      if (!with_default) throw ContractViolation("continuous KL series needs a default policy");
      p.kl = kl_per_step(gaussian_head(nets.policy, s.features, hp.squash).dist,
                         gaussian_head(nets.default_policy, din, hp.squash).dist);
    }
    out.push_back(p);
  }
  return out;
}

void write_kl_csv(std::ostream& os, std::span<const KlPoint> series) {
  os << "t,kl,reward,on_target,terminal\n";
  for (const auto& p : series)
    os << p.t << ',' << p.kl << ',' << p.reward << ',' << (p.on_target ? 1 : 0) << ',' << (p.terminal ? 1 : 0) << '\n';
}

KlSpikeStats spike_statistics(std::span<const KlPoint> series) {
  KlSpikeStats st;
  if (series.empty()) return st;
  double on = 0.0, off = 0.0;
  std::size_t n_on = 0, n_off = 0;
  for (const auto& p : series) {
    st.mean += p.kl;
    st.max = std::max(st.max, p.kl);
    (p.on_target ? on : off) += p.kl;
    ++(p.on_target ? n_on : n_off);
  }
  st.mean /= static_cast<double>(series.size());
  for (const auto& p : series) st.stddev += (p.kl - st.mean) * (p.kl - st.mean);
  st.stddev = std::sqrt(st.stddev / static_cast<double>(series.size()));
  for (const auto& p : series)
    if (p.kl > st.mean + 2.0 * st.stddev) ++st.spikes;
  st.mean_on_target = n_on ? on / static_cast<double>(n_on) : 0.0;
  st.mean_off_target = n_off ? off / static_cast<double>(n_off) : 0.0;
  return st;
}

const AxisMarginal& MarginalReport::axis(std::string_view name) const {
  for (const auto& a : axes)
    if (a.name == name) return a;
  throw InvalidInput("no axis named '" + std::string(name) + "'");
}

MarginalReport default_marginals(const Categorical& pi0, std::span<const ActionAxis> axes) {
  std::size_t product = 1;
  for (const auto& a : axes) {
    if (a.count == 0) throw ConfigError("axis '" + a.name + "' has no values", "axes");
    product *= a.count;
  }
  if (axes.empty() || product != pi0.size())
    throw ConfigError("axis grouping covers " + std::to_string(product) + " composites but the default has " +
                          std::to_string(pi0.size()),
                      "axes");
  MarginalReport r;
  r.entropy = categorical_entropy(pi0);
  r.max_entropy = std::log(static_cast<double>(pi0.size()));
  for (const auto& a : axes) r.axes.push_back({a.name, std::vector<double>(a.count, 0.0)});
  for (std::size_t c = 0; c < pi0.size(); ++c) {
    std::size_t rest = c;
    for (std::size_t k = axes.size(); k-- > 0;) {
      r.axes[k].probs[rest % axes[k].count] += pi0.probs()[c];
      rest /= axes[k].count;
    }
  }
  return r;
}

void write_marginals_csv(std::ostream& os, std::size_t learner_step, const MarginalReport& r, bool header) {
  if (header) {
    os << "learner_step,entropy,max_entropy";
    for (const auto& a : r.axes)
      for (std::size_t v = 0; v < a.probs.size(); ++v) os << ',' << a.name << '_' << v;
    os << '\n';
  }
  os << learner_step << ',' << r.entropy << ',' << r.max_entropy;
  for (const auto& a : r.axes)
    for (double p : a.probs) os << ',' << p;
  os << '\n';
}

}  // namespace infoasym
