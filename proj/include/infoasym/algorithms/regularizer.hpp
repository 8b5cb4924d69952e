#pragma once

#include <vector>

#include "infoasym/algorithms/hyperparams.hpp"
#include "infoasym/distributions.hpp"

namespace infoasym {

/// Per-step contribution of the active regularizer.
struct RegularizerTerm {
  double actor = 0.0;           // added to the per-step actor objective (maximized)
  std::vector<double> d_actor;  // d actor / d policy head (logits, or [mean..., stddev...])
  double reward = 0.0;          // added to the per-step reward inside value targets
  bool in_reward = false;       // whether the variant regularizes the return itself
};

/// `pi0` may be null only for variants without a default policy.
RegularizerTerm regularizer_term(const HyperParams& hp, const Categorical& pi, const Categorical* pi0);
RegularizerTerm regularizer_term(const HyperParams& hp, const DiagGaussian& pi, const DiagGaussian* pi0);

/// KL[pi || pi0] for a single step.
double kl_per_step(const Categorical& pi, const Categorical& pi0);
double kl_per_step(const DiagGaussian& pi, const DiagGaussian& pi0);

/// The divergence a variant distils the default policy with: KL[pi || pi0], or
/// KL[pi0 || pi] for the reversed variants. Gradient is w.r.t. the default head.
struct DistillTerm {
  double value = 0.0;
  std::vector<double> d_default;
};
DistillTerm distill_term(RegularizerKind kind, const Categorical& pi, const Categorical& pi0);
DistillTerm distill_term(RegularizerKind kind, const DiagGaussian& pi, const DiagGaussian& pi0);

}  // namespace infoasym
