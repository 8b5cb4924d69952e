#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "infoasym/distributions.hpp"
#include "infoasym/numerics/optimizer.hpp"

namespace infoasym {

enum class RegularizerKind {
  EntropyBonus,     // + lambda_H * H(pi) in the actor loss only
  EntropyReg,       // + alpha * H(pi) in the actor loss and in the rewards
  KlBonus,          // - alpha * KL[pi || pi0] in the actor loss only
  KlReg,            // - alpha * KL[pi || pi0] in the actor loss and in the rewards
  KlToOldPolicy,    // KlReg against a periodically refreshed copy of pi
  ReversedKlBonus,  // - alpha * KL[pi0 || pi] in the actor loss only
  ReversedKlReg,    // - alpha * KL[pi0 || pi] in the actor loss and in the rewards
};

RegularizerKind parse_regularizer(std::string_view name);
std::string_view to_string(RegularizerKind k) noexcept;
inline constexpr RegularizerKind kAllRegularizers[] = {
    RegularizerKind::EntropyBonus,  RegularizerKind::EntropyReg,      RegularizerKind::KlBonus,
    RegularizerKind::KlReg,         RegularizerKind::KlToOldPolicy,   RegularizerKind::ReversedKlBonus,
    RegularizerKind::ReversedKlReg,
};

struct RegularizerVariant {
  RegularizerKind kind = RegularizerKind::KlReg;
  /// Learner steps between refreshes of the frozen policy copy (KlToOldPolicy only).
  std::size_t old_policy_period = 100;
};

/// Where the default policy comes from under a variant.
enum class DefaultSource { None, Learned, OldPolicy };

DefaultSource default_source(RegularizerKind k) noexcept;
/// True if the variant's term enters the per-step rewards (full objective), false for bonuses.
bool regularizes_reward(RegularizerKind k) noexcept;
bool reversed_kl(RegularizerKind k) noexcept;

enum class CriticAlgorithm {
  Retrace,  // action-value critic, off-policy Retrace targets
  VTrace,   // state-value critic, V-trace targets and importance-weighted policy gradient
  KStep,    // action-value critic, uncorrected on-policy K-step targets
};

CriticAlgorithm parse_critic_algorithm(std::string_view name);
std::string_view to_string(CriticAlgorithm a) noexcept;

struct HyperParams {
  double alpha = 0.01;
  double gamma = 0.99;
  std::size_t unroll = 10;
  std::size_t batch_size = 64;
  double lr_policy = 5e-4;
  double lr_critic = 5e-4;
  double lr_default = 5e-4;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double max_grad_norm = 0.0;
  std::size_t target_period_agent = 100;
  std::size_t target_period_default = 100;
  double entropy_bonus = 1e-4;
  /// Monte-Carlo samples for expectations under Gaussian policies.
  std::size_t mc_samples = 10;
  double retrace_lambda = 1.0;
  double vtrace_rho_bar = 1.0;
  double vtrace_c_bar = 1.0;
  RegularizerVariant variant;
  CriticAlgorithm algorithm = CriticAlgorithm::Retrace;
  SquashSpec squash;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

}  // namespace infoasym
