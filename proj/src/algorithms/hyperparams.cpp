#include "infoasym/algorithms/hyperparams.hpp"

#include "infoasym/errors.hpp"

namespace infoasym {

RegularizerKind parse_regularizer(std::string_view name) {
  for (auto k : kAllRegularizers)
    if (to_string(k) == name) return k;
  throw ConfigError("unknown regularizer variant '" + std::string(name) + "'", "hyper.variant");
}

std::string_view to_string(RegularizerKind k) noexcept {
  switch (k) {
    case RegularizerKind::EntropyBonus: return "entropy_bonus";
    case RegularizerKind::EntropyReg: return "entropy_reg";
    case RegularizerKind::KlBonus: return "kl_bonus";
    case RegularizerKind::KlReg: return "kl_reg";
    case RegularizerKind::KlToOldPolicy: return "kl_to_old_policy";
    case RegularizerKind::ReversedKlBonus: return "reversed_kl_bonus";
    case RegularizerKind::ReversedKlReg: return "reversed_kl_reg";
  }
  return "?";
}

DefaultSource default_source(RegularizerKind k) noexcept {
  switch (k) {
    case RegularizerKind::EntropyBonus:
    case RegularizerKind::EntropyReg: return DefaultSource::None;
    case RegularizerKind::KlToOldPolicy: return DefaultSource::OldPolicy;
    default: return DefaultSource::Learned;
  }
}

bool regularizes_reward(RegularizerKind k) noexcept {
  return k == RegularizerKind::EntropyReg || k == RegularizerKind::KlReg || k == RegularizerKind::KlToOldPolicy ||
         k == RegularizerKind::ReversedKlReg;
}

bool reversed_kl(RegularizerKind k) noexcept {
  return k == RegularizerKind::ReversedKlBonus || k == RegularizerKind::ReversedKlReg;
}

CriticAlgorithm parse_critic_algorithm(std::string_view name) {
  if (name == "retrace") return CriticAlgorithm::Retrace;
  if (name == "vtrace") return CriticAlgorithm::VTrace;
  if (name == "kstep") return CriticAlgorithm::KStep;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'", "agent.algorithm");
}

std::string_view to_string(CriticAlgorithm a) noexcept {
  switch (a) {
    case CriticAlgorithm::Retrace: return "retrace";
    case CriticAlgorithm::VTrace: return "vtrace";
    case CriticAlgorithm::KStep: return "kstep";
  }
  return "?";
}

void HyperParams::validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be non-negative", "hyper.alpha");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]", "hyper.gamma");
  if (unroll < 1) throw ConfigError("unroll length must be at least 1", "hyper.unroll");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1", "hyper.batch_size");
  if (!(lr_policy > 0.0 && lr_critic > 0.0 && lr_default > 0.0))
    throw ConfigError("learning rates must be positive", "hyper.lr_*");
  if (target_period_agent < 1 || target_period_default < 1)
    throw ConfigError("target update periods must be at least 1", "hyper.target_period_*");
  if (variant.old_policy_period < 1) throw ConfigError("old policy period must be at least 1", "hyper.old_policy_period");
  if (mc_samples < 1) throw ConfigError("need at least one Monte-Carlo sample", "hyper.mc_samples");
  if (!(retrace_lambda >= 0.0 && retrace_lambda <= 1.0)) throw ConfigError("retrace_lambda must lie in [0, 1]", "hyper.retrace_lambda");
  if (!(vtrace_rho_bar > 0.0 && vtrace_c_bar > 0.0)) throw ConfigError("v-trace truncation levels must be positive", "hyper.vtrace_*");
  if (!(entropy_bonus >= 0.0)) throw ConfigError("entropy bonus must be non-negative", "hyper.entropy_bonus");
  if (!(squash.sigma_max > kMinSigma)) throw ConfigError("sigma_max must exceed 0.1", "hyper.sigma_max");
}

}  // namespace infoasym
