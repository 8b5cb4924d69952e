#include "infoasym/algorithms/regularizer.hpp"

#include "infoasym/errors.hpp"

namespace infoasym {

namespace {

void require_default(const void* pi0, RegularizerKind k) {
  if (pi0 == nullptr && default_source(k) != DefaultSource::None)
    throw ContractViolation("variant " + std::string(to_string(k)) + " needs a default policy");
}

template <class V>
void scale(V& v, double s) {
  for (auto& x : v) x *= s;
}

}  // namespace

RegularizerTerm regularizer_term(const HyperParams& hp, const Categorical& pi, const Categorical* pi0) {
  const auto k = hp.variant.kind;
  require_default(pi0, k);
  RegularizerTerm t;
  t.in_reward = regularizes_reward(k);
  switch (k) {
    case RegularizerKind::EntropyBonus:
      t.actor = hp.entropy_bonus * categorical_entropy(pi);
      t.d_actor = categorical_entropy_grad(pi);
      scale(t.d_actor, hp.entropy_bonus);
      break;
    case RegularizerKind::EntropyReg:
      t.actor = hp.alpha * categorical_entropy(pi);
      t.d_actor = categorical_entropy_grad(pi);
      scale(t.d_actor, hp.alpha);
      break;
    case RegularizerKind::KlBonus:
    case RegularizerKind::KlReg:
    case RegularizerKind::KlToOldPolicy:
      t.actor = -hp.alpha * categorical_kl(pi, *pi0);
      t.d_actor = categorical_kl_grad(pi, *pi0).d_p;
      scale(t.d_actor, -hp.alpha);
      break;
    case RegularizerKind::ReversedKlBonus:
    case RegularizerKind::ReversedKlReg:
      t.actor = -hp.alpha * categorical_kl(*pi0, pi);
      t.d_actor = categorical_kl_grad(*pi0, pi).d_q;
      scale(t.d_actor, -hp.alpha);
      break;
  }
  if (t.in_reward) t.reward = t.actor;
  return t;
}

RegularizerTerm regularizer_term(const HyperParams& hp, const DiagGaussian& pi, const DiagGaussian* pi0) {
  const auto k = hp.variant.kind;
  require_default(pi0, k);
  RegularizerTerm t;
  t.in_reward = regularizes_reward(k);
  const std::size_t d = pi.dim();
  t.d_actor.assign(2 * d, 0.0);
  auto put = [&](const std::vector<double>& dm, const std::vector<double>& ds, double s) {
    for (std::size_t i = 0; i < d; ++i) {
      if (!dm.empty()) t.d_actor[i] = s * dm[i];
      t.d_actor[d + i] = s * ds[i];
    }
  };
  switch (k) {
    case RegularizerKind::EntropyBonus:
      t.actor = hp.entropy_bonus * gaussian_entropy(pi);
      put({}, gaussian_entropy_grad(pi), hp.entropy_bonus);
      break;
    case RegularizerKind::EntropyReg:
      t.actor = hp.alpha * gaussian_entropy(pi);
      put({}, gaussian_entropy_grad(pi), hp.alpha);
      break;
    case RegularizerKind::KlBonus:
    case RegularizerKind::KlReg:
    case RegularizerKind::KlToOldPolicy: {
      t.actor = -hp.alpha * gaussian_kl(pi, *pi0);
      const auto g = gaussian_kl_grad(pi, *pi0);
      put(g.d_p_mean, g.d_p_std, -hp.alpha);
      break;
    }
    case RegularizerKind::ReversedKlBonus:
    case RegularizerKind::ReversedKlReg: {
      t.actor = -hp.alpha * gaussian_kl(*pi0, pi);
      const auto g = gaussian_kl_grad(*pi0, pi);
      put(g.d_q_mean, g.d_q_std, -hp.alpha);
      break;
    }
  }
  if (t.in_reward) t.reward = t.actor;
  return t;
}

double kl_per_step(const Categorical& pi, const Categorical& pi0) { return categorical_kl(pi, pi0); }
double kl_per_step(const DiagGaussian& pi, const DiagGaussian& pi0) { return gaussian_kl(pi, pi0); }

DistillTerm distill_term(RegularizerKind kind, const Categorical& pi, const Categorical& pi0) {
  DistillTerm t;
  if (reversed_kl(kind)) {
    t.value = categorical_kl(pi0, pi);
    t.d_default = categorical_kl_grad(pi0, pi).d_p;
  } else {
    t.value = categorical_kl(pi, pi0);
    t.d_default = categorical_kl_grad(pi, pi0).d_q;
  }
  return t;
}

DistillTerm distill_term(RegularizerKind kind, const DiagGaussian& pi, const DiagGaussian& pi0) {
  DistillTerm t;
  GaussianKlGrad g;
  const std::size_t d = pi.dim();
  t.d_default.assign(2 * d, 0.0);
  if (reversed_kl(kind)) {
    t.value = gaussian_kl(pi0, pi);
    g = gaussian_kl_grad(pi0, pi);
    for (std::size_t i = 0; i < d; ++i) {
      t.d_default[i] = g.d_p_mean[i];
      t.d_default[d + i] = g.d_p_std[i];
    }
  } else {
    t.value = gaussian_kl(pi, pi0);
    g = gaussian_kl_grad(pi, pi0);
    for (std::size_t i = 0; i < d; ++i) {
      t.d_default[i] = g.d_q_mean[i];
      t.d_default[d + i] = g.d_q_std[i];
    }
  }
  return t;
}

}  // namespace infoasym
