#include "infoasym/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "infoasym/errors.hpp"

namespace infoasym {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw InvalidInput(std::string(what) + ": dimension mismatch");
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Categorical Categorical::from_logits(std::span<const double> logits) {
  if (logits.size() < 2) throw InvalidInput("categorical needs at least two actions");
  Categorical c;
  c.logits_.assign(logits.begin(), logits.end());
  double max_logit = kNegInf;
  for (double z : logits) {
    if (std::isnan(z) || z == std::numeric_limits<double>::infinity())
      throw InvalidInput("categorical logits must be finite or -inf");
    max_logit = std::max(max_logit, z);
  }
  if (max_logit == kNegInf) throw InvalidInput("categorical logits are all -inf");
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - max_logit);
  const double log_norm = max_logit + std::log(sum);
  c.log_probs_.resize(logits.size());
  c.probs_.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    c.log_probs_[i] = logits[i] == kNegInf ? kNegInf : logits[i] - log_norm;
    c.probs_[i] = std::exp(c.log_probs_[i]);
  }
  return c;
}

Categorical Categorical::uniform(std::size_t n) {
  std::vector<double> zeros(n, 0.0);
  return from_logits(zeros);
}

double Categorical::prob(std::size_t a) const {
  if (a >= size()) throw InvalidInput("action index out of support");
  return probs_[a];
}

double Categorical::log_prob(std::size_t a) const {
  if (a >= size()) throw InvalidInput("action index out of support");
  return log_probs_[a];
}

double categorical_kl(const Categorical& p, const Categorical& q) {
  require_same_size(p.size(), q.size(), "categorical_kl");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.probs()[i];
    if (pi == 0.0) continue;
    kl += pi * (p.log_probs()[i] - q.log_probs()[i]);
  }
  return kl;
}

double categorical_entropy(const Categorical& p) {
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.probs()[i] > 0.0) h -= p.probs()[i] * p.log_probs()[i];
  return h;
}

CategoricalKlGrad categorical_kl_grad(const Categorical& p, const Categorical& q) {
  require_same_size(p.size(), q.size(), "categorical_kl_grad");
  const double kl = categorical_kl(p, q);
  CategoricalKlGrad g;
  g.d_p.resize(p.size());
  g.d_q.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.probs()[i];
    g.d_p[i] = pi == 0.0 ? 0.0 : pi * ((p.log_probs()[i] - q.log_probs()[i]) - kl);
    g.d_q[i] = q.probs()[i] - pi;
  }
  return g;
}

std::vector<double> categorical_entropy_grad(const Categorical& p) {
  const double h = categorical_entropy(p);
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.probs()[i];
    g[i] = pi == 0.0 ? 0.0 : -pi * (p.log_probs()[i] + h);
  }
  return g;
}

std::vector<double> categorical_log_prob_grad(const Categorical& p, std::size_t a) {
  if (a >= p.size()) throw InvalidInput("action index out of support");
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) g[i] = (i == a ? 1.0 : 0.0) - p.probs()[i];
  return g;
}

std::size_t sample(const Categorical& p, Rng& rng) { return rng.categorical(p.probs()); }

double gaussian_kl(const DiagGaussian& p, const DiagGaussian& q) {
  require_same_size(p.dim(), q.dim(), "gaussian_kl");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double sp = p.stddev[i];
    const double sq = q.stddev[i];
    const double dm = p.mean[i] - q.mean[i];
    kl += std::log(sq / sp) + (sp * sp + dm * dm) / (2.0 * sq * sq) - 0.5;
  }
  return kl;
}

double gaussian_entropy(const DiagGaussian& p) {
  double h = 0.0;
  for (double s : p.stddev) h += std::log(s) + 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
  return h;
}

double log_prob(const DiagGaussian& p, std::span<const double> x) {
  require_same_size(p.dim(), x.size(), "gaussian log_prob");
  double lp = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double z = (x[i] - p.mean[i]) / p.stddev[i];
    lp += -0.5 * z * z - std::log(p.stddev[i]) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  return lp;
}

GaussianKlGrad gaussian_kl_grad(const DiagGaussian& p, const DiagGaussian& q) {
  require_same_size(p.dim(), q.dim(), "gaussian_kl_grad");
  const std::size_t d = p.dim();
  GaussianKlGrad g{std::vector<double>(d), std::vector<double>(d), std::vector<double>(d), std::vector<double>(d)};
  for (std::size_t i = 0; i < d; ++i) {
    const double sp = p.stddev[i];
    const double sq = q.stddev[i];
    const double dm = p.mean[i] - q.mean[i];
    const double sq2 = sq * sq;
    g.d_p_mean[i] = dm / sq2;
    g.d_q_mean[i] = -dm / sq2;
    g.d_p_std[i] = -1.0 / sp + sp / sq2;
    g.d_q_std[i] = 1.0 / sq - (sp * sp + dm * dm) / (sq2 * sq);
  }
  return g;
}

GaussianLogProbGrad gaussian_log_prob_grad(const DiagGaussian& p, std::span<const double> x) {
  require_same_size(p.dim(), x.size(), "gaussian_log_prob_grad");
  const std::size_t d = p.dim();
  GaussianLogProbGrad g{std::vector<double>(d), std::vector<double>(d), std::vector<double>(d)};
  for (std::size_t i = 0; i < d; ++i) {
    const double s = p.stddev[i];
    const double diff = x[i] - p.mean[i];
    g.d_mean[i] = diff / (s * s);
    g.d_std[i] = diff * diff / (s * s * s) - 1.0 / s;
    g.d_x[i] = -diff / (s * s);
  }
  return g;
}

std::vector<double> gaussian_entropy_grad(const DiagGaussian& p) {
  std::vector<double> g(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) g[i] = 1.0 / p.stddev[i];
  return g;
}

std::vector<double> sample(const DiagGaussian& p, Rng& rng) { return rsample(p, rng).action; }

ReparamSample rsample(const DiagGaussian& p, Rng& rng) {
  ReparamSample s;
  s.noise.resize(p.dim());
  for (auto& e : s.noise) e = rng.normal();
  s.action = reparam_action(p, s.noise);
  return s;
}

std::vector<double> reparam_action(const DiagGaussian& p, std::span<const double> noise) {
  require_same_size(p.dim(), noise.size(), "reparam_action");
  std::vector<double> a(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) a[i] = p.mean[i] + p.stddev[i] * noise[i];
  return a;
}

SquashedGaussian squash_head(std::span<const double> raw_mean, std::span<const double> raw_log_sigma,
                             SquashSpec spec) {
  require_same_size(raw_mean.size(), raw_log_sigma.size(), "squash_head");
  if (!(spec.sigma_max > kMinSigma)) throw InvalidInput("sigma_max must exceed 0.1");
  SquashedGaussian h;
  h.spec = spec;
  h.raw_mean.assign(raw_mean.begin(), raw_mean.end());
  h.raw_log_sigma.assign(raw_log_sigma.begin(), raw_log_sigma.end());
  h.dist.mean.resize(raw_mean.size());
  h.dist.stddev.resize(raw_mean.size());
  for (std::size_t i = 0; i < raw_mean.size(); ++i) {
    h.dist.mean[i] = std::tanh(raw_mean[i]);
    h.dist.stddev[i] = std::clamp(kMinSigma + (spec.sigma_max - kMinSigma) * sigmoid(raw_log_sigma[i]), kMinSigma,
                                  spec.sigma_max);
  }
  return h;
}

SquashedGaussian squash_head(std::span<const double> raw_output, SquashSpec spec) {
  if (raw_output.size() % 2 != 0) throw InvalidInput("gaussian head output must have even length");
  const std::size_t d = raw_output.size() / 2;
  return squash_head(raw_output.subspan(0, d), raw_output.subspan(d, d), spec);
}

std::vector<double> SquashedGaussian::backward(std::span<const double> d_mean, std::span<const double> d_std) const {
  const std::size_t d = dist.dim();
  require_same_size(d_mean.size(), d, "squash backward");
  require_same_size(d_std.size(), d, "squash backward");
  std::vector<double> g(2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    const double m = dist.mean[i];
    g[i] = d_mean[i] * (1.0 - m * m);
    const double s = sigmoid(raw_log_sigma[i]);
    g[d + i] = d_std[i] * (spec.sigma_max - kMinSigma) * s * (1.0 - s);
  }
  return g;
}

}  // namespace infoasym
