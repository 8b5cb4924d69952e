#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "infoasym/numerics/rng.hpp"

namespace infoasym {

/// Distribution over |A| >= 2 discrete actions, parameterized by logits.
/// Log-probabilities are normalized in log space with max subtraction.
/// A logit of -inf is a hard zero; 0 * log 0 is taken as 0 everywhere.
class Categorical {
 public:
  static Categorical from_logits(std::span<const double> logits);
  static Categorical uniform(std::size_t n);

  std::size_t size() const noexcept { return log_probs_.size(); }
  std::span<const double> logits() const noexcept { return logits_; }
  std::span<const double> log_probs() const noexcept { return log_probs_; }
  std::span<const double> probs() const noexcept { return probs_; }

  double prob(std::size_t a) const;
  double log_prob(std::size_t a) const;

 private:
  std::vector<double> logits_;
  std::vector<double> log_probs_;
  std::vector<double> probs_;
};

double categorical_kl(const Categorical& p, const Categorical& q);
double categorical_entropy(const Categorical& p);

/// d KL(p||q) / d logits of p and q.
struct CategoricalKlGrad {
  std::vector<double> d_p;
  std::vector<double> d_q;
};
CategoricalKlGrad categorical_kl_grad(const Categorical& p, const Categorical& q);
/// d H(p) / d logits.
std::vector<double> categorical_entropy_grad(const Categorical& p);
/// d log p(a) / d logits.
std::vector<double> categorical_log_prob_grad(const Categorical& p, std::size_t a);

std::size_t sample(const Categorical& p, Rng& rng);

/// Diagonal Gaussian in the pre-squash action coordinate.
struct DiagGaussian {
  std::vector<double> mean;
  std::vector<double> stddev;

  std::size_t dim() const noexcept { return mean.size(); }
};

double gaussian_kl(const DiagGaussian& p, const DiagGaussian& q);
double gaussian_entropy(const DiagGaussian& p);
double log_prob(const DiagGaussian& p, std::span<const double> x);

struct GaussianKlGrad {
  std::vector<double> d_p_mean, d_p_std, d_q_mean, d_q_std;
};
GaussianKlGrad gaussian_kl_grad(const DiagGaussian& p, const DiagGaussian& q);

struct GaussianLogProbGrad {
  std::vector<double> d_mean, d_std, d_x;
};
GaussianLogProbGrad gaussian_log_prob_grad(const DiagGaussian& p, std::span<const double> x);
/// d H / d stddev.
std::vector<double> gaussian_entropy_grad(const DiagGaussian& p);

std::vector<double> sample(const DiagGaussian& p, Rng& rng);

/// a = mean + stddev * noise, with the noise kept for gradient flow.
struct ReparamSample {
  std::vector<double> action;
  std::vector<double> noise;
};
ReparamSample rsample(const DiagGaussian& p, Rng& rng);
std::vector<double> reparam_action(const DiagGaussian& p, std::span<const double> noise);

/// Bounds for the squashed stddev: sigma in [kMinSigma, sigma_max].
inline constexpr double kMinSigma = 0.1;

struct SquashSpec {
  double sigma_max = 1.0;
};

/// Gaussian head produced from raw network outputs:
///   mean = tanh(raw_mean), stddev = 0.1 + (sigma_max - 0.1) * sigmoid(raw_log_sigma).
struct SquashedGaussian {
  DiagGaussian dist;
  std::vector<double> raw_mean;
  std::vector<double> raw_log_sigma;
  SquashSpec spec;

  /// Chain rule back to the raw heads; the result is laid out [d_raw_mean..., d_raw_log_sigma...].
  std::vector<double> backward(std::span<const double> d_mean, std::span<const double> d_std) const;
};

SquashedGaussian squash_head(std::span<const double> raw_mean, std::span<const double> raw_log_sigma,
                             SquashSpec spec = {});
/// Splits a network output of length 2d into (raw_mean, raw_log_sigma) and squashes it.
SquashedGaussian squash_head(std::span<const double> raw_output, SquashSpec spec = {});

}  // namespace infoasym
