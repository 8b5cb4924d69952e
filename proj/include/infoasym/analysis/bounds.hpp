#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "infoasym/numerics/matrix.hpp"
#include "infoasym/numerics/rng.hpp"

namespace infoasym {

/// p(s), pi(a|s) and optionally a latent stack pi(z|s), pi(a|z), pi0(z).
/// When the stack is present pi(a|s) must equal sum_z pi(a|z) pi(z|s).
struct DiscreteJoint {
  std::vector<double> p_s;
  Matrix pi_a_s;  // S x A
  Matrix pi_z_s;  // S x Z
  Matrix pi_a_z;  // Z x A
  std::vector<double> pi0_z;

  bool has_latent() const noexcept { return !pi0_z.empty(); }
  std::size_t num_states() const noexcept { return p_s.size(); }
  std::size_t num_actions() const noexcept { return pi_a_s.cols(); }
  /// Throws InvalidInput unless every distribution is normalized within tol.
  void validate(double tol = 1e-12) const;
  std::vector<double> action_marginal() const;
};

/// Random joint with Dirichlet(1) rows; a latent stack is added when z > 0.
DiscreteJoint random_joint(Rng& rng, std::size_t states, std::size_t actions, std::size_t latents = 0);

struct MiBound {
  double mi = 0.0;           // MI[A; S]
  double bound = 0.0;        // E_p(s) KL(pi(.|s) || pi0)
  double marginal_kl = 0.0;  // KL(pi(a) || pi0)

  double gap() const noexcept { return bound - mi; }
};

MiBound mi_bound_check(const DiscreteJoint& j, std::span<const double> pi0_a);

struct LatentMiBound {
  double mi = 0.0;            // MI[A; S]
  double action_bound = 0.0;  // E_p(s) KL(pi(a|s) || sum_z pi(a|z) pi0(z))
  double latent_bound = 0.0;  // E_p(s) KL(pi(z|s) || pi0(z))

  double gap() const noexcept { return latent_bound - mi; }
};

LatentMiBound latent_mi_bound_check(const DiscreteJoint& j);

struct BoundSuiteReport {
  std::size_t instances = 0;
  double min_gap = 0.0;                 // min over instances of bound - mi
  double max_identity_error = 0.0;      // max |gap - KL(marginal || pi0)|
  double min_latent_gap = 0.0;          // min of latent_bound - mi
  double min_latent_chain_gap = 0.0;    // min of latent_bound - action_bound
  bool passed = false;
};

/// Seeded random instances of both checks; passes when every gap >= -tol and the
/// gap identity holds within tol.
BoundSuiteReport run_bound_suite(std::size_t instances, std::uint64_t seed, double tol = 1e-9);

}  // namespace infoasym
