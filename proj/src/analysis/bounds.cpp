#include "infoasym/analysis/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "infoasym/errors.hpp"

namespace infoasym {

namespace {

double kl(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return INFINITY;
    s += p[i] * (std::log(p[i]) - std::log(q[i]));
  }
  return s;
}

void check_simplex(std::span<const double> p, double tol, const char* what) {
  double s = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw InvalidInput(std::string(what) + " has a negative entry");
    s += x;
  }
  if (std::abs(s - 1.0) > tol) throw InvalidInput(std::string(what) + " is not normalized");
}

std::vector<double> dirichlet(Rng& rng, std::size_t n) {
  // Dirichlet(1) via normalized exponentials.
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& x : p) {
    x = -std::log(1.0 - rng.uniform());
    s += x;
  }
  for (auto& x : p) x /= s;
  return p;
}

}  // namespace

void DiscreteJoint::validate(double tol) const {
  check_simplex(p_s, tol, "p(s)");
  if (pi_a_s.rows() != p_s.size()) throw InvalidInput("pi(a|s) needs one row per state");
  for (std::size_t s = 0; s < pi_a_s.rows(); ++s) check_simplex(pi_a_s.row(s), tol, "pi(a|s)");
  if (!has_latent()) return;
  check_simplex(pi0_z, tol, "pi0(z)");
  if (pi_z_s.rows() != p_s.size() || pi_z_s.cols() != pi0_z.size()) throw InvalidInput("pi(z|s) has the wrong shape");
  if (pi_a_z.rows() != pi0_z.size() || pi_a_z.cols() != pi_a_s.cols()) throw InvalidInput("pi(a|z) has the wrong shape");
  for (std::size_t s = 0; s < pi_z_s.rows(); ++s) check_simplex(pi_z_s.row(s), tol, "pi(z|s)");
  for (std::size_t z = 0; z < pi_a_z.rows(); ++z) check_simplex(pi_a_z.row(z), tol, "pi(a|z)");
  for (std::size_t s = 0; s < p_s.size(); ++s)
    for (std::size_t a = 0; a < pi_a_s.cols(); ++a) {
      double m = 0.0;
      for (std::size_t z = 0; z < pi0_z.size(); ++z) m += pi_z_s(s, z) * pi_a_z(z, a);
      if (std::abs(m - pi_a_s(s, a)) > tol) throw InvalidInput("pi(a|s) is not the latent mixture");
    }
}

std::vector<double> DiscreteJoint::action_marginal() const {
  std::vector<double> m(num_actions(), 0.0);
  for (std::size_t s = 0; s < num_states(); ++s)
    for (std::size_t a = 0; a < num_actions(); ++a) m[a] += p_s[s] * pi_a_s(s, a);
  return m;
}

DiscreteJoint random_joint(Rng& rng, std::size_t states, std::size_t actions, std::size_t latents) {
  if (states == 0 || actions == 0) throw InvalidInput("joint needs at least one state and action");
  DiscreteJoint j;
  j.p_s = dirichlet(rng, states);
  j.pi_a_s = Matrix(states, actions, 0.0);
  if (latents == 0) {
    for (std::size_t s = 0; s < states; ++s) {
      const auto r = dirichlet(rng, actions);
      std::copy(r.begin(), r.end(), j.pi_a_s.row(s).begin());
    }
    return j;
  }
  j.pi_z_s = Matrix(states, latents, 0.0);
  j.pi_a_z = Matrix(latents, actions, 0.0);
  for (std::size_t s = 0; s < states; ++s) {
    const auto r = dirichlet(rng, latents);
    std::copy(r.begin(), r.end(), j.pi_z_s.row(s).begin());
  }
  for (std::size_t z = 0; z < latents; ++z) {
    const auto r = dirichlet(rng, actions);
    std::copy(r.begin(), r.end(), j.pi_a_z.row(z).begin());
  }
  j.pi0_z = dirichlet(rng, latents);
  for (std::size_t s = 0; s < states; ++s)
    for (std::size_t a = 0; a < actions; ++a)
      for (std::size_t z = 0; z < latents; ++z) j.pi_a_s(s, a) += j.pi_z_s(s, z) * j.pi_a_z(z, a);
  return j;
}

MiBound mi_bound_check(const DiscreteJoint& j, std::span<const double> pi0_a) {
  j.validate(1e-9);
  if (pi0_a.size() != j.num_actions()) throw InvalidInput("pi0 has the wrong size");
  check_simplex(pi0_a, 1e-9, "pi0(a)");
  const auto marginal = j.action_marginal();
  MiBound r;
  for (std::size_t s = 0; s < j.num_states(); ++s) {
    if (j.p_s[s] == 0.0) continue;
    for (std::size_t a = 0; a < j.num_actions(); ++a) {
      const double joint = j.p_s[s] * j.pi_a_s(s, a);
      if (joint > 0.0) r.mi += joint * std::log(j.pi_a_s(s, a) / marginal[a]);
    }
    r.bound += j.p_s[s] * kl(j.pi_a_s.row(s), pi0_a);
  }
  r.marginal_kl = kl(marginal, pi0_a);
  return r;
}

LatentMiBound latent_mi_bound_check(const DiscreteJoint& j) {
  if (!j.has_latent()) throw InvalidInput("joint has no latent stack");
  j.validate(1e-9);
  std::vector<double> mixed(j.num_actions(), 0.0);
  for (std::size_t z = 0; z < j.pi0_z.size(); ++z)
    for (std::size_t a = 0; a < j.num_actions(); ++a) mixed[a] += j.pi0_z[z] * j.pi_a_z(z, a);
  const auto plain = mi_bound_check(j, mixed);
  LatentMiBound r;
  r.mi = plain.mi;
  r.action_bound = plain.bound;
  for (std::size_t s = 0; s < j.num_states(); ++s)
    if (j.p_s[s] > 0.0) r.latent_bound += j.p_s[s] * kl(j.pi_z_s.row(s), j.pi0_z);
  return r;
}

BoundSuiteReport run_bound_suite(std::size_t instances, std::uint64_t seed, double tol) {
  BoundSuiteReport rep;
  rep.instances = instances;
  rep.min_gap = rep.min_latent_gap = rep.min_latent_chain_gap = INFINITY;
  Rng rng(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t s = 2 + rng.below(7), a = 2 + rng.below(7), z = 2 + rng.below(5);
    const auto j = random_joint(rng, s, a);
    const auto pi0 = dirichlet(rng, a);
    const auto b = mi_bound_check(j, pi0);
    rep.min_gap = std::min(rep.min_gap, b.gap());
    rep.max_identity_error = std::max(rep.max_identity_error, std::abs(b.gap() - b.marginal_kl));

    const auto jl = random_joint(rng, s, a, z);
    const auto l = latent_mi_bound_check(jl);
    rep.min_latent_gap = std::min(rep.min_latent_gap, l.gap());
    rep.min_latent_chain_gap = std::min(rep.min_latent_chain_gap, l.latent_bound - l.action_bound);
  }
  if (instances == 0) rep.min_gap = rep.min_latent_gap = rep.min_latent_chain_gap = 0.0;
  rep.passed = rep.min_gap >= -tol && rep.max_identity_error <= tol && rep.min_latent_gap >= -tol &&
               rep.min_latent_chain_gap >= -tol;
  return rep;
}

}  // namespace infoasym
