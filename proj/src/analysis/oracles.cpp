#include "infoasym/analysis/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "infoasym/errors.hpp"

namespace infoasym {

namespace {

constexpr double kTruncation = 1e-10;

void check_policy(const TabularMdp& mdp, const PolicyTable& pi, std::size_t rows, const char* what) {
  if (pi.rows() != rows || pi.cols() != mdp.num_actions)
    throw InvalidInput(std::string(what) + " table has the wrong shape");
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t a = 0; a < pi.cols(); ++a) {
      if (!(pi(r, a) >= 0.0)) throw InvalidInput(std::string(what) + " has a negative entry");
      s += pi(r, a);
    }
    if (std::abs(s - 1.0) > 1e-9) throw InvalidInput(std::string(what) + " row does not sum to one");
  }
}

double row_kl(const PolicyTable& p, std::size_t pr, const PolicyTable& q, std::size_t qr) {
  double kl = 0.0;
  for (std::size_t a = 0; a < p.cols(); ++a) {
    const double pa = p(pr, a);
    if (pa <= 0.0) continue;
    if (q(qr, a) <= 0.0) return INFINITY;
    kl += pa * (std::log(pa) - std::log(q(qr, a)));
  }
  return kl;
}

double row_entropy(const PolicyTable& p, std::size_t r) {
  double h = 0.0;
  for (std::size_t a = 0; a < p.cols(); ++a)
    if (p(r, a) > 0.0) h -= p(r, a) * std::log(p(r, a));
  return h;
}

// Every state reaches a terminal state with positive probability under pi.
bool absorbing(const TabularMdp& mdp, const PolicyTable& pi) {
  const std::size_t n = mdp.num_states;
  std::vector<bool> reach(n, false);
  for (std::size_t s = 0; s < n; ++s) reach[s] = mdp.terminal[s];
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t s = 0; s < n; ++s) {
      if (reach[s]) continue;
      for (std::size_t a = 0; a < mdp.num_actions && !reach[s]; ++a) {
        if (pi(s, a) <= 0.0) continue;
        for (const auto& o : mdp.outcomes(s, a))
          if (o.prob > 0.0 && reach[o.next]) {
            reach[s] = true;
            changed = true;
            break;
          }
      }
    }
  }
  return std::all_of(reach.begin(), reach.end(), [](bool b) { return b; });
}

// Shared evaluation loop; `bonus(s)` is the per-state regularizer added to E_pi[Q].
template <class Bonus>
RegularizedValues evaluate(const TabularMdp& mdp, const PolicyTable& pi, double gamma, double tol, Bonus bonus) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidInput("gamma must lie in [0, 1]");
  if (gamma == 1.0 && !absorbing(mdp, pi))
    throw InvalidInput("gamma = 1 needs every state to reach a terminal state");
  const std::size_t n = mdp.num_states, na = mdp.num_actions;
  RegularizedValues out;
  out.q = Matrix(n, na, 0.0);
  out.v.assign(n, 0.0);
  std::vector<double> b(n, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    if (!mdp.terminal[s]) b[s] = bonus(s);
  const std::size_t max_iter = 1000000;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    double diff = 0.0;
    std::vector<double> nv(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      if (mdp.terminal[s]) continue;
      double v = b[s];
      for (std::size_t a = 0; a < na; ++a) {
        double q = mdp.reward(s, a);
        for (const auto& o : mdp.outcomes(s, a)) q += gamma * o.prob * out.v[o.next];
        out.q(s, a) = q;
        v += pi(s, a) * q;
      }
      nv[s] = v;
      diff = std::max(diff, std::abs(v - out.v[s]));
    }
    out.v = std::move(nv);
    out.iterations = it;
    if (diff < tol) break;
    if (it == max_iter) throw NumericError("regularized evaluation did not converge");
  }
  // Final Q consistent with the converged V.
  for (std::size_t s = 0; s < n; ++s) {
    if (mdp.terminal[s]) continue;
    for (std::size_t a = 0; a < na; ++a) {
      double q = mdp.reward(s, a);
      for (const auto& o : mdp.outcomes(s, a)) q += gamma * o.prob * out.v[o.next];
      out.q(s, a) = q;
    }
  }
  return out;
}

}  // namespace

double VisitationWeights::total() const noexcept { return std::accumulate(weight.begin(), weight.end(), 0.0); }

VisitationWeights discounted_visitation(const TabularMdp& mdp, const PolicyTable& pi, double gamma,
                                        std::size_t horizon) {
  check_policy(mdp, pi, mdp.num_states, "policy");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidInput("gamma must lie in [0, 1]");
  if (horizon == 0) {
    if (gamma >= 1.0) throw InvalidInput("an explicit horizon is required for gamma = 1");
    horizon = 1;
    for (double g = gamma; g >= kTruncation; g *= gamma) ++horizon;
  }
  const std::size_t n = mdp.num_states;
  VisitationWeights d;
  d.horizon = horizon;
  d.weight.assign(n, 0.0);
  std::vector<double> p = mdp.initial;
  double disc = 1.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t s = 0; s < n; ++s) d.weight[s] += disc * p[s];
    disc *= gamma;
    if (disc == 0.0) break;
    std::vector<double> next(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      if (p[s] == 0.0) continue;
      if (mdp.terminal[s]) {
        next[s] += p[s];
        continue;
      }
      for (std::size_t a = 0; a < mdp.num_actions; ++a) {
        const double pa = p[s] * pi(s, a);
        if (pa == 0.0) continue;
        for (const auto& o : mdp.outcomes(s, a)) next[o.next] += pa * o.prob;
      }
    }
    p = std::move(next);
  }
  return d;
}

DefaultPolicyOracle optimal_default_policy(const TabularMdp& mdp, const PolicyTable& pi, const VisitationWeights& d) {
  check_policy(mdp, pi, mdp.num_states, "policy");
  if (d.weight.size() != mdp.num_states) throw InvalidInput("visitation weights do not match the MDP");
  if (mdp.mask_value.size() != mdp.num_states) throw InvalidInput("MDP has no mask map");
  const std::size_t g = mdp.num_mask_values;
  DefaultPolicyOracle out;
  out.pi0 = Matrix(g, mdp.num_actions, 0.0);
  out.group_weight.assign(g, 0.0);
  out.unvisited.assign(g, false);
  for (std::size_t s = 0; s < mdp.num_states; ++s) {
    if (mdp.terminal[s]) continue;
    const std::size_t m = mdp.mask_value[s];
    out.group_weight[m] += d.weight[s];
    for (std::size_t a = 0; a < mdp.num_actions; ++a) out.pi0(m, a) += d.weight[s] * pi(s, a);
  }
  for (std::size_t m = 0; m < g; ++m) {
    if (out.group_weight[m] <= 0.0) {
      out.unvisited[m] = true;
      for (std::size_t a = 0; a < mdp.num_actions; ++a) out.pi0(m, a) = 1.0 / static_cast<double>(mdp.num_actions);
      continue;
    }
    for (std::size_t a = 0; a < mdp.num_actions; ++a) out.pi0(m, a) /= out.group_weight[m];
  }
  return out;
}

DefaultPolicyOracle optimal_default_policy(const TabularMdp& mdp, const PolicyTable& pi, double gamma) {
  return optimal_default_policy(mdp, pi, discounted_visitation(mdp, pi, gamma));
}

double distillation_objective(const TabularMdp& mdp, const PolicyTable& pi, const PolicyTable& q,
                              const VisitationWeights& d) {
  double total = 0.0;
  for (std::size_t s = 0; s < mdp.num_states; ++s) {
    if (mdp.terminal[s] || d.weight[s] == 0.0) continue;
    total += d.weight[s] * row_kl(pi, s, q, mdp.mask_value[s]);
  }
  return total;
}

RegularizedValues regularized_dp_eval(const TabularMdp& mdp, const PolicyTable& pi, const PolicyTable& pi0,
                                      double alpha, double gamma, double tol) {
  check_policy(mdp, pi, mdp.num_states, "policy");
  check_policy(mdp, pi0, mdp.num_mask_values, "default policy");
  if (mdp.mask_value.size() != mdp.num_states) throw InvalidInput("MDP has no mask map");
  return evaluate(mdp, pi, gamma, tol,
                  [&](std::size_t s) { return alpha == 0.0 ? 0.0 : -alpha * row_kl(pi, s, pi0, mdp.mask_value[s]); });
}

RegularizedValues entropy_dp_eval(const TabularMdp& mdp, const PolicyTable& pi, double alpha, double gamma,
                                  double tol) {
  check_policy(mdp, pi, mdp.num_states, "policy");
  return evaluate(mdp, pi, gamma, tol, [&](std::size_t s) { return alpha * row_entropy(pi, s); });
}

HistoryDefaultOracle optimal_history_default_policy(const TabularMdp& mdp, const PolicyTable& pi, double gamma,
                                                    std::size_t horizon) {
  check_policy(mdp, pi, mdp.num_states, "policy");
  if (horizon == 0 || horizon > 6) throw InvalidInput("history enumeration supports horizons 1..6");
  if (mdp.mask_value.size() != mdp.num_states) throw InvalidInput("MDP has no mask map");
  HistoryDefaultOracle out;
  // Depth-first over (state, masked history, path probability, discount).
  struct Node {
    std::size_t state;
    std::vector<std::size_t> history;
    double prob;
    double disc;
    std::size_t t;
  };
  std::vector<Node> stack;
  for (std::size_t s = 0; s < mdp.num_states; ++s)
    if (mdp.initial[s] > 0.0) stack.push_back({s, {mdp.mask_value[s]}, mdp.initial[s], 1.0, 0});
  while (!stack.empty()) {
    Node n = std::move(stack.back());
    stack.pop_back();
    if (mdp.terminal[n.state]) continue;
    const double w = n.disc * n.prob;
    auto& row = out.pi0[n.history];
    if (row.empty()) row.assign(mdp.num_actions, 0.0);
    out.weight[n.history] += w;
    for (std::size_t a = 0; a < mdp.num_actions; ++a) row[a] += w * pi(n.state, a);
    if (n.t + 1 >= horizon) continue;
    for (std::size_t a = 0; a < mdp.num_actions; ++a) {
      if (pi(n.state, a) <= 0.0) continue;
      for (const auto& o : mdp.outcomes(n.state, a)) {
        if (o.prob <= 0.0) continue;
        auto h = n.history;
        h.push_back(a);
        h.push_back(mdp.mask_value[o.next]);
        stack.push_back({o.next, std::move(h), n.prob * pi(n.state, a) * o.prob, n.disc * gamma, n.t + 1});
      }
    }
  }
  for (auto& [h, row] : out.pi0) {
    const double w = out.weight[h];
    for (auto& x : row) x = w > 0.0 ? x / w : 1.0 / static_cast<double>(row.size());
  }
  return out;
}

}  // namespace infoasym
