#include "maqa/longrun_ratio.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "maqa/graph.hpp"
#include "maqa/lp.hpp"

namespace maqa {

namespace {

constexpr std::size_t kLpRowLimit = 500;

RatioSolution solve_ratio_pi(const RatioMdp& mdp, std::vector<int> policy);

// Simplex on the stated program yields the optimal k; the per-state-tight
// witness is then produced by policy evaluation seeded with the tightest
// constraints (a vertex may leave transient states slack in every row).
RatioSolution solve_ratio_lp(const RatioMdp& mdp) {
  const int n = mdp.num_states;
  // Variable 0 is k, variables 1..n are the x_s; all free.
  LpProblem lp;
  lp.maximize = true;
  lp.objective.assign(n + 1, 0.0);
  lp.objective[0] = 1.0;
  lp.free_vars.assign(n + 1, 1);
  for (int s = 0; s < n; ++s) {
    for (const auto& act : mdp.actions[s]) {
      LpConstraint c;
      c.coeffs.assign(n + 1, 0.0);
      c.coeffs[0] = act.c2;
      c.coeffs[1 + s] += 1.0;
      for (const auto& [t, p] : act.dist.entries) c.coeffs[1 + t] -= p;
      c.rel = Relation::Le;
      c.rhs = act.c1;
      lp.constraints.push_back(std::move(c));
    }
  }

  LpSolution sol = simplex_solve(lp);
  if (sol.status != LpStatus::Optimal)
    throw ConvergenceError("long-run ratio LP is not optimal (malformed instance)");
  double k_lp = sol.x[0];

  std::vector<int> greedy(n, 0);
  for (int s = 0; s < n; ++s) {
    double best_slack = std::numeric_limits<double>::infinity();
    for (int a = 0; a < static_cast<int>(mdp.actions[s].size()); ++a) {
      const auto& act = mdp.actions[s][a];
      double rhs = act.c1 - k_lp * act.c2;
      for (const auto& [t, p] : act.dist.entries) rhs += p * sol.x[1 + t];
      double slack = rhs - sol.x[1 + s];
      if (slack < best_slack - 1e-12) {
        best_slack = slack;
        greedy[s] = a;
      }
    }
  }
  RatioSolution out = solve_ratio_pi(mdp, std::move(greedy));
  if (std::abs(out.ratio - k_lp) > 1e-6)
    throw ConvergenceError("ratio LP and its evaluation disagree");
  out.engine = "lp";
  return out;
}

// Bottom SCCs (no edge leaving the component) of the chain induced by a
// stationary deterministic policy.
std::vector<std::vector<int>> bottom_sccs(const RatioMdp& mdp, const std::vector<int>& policy) {
  const int n = mdp.num_states;
  std::vector<std::vector<StateIdx>> adj(n);
  for (int s = 0; s < n; ++s) {
    for (const auto& [t, p] : mdp.actions[s][policy[s]].dist.entries) adj[s].push_back(t);
    std::sort(adj[s].begin(), adj[s].end());
    adj[s].erase(std::unique(adj[s].begin(), adj[s].end()), adj[s].end());
  }
  auto sccs = scc_decompose(adj);
  std::vector<int> comp_of(n, -1);
  for (int c = 0; c < static_cast<int>(sccs.size()); ++c)
    for (StateIdx s : sccs[c]) comp_of[s] = c;
  std::vector<std::vector<int>> bottoms;
  for (int c = 0; c < static_cast<int>(sccs.size()); ++c) {
    bool leaves = false;
    for (StateIdx s : sccs[c])
      for (StateIdx t : adj[s]) leaves |= (comp_of[t] != c);
    if (!leaves) bottoms.emplace_back(sccs[c].begin(), sccs[c].end());
  }
  return bottoms;
}

// Ratio of one irreducible recurrent class under a fixed policy, via its
// stationary distribution.
double class_ratio(const RatioMdp& mdp, const std::vector<int>& policy, const std::vector<int>& cls) {
  const int m = static_cast<int>(cls.size());
  std::vector<int> local(mdp.num_states, -1);
  for (int i = 0; i < m; ++i) local[cls[i]] = i;

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  // (P^T - I) pi = 0 with the last row replaced by sum(pi) = 1.
  for (int i = 0; i < m; ++i) {
    int s = cls[i];
    for (const auto& [t, p] : mdp.actions[s][policy[s]].dist.entries) {
      int j = local[t];
      if (j < 0) throw ConvergenceError("recurrent class is not closed");
      if (j < m - 1) trip.emplace_back(j, i, p);
    }
    if (i < m - 1) trip.emplace_back(i, i, -1.0);
    trip.emplace_back(m - 1, i, 1.0);
  }
  rhs[m - 1] = 1.0;
  Eigen::SparseMatrix<double> mat(m, m);
  mat.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(mat);
  if (lu.info() != Eigen::Success)
    throw ConvergenceError("steady-state solve failed on a recurrent class");
  Eigen::VectorXd pi = lu.solve(rhs);

  double num = 0.0, den = 0.0;
  for (int i = 0; i < m; ++i) {
    const auto& act = mdp.actions[cls[i]][policy[cls[i]]];
    num += pi[i] * act.c1;
    den += pi[i] * act.c2;
  }
  if (den <= 0.0) throw ConvergenceError("zero time cost on a recurrent class (Zeno instance)");
  return num / den;
}

// Steers every state outside `cls` toward it: pick actions along shortest
// branch distances, which makes the class the unique recurrent one.
void redirect_toward(const RatioMdp& mdp, const std::vector<int>& cls, std::vector<int>& policy) {
  const int n = mdp.num_states;
  std::vector<int> dist(n, -1);
  std::vector<int> choice(n, -1);
  std::deque<int> frontier;
  for (int s : cls) {
    dist[s] = 0;
    frontier.push_back(s);
  }
  bool grew = true;
  while (grew) {
    grew = false;
    for (int s = 0; s < n; ++s) {
      if (dist[s] >= 0) continue;
      int best_a = -1, best_d = std::numeric_limits<int>::max();
      for (int a = 0; a < static_cast<int>(mdp.actions[s].size()); ++a)
        for (const auto& [t, p] : mdp.actions[s][a].dist.entries)
          if (dist[t] >= 0 && dist[t] < best_d) {
            best_d = dist[t];
            best_a = a;
          }
      if (best_a >= 0) {
        dist[s] = best_d + 1;
        choice[s] = best_a;
        grew = true;
      }
    }
  }
  for (int s = 0; s < n; ++s)
    if (dist[s] > 0 && choice[s] >= 0) policy[s] = choice[s];
}

struct Evaluation {
  double ratio = 0.0;
  std::vector<double> bias;
};

// Unichain policy evaluation: solve h_s + k*c2 = c1 + sum P h with h(0) = 0.
bool evaluate_unichain(const RatioMdp& mdp, const std::vector<int>& policy, Evaluation& ev) {
  const int n = mdp.num_states;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs(n + 1);
  for (int s = 0; s < n; ++s) {
    const auto& act = mdp.actions[s][policy[s]];
    trip.emplace_back(s, s, 1.0);
    for (const auto& [t, p] : act.dist.entries) trip.emplace_back(s, t, -p);
    trip.emplace_back(s, n, act.c2);
    rhs[s] = act.c1;
  }
  trip.emplace_back(n, 0, 1.0);  // h(s_ref) = 0
  rhs[n] = 0.0;

  Eigen::SparseMatrix<double> mat(n + 1, n + 1);
  mat.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(mat);
  if (lu.info() != Eigen::Success) return false;
  Eigen::VectorXd z = lu.solve(rhs);
  if (lu.info() != Eigen::Success) return false;
  double resid = (mat * z - rhs).cwiseAbs().maxCoeff();
  if (!(resid < 1e-7)) return false;

  ev.bias.assign(n, 0.0);
  for (int s = 0; s < n; ++s) ev.bias[s] = z[s];
  ev.ratio = z[n];
  return true;
}

RatioSolution solve_ratio_pi(const RatioMdp& mdp, std::vector<int> policy) {
  const int n = mdp.num_states;
  Evaluation ev;
  for (int round = 0; round < 1000; ++round) {
    bool unichain_ok = false;
    auto bottoms = bottom_sccs(mdp, policy);
    if (bottoms.size() == 1) unichain_ok = evaluate_unichain(mdp, policy, ev);
    if (!unichain_ok) {
      // Multichain (or numerically degenerate) policy: keep the recurrent
      // class with the best ratio and steer everything else into it.
      int best = 0;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int c = 0; c < static_cast<int>(bottoms.size()); ++c) {
        double r = class_ratio(mdp, policy, bottoms[c]);
        if (r < best_ratio - 1e-15) {
          best_ratio = r;
          best = c;
        }
      }
      redirect_toward(mdp, bottoms[best], policy);
      if (!evaluate_unichain(mdp, policy, ev))
        throw ConvergenceError("ratio policy evaluation failed after unichain repair");
    }

    // Greedy improvement against the current (ratio, bias); the incumbent
    // action only loses to a strictly better one.
    bool changed = false;
    for (int s = 0; s < n; ++s) {
      auto q_value = [&](int a) {
        const auto& act = mdp.actions[s][a];
        double q = act.c1 - ev.ratio * act.c2;
        for (const auto& [t, p] : act.dist.entries) q += p * ev.bias[t];
        return q;
      };
      double current = q_value(policy[s]);
      int best_a = policy[s];
      double best_q = current;
      for (int a = 0; a < static_cast<int>(mdp.actions[s].size()); ++a) {
        double q = q_value(a);
        if (q < best_q - 1e-10) {
          best_q = q;
          best_a = a;
        }
      }
      if (best_a != policy[s] && best_q < current - 1e-10) {
        policy[s] = best_a;
        changed = true;
      }
    }
    if (!changed) {
      RatioSolution out;
      out.ratio = ev.ratio;
      out.witness = ev.bias;
      out.policy = policy;
      out.engine = "pi";
      return out;
    }
  }
  throw ConvergenceError("ratio policy iteration did not settle");
}

}  // namespace

double ratio_certificate_slack(const RatioMdp& mdp, const RatioSolution& sol) {
  double worst = 0.0;
  for (int s = 0; s < mdp.num_states; ++s) {
    for (const auto& act : mdp.actions[s]) {
      double rhs = act.c1 - sol.ratio * act.c2;
      for (const auto& [t, p] : act.dist.entries) rhs += p * sol.witness[t];
      worst = std::max(worst, sol.witness[s] - rhs);
    }
  }
  return worst;
}

RatioSolution longrun_ratio_min(const RatioMdp& mdp, RatioEngine engine) {
  for (int s = 0; s < mdp.num_states; ++s)
    if (mdp.actions[s].empty())
      throw ConvergenceError("ratio MDP state without actions");
  if (engine == RatioEngine::Auto)
    engine = mdp.row_count() <= kLpRowLimit ? RatioEngine::Lp : RatioEngine::PolicyIteration;
  RatioSolution sol = engine == RatioEngine::Lp
                          ? solve_ratio_lp(mdp)
                          : solve_ratio_pi(mdp, std::vector<int>(mdp.num_states, 0));
  if (ratio_certificate_slack(mdp, sol) > 1e-6)
    throw ConvergenceError("ratio solution failed its optimality certificate");
  return sol;
}

}  // namespace maqa
