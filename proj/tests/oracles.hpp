#pragma once

// Test-only oracles, independent of the library's solver paths: brute-force
// graph algorithms, dense linear-algebra evaluations of fixed policies, and
// random model generators with structural guarantees.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "maqa/model.hpp"

namespace oracles {

using maqa::Distribution;
using maqa::GoalSet;
using maqa::MarkovAutomaton;
using maqa::StateIdx;

using Rng = std::mt19937;

inline int pick(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}
inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Distribution random_distribution(Rng& rng, const std::vector<StateIdx>& candidates) {
  int k = pick(rng, 1, std::min<int>(3, static_cast<int>(candidates.size())));
  std::vector<StateIdx> targets = candidates;
  std::shuffle(targets.begin(), targets.end(), rng);
  targets.resize(k);
  std::vector<double> w(k);
  double total = 0.0;
  for (double& x : w) total += x = uniform(rng, 0.1, 1.0);
  std::vector<std::pair<StateIdx, double>> entries;
  for (int i = 0; i < k; ++i) entries.emplace_back(targets[i], w[i] / total);
  return maqa::make_distribution(std::move(entries));
}

// Random closed MA without probabilistic cycles: tau edges only go to
// Markovian states or to higher-index states, so every cycle passes through a
// Markovian state. `strongly_connected` threads a ring through all states
// (endpoints of the ring are forced Markovian).
inline MarkovAutomaton random_nonzeno_ma(Rng& rng, int n, bool strongly_connected) {
  MarkovAutomaton ma;
  ma.resize(n);
  std::vector<bool> markovian(n);
  for (int s = 0; s < n; ++s) markovian[s] = pick(rng, 0, 1) == 0;
  markovian[0] = true;
  markovian[n - 1] = true;

  std::vector<StateIdx> all(n);
  for (int s = 0; s < n; ++s) all[s] = s;
  for (int s = 0; s < n; ++s) {
    if (markovian[s]) {
      int edges = pick(rng, 1, 3);
      for (int e = 0; e < edges; ++e)
        ma.markov_transitions[s].push_back({static_cast<StateIdx>(pick(rng, 0, n - 1)),
                                            uniform(rng, 0.2, 4.0)});
      if (strongly_connected)
        ma.markov_transitions[s].push_back({static_cast<StateIdx>((s + 1) % n), uniform(rng, 0.2, 4.0)});
    } else {
      std::vector<StateIdx> candidates;
      for (int t = 0; t < n; ++t)
        if (markovian[t] || t > s) candidates.push_back(t);
      int acts = pick(rng, 1, 2);
      for (int a = 0; a < acts; ++a)
        ma.prob_transitions[s].push_back({maqa::kTau, random_distribution(rng, candidates)});
      if (strongly_connected) {
        // Ring edge: next state if allowed, otherwise any Markovian state.
        StateIdx next = (s + 1) % n;
        if (!markovian[next] && next <= s) next = 0;
        ma.prob_transitions[s].push_back({maqa::kTau, Distribution::dirac(next)});
      }
    }
  }
  for (int s = 0; s < n; ++s) ma.state_names.push_back("s" + std::to_string(s));
  return ma;
}

// O(n^3) transitive closure; SCCs as mutual-reachability classes.
inline std::vector<std::set<StateIdx>> closure_sccs(const std::vector<std::vector<StateIdx>>& adj) {
  int n = static_cast<int>(adj.size());
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (int s = 0; s < n; ++s)
    for (StateIdx t : adj[s]) reach[s][t] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  std::vector<bool> assigned(n, false);
  std::vector<std::set<StateIdx>> sccs;
  for (int s = 0; s < n; ++s) {
    if (assigned[s]) continue;
    std::set<StateIdx> comp{s};
    for (int t = 0; t < n; ++t)
      if (t != s && reach[s][t] && reach[t][s]) comp.insert(t);
    for (StateIdx t : comp) assigned[t] = true;
    sccs.push_back(std::move(comp));
  }
  return sccs;
}

// Plain value iteration for reachability probabilities, used as the numeric
// oracle behind the qualitative-set tests.
inline std::vector<double> vi_reach_prob(const MarkovAutomaton& ma, const GoalSet& goal, bool maximize,
                                         int sweeps = 20000) {
  int n = ma.num_states;
  std::vector<double> v(n, 0.0);
  for (StateIdx g : goal.members) v[g] = 1.0;
  for (int it = 0; it < sweeps; ++it) {
    for (int s = 0; s < n; ++s) {
      if (goal.contains(s)) continue;
      double best = maximize ? 0.0 : 2.0;
      bool any = false;
      if (ma.state_class(s) == maqa::StateClass::Markovian) {
        double sum = 0.0;
        for (const auto& [t, p] : maqa::embedded_probs(ma, s).entries) sum += p * v[t];
        best = sum;
        any = true;
      } else {
        for (const auto& tr : ma.prob_transitions[s]) {
          double sum = 0.0;
          for (const auto& [t, p] : tr.dist.entries) sum += p * v[t];
          best = maximize ? std::max(best, sum) : std::min(best, sum);
          any = true;
        }
      }
      v[s] = any ? best : 0.0;
    }
  }
  return v;
}

// Stationary-deterministic-policy evaluation of the long-run average time
// fraction, handling multichain policies through per-class stationary
// distributions and absorption probabilities. The MA must be closed.
struct PolicyLraOracle {
  const MarkovAutomaton& ma;
  std::vector<StateIdx> states;  // restriction (e.g. one MEC); identity = all
  std::vector<std::vector<int>> choices;  // per state: candidate transition indices

  explicit PolicyLraOracle(const MarkovAutomaton& m, const std::vector<StateIdx>& sub,
                           const std::vector<std::vector<int>>& retained)
      : ma(m), states(sub), choices(retained) {}

  // Evaluates one policy (index into choices per state) from `from`.
  double evaluate(const std::vector<int>& policy, const GoalSet& goal, StateIdx from) const {
    int n = static_cast<int>(states.size());
    std::vector<int> local(ma.num_states, -1);
    for (int i = 0; i < n; ++i) local[states[i]] = i;

    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> c1(n, 0.0), c2(n, 0.0);
    for (int i = 0; i < n; ++i) {
      StateIdx s = states[i];
      if (ma.state_class(s) == maqa::StateClass::Markovian) {
        double e = maqa::exit_rate(ma, s);
        c2[i] = 1.0 / e;
        c1[i] = goal.contains(s) ? 1.0 / e : 0.0;
        for (const auto& [t, p] : maqa::embedded_probs(ma, s).entries) P(i, local[t]) += p;
      } else {
        int a = choices[i][policy[i]];
        for (const auto& [t, p] : ma.prob_transitions[s][a].dist.entries) P(i, local[t]) += p;
      }
    }

    // Bottom SCCs of the policy graph.
    std::vector<std::vector<StateIdx>> adj(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (P(i, j) > 0.0) adj[i].push_back(j);
    auto sccs = closure_sccs(adj);
    std::vector<int> comp_of(n, -1);
    for (int c = 0; c < static_cast<int>(sccs.size()); ++c)
      for (StateIdx s : sccs[c]) comp_of[s] = c;
    std::vector<std::vector<int>> classes;
    for (int c = 0; c < static_cast<int>(sccs.size()); ++c) {
      bool bottom = true;
      for (StateIdx i : sccs[c])
        for (StateIdx j : adj[i]) bottom &= (comp_of[j] == c);
      if (bottom) classes.emplace_back(sccs[c].begin(), sccs[c].end());
    }

    // Ratio inside each recurrent class.
    std::vector<double> class_value(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
      int m = static_cast<int>(classes[c].size());
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
      for (int col = 0; col < m; ++col) {
        for (int row = 0; row < m; ++row)
          A(row, col) = P(classes[c][col], classes[c][row]) - (row == col ? 1.0 : 0.0);
        A(m - 1, col) = 1.0;
      }
      b(m - 1) = 1.0;
      Eigen::VectorXd pi = A.fullPivLu().solve(b);
      double num = 0.0, den = 0.0;
      for (int i = 0; i < m; ++i) {
        num += pi(i) * c1[classes[c][i]];
        den += pi(i) * c2[classes[c][i]];
      }
      class_value[c] = num / den;
    }

    // Absorption probabilities from `from` into each class.
    std::vector<int> class_of(n, -1);
    for (std::size_t c = 0; c < classes.size(); ++c)
      for (int i : classes[c]) class_of[i] = static_cast<int>(c);
    double value = 0.0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < n; ++i) {
        if (class_of[i] >= 0) {
          b(i) = class_of[i] == static_cast<int>(c) ? 1.0 : 0.0;
          continue;
        }
        for (int j = 0; j < n; ++j) A(i, j) -= P(i, j);
      }
      Eigen::VectorXd x = A.fullPivLu().solve(b);
      value += x(local[from]) * class_value[c];
    }
    return value;
  }

  // Min/max over every stationary deterministic policy.
  std::pair<double, double> min_max(const GoalSet& goal, StateIdx from) const {
    int n = static_cast<int>(states.size());
    std::vector<int> policy(n, 0);
    double best_min = 1e100, best_max = -1e100;
    while (true) {
      double v = evaluate(policy, goal, from);
      best_min = std::min(best_min, v);
      best_max = std::max(best_max, v);
      int i = 0;
      while (i < n) {
        if (++policy[i] < static_cast<int>(std::max<std::size_t>(choices[i].size(), 1))) break;
        policy[i] = 0;
        ++i;
      }
      if (i == n) break;
    }
    return {best_min, best_max};
  }
};

}  // namespace oracles
