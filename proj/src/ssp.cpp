#include "maqa/ssp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "maqa/graph.hpp"
#include "maqa/errors.hpp"
#include "maqa/lp.hpp"

namespace maqa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double action_value(const SspAction& act, const std::vector<double>& v) {
  double sum = act.cost;
  for (const auto& [t, p] : act.dist.entries) sum += p * v[t];
  return sum;
}

}  // namespace

std::vector<double> ssp_apply_bellman(const SspInstance& inst, Direction dir,
                                      const std::vector<double>& v) {
  std::vector<double> out(inst.num_states);
  for (int s = 0; s < inst.num_states; ++s) {
    if (inst.is_goal[s]) {
      out[s] = inst.terminal[s];
      continue;
    }
    double best = dir == Direction::Min ? kInf : -kInf;
    for (const auto& act : inst.actions[s]) {
      double val = action_value(act, v);
      best = dir == Direction::Min ? std::min(best, val) : std::max(best, val);
    }
    out[s] = best;
  }
  return out;
}

ValueVector ssp_value_iteration(const SspInstance& inst, Direction dir, double tol,
                                long max_sweeps) {
  ValueVector result;
  result.direction = dir;
  std::vector<double> v(inst.num_states, 0.0);
  for (int s = 0; s < inst.num_states; ++s)
    if (inst.is_goal[s]) v[s] = inst.terminal[s];

  long sweeps = 0;
  double delta = 0.0;
  while (true) {
    delta = 0.0;
    std::vector<double> next = ssp_apply_bellman(inst, dir, v);
    for (int s = 0; s < inst.num_states; ++s) {
      // Monotone from below: every sweep may only raise values.
      assert(next[s] >= v[s] - 1e-9);
      delta = std::max(delta, std::abs(next[s] - v[s]));
    }
    v.swap(next);
    ++sweeps;
    if (delta <= tol) break;
    if (sweeps >= max_sweeps)
      throw ConvergenceError("value iteration did not converge (suspected infinite values)");
  }

  result.values = std::move(v);
  result.iterations = sweeps;
  result.residual = delta;
  result.policy.assign(inst.num_states, -1);
  for (int s = 0; s < inst.num_states; ++s) {
    if (inst.is_goal[s]) continue;
    int best = -1;
    double best_val = dir == Direction::Min ? kInf : -kInf;
    for (int a = 0; a < static_cast<int>(inst.actions[s].size()); ++a) {
      double val = action_value(inst.actions[s][a], result.values);
      bool better = dir == Direction::Min ? val < best_val - 1e-12 : val > best_val + 1e-12;
      if (best < 0 || better) {
        best = a;  // ties keep the lowest action index
        best_val = val;
      }
    }
    result.policy[s] = best;
  }
  return result;
}

ValueVector ssp_lp(const SspInstance& inst, Direction dir) {
  // Variables: one per non-goal state; goal values are constants.
  std::vector<int> var_of(inst.num_states, -1);
  int nvars = 0;
  std::size_t rows = 0;
  for (int s = 0; s < inst.num_states; ++s) {
    if (!inst.is_goal[s]) var_of[s] = nvars++;
    rows += inst.actions[s].size();
  }
  if (nvars > 800 || rows > 2000)
    throw ResourceError("SSP linear program too large for the dense simplex; use the vi engine");

  LpProblem lp;
  lp.maximize = dir == Direction::Min;
  lp.objective.assign(nvars, 1.0);
  for (int s = 0; s < inst.num_states; ++s) {
    if (inst.is_goal[s]) continue;
    for (const auto& act : inst.actions[s]) {
      LpConstraint c;
      c.coeffs.assign(nvars, 0.0);
      c.coeffs[var_of[s]] += 1.0;
      double rhs = act.cost;
      for (const auto& [t, p] : act.dist.entries) {
        if (inst.is_goal[t])
          rhs += p * inst.terminal[t];
        else
          c.coeffs[var_of[t]] -= p;
      }
      c.rel = dir == Direction::Min ? Relation::Le : Relation::Ge;
      c.rhs = rhs;
      lp.constraints.push_back(std::move(c));
    }
  }

  LpSolution sol = simplex_solve(lp);
  if (sol.status == LpStatus::Unbounded)
    throw ConvergenceError("SSP linear program is unbounded (unflagged infinite value)");
  if (sol.status != LpStatus::Optimal)
    throw ConvergenceError("SSP linear program infeasible (malformed instance)");

  ValueVector result;
  result.direction = dir;
  result.values.resize(inst.num_states);
  for (int s = 0; s < inst.num_states; ++s)
    result.values[s] = inst.is_goal[s] ? inst.terminal[s] : sol.x[var_of[s]];
  result.policy.assign(inst.num_states, -1);
  for (int s = 0; s < inst.num_states; ++s) {
    if (inst.is_goal[s]) continue;
    int best = -1;
    double best_val = dir == Direction::Min ? kInf : -kInf;
    for (int a = 0; a < static_cast<int>(inst.actions[s].size()); ++a) {
      double val = action_value(inst.actions[s][a], result.values);
      bool better = dir == Direction::Min ? val < best_val - 1e-12 : val > best_val + 1e-12;
      if (best < 0 || better) {
        best = a;
        best_val = val;
      }
    }
    result.policy[s] = best;
  }
  return result;
}

ValueVector mdp_reach(const MdpReachInstance& inst, Direction dir, double tol) {
  const int n = inst.num_states;
  ValueVector result;
  result.direction = dir;
  result.values.assign(n, 0.0);
  result.policy.assign(n, -1);
  auto& v = result.values;
  for (int s = 0; s < n; ++s)
    if (inst.is_terminal[s]) v[s] = inst.terminal[s];

  // SCCs over non-terminal states; Tarjan order has successors first.
  std::vector<std::vector<StateIdx>> adj(n);
  for (int s = 0; s < n; ++s) {
    if (inst.is_terminal[s]) continue;
    for (const auto& d : inst.actions[s])
      for (const auto& [t, p] : d.entries)
        if (!inst.is_terminal[t]) adj[s].push_back(t);
    std::sort(adj[s].begin(), adj[s].end());
    adj[s].erase(std::unique(adj[s].begin(), adj[s].end()), adj[s].end());
  }
  auto sccs = scc_decompose(adj);

  auto eval_state = [&](int s) {
    double best = dir == Direction::Min ? kInf : -kInf;
    int best_a = -1;
    for (int a = 0; a < static_cast<int>(inst.actions[s].size()); ++a) {
      double sum = 0.0;
      for (const auto& [t, p] : inst.actions[s][a].entries) sum += p * v[t];
      bool better = dir == Direction::Min ? sum < best - 1e-15 : sum > best + 1e-15;
      if (best_a < 0 || better) {
        best = sum;
        best_a = a;
      }
    }
    return std::pair<double, int>{best_a < 0 ? 0.0 : best, best_a};
  };

  long sweeps = 0;
  for (const auto& comp : sccs) {
    bool trivial = comp.size() == 1 &&
                   !std::binary_search(adj[comp[0]].begin(), adj[comp[0]].end(), comp[0]);
    if (comp.size() == 1 && inst.is_terminal[comp[0]]) continue;
    if (trivial) {
      auto [val, act] = eval_state(comp[0]);
      v[comp[0]] = val;
      result.policy[comp[0]] = act;
      ++sweeps;
      continue;
    }
    // Cyclic component: iterate to the least fixpoint from below.
    double delta = kInf;
    long guard = 0;
    while (delta > tol) {
      delta = 0.0;
      for (StateIdx s : comp) {
        auto [val, act] = eval_state(s);
        delta = std::max(delta, std::abs(val - v[s]));
        v[s] = val;
        result.policy[s] = act;
      }
      ++sweeps;
      if (++guard > 10'000'000)
        throw ConvergenceError("mdp_reach did not converge inside a probabilistic SCC");
    }
  }
  result.iterations = sweeps;
  return result;
}

}  // namespace maqa
