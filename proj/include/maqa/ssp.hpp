#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "maqa/model.hpp"

// Non-negative stochastic shortest path instances and solver kernels shared by
// the objective engines.

namespace maqa {

enum class Direction { Min, Max };

inline const char* to_string(Direction d) { return d == Direction::Min ? "min" : "max"; }

struct SspAction {
  double cost = 0.0;  // stage cost, >= 0
  Distribution dist;
  int ref = -1;  // caller-defined backreference (e.g. original transition index)
};

// `terminal[s]` holds the terminal cost g(s) for goal states; non-goal states
// carry at least one action.
struct SspInstance {
  int num_states = 0;
  std::vector<std::vector<SspAction>> actions;
  std::vector<char> is_goal;
  std::vector<double> terminal;

  void resize(int n) {
    num_states = n;
    actions.resize(n);
    is_goal.assign(n, 0);
    terminal.assign(n, 0.0);
  }
};

struct ValueVector {
  std::vector<double> values;
  std::vector<int> policy;  // chosen action index per state, -1 for goals
  Direction direction = Direction::Min;
  long iterations = 0;
  double residual = 0.0;
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Value iteration from v0 = 0 (monotone from below on non-negative SSPs);
// stops when the max-norm update drops to `tol`. States with infinite optimal
// value must have been removed or flagged by the caller; non-convergence
// within the sweep cap raises ConvergenceError.
ValueVector ssp_value_iteration(const SspInstance& inst, Direction dir, double tol = 1e-8,
                                long max_sweeps = 10'000'000);

// LP route: for min, maximize the value sum subject to v <= L(v) per action;
// mirrored for max. Raises ConvergenceError on an unbounded program (an
// unflagged infinite value).
ValueVector ssp_lp(const SspInstance& inst, Direction dir);

// One Bellman operator application; used for fixpoint-residual checks.
std::vector<double> ssp_apply_bellman(const SspInstance& inst, Direction dir,
                                      const std::vector<double>& v);

// Optimal expected terminal value in an MDP whose terminal states carry fixed
// values: exact topological evaluation on acyclic parts, value iteration
// inside cyclic SCCs.
struct MdpReachInstance {
  int num_states = 0;
  std::vector<char> is_terminal;
  std::vector<double> terminal;
  std::vector<std::vector<Distribution>> actions;

  void resize(int n) {
    num_states = n;
    is_terminal.assign(n, 0);
    terminal.assign(n, 0.0);
    actions.resize(n);
  }
};

ValueVector mdp_reach(const MdpReachInstance& inst, Direction dir, double tol = 1e-10);

}  // namespace maqa
