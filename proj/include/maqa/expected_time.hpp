#pragma once

#include "maqa/model.hpp"
#include "maqa/result.hpp"

// Minimum/maximum expected time to reach a goal set, via the reduction to a
// non-negative stochastic shortest path problem: goal states become absorbing,
// states that cannot (min: under some policy, max: under every policy) reach
// the goal almost surely are classified infinite, and the remaining states
// form an SSP with stage cost 1/E(s) on Markovian states.

namespace maqa {

enum class SspEngine { Vi, Lp };

struct ExpectedTimeQuery {
  GoalSet goal;
  Direction direction = Direction::Min;
  SspEngine engine = SspEngine::Vi;
  double tol = 1e-8;
};

AnalysisResult expected_time(const MarkovAutomaton& ma, const ExpectedTimeQuery& query);

// The SSP of the (already hidden, closed, goal-absorbed) MA restricted to the
// finite-value region; exposed for fixpoint tests. `origin[i]` maps instance
// states back to MA states.
struct ExpectedTimeSsp {
  SspInstance instance;
  std::vector<StateIdx> origin;
  std::vector<int> instance_of;  // -1 for states outside the finite region
};

ExpectedTimeSsp build_expected_time_ssp(const MarkovAutomaton& absorbed, const GoalSet& goal,
                                        Direction dir, const std::set<StateIdx>& finite_region);

}  // namespace maqa
