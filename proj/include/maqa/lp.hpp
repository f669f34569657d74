#pragma once

#include <vector>

// Dense two-phase primal simplex with Bland's rule. Small-scale workhorse for
// the SSP linear programs and the long-run ratio program.

namespace maqa {

enum class Relation { Le, Eq, Ge };

struct LpConstraint {
  std::vector<double> coeffs;  // one per variable, dense
  Relation rel = Relation::Le;
  double rhs = 0.0;
};

struct LpProblem {
  bool maximize = true;
  std::vector<double> objective;
  std::vector<LpConstraint> constraints;
  std::vector<char> free_vars;  // per variable; empty means all non-negative

  int num_vars() const { return static_cast<int>(objective.size()); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

LpSolution simplex_solve(const LpProblem& lp);

}  // namespace maqa
