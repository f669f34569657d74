#include "maqa/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace maqa {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-9;

// Standard-form tableau: min c'y s.t. Ay = b (b >= 0), y >= 0.
struct Tableau {
  int rows = 0, cols = 0;  // cols excludes the rhs column
  std::vector<std::vector<double>> a;  // rows x (cols+1), last entry rhs
  std::vector<double> cost;            // reduced cost row, cols+1 (last = -objective)
  std::vector<int> basis;              // basic variable per row

  double& rhs(int i) { return a[i][cols]; }

  void pivot(int row, int col) {
    double p = a[row][col];
    for (int j = 0; j <= cols; ++j) a[row][j] /= p;
    for (int i = 0; i < rows; ++i) {
      if (i == row || std::abs(a[i][col]) <= kPivotTol) {
        if (i != row) a[i][col] = 0.0;
        continue;
      }
      double f = a[i][col];
      for (int j = 0; j <= cols; ++j) a[i][j] -= f * a[row][j];
      a[i][col] = 0.0;
    }
    if (std::abs(cost[col]) > 0.0) {
      double f = cost[col];
      for (int j = 0; j <= cols; ++j) cost[j] -= f * a[row][j];
      cost[col] = 0.0;
    }
    basis[row] = col;
  }

  // Bland's rule: entering = smallest-index column with negative reduced
  // cost, leaving = min-ratio row breaking ties on the smallest basic index.
  // `blocked` columns never enter. Returns false when optimal, throws on
  // unboundedness.
  bool step(const std::vector<char>& blocked) {
    int enter = -1;
    for (int j = 0; j < cols; ++j) {
      if (blocked[j]) continue;
      if (cost[j] < -kCostTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return false;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < rows; ++i) {
      if (a[i][enter] > kPivotTol) {
        double ratio = rhs(i) / a[i][enter];
        if (ratio < best_ratio - 1e-12 ||
            (std::abs(ratio - best_ratio) <= 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) throw LpStatus::Unbounded;
    pivot(leave, enter);
    return true;
  }
};

}  // namespace

LpSolution simplex_solve(const LpProblem& lp) {
  const int n = lp.num_vars();
  const int m = static_cast<int>(lp.constraints.size());

  // Map each variable to one or two non-negative columns (x = x+ - x-).
  std::vector<int> pos_col(n), neg_col(n, -1);
  int cols = 0;
  for (int j = 0; j < n; ++j) {
    pos_col[j] = cols++;
    if (!lp.free_vars.empty() && lp.free_vars[j]) neg_col[j] = cols++;
  }
  const int struct_cols = cols;

  // One slack/surplus per inequality, then one artificial per Ge/Eq row (and
  // for Le rows with negative rhs, handled after sign normalization).
  std::vector<double> row_sign(m, 1.0);
  std::vector<Relation> rel(m);
  for (int i = 0; i < m; ++i) {
    rel[i] = lp.constraints[i].rel;
    if (lp.constraints[i].rhs < 0.0) {
      row_sign[i] = -1.0;
      rel[i] = rel[i] == Relation::Le ? Relation::Ge : (rel[i] == Relation::Ge ? Relation::Le : Relation::Eq);
    }
  }
  std::vector<int> slack_col(m, -1), art_col(m, -1);
  for (int i = 0; i < m; ++i)
    if (rel[i] != Relation::Eq) slack_col[i] = cols++;
  for (int i = 0; i < m; ++i)
    if (rel[i] != Relation::Le) art_col[i] = cols++;

  Tableau t;
  t.rows = m;
  t.cols = cols;
  t.a.assign(m, std::vector<double>(cols + 1, 0.0));
  t.basis.assign(m, -1);
  for (int i = 0; i < m; ++i) {
    const auto& c = lp.constraints[i];
    if (static_cast<int>(c.coeffs.size()) != n)
      throw std::invalid_argument("constraint dimension mismatch");
    for (int j = 0; j < n; ++j) {
      double v = row_sign[i] * c.coeffs[j];
      t.a[i][pos_col[j]] = v;
      if (neg_col[j] >= 0) t.a[i][neg_col[j]] = -v;
    }
    if (slack_col[i] >= 0) t.a[i][slack_col[i]] = rel[i] == Relation::Le ? 1.0 : -1.0;
    if (art_col[i] >= 0) t.a[i][art_col[i]] = 1.0;
    t.rhs(i) = row_sign[i] * c.rhs;
    t.basis[i] = art_col[i] >= 0 ? art_col[i] : slack_col[i];
  }

  std::vector<char> blocked(cols, 0);

  // Phase 1: minimize the sum of artificials.
  bool need_phase1 = false;
  t.cost.assign(cols + 1, 0.0);
  for (int i = 0; i < m; ++i)
    if (art_col[i] >= 0) {
      need_phase1 = true;
      t.cost[art_col[i]] = 1.0;
    }
  if (need_phase1) {
    for (int i = 0; i < m; ++i)
      if (art_col[i] >= 0)
        for (int j = 0; j <= cols; ++j) t.cost[j] -= t.a[i][j];
    try {
      while (t.step(blocked)) {
      }
    } catch (LpStatus) {
      // Phase 1 is bounded below by 0; hitting this means numerics went bad.
      return {LpStatus::Infeasible, 0.0, {}};
    }
    if (-t.cost[cols] > 1e-7) return {LpStatus::Infeasible, 0.0, {}};

    // Pivot leftover artificials out of the basis; drop artificial columns.
    for (int i = 0; i < m; ++i) {
      if (art_col[i] < 0 || t.basis[i] != art_col[i]) continue;
      int col = -1;
      for (int j = 0; j < struct_cols + m && j < cols; ++j) {
        bool is_art = false;
        for (int k = 0; k < m; ++k) is_art |= (art_col[k] == j);
        if (!is_art && std::abs(t.a[i][j]) > kPivotTol) {
          col = j;
          break;
        }
      }
      if (col >= 0) t.pivot(i, col);
      // else: redundant row, keep the zero-valued artificial basic.
    }
    for (int i = 0; i < m; ++i)
      if (art_col[i] >= 0) blocked[art_col[i]] = 1;
  }

  // Phase 2 cost row (always minimize internally).
  t.cost.assign(cols + 1, 0.0);
  for (int j = 0; j < n; ++j) {
    double v = lp.maximize ? -lp.objective[j] : lp.objective[j];
    t.cost[pos_col[j]] = v;
    if (neg_col[j] >= 0) t.cost[neg_col[j]] = -v;
  }
  for (int i = 0; i < m; ++i) {
    int b = t.basis[i];
    if (b >= 0 && std::abs(t.cost[b]) > 0.0) {
      double f = t.cost[b];
      for (int j = 0; j <= cols; ++j) t.cost[j] -= f * t.a[i][j];
      t.cost[b] = 0.0;
    }
  }

  try {
    long iterations = 0;
    while (t.step(blocked)) {
      if (++iterations > 2'000'000) throw std::runtime_error("simplex iteration cap exceeded");
    }
  } catch (LpStatus) {
    return {LpStatus::Unbounded, 0.0, {}};
  }

  std::vector<double> y(cols, 0.0);
  for (int i = 0; i < m; ++i)
    if (t.basis[i] >= 0) y[t.basis[i]] = t.rhs(i);
  LpSolution sol;
  sol.status = LpStatus::Optimal;
  sol.x.resize(n);
  for (int j = 0; j < n; ++j)
    sol.x[j] = y[pos_col[j]] - (neg_col[j] >= 0 ? y[neg_col[j]] : 0.0);
  double obj = -t.cost[cols];
  sol.objective = lp.maximize ? -obj : obj;
  return sol;
}

}  // namespace maqa
