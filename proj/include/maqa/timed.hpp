#pragma once

#include "maqa/model.hpp"
#include "maqa/rational.hpp"
#include "maqa/result.hpp"

// Time(-interval)-bounded reachability by digitisation: the Markovian dynamics
// are summarised at grid points delta apart (at most one Markovian jump per
// step up to the certified error), and the digitised model is solved by
// intertwined backward steps for Markovian states and instantaneous-closure
// sweeps for probabilistic states.

namespace maqa {

struct TimedQuery {
  GoalSet goal;
  Direction direction = Direction::Min;
  Rational from{0, 1};
  Rational to{1, 1};
  double epsilon = 1e-3;
};

struct Digitisation {
  double delta = 0.0;
  long long k_b = 0;   // b = k_b * delta
  long long k_a = 0;   // a = k_a * delta
  double lambda = 0.0; // max exit rate
  double error_bound = 0.0;  // 1 - e^{-lambda b} (1 + lambda delta)^{k_b}
};

// Smallest step count k_b whose error bound stays within eps, additionally
// rounded up so the grid hits the lower bound `a` exactly.
Digitisation choose_delta(double lambda, const Rational& a, const Rational& b, double eps);

// Exact digitisation error for a given step count; decreasing in k.
double digitisation_bound(double lambda, double b, long long k);

// One-step kernels of the digitised model: Markovian states move with mass
// 1 - e^{-E(s) delta} along their embedded probabilities and keep the
// complement on the diagonal; probabilistic states are unchanged.
struct DigitisedMa {
  StateIdx num_states = 0;
  StateIdx initial = 0;
  std::vector<StateClass> cls;
  std::vector<std::vector<std::pair<StateIdx, double>>> kernel;  // Markovian rows
  std::vector<std::vector<Distribution>> ps_actions;             // probabilistic rows
};

DigitisedMa build_dma(const MarkovAutomaton& ma, double delta);

// Per-run engine observations backing the monotonicity/containment checks.
struct TimedTrace {
  double min_horizon_delta = 0.0;  // smallest per-step value change while a = 0
  double min_value = 0.0;
  double max_value = 1.0;
  Digitisation digitisation;
};

AnalysisResult timed_reachability(const MarkovAutomaton& ma, const TimedQuery& query,
                                  TimedTrace* trace = nullptr);

// Probability to ever reach the goal: embedded probabilities for Markovian
// states, full nondeterminism for probabilistic ones, solved after the usual
// qualitative 0/1 precomputation.
AnalysisResult unbounded_reachability(const MarkovAutomaton& ma, const GoalSet& goal, Direction dir,
                                      double tol = 1e-10);

}  // namespace maqa
