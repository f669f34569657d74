#include "maqa/timed.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "maqa/errors.hpp"
#include "maqa/graph.hpp"
#include "maqa/ssp.hpp"

namespace maqa {

double digitisation_bound(double lambda, double b, long long k) {
  double x = lambda * b;
  return -std::expm1(-x + static_cast<double>(k) * std::log1p(x / static_cast<double>(k)));
}

Digitisation choose_delta(double lambda, const Rational& a, const Rational& b, double eps) {
  if (!(lambda > 0.0)) throw InputError("digitisation requires a positive maximal exit rate");
  if (!(b.num > 0)) throw InputError("interval upper bound must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("epsilon must lie in (0,1)");
  if (!(Rational{0, 1} <= a) || !(a <= b)) throw InputError("interval must satisfy 0 <= a <= b");

  const double b_d = b.to_double();
  const long long cap = 100'000'000;

  // Analytic seed ~ lambda^2 b^2 / (2 eps), then binary search for the
  // smallest k whose exact bound fits.
  double seed = lambda * lambda * b_d * b_d / (2.0 * eps);
  long long hi = 1;
  if (seed >= static_cast<double>(cap))
    hi = cap;
  else if (seed > 1.0)
    hi = static_cast<long long>(std::ceil(seed));
  while (digitisation_bound(lambda, b_d, hi) > eps) {
    if (hi >= cap)
      throw ResourceError("digitisation needs more than 1e8 steps for the requested accuracy");
    hi = std::min(cap, hi * 2);
  }
  long long lo = 1;
  while (lo < hi) {
    long long mid = lo + (hi - lo) / 2;
    if (digitisation_bound(lambda, b_d, mid) <= eps)
      hi = mid;
    else
      lo = mid + 1;
  }
  long long k_b = hi;

  // The grid must hit the lower bound exactly: with a/b = p/q reduced,
  // k_a = k_b p / q is integral iff q divides k_b.
  Rational ratio = a.is_zero() ? Rational{0, 1} : rational_div(a, b);
  long long q = ratio.den;
  k_b = (k_b + q - 1) / q * q;
  if (k_b > cap)
    throw ResourceError("digitisation needs more than 1e8 steps for the requested accuracy");

  Digitisation dig;
  dig.k_b = k_b;
  dig.k_a = a.is_zero() ? 0 : k_b / q * ratio.num;
  dig.delta = b_d / static_cast<double>(k_b);
  dig.lambda = lambda;
  dig.error_bound = digitisation_bound(lambda, b_d, k_b);
  return dig;
}

DigitisedMa build_dma(const MarkovAutomaton& ma, double delta) {
  if (!(delta > 0.0)) throw InputError("digitisation constant must be positive");
  DigitisedMa dma;
  dma.num_states = ma.num_states;
  dma.initial = ma.initial;
  dma.cls = classify(ma);
  dma.kernel.resize(ma.num_states);
  dma.ps_actions.resize(ma.num_states);
  for (StateIdx s = 0; s < ma.num_states; ++s) {
    if (dma.cls[s] == StateClass::Markovian) {
      double e = exit_rate(ma, s);
      double stay = std::exp(-e * delta);
      double move = -std::expm1(-e * delta);
      auto& row = dma.kernel[s];
      double self_extra = stay;
      for (const auto& [t, p] : embedded_probs(ma, s).entries) {
        if (t == s)
          self_extra += move * p;
        else
          row.emplace_back(t, move * p);
      }
      row.emplace_back(s, self_extra);
      // Normalize the row exactly so long horizons cannot drift out of [0,1].
      double sum = 0.0;
      for (const auto& [t, p] : row) sum += p;
      for (auto& [t, p] : row) p /= sum;
    } else if (dma.cls[s] == StateClass::Probabilistic) {
      for (const auto& t : ma.prob_transitions[s]) dma.ps_actions[s].push_back(t.dist);
    }
  }
  return dma;
}

namespace {

// Flattened probabilistic-state sweeper: closes the instantaneous layer over
// a value vector, processing SCCs of the tau-subgraph successors-first
// (exact on acyclic parts, iterative inside cycles).
struct PsSweep {
  struct ActionSpan {
    int begin = 0, end = 0;
  };
  struct StateSpan {
    StateIdx state = 0;
    int begin = 0, end = 0;  // actions
  };
  std::vector<StateIdx> targets;
  std::vector<double> probs;
  std::vector<ActionSpan> action_spans;
  std::vector<StateSpan> states;                 // in evaluation order
  std::vector<std::pair<int, int>> cyclic_runs;  // [begin,end) ranges of `states` needing iteration

  PsSweep(const DigitisedMa& dma, const std::vector<char>& frozen) {
    std::vector<StateIdx> ps;
    for (StateIdx s = 0; s < dma.num_states; ++s)
      if (dma.cls[s] == StateClass::Probabilistic && !frozen[s]) ps.push_back(s);
    std::vector<int> local(dma.num_states, -1);
    for (std::size_t i = 0; i < ps.size(); ++i) local[ps[i]] = static_cast<int>(i);

    std::vector<std::vector<StateIdx>> adj(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
      for (const auto& dist : dma.ps_actions[ps[i]])
        for (const auto& [t, p] : dist.entries)
          if (local[t] >= 0) adj[i].push_back(local[t]);
      std::sort(adj[i].begin(), adj[i].end());
      adj[i].erase(std::unique(adj[i].begin(), adj[i].end()), adj[i].end());
    }
    for (const auto& comp : scc_decompose(adj)) {
      bool cyclic = comp.size() > 1 ||
                    std::binary_search(adj[comp[0]].begin(), adj[comp[0]].end(), comp[0]);
      int run_begin = static_cast<int>(states.size());
      for (StateIdx li : comp) {
        StateIdx s = ps[li];
        StateSpan span;
        span.state = s;
        span.begin = static_cast<int>(action_spans.size());
        for (const auto& dist : dma.ps_actions[s]) {
          ActionSpan as;
          as.begin = static_cast<int>(targets.size());
          for (const auto& [t, p] : dist.entries) {
            targets.push_back(t);
            probs.push_back(p);
          }
          as.end = static_cast<int>(targets.size());
          action_spans.push_back(as);
        }
        span.end = static_cast<int>(action_spans.size());
        states.push_back(span);
      }
      if (cyclic) cyclic_runs.emplace_back(run_begin, static_cast<int>(states.size()));
    }
  }

  bool has_cycles() const { return !cyclic_runs.empty(); }

  double eval(const StateSpan& span, const std::vector<double>& v, Direction dir) const {
    double best = dir == Direction::Min ? 2.0 : -1.0;
    for (int a = span.begin; a < span.end; ++a) {
      double sum = 0.0;
      for (int k = action_spans[a].begin; k < action_spans[a].end; ++k)
        sum += probs[k] * v[targets[k]];
      best = dir == Direction::Min ? std::min(best, sum) : std::max(best, sum);
    }
    return best;
  }

  void run(std::vector<double>& v, Direction dir, double inner_tol) const {
    std::size_t next_cyclic = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (next_cyclic < cyclic_runs.size() &&
          static_cast<int>(i) == cyclic_runs[next_cyclic].first) {
        auto [begin, end] = cyclic_runs[next_cyclic++];
        double delta = 1.0;
        long guard = 0;
        while (delta > inner_tol) {
          delta = 0.0;
          for (int j = begin; j < end; ++j) {
            double val = eval(states[j], v, dir);
            delta = std::max(delta, std::abs(val - v[states[j].state]));
            v[states[j].state] = val;
          }
          if (++guard > 1'000'000)
            throw ConvergenceError("instantaneous closure did not converge");
        }
        i = static_cast<std::size_t>(end) - 1;
        continue;
      }
      v[states[i].state] = eval(states[i], v, dir);
    }
  }
};

}  // namespace

AnalysisResult timed_reachability(const MarkovAutomaton& ma, const TimedQuery& query,
                                  TimedTrace* trace) {
  auto start = std::chrono::steady_clock::now();
  AnalysisResult result;
  result.objective = query.direction == Direction::Min ? "tbr-min" : "tbr-max";
  result.direction = query.direction;
  result.epsilon = query.epsilon;

  MarkovAutomaton prepared = prepare_for_analysis(ma, &result.notes);
  if (query.goal.empty()) throw InputError("timed reachability needs a nonempty goal set");
  for (StateIdx g : query.goal.members)
    if (g < 0 || g >= prepared.num_states) throw InputError("goal state index out of range");

  auto zeno = zeno_check(prepared);
  if (!zeno.empty()) {
    std::string names;
    for (StateIdx s : zeno) names += (names.empty() ? "" : ", ") + prepared.state_name(s);
    throw InputError("model is Zeno-suspect (probabilistic cycles): " + names);
  }

  auto cls = classify(prepared);
  double lambda = 0.0;
  for (StateIdx s = 0; s < prepared.num_states; ++s)
    if (cls[s] == StateClass::Markovian) lambda = std::max(lambda, exit_rate(prepared, s));
  if (!(lambda > 0.0))
    throw InputError("model has no Markovian states; time-bounded analysis is undefined");

  Digitisation dig = choose_delta(lambda, query.from, query.to, query.epsilon);
  DigitisedMa dma = build_dma(prepared, dig.delta);

  std::vector<char> goal_mask(prepared.num_states, 0);
  for (StateIdx g : query.goal.members) goal_mask[g] = 1;

  PsSweep absorbed_sweep(dma, goal_mask);
  const double inner_tol =
      absorbed_sweep.has_cycles() ? query.epsilon / (10.0 * static_cast<double>(dig.k_b)) : 0.0;

  std::vector<StateIdx> ms_plain, ms_all;
  for (StateIdx s = 0; s < prepared.num_states; ++s)
    if (cls[s] == StateClass::Markovian) {
      ms_all.push_back(s);
      if (!goal_mask[s]) ms_plain.push_back(s);
    }

  std::vector<double> v(prepared.num_states, 0.0);
  for (StateIdx g : query.goal.members) v[g] = 1.0;

  TimedTrace local_trace;
  local_trace.digitisation = dig;
  local_trace.min_horizon_delta = 0.0;
  local_trace.min_value = 0.0;
  local_trace.max_value = 1.0;
  auto observe = [&](const std::vector<double>& vec) {
    for (double x : vec) {
      local_trace.min_value = std::min(local_trace.min_value, x);
      local_trace.max_value = std::max(local_trace.max_value, x);
    }
  };

  std::vector<double> tmp(prepared.num_states, 0.0);
  auto m_phase = [&](const std::vector<StateIdx>& rows) {
    for (StateIdx s : rows) {
      double sum = 0.0;
      for (const auto& [t, p] : dma.kernel[s]) sum += p * v[t];
      tmp[s] = sum;
    }
    for (StateIdx s : rows) v[s] = tmp[s];
  };

  // Phase 1: goal states absorbing, values are step-bounded reach
  // probabilities for the residual interval [0, b-a].
  absorbed_sweep.run(v, query.direction, inner_tol);
  observe(v);
  std::vector<double> prev;
  for (long long step = 0; step < dig.k_b - dig.k_a; ++step) {
    prev = v;
    m_phase(ms_plain);
    absorbed_sweep.run(v, query.direction, inner_tol);
    for (StateIdx s = 0; s < prepared.num_states; ++s)
      local_trace.min_horizon_delta = std::min(local_trace.min_horizon_delta, v[s] - prev[s]);
    observe(v);
  }

  // Phase 2 (a > 0): plain transient propagation without absorption; goal
  // membership now only matters through the phase-1 boundary values.
  if (dig.k_a > 0) {
    std::vector<char> none(prepared.num_states, 0);
    PsSweep plain_sweep(dma, none);
    const double inner_tol2 =
        plain_sweep.has_cycles() ? query.epsilon / (10.0 * static_cast<double>(dig.k_b)) : 0.0;
    for (long long step = 0; step < dig.k_a; ++step) {
      m_phase(ms_all);
      plain_sweep.run(v, query.direction, inner_tol2);
      observe(v);
    }
  }

  result.value = v[prepared.initial];
  result.error_bound = dig.error_bound;
  // For [0,b] the digitised value is a certified lower bound; with a positive
  // lower interval bound only the two-sided |p - p_dMA| <= bound survives.
  result.bracket_low =
      dig.k_a == 0 ? result.value : std::max(0.0, result.value - dig.error_bound);
  if (dig.k_a > 0)
    result.notes.push_back("positive interval lower bound: certified bracket is two-sided");
  result.state_values = v;
  result.state_infinite.assign(prepared.num_states, 0);
  result.iterations = dig.k_b;
  if (query.direction == Direction::Min)
    result.notes.push_back(
        "minimum-direction digitisation reuses the maximum-direction error bound (conservative)");

  result.states = prepared.num_states;
  result.goal_states = query.goal.members.size();
  result.transitions = prepared.transition_count();
  result.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (trace) *trace = local_trace;
  return result;
}

AnalysisResult unbounded_reachability(const MarkovAutomaton& ma, const GoalSet& goal, Direction dir,
                                      double tol) {
  auto start = std::chrono::steady_clock::now();
  AnalysisResult result;
  result.objective = dir == Direction::Min ? "ur-min" : "ur-max";
  result.direction = dir;
  result.tolerance = tol;

  MarkovAutomaton prepared = prepare_for_analysis(ma, &result.notes);
  for (StateIdx g : goal.members)
    if (g < 0 || g >= prepared.num_states) throw InputError("goal state index out of range");

  // Qualitative 0/1 precomputation keeps the numeric part well-conditioned.
  std::set<StateIdx> ones = dir == Direction::Max ? almost_sure_reach_exists(prepared, goal)
                                                  : almost_sure_reach_forall(prepared, goal);
  std::set<StateIdx> zeros;
  if (dir == Direction::Max) {
    auto reach = can_reach(prepared, goal);
    for (StateIdx s = 0; s < prepared.num_states; ++s)
      if (!reach.count(s)) zeros.insert(s);
  } else {
    zeros = exists_policy_avoid(prepared, goal);
  }

  MdpReachInstance inst;
  inst.resize(prepared.num_states);
  for (StateIdx s = 0; s < prepared.num_states; ++s) {
    if (ones.count(s)) {
      inst.is_terminal[s] = 1;
      inst.terminal[s] = 1.0;
    } else if (zeros.count(s)) {
      inst.is_terminal[s] = 1;
      inst.terminal[s] = 0.0;
    } else if (prepared.state_class(s) == StateClass::Markovian) {
      inst.actions[s].push_back(embedded_probs(prepared, s));
    } else {
      for (const auto& t : prepared.prob_transitions[s]) inst.actions[s].push_back(t.dist);
    }
  }
  ValueVector solution = mdp_reach(inst, dir, tol);

  result.state_values = solution.values;
  result.state_infinite.assign(prepared.num_states, 0);
  result.value = solution.values[prepared.initial];
  result.iterations = solution.iterations;
  for (StateIdx s = 0; s < prepared.num_states; ++s) {
    if (inst.is_terminal[s]) continue;
    if (prepared.state_class(s) == StateClass::Markovian)
      result.policy.emplace_back(prepared.state_name(s), "!");
    else if (solution.policy[s] >= 0)
      result.policy.emplace_back(prepared.state_name(s),
                                 ma.actions[ma.prob_transitions[s][solution.policy[s]].action]);
  }

  result.states = prepared.num_states;
  result.goal_states = goal.members.size();
  result.transitions = prepared.transition_count();
  result.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace maqa
