#include "maqa/expected_time.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "maqa/errors.hpp"
#include "maqa/graph.hpp"

namespace maqa {

namespace {

// Action labels for policy output come from the un-hidden input; duplicate
// labels within a state get a positional suffix.
std::string action_label(const MarkovAutomaton& original, StateIdx s, int transition_idx) {
  const auto& trans = original.prob_transitions[s];
  if (transition_idx < 0 || transition_idx >= static_cast<int>(trans.size())) return "?";
  const std::string& label = original.actions[trans[transition_idx].action];
  int same = 0;
  for (int i = 0; i < static_cast<int>(trans.size()); ++i)
    if (original.actions[trans[i].action] == label) ++same;
  if (same <= 1) return label;
  int ordinal = 0;
  for (int i = 0; i < transition_idx; ++i)
    if (original.actions[trans[i].action] == label) ++ordinal;
  return label + "#" + std::to_string(ordinal);
}

MarkovAutomaton absorb_goals(const MarkovAutomaton& ma, const GoalSet& goal) {
  MarkovAutomaton out = ma;
  for (StateIdx g : goal.members) {
    out.prob_transitions[g].clear();
    out.markov_transitions[g].clear();
    out.markov_transitions[g].push_back({g, 1.0});
  }
  return out;
}

}  // namespace

ExpectedTimeSsp build_expected_time_ssp(const MarkovAutomaton& absorbed, const GoalSet& goal,
                                        Direction dir, const std::set<StateIdx>& finite_region) {
  ExpectedTimeSsp out;
  out.instance_of.assign(absorbed.num_states, -1);
  for (StateIdx s : finite_region) {
    out.instance_of[s] = static_cast<int>(out.origin.size());
    out.origin.push_back(s);
  }
  out.instance.resize(static_cast<int>(out.origin.size()));

  for (int i = 0; i < out.instance.num_states; ++i) {
    StateIdx s = out.origin[i];
    if (goal.contains(s)) {
      out.instance.is_goal[i] = 1;
      out.instance.terminal[i] = 0.0;
      continue;
    }
    auto remap = [&](const Distribution& d) {
      Distribution r;
      r.entries.reserve(d.entries.size());
      for (const auto& [t, p] : d.entries) r.entries.emplace_back(out.instance_of[t], p);
      return r;
    };
    if (absorbed.state_class(s) == StateClass::Markovian) {
      Distribution embedded = embedded_probs(absorbed, s);
      for (const auto& [t, p] : embedded.entries)
        if (out.instance_of[t] < 0)
          throw std::logic_error("finite region is not closed under Markovian moves");
      SspAction act;
      act.cost = 1.0 / exit_rate(absorbed, s);
      act.dist = remap(embedded);
      act.ref = -1;
      out.instance.actions[i].push_back(std::move(act));
    } else {
      const auto& trans = absorbed.prob_transitions[s];
      for (int a = 0; a < static_cast<int>(trans.size()); ++a) {
        bool inside = true;
        for (const auto& [t, p] : trans[a].dist.entries) inside &= (out.instance_of[t] >= 0);
        if (!inside) {
          // An action that may drift outside the almost-sure region has
          // infinite expected cost; the minimising player never takes it, and
          // for max the region is action-closed so this cannot trigger.
          if (dir == Direction::Max)
            throw std::logic_error("max-direction finite region is not action-closed");
          continue;
        }
        SspAction act;
        act.cost = 0.0;
        act.dist = remap(trans[a].dist);
        act.ref = a;
        out.instance.actions[i].push_back(std::move(act));
      }
      if (out.instance.actions[i].empty())
        throw std::logic_error("state in finite region lost all actions");
    }
  }
  return out;
}

AnalysisResult expected_time(const MarkovAutomaton& ma, const ExpectedTimeQuery& query) {
  auto start = std::chrono::steady_clock::now();
  AnalysisResult result;
  result.objective = query.direction == Direction::Min ? "et-min" : "et-max";
  result.direction = query.direction;
  result.tolerance = query.tol;

  MarkovAutomaton prepared = prepare_for_analysis(ma, &result.notes);
  for (StateIdx g : query.goal.members)
    if (g < 0 || g >= prepared.num_states) throw InputError("goal state index out of range");

  MarkovAutomaton absorbed = absorb_goals(prepared, query.goal);

  std::set<StateIdx> finite = query.direction == Direction::Min
                                  ? almost_sure_reach_exists(absorbed, query.goal)
                                  : almost_sure_reach_forall(absorbed, query.goal);

  auto zeno = zeno_check(absorbed);
  std::vector<StateIdx> bad;
  for (StateIdx s : zeno)
    if (finite.count(s)) bad.push_back(s);
  if (!bad.empty()) {
    std::string names;
    for (StateIdx s : bad) names += (names.empty() ? "" : ", ") + absorbed.state_name(s);
    throw InputError("Zeno-suspect states inside the finite-value region: " + names);
  }

  ExpectedTimeSsp ssp = build_expected_time_ssp(absorbed, query.goal, query.direction, finite);
  ValueVector solution = query.engine == SspEngine::Vi
                             ? ssp_value_iteration(ssp.instance, query.direction, query.tol)
                             : ssp_lp(ssp.instance, query.direction);

  result.state_values.assign(prepared.num_states, 0.0);
  result.state_infinite.assign(prepared.num_states, 1);
  for (int i = 0; i < ssp.instance.num_states; ++i) {
    result.state_values[ssp.origin[i]] = solution.values[i];
    result.state_infinite[ssp.origin[i]] = 0;
  }
  result.value_infinite = result.state_infinite[prepared.initial] != 0;
  result.value = result.value_infinite ? 0.0 : result.state_values[prepared.initial];
  result.iterations = solution.iterations;

  for (int i = 0; i < ssp.instance.num_states; ++i) {
    StateIdx s = ssp.origin[i];
    if (ssp.instance.is_goal[i]) continue;
    if (prepared.state_class(s) == StateClass::Markovian) {
      result.policy.emplace_back(prepared.state_name(s), "!");
    } else {
      int ref = ssp.instance.actions[i][solution.policy[i]].ref;
      result.policy.emplace_back(prepared.state_name(s), action_label(ma, s, ref));
    }
  }

  result.states = prepared.num_states;
  result.goal_states = query.goal.members.size();
  result.transitions = prepared.transition_count();
  result.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace maqa
