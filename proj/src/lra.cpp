#include "maqa/lra.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <map>

#include "maqa/errors.hpp"

namespace maqa {

namespace {

std::string plain_action_label(const MarkovAutomaton& original, StateIdx s, int transition_idx) {
  const auto& trans = original.prob_transitions[s];
  if (transition_idx < 0 || transition_idx >= static_cast<int>(trans.size())) return "?";
  const std::string& label = original.actions[trans[transition_idx].action];
  int same = 0;
  for (const auto& t : trans)
    if (original.actions[t.action] == label) ++same;
  if (same <= 1) return label;
  int ordinal = 0;
  for (int i = 0; i < transition_idx; ++i)
    if (original.actions[trans[i].action] == label) ++ordinal;
  return label + "#" + std::to_string(ordinal);
}

}  // namespace

RatioMdp build_mec_ratio_mdp(const MarkovAutomaton& ma, const MaxEndComponent& mec,
                             const GoalSet& goal) {
  const int m = static_cast<int>(mec.states.size());
  std::vector<int> local(ma.num_states, -1);
  for (int i = 0; i < m; ++i) local[mec.states[i]] = i;

  RatioMdp mdp;
  mdp.resize(m);
  for (int i = 0; i < m; ++i) {
    StateIdx s = mec.states[i];
    if (ma.state_class(s) == StateClass::Markovian) {
      double e = exit_rate(ma, s);
      RatioAction act;
      act.c2 = 1.0 / e;
      act.c1 = goal.contains(s) ? 1.0 / e : 0.0;
      act.ref = -1;
      for (const auto& [t, p] : embedded_probs(ma, s).entries) {
        if (local[t] < 0) throw std::logic_error("MEC Markovian bundle leaves the component");
        act.dist.entries.emplace_back(local[t], p);
      }
      mdp.actions[i].push_back(std::move(act));
    } else {
      for (int a : mec.actions[i]) {
        const auto& dist = ma.prob_transitions[s][a].dist;
        RatioAction act;
        act.ref = a;
        for (const auto& [t, p] : dist.entries) {
          if (local[t] < 0) throw std::logic_error("retained action leaves the component");
          act.dist.entries.emplace_back(local[t], p);
        }
        mdp.actions[i].push_back(std::move(act));
      }
      if (mdp.actions[i].empty()) throw std::logic_error("MEC state without retained actions");
    }
  }
  return mdp;
}

double lra_unichain(const MarkovAutomaton& ma, const MaxEndComponent& mec, const GoalSet& goal,
                    Direction dir, RatioEngine engine, RatioSolution* solution_out) {
  GoalSet effective;
  for (StateIdx s : mec.states) {
    if (ma.state_class(s) != StateClass::Markovian) continue;
    bool in_goal = goal.contains(s);
    // Max direction runs the complement: time fractions over Markovian states
    // sum to one almost surely, so max over G is 1 - min over MS \ G.
    if (dir == Direction::Min ? in_goal : !in_goal) effective.members.insert(s);
  }
  RatioMdp mdp = build_mec_ratio_mdp(ma, mec, effective);
  RatioSolution sol = longrun_ratio_min(mdp, engine);
  if (solution_out) *solution_out = sol;
  return dir == Direction::Min ? sol.ratio : 1.0 - sol.ratio;
}

LraQuotient build_lra_quotient(const MarkovAutomaton& ma, const std::vector<MaxEndComponent>& mecs,
                               const std::vector<double>& mec_values) {
  const int k = static_cast<int>(mecs.size());
  LraQuotient q;
  std::vector<int> mec_of(ma.num_states, -1);
  std::vector<std::vector<char>> retained(ma.num_states);
  for (int j = 0; j < k; ++j)
    for (std::size_t i = 0; i < mecs[j].states.size(); ++i) {
      StateIdx s = mecs[j].states[i];
      mec_of[s] = j;
      if (ma.state_class(s) == StateClass::Probabilistic) {
        retained[s].assign(ma.prob_transitions[s].size(), 0);
        for (int a : mecs[j].actions[i]) retained[s][a] = 1;
      }
    }

  q.quotient_of.assign(ma.num_states, -1);
  for (StateIdx s = 0; s < ma.num_states; ++s) {
    if (mec_of[s] >= 0) continue;
    q.quotient_of[s] = static_cast<int>(q.names.size());
    q.names.push_back(ma.state_name(s));
    q.origin.push_back(s);
  }
  q.u_index.resize(k);
  q.q_index.resize(k);
  for (int j = 0; j < k; ++j) {
    q.u_index[j] = static_cast<int>(q.names.size());
    q.names.push_back("u" + std::to_string(j + 1));
    q.origin.push_back(-1);
    q.q_index[j] = static_cast<int>(q.names.size());
    q.names.push_back("q" + std::to_string(j + 1));
    q.origin.push_back(-1);
  }
  for (StateIdx s = 0; s < ma.num_states; ++s)
    if (mec_of[s] >= 0) q.quotient_of[s] = q.u_index[mec_of[s]];

  auto redirect = [&](const Distribution& d) {
    std::map<int, double> mass;
    for (const auto& [t, p] : d.entries) mass[q.quotient_of[t]] += p;
    Distribution r;
    for (const auto& [t, p] : mass) r.entries.emplace_back(t, p);
    return r;
  };

  q.ssp.resize(static_cast<int>(q.names.size()));
  for (StateIdx s = 0; s < ma.num_states; ++s) {
    if (mec_of[s] >= 0) continue;
    int qs = q.quotient_of[s];
    if (ma.state_class(s) == StateClass::Markovian) {
      q.ssp.actions[qs].push_back({0.0, redirect(embedded_probs(ma, s)), -1});
    } else {
      const auto& trans = ma.prob_transitions[s];
      for (int a = 0; a < static_cast<int>(trans.size()); ++a)
        q.ssp.actions[qs].push_back({0.0, redirect(trans[a].dist), a});
    }
  }
  q.leave_refs.resize(k);
  for (int j = 0; j < k; ++j) {
    int uj = q.u_index[j], qj = q.q_index[j];
    q.ssp.actions[uj].push_back({0.0, Distribution::dirac(qj), -1});  // commit
    for (StateIdx s : mecs[j].states) {
      if (ma.state_class(s) != StateClass::Probabilistic) continue;
      const auto& trans = ma.prob_transitions[s];
      for (int a = 0; a < static_cast<int>(trans.size()); ++a) {
        if (retained[s][a]) continue;
        q.ssp.actions[uj].push_back({0.0, redirect(trans[a].dist), a});
        q.leave_refs[j].emplace_back(s, a);
      }
    }
    q.ssp.is_goal[qj] = 1;
    q.ssp.terminal[qj] = mec_values[j];
  }
  return q;
}

AnalysisResult lra(const MarkovAutomaton& ma, const LraQuery& query) {
  auto start = std::chrono::steady_clock::now();
  AnalysisResult result;
  result.objective = query.direction == Direction::Min ? "lra-min" : "lra-max";
  result.direction = query.direction;
  result.tolerance = query.tol;

  MarkovAutomaton prepared = prepare_for_analysis(ma, &result.notes);
  for (StateIdx g : query.goal.members)
    if (g < 0 || g >= prepared.num_states) throw InputError("goal state index out of range");

  auto zeno = zeno_check(prepared);
  if (!zeno.empty()) {
    std::string names;
    for (StateIdx s : zeno) names += (names.empty() ? "" : ", ") + prepared.state_name(s);
    throw InputError("model is Zeno-suspect (probabilistic cycles): " + names);
  }

  GoalSet goal_ms;
  goal_ms.source = query.goal.source;
  std::vector<std::string> dropped;
  for (StateIdx s : query.goal.members) {
    if (prepared.state_class(s) == StateClass::Markovian)
      goal_ms.members.insert(s);
    else
      dropped.push_back(prepared.state_name(s));
  }
  if (!dropped.empty()) {
    std::string names;
    for (std::size_t i = 0; i < dropped.size() && i < 6; ++i)
      names += (i ? ", " : "") + dropped[i];
    if (dropped.size() > 6) names += ", +" + std::to_string(dropped.size() - 6) + " more";
    result.notes.push_back("probabilistic goal states contribute no long-run time, dropped " +
                           std::to_string(dropped.size()) + ": " + names);
  }

  auto mecs = mec_decompose(prepared);
  std::vector<double> mec_values(mecs.size());
  std::vector<RatioSolution> mec_solutions(mecs.size());
  for (std::size_t j = 0; j < mecs.size(); ++j)
    mec_values[j] =
        lra_unichain(prepared, mecs[j], goal_ms, query.direction, query.ratio_engine, &mec_solutions[j]);

  LraQuotient quotient = build_lra_quotient(prepared, mecs, mec_values);
  ValueVector solution = ssp_value_iteration(quotient.ssp, query.direction, query.tol);

  result.state_values.assign(prepared.num_states, 0.0);
  result.state_infinite.assign(prepared.num_states, 0);
  for (StateIdx s = 0; s < prepared.num_states; ++s)
    result.state_values[s] = solution.values[quotient.quotient_of[s]];
  result.value = result.state_values[prepared.initial];
  result.iterations = solution.iterations;

  // Stationary policy: quotient decisions outside the MECs; inside a MEC
  // either the unichain policy (commit) or a walk towards the chosen exit.
  for (StateIdx s = 0; s < prepared.num_states; ++s) {
    if (prepared.state_class(s) != StateClass::Probabilistic) {
      if (prepared.state_class(s) == StateClass::Markovian)
        result.policy.emplace_back(prepared.state_name(s), "!");
      continue;
    }
    int qs = quotient.quotient_of[s];
    bool in_mec = quotient.origin[qs] < 0;
    if (!in_mec) {
      int ref = quotient.ssp.actions[qs][solution.policy[qs]].ref;
      result.policy.emplace_back(prepared.state_name(s), plain_action_label(ma, s, ref));
    }
  }
  for (std::size_t j = 0; j < mecs.size(); ++j) {
    const auto& mec = mecs[j];
    int uj = quotient.u_index[j];
    int choice = solution.policy[uj];
    std::vector<int> chosen(mec.states.size(), -1);
    if (choice == 0) {
      // Commit: follow the unichain ratio policy.
      for (std::size_t i = 0; i < mec.states.size(); ++i) {
        if (prepared.state_class(mec.states[i]) != StateClass::Probabilistic) continue;
        int k = mec_solutions[j].policy[static_cast<int>(i)];
        chosen[i] = mec.actions[i][k];
      }
    } else {
      auto [exit_state, exit_action] = quotient.leave_refs[j][choice - 1];
      // BFS distances towards the exit state over retained actions.
      std::vector<int> local(prepared.num_states, -1);
      for (std::size_t i = 0; i < mec.states.size(); ++i) local[mec.states[i]] = static_cast<int>(i);
      std::vector<int> dist(mec.states.size(), -1);
      dist[local[exit_state]] = 0;
      bool grew = true;
      while (grew) {
        grew = false;
        for (std::size_t i = 0; i < mec.states.size(); ++i) {
          if (dist[i] >= 0) continue;
          StateIdx s = mec.states[i];
          auto targets_of = [&](int a) {
            std::vector<int> out;
            if (prepared.state_class(s) == StateClass::Markovian) {
              for (const auto& e : prepared.markov_transitions[s]) out.push_back(local[e.target]);
            } else {
              for (const auto& [t, p] : prepared.prob_transitions[s][a].dist.entries)
                out.push_back(local[t]);
            }
            return out;
          };
          int best_a = -1, best_d = INT32_MAX;
          for (int a : mec.actions[i])
            for (int t : targets_of(a))
              if (t >= 0 && dist[t] >= 0 && dist[t] < best_d) {
                best_d = dist[t];
                best_a = a;
              }
          if (best_a >= 0) {
            dist[i] = best_d + 1;
            chosen[i] = best_a;
            grew = true;
          }
        }
      }
      chosen[local[exit_state]] = exit_action;
    }
    for (std::size_t i = 0; i < mec.states.size(); ++i) {
      StateIdx s = mec.states[i];
      if (prepared.state_class(s) != StateClass::Probabilistic) continue;
      result.policy.emplace_back(prepared.state_name(s),
                                 chosen[i] >= 0 ? plain_action_label(ma, s, chosen[i]) : "?");
    }
  }
  std::sort(result.policy.begin(), result.policy.end());

  result.states = prepared.num_states;
  result.goal_states = query.goal.members.size();
  result.transitions = prepared.transition_count();
  result.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace maqa
