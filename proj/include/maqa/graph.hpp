#pragma once

#include <set>
#include <vector>

#include "maqa/model.hpp"

// Structural algorithms over Markov automata: strongly connected components,
// Zeno detection, maximal end components and qualitative reachability.

namespace maqa {

// Uniform nondeterministic view of a closed MA: every state carries a list of
// "actions", each with a successor list. A Markovian state contributes its
// whole rate bundle as the single implicit bottom action; a probabilistic
// state contributes one action per transition (indices match
// prob_transitions). Deadlock states have no actions.
struct MdpView {
  std::vector<std::vector<std::vector<StateIdx>>> succ;  // state -> action -> successors

  static MdpView of(const MarkovAutomaton& ma);
  StateIdx num_states() const { return static_cast<StateIdx>(succ.size()); }
};

// Tarjan decomposition of the full transition graph (all actions, all rates).
// Components are emitted in reverse topological order: every component only
// reaches components at smaller result positions.
std::vector<std::vector<StateIdx>> scc_decompose(const MarkovAutomaton& ma);
std::vector<std::vector<StateIdx>> scc_decompose(const std::vector<std::vector<StateIdx>>& adj);

// States inside reachable nontrivial SCCs consisting of probabilistic states
// only. An empty result certifies non-Zenoness.
std::set<StateIdx> zeno_check(const MarkovAutomaton& ma);

// Maximal end component: a closed, strongly connected sub-MA. `actions[i]`
// lists the retained action indices of `states[i]` (for a Markovian state the
// single 0 entry stands for its rate bundle).
struct MaxEndComponent {
  std::vector<StateIdx> states;
  std::vector<std::vector<int>> actions;
};

// Iterative SCC refinement; results ordered by smallest contained state index.
std::vector<MaxEndComponent> mec_decompose(const MarkovAutomaton& ma);

// States from which some policy reaches G almost surely (max Pr = 1).
std::set<StateIdx> almost_sure_reach_exists(const MarkovAutomaton& ma, const GoalSet& goal);

// States from which every policy reaches G almost surely (min Pr = 1).
std::set<StateIdx> almost_sure_reach_forall(const MarkovAutomaton& ma, const GoalSet& goal);

// States with a path to G in the underlying graph (any resolution).
std::set<StateIdx> can_reach(const MarkovAutomaton& ma, const GoalSet& goal);

// States from which some policy makes G unreachable (min Pr = 0 region
// combined with its attractor is handled by the caller).
std::set<StateIdx> exists_policy_avoid(const MarkovAutomaton& ma, const GoalSet& goal);

// States reachable from the initial state in the underlying graph.
std::vector<char> reachable_from_initial(const MarkovAutomaton& ma);

}  // namespace maqa
