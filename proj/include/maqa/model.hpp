#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

// Core data model for Markov automata: states with probabilistic (action-labelled)
// transitions into distributions and Markovian (rate-labelled) transitions, plus
// maximal-progress closure, state classification and structural validation.

namespace maqa {

using StateIdx = int32_t;

// Action table slot reserved for the internal action.
constexpr int kTau = 0;
inline const char* kTauName = "tau";

// Discrete probability distribution over state indices. Entries carry strictly
// positive mass and unique state indices; total mass is 1 up to 1e-9.
struct Distribution {
  std::vector<std::pair<StateIdx, double>> entries;

  static Distribution dirac(StateIdx s) { return Distribution{{{s, 1.0}}}; }

  double mass() const {
    double m = 0.0;
    for (const auto& [s, p] : entries) m += p;
    return m;
  }
  bool is_dirac() const { return entries.size() == 1 && entries[0].second == 1.0; }
  double prob(StateIdx s) const {
    for (const auto& [t, p] : entries)
      if (t == s) return p;
    return 0.0;
  }
  bool operator==(const Distribution&) const = default;
};

// Builds a Distribution from raw (state, mass) pairs: merges duplicate targets,
// drops zero-mass branches, renormalizes when the deviation from 1 is within
// `tol`, and throws std::invalid_argument otherwise (or on negative mass).
Distribution make_distribution(std::vector<std::pair<StateIdx, double>> raw, double tol = 1e-9);

struct ProbTransition {
  int action = kTau;
  Distribution dist;
  bool operator==(const ProbTransition&) const = default;
};

struct MarkovEdge {
  StateIdx target = 0;
  double rate = 0.0;  // strictly positive, unit time^-1
  bool operator==(const MarkovEdge&) const = default;
};

enum class StateClass { Markovian, Probabilistic, Deadlock };

struct MarkovAutomaton {
  StateIdx num_states = 0;
  StateIdx initial = 0;
  std::vector<std::string> actions{kTauName};                    // [0] is tau
  std::vector<std::vector<ProbTransition>> prob_transitions;     // per state
  std::vector<std::vector<MarkovEdge>> markov_transitions;       // per state
  std::map<std::string, std::set<StateIdx>> labels;              // atomic propositions
  std::vector<std::string> state_names;                          // optional; "s<i>" default

  void resize(StateIdx n);
  int add_action(const std::string& name);  // returns existing index if present
  const std::string& state_name(StateIdx s) const;
  StateClass state_class(StateIdx s) const;
  std::size_t transition_count() const;
};

// Set of goal states; `source` records the label expression it came from.
struct GoalSet {
  std::set<StateIdx> members;
  std::string source;

  bool contains(StateIdx s) const { return members.count(s) > 0; }
  bool empty() const { return members.empty(); }
};

std::vector<StateClass> classify(const MarkovAutomaton& ma);

// Maximal progress: a state with at least one tau-labelled probabilistic
// transition never delays, so all its Markovian transitions are removed.
MarkovAutomaton close_maximal_progress(const MarkovAutomaton& ma);

// Replaces every probabilistic action label by tau and re-applies the closure.
MarkovAutomaton hide_all_actions(const MarkovAutomaton& ma);

// Total outgoing rate E(s) of a Markovian state, aggregating parallel edges.
double exit_rate(const MarkovAutomaton& ma, StateIdx s);

// Aggregated rate R(s,t) over all parallel edges s ~> t.
double total_rate(const MarkovAutomaton& ma, StateIdx s, StateIdx t);

// Embedded one-step probabilities R(s,s')/E(s) of a Markovian state.
Distribution embedded_probs(const MarkovAutomaton& ma, StateIdx s);

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  StateIdx state = -1;
};

// Structural validation: distribution normalization, rate positivity, index
// ranges, deadlock and Zeno warnings. Errors make the model unusable;
// warnings (deadlocks, Zeno-suspect cycles) are advisory.
std::vector<Diagnostic> validate(const MarkovAutomaton& ma);

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    if (d.severity == Severity::Error) return true;
  return false;
}

// Gives every deadlock state an absorbing Markovian self-loop of rate 1 so the
// objective engines see a total transition structure. Substitutions are
// reported through `notes`.
MarkovAutomaton absorb_deadlocks(const MarkovAutomaton& ma, std::vector<std::string>* notes = nullptr);

// hide + close + deadlock absorption, the normal preamble of every objective.
MarkovAutomaton prepare_for_analysis(const MarkovAutomaton& ma, std::vector<std::string>* notes = nullptr);

}  // namespace maqa
