#include "maqa/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "maqa/graph.hpp"

namespace maqa {

Distribution make_distribution(std::vector<std::pair<StateIdx, double>> raw, double tol) {
  std::map<StateIdx, double> merged;
  for (const auto& [s, p] : raw) {
    if (p < 0.0) throw std::invalid_argument("negative probability in distribution");
    if (p == 0.0) continue;  // zero-probability branches are dropped
    merged[s] += p;
  }
  double mass = 0.0;
  for (const auto& [s, p] : merged) mass += p;
  if (merged.empty() || std::abs(mass - 1.0) > tol)
    throw std::invalid_argument("distribution sums to " + std::to_string(mass));
  // Renormalize only genuine deviations; deviations at accumulation-noise
  // level are kept bit-exact so serialization round-trips.
  bool rescale = std::abs(mass - 1.0) > 1e-12;
  Distribution d;
  d.entries.reserve(merged.size());
  for (const auto& [s, p] : merged) d.entries.emplace_back(s, rescale ? p / mass : p);
  return d;
}

void MarkovAutomaton::resize(StateIdx n) {
  num_states = n;
  prob_transitions.resize(n);
  markov_transitions.resize(n);
}

int MarkovAutomaton::add_action(const std::string& name) {
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (actions[i] == name) return static_cast<int>(i);
  actions.push_back(name);
  return static_cast<int>(actions.size() - 1);
}

const std::string& MarkovAutomaton::state_name(StateIdx s) const {
  static const std::string fallback = "?";
  if (s >= 0 && s < static_cast<StateIdx>(state_names.size())) return state_names[s];
  return fallback;
}

StateClass MarkovAutomaton::state_class(StateIdx s) const {
  bool has_prob = !prob_transitions[s].empty();
  bool has_rate = !markov_transitions[s].empty();
  if (has_prob) return StateClass::Probabilistic;
  if (has_rate) return StateClass::Markovian;
  return StateClass::Deadlock;
}

std::size_t MarkovAutomaton::transition_count() const {
  std::size_t n = 0;
  for (StateIdx s = 0; s < num_states; ++s)
    n += prob_transitions[s].size() + markov_transitions[s].size();
  return n;
}

std::vector<StateClass> classify(const MarkovAutomaton& ma) {
  std::vector<StateClass> cls(ma.num_states);
  for (StateIdx s = 0; s < ma.num_states; ++s) cls[s] = ma.state_class(s);
  return cls;
}

MarkovAutomaton close_maximal_progress(const MarkovAutomaton& ma) {
  MarkovAutomaton out = ma;
  for (StateIdx s = 0; s < out.num_states; ++s) {
    bool has_tau = false;
    for (const auto& t : out.prob_transitions[s])
      if (t.action == kTau) {
        has_tau = true;
        break;
      }
    if (has_tau) out.markov_transitions[s].clear();
  }
  return out;
}

MarkovAutomaton hide_all_actions(const MarkovAutomaton& ma) {
  MarkovAutomaton out = ma;
  for (StateIdx s = 0; s < out.num_states; ++s)
    for (auto& t : out.prob_transitions[s]) t.action = kTau;
  return close_maximal_progress(out);
}

double exit_rate(const MarkovAutomaton& ma, StateIdx s) {
  if (ma.state_class(s) != StateClass::Markovian)
    throw std::logic_error("exit_rate queried on a non-Markovian state");
  double e = 0.0;
  for (const auto& edge : ma.markov_transitions[s]) e += edge.rate;
  return e;
}

double total_rate(const MarkovAutomaton& ma, StateIdx s, StateIdx t) {
  double r = 0.0;
  for (const auto& edge : ma.markov_transitions[s])
    if (edge.target == t) r += edge.rate;
  return r;
}

Distribution embedded_probs(const MarkovAutomaton& ma, StateIdx s) {
  double e = exit_rate(ma, s);
  std::map<StateIdx, double> rates;
  for (const auto& edge : ma.markov_transitions[s]) rates[edge.target] += edge.rate;
  Distribution d;
  d.entries.reserve(rates.size());
  for (const auto& [t, r] : rates) d.entries.emplace_back(t, r / e);
  return d;
}

std::vector<Diagnostic> validate(const MarkovAutomaton& ma) {
  std::vector<Diagnostic> diags;
  auto error = [&](StateIdx s, std::string msg) {
    diags.push_back({Severity::Error, std::move(msg), s});
  };
  auto warn = [&](StateIdx s, std::string msg) {
    diags.push_back({Severity::Warning, std::move(msg), s});
  };

  if (ma.num_states <= 0) {
    error(-1, "model has no states");
    return diags;
  }
  if (ma.initial < 0 || ma.initial >= ma.num_states)
    error(-1, "initial state index out of range");
  if (ma.actions.empty() || ma.actions[kTau] != kTauName)
    error(-1, "action table must reserve slot 0 for tau");

  bool indices_ok = true;
  for (StateIdx s = 0; s < ma.num_states; ++s) {
    for (const auto& t : ma.prob_transitions[s]) {
      if (t.action < 0 || t.action >= static_cast<int>(ma.actions.size()))
        error(s, "dangling action index");
      double mass = 0.0;
      std::set<StateIdx> seen;
      for (const auto& [target, p] : t.dist.entries) {
        if (target < 0 || target >= ma.num_states) {
          error(s, "probabilistic branch targets state out of range");
          indices_ok = false;
        }
        if (!seen.insert(target).second) error(s, "duplicate target in distribution");
        if (p <= 0.0) error(s, "non-positive probability branch");
        mass += p;
      }
      if (std::abs(mass - 1.0) > 1e-9)
        error(s, "distribution sums to " + std::to_string(mass));
    }
    for (const auto& edge : ma.markov_transitions[s]) {
      if (edge.target < 0 || edge.target >= ma.num_states) {
        error(s, "Markovian edge targets state out of range");
        indices_ok = false;
      }
      if (!(edge.rate > 0.0)) error(s, "non-positive rate");
    }
  }
  for (const auto& [name, states] : ma.labels)
    for (StateIdx s : states)
      if (s < 0 || s >= ma.num_states) error(-1, "label '" + name + "' references state out of range");

  // Closure invariant: tau enabled and Markovian edges together violate maximal progress.
  for (StateIdx s = 0; s < ma.num_states; ++s) {
    bool has_tau = false;
    for (const auto& t : ma.prob_transitions[s]) has_tau |= (t.action == kTau);
    if (has_tau && !ma.markov_transitions[s].empty())
      error(s, "state has both a tau transition and Markovian transitions (closure violated)");
  }

  for (StateIdx s = 0; s < ma.num_states; ++s)
    if (ma.state_class(s) == StateClass::Deadlock)
      warn(s, "deadlock state (treated as absorbing with a rate-1 self-loop during analysis)");

  if (indices_ok && !has_errors(diags)) {
    for (StateIdx s : zeno_check(ma))
      warn(s, "state lies in a reachable cycle of probabilistic states (Zeno suspect)");
  }
  return diags;
}

MarkovAutomaton absorb_deadlocks(const MarkovAutomaton& ma, std::vector<std::string>* notes) {
  MarkovAutomaton out = ma;
  for (StateIdx s = 0; s < out.num_states; ++s) {
    if (out.state_class(s) == StateClass::Deadlock) {
      out.markov_transitions[s].push_back({s, 1.0});
      if (notes)
        notes->push_back("deadlock state " + out.state_name(s) + " absorbed with a rate-1 self-loop");
    }
  }
  return out;
}

MarkovAutomaton prepare_for_analysis(const MarkovAutomaton& ma, std::vector<std::string>* notes) {
  return absorb_deadlocks(hide_all_actions(ma), notes);
}

}  // namespace maqa
