#include "maqa/graph.hpp"

#include <algorithm>
#include <deque>

namespace maqa {

MdpView MdpView::of(const MarkovAutomaton& ma) {
  MdpView view;
  view.succ.resize(ma.num_states);
  for (StateIdx s = 0; s < ma.num_states; ++s) {
    if (!ma.prob_transitions[s].empty()) {
      for (const auto& t : ma.prob_transitions[s]) {
        std::vector<StateIdx> targets;
        targets.reserve(t.dist.entries.size());
        for (const auto& [q, p] : t.dist.entries) targets.push_back(q);
        view.succ[s].push_back(std::move(targets));
      }
    } else if (!ma.markov_transitions[s].empty()) {
      std::vector<StateIdx> targets;
      for (const auto& e : ma.markov_transitions[s]) targets.push_back(e.target);
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
      view.succ[s].push_back(std::move(targets));
    }
  }
  return view;
}

namespace {

std::vector<std::vector<StateIdx>> full_adjacency(const MarkovAutomaton& ma) {
  std::vector<std::vector<StateIdx>> adj(ma.num_states);
  for (StateIdx s = 0; s < ma.num_states; ++s) {
    for (const auto& t : ma.prob_transitions[s])
      for (const auto& [q, p] : t.dist.entries) adj[s].push_back(q);
    for (const auto& e : ma.markov_transitions[s]) adj[s].push_back(e.target);
    std::sort(adj[s].begin(), adj[s].end());
    adj[s].erase(std::unique(adj[s].begin(), adj[s].end()), adj[s].end());
  }
  return adj;
}

// Iterative Tarjan; components are pushed when completed, which yields
// reverse topological order.
struct Tarjan {
  const std::vector<std::vector<StateIdx>>& adj;
  std::vector<int> index, lowlink, on_stack;
  std::vector<StateIdx> stack;
  int counter = 0;
  std::vector<std::vector<StateIdx>> sccs;

  explicit Tarjan(const std::vector<std::vector<StateIdx>>& a)
      : adj(a), index(a.size(), -1), lowlink(a.size(), 0), on_stack(a.size(), 0) {}

  void run() {
    for (StateIdx s = 0; s < static_cast<StateIdx>(adj.size()); ++s)
      if (index[s] < 0) visit(s);
  }

  void visit(StateIdx root) {
    // explicit DFS stack: (state, next successor position)
    std::vector<std::pair<StateIdx, std::size_t>> dfs{{root, 0}};
    while (!dfs.empty()) {
      auto& [v, pos] = dfs.back();
      if (pos == 0) {
        index[v] = lowlink[v] = counter++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      bool descended = false;
      while (pos < adj[v].size()) {
        StateIdx w = adj[v][pos++];
        if (index[w] < 0) {
          dfs.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
      }
      if (descended) continue;
      if (lowlink[v] == index[v]) {
        std::vector<StateIdx> comp;
        while (true) {
          StateIdx w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
          if (w == v) break;
        }
        std::sort(comp.begin(), comp.end());
        sccs.push_back(std::move(comp));
      }
      StateIdx done = v;
      dfs.pop_back();
      if (!dfs.empty()) lowlink[dfs.back().first] = std::min(lowlink[dfs.back().first], lowlink[done]);
    }
  }
};

}  // namespace

std::vector<std::vector<StateIdx>> scc_decompose(const std::vector<std::vector<StateIdx>>& adj) {
  Tarjan t(adj);
  t.run();
  return std::move(t.sccs);
}

std::vector<std::vector<StateIdx>> scc_decompose(const MarkovAutomaton& ma) {
  return scc_decompose(full_adjacency(ma));
}

std::vector<char> reachable_from_initial(const MarkovAutomaton& ma) {
  auto adj = full_adjacency(ma);
  std::vector<char> seen(ma.num_states, 0);
  std::deque<StateIdx> frontier{ma.initial};
  seen[ma.initial] = 1;
  while (!frontier.empty()) {
    StateIdx s = frontier.front();
    frontier.pop_front();
    for (StateIdx t : adj[s])
      if (!seen[t]) {
        seen[t] = 1;
        frontier.push_back(t);
      }
  }
  return seen;
}

std::set<StateIdx> zeno_check(const MarkovAutomaton& ma) {
  auto adj = full_adjacency(ma);
  auto cls = classify(ma);
  auto reachable = reachable_from_initial(ma);
  std::set<StateIdx> suspects;
  for (const auto& comp : scc_decompose(adj)) {
    bool nontrivial = comp.size() > 1;
    if (!nontrivial) {
      StateIdx s = comp[0];
      nontrivial = std::binary_search(adj[s].begin(), adj[s].end(), s);
    }
    if (!nontrivial) continue;
    bool all_prob = true, any_reachable = false;
    for (StateIdx s : comp) {
      all_prob &= (cls[s] == StateClass::Probabilistic);
      any_reachable |= (reachable[s] != 0);
    }
    if (all_prob && any_reachable)
      for (StateIdx s : comp) suspects.insert(s);
  }
  return suspects;
}

std::vector<MaxEndComponent> mec_decompose(const MarkovAutomaton& ma) {
  MdpView view = MdpView::of(ma);
  const StateIdx n = view.num_states();

  std::vector<MaxEndComponent> result;
  std::deque<std::vector<StateIdx>> work;
  {
    std::vector<StateIdx> all(n);
    for (StateIdx s = 0; s < n; ++s) all[s] = s;
    work.push_back(std::move(all));
  }

  std::vector<char> in_set(n, 0);
  while (!work.empty()) {
    std::vector<StateIdx> region = std::move(work.front());
    work.pop_front();

    // Retain only actions fully inside the region; drop states left empty,
    // repeating until stable.
    std::vector<std::vector<int>> retained(n);
    bool shrunk = true;
    for (StateIdx s : region) in_set[s] = 1;
    while (shrunk) {
      shrunk = false;
      for (StateIdx s : region) {
        if (!in_set[s]) continue;
        retained[s].clear();
        for (int a = 0; a < static_cast<int>(view.succ[s].size()); ++a) {
          bool inside = true;
          for (StateIdx t : view.succ[s][a]) inside &= (in_set[t] != 0);
          if (inside) retained[s].push_back(a);
        }
        if (retained[s].empty() && in_set[s]) {
          in_set[s] = 0;
          shrunk = true;
        }
      }
    }
    std::vector<StateIdx> pruned;
    for (StateIdx s : region)
      if (in_set[s]) pruned.push_back(s);
    for (StateIdx s : region) in_set[s] = 0;
    if (pruned.empty()) continue;

    // SCCs of the retained-action subgraph, on compressed indices.
    std::vector<StateIdx> local_of(n, -1);
    for (std::size_t i = 0; i < pruned.size(); ++i) local_of[pruned[i]] = static_cast<StateIdx>(i);
    std::vector<std::vector<StateIdx>> adj(pruned.size());
    for (StateIdx s : pruned)
      for (int a : retained[s])
        for (StateIdx t : view.succ[s][a]) adj[local_of[s]].push_back(local_of[t]);
    for (auto& row : adj) {
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    auto sccs = scc_decompose(adj);

    if (sccs.size() == 1 && sccs[0].size() == pruned.size()) {
      MaxEndComponent mec;
      mec.states = pruned;
      for (StateIdx s : pruned) mec.actions.push_back(retained[s]);
      result.push_back(std::move(mec));
      continue;
    }
    for (auto& comp : sccs) {
      std::vector<StateIdx> sub;
      sub.reserve(comp.size());
      for (StateIdx local : comp) sub.push_back(pruned[local]);
      work.push_back(std::move(sub));
    }
  }

  std::sort(result.begin(), result.end(),
            [](const MaxEndComponent& a, const MaxEndComponent& b) { return a.states[0] < b.states[0]; });
  return result;
}

std::set<StateIdx> can_reach(const MarkovAutomaton& ma, const GoalSet& goal) {
  std::vector<std::vector<StateIdx>> pred(ma.num_states);
  auto adj = full_adjacency(ma);
  for (StateIdx s = 0; s < ma.num_states; ++s)
    for (StateIdx t : adj[s]) pred[t].push_back(s);
  std::vector<char> seen(ma.num_states, 0);
  std::deque<StateIdx> frontier;
  for (StateIdx g : goal.members)
    if (!seen[g]) {
      seen[g] = 1;
      frontier.push_back(g);
    }
  while (!frontier.empty()) {
    StateIdx s = frontier.front();
    frontier.pop_front();
    for (StateIdx p : pred[s])
      if (!seen[p]) {
        seen[p] = 1;
        frontier.push_back(p);
      }
  }
  std::set<StateIdx> out;
  for (StateIdx s = 0; s < ma.num_states; ++s)
    if (seen[s]) out.insert(s);
  return out;
}

std::set<StateIdx> almost_sure_reach_exists(const MarkovAutomaton& ma, const GoalSet& goal) {
  MdpView view = MdpView::of(ma);
  const StateIdx n = view.num_states();
  std::vector<char> u(n, 1);

  while (true) {
    // Least fixpoint inside u: states with an action staying in u that can
    // reach the goal through v.
    std::vector<char> v(n, 0);
    for (StateIdx g : goal.members) v[g] = 1;
    bool grew = true;
    while (grew) {
      grew = false;
      for (StateIdx s = 0; s < n; ++s) {
        if (v[s]) continue;
        for (const auto& targets : view.succ[s]) {
          bool stays = true, touches = false;
          for (StateIdx t : targets) {
            stays &= (u[t] != 0);
            touches |= (v[t] != 0);
          }
          if (stays && touches) {
            v[s] = 1;
            grew = true;
            break;
          }
        }
      }
    }
    if (v == u) break;
    u = std::move(v);
  }
  std::set<StateIdx> out;
  for (StateIdx s = 0; s < n; ++s)
    if (u[s]) out.insert(s);
  return out;
}

std::set<StateIdx> exists_policy_avoid(const MarkovAutomaton& ma, const GoalSet& goal) {
  MdpView view = MdpView::of(ma);
  const StateIdx n = view.num_states();
  // Greatest fixpoint: non-goal states with some action staying inside.
  // A deadlock state avoids G forever by being stuck.
  std::vector<char> x(n, 1);
  for (StateIdx g : goal.members) x[g] = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (StateIdx s = 0; s < n; ++s) {
      if (!x[s] || view.succ[s].empty()) continue;
      bool has_staying_action = false;
      for (const auto& targets : view.succ[s]) {
        bool stays = true;
        for (StateIdx t : targets) stays &= (x[t] != 0);
        if (stays) {
          has_staying_action = true;
          break;
        }
      }
      if (!has_staying_action) {
        x[s] = 0;
        changed = true;
      }
    }
  }
  std::set<StateIdx> out;
  for (StateIdx s = 0; s < n; ++s)
    if (x[s]) out.insert(s);
  return out;
}

std::set<StateIdx> almost_sure_reach_forall(const MarkovAutomaton& ma, const GoalSet& goal) {
  MdpView view = MdpView::of(ma);
  const StateIdx n = view.num_states();
  auto avoid = exists_policy_avoid(ma, goal);

  // States that can branch into the avoid region before touching G.
  std::vector<char> bad(n, 0);
  for (StateIdx s : avoid) bad[s] = 1;
  bool grew = true;
  while (grew) {
    grew = false;
    for (StateIdx s = 0; s < n; ++s) {
      if (bad[s] || goal.contains(s)) continue;
      for (const auto& targets : view.succ[s]) {
        bool touches = false;
        for (StateIdx t : targets) touches |= (bad[t] != 0);
        if (touches) {
          bad[s] = 1;
          grew = true;
          break;
        }
      }
    }
  }
  std::set<StateIdx> out;
  for (StateIdx s = 0; s < n; ++s)
    if (!bad[s]) out.insert(s);
  return out;
}

}  // namespace maqa
