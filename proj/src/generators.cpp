#include "maqa/generators.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "maqa/errors.hpp"

namespace maqa {

MarkovAutomaton gen_queueing(const QueueParams& params) {
  if (!(params.lambda1 > 0.0) || !(params.lambda2 > 0.0) || !(params.mu > 0.0))
    throw InputError("queueing rates must be positive");

  struct State {
    int s1, s2, j;
  };
  auto key = [](const State& st) { return st.s1 * 4 + st.s2 * 2 + st.j; };

  MarkovAutomaton ma;
  std::map<int, StateIdx> index_of;
  std::deque<State> frontier;
  std::vector<State> states;
  auto state_of = [&](const State& st) {
    auto it = index_of.find(key(st));
    if (it != index_of.end()) return it->second;
    StateIdx s = static_cast<StateIdx>(states.size());
    index_of.emplace(key(st), s);
    states.push_back(st);
    frontier.push_back(st);
    return s;
  };

  state_of({0, 0, 0});
  std::vector<std::vector<ProbTransition>> prob;
  std::vector<std::vector<MarkovEdge>> markov;
  while (!frontier.empty()) {
    State st = frontier.front();
    frontier.pop_front();
    StateIdx s = index_of[key(st)];

    std::vector<ProbTransition> taus;
    std::vector<MarkovEdge> rates;
    if (st.j == 0 && (st.s1 == 1 || st.s2 == 1)) {
      // Server free and a station occupied: fetch instantly, choosing the
      // station nondeterministically when both are occupied.
      if (st.s1 == 1) {
        StateIdx moved = state_of({0, st.s2, 1});
        StateIdx kept = state_of({1, st.s2, 1});
        taus.push_back({kTau, make_distribution({{moved, 0.9}, {kept, 0.1}})});
      }
      if (st.s2 == 1) {
        StateIdx moved = state_of({st.s1, 0, 1});
        StateIdx kept = state_of({st.s1, 1, 1});
        taus.push_back({kTau, make_distribution({{moved, 0.9}, {kept, 0.1}})});
      }
    } else {
      if (st.s1 == 0) rates.push_back({state_of({1, st.s2, st.j}), params.lambda1});
      if (st.s2 == 0) rates.push_back({state_of({st.s1, 1, st.j}), params.lambda2});
      if (st.j == 1) rates.push_back({state_of({st.s1, st.s2, 0}), params.mu});
    }
    if (prob.size() < states.size()) {
      prob.resize(states.size());
      markov.resize(states.size());
    }
    prob[s] = std::move(taus);
    markov[s] = std::move(rates);
  }

  ma.resize(static_cast<StateIdx>(states.size()));
  ma.initial = 0;
  for (StateIdx s = 0; s < ma.num_states; ++s) {
    ma.prob_transitions[s] = std::move(prob[s]);
    ma.markov_transitions[s] = std::move(markov[s]);
    const State& st = states[s];
    ma.state_names.push_back("q" + std::to_string(st.s1) + std::to_string(st.s2) +
                             std::to_string(st.j));
    ma.labels["s1_" + std::to_string(st.s1)].insert(s);
    ma.labels["s2_" + std::to_string(st.s2)].insert(s);
    ma.labels["j_" + std::to_string(st.j)].insert(s);
  }
  return ma;
}

namespace {

// Server phases: 0 = idle, 1..N = busy(j), N+1..2N = finishing(j).
struct PollState {
  std::vector<int> q1, q2;  // job types, head first
  int arriving1 = 0, arriving2 = 0;
  int server = 0;

  std::vector<int> key() const {
    std::vector<int> k;
    k.push_back(arriving1);
    k.insert(k.end(), q1.begin(), q1.end());
    k.push_back(-1);
    k.push_back(arriving2);
    k.insert(k.end(), q2.begin(), q2.end());
    k.push_back(-1);
    k.push_back(server);
    return k;
  }
};

std::string queue_string(const std::vector<int>& q) {
  if (q.empty()) return "e";
  std::string s;
  for (int j : q) s += std::to_string(j);
  return s;
}

}  // namespace

MarkovAutomaton gen_polling(const PollingParams& params) {
  const int Q = params.queue_capacity, N = params.job_types;
  if (Q < 1 || N < 1) throw InputError("polling parameters require Q >= 1 and N >= 1");

  MarkovAutomaton ma;
  std::map<std::vector<int>, StateIdx> index_of;
  std::deque<PollState> frontier;
  std::vector<PollState> states;
  auto state_of = [&](const PollState& st) {
    auto it = index_of.find(st.key());
    if (it != index_of.end()) return it->second;
    StateIdx s = static_cast<StateIdx>(states.size());
    index_of.emplace(st.key(), s);
    states.push_back(st);
    frontier.push_back(st);
    return s;
  };

  state_of(PollState{});
  std::vector<std::vector<ProbTransition>> prob;
  std::vector<std::vector<MarkovEdge>> markov;
  while (!frontier.empty()) {
    PollState st = frontier.front();
    frontier.pop_front();
    StateIdx s = index_of[st.key()];

    std::vector<ProbTransition> taus;
    // Pending arrival resolves into one of the N job types (nondeterministic).
    for (int station = 1; station <= 2; ++station) {
      int arriving = station == 1 ? st.arriving1 : st.arriving2;
      if (!arriving) continue;
      for (int j = 1; j <= N; ++j) {
        PollState next = st;
        auto& queue = station == 1 ? next.q1 : next.q2;
        (station == 1 ? next.arriving1 : next.arriving2) = 0;
        queue.push_back(j);
        taus.push_back({kTau, Distribution::dirac(state_of(next))});
      }
    }
    // Server fetches the head of a nonempty station (only stations not
    // mid-arrival offer a job); the job stays behind with probability 1/10.
    if (st.server == 0) {
      for (int station = 1; station <= 2; ++station) {
        const auto& queue = station == 1 ? st.q1 : st.q2;
        int arriving = station == 1 ? st.arriving1 : st.arriving2;
        if (arriving || queue.empty()) continue;
        int job = queue.front();
        PollState moved = st;
        auto& mq = station == 1 ? moved.q1 : moved.q2;
        mq.erase(mq.begin());
        moved.server = job;
        PollState kept = st;
        kept.server = job;
        taus.push_back({kTau, make_distribution({{state_of(moved), 0.9}, {state_of(kept), 0.1}})});
      }
    }
    // Service completion phase returns the server to idle.
    if (st.server > N) {
      PollState next = st;
      next.server = 0;
      taus.push_back({kTau, Distribution::dirac(state_of(next))});
    }

    std::vector<MarkovEdge> rates;
    if (taus.empty()) {
      for (int station = 1; station <= 2; ++station) {
        const auto& queue = station == 1 ? st.q1 : st.q2;
        if (static_cast<int>(queue.size()) >= Q) continue;
        PollState next = st;
        (station == 1 ? next.arriving1 : next.arriving2) = 1;
        rates.push_back({state_of(next), 2.0 * station + 1.0});
      }
      if (st.server >= 1 && st.server <= N) {
        PollState next = st;
        next.server = st.server + N;  // busy(j) -> finishing(j) at rate 2j
        rates.push_back({state_of(next), 2.0 * st.server});
      }
    }
    if (prob.size() < states.size()) {
      prob.resize(states.size());
      markov.resize(states.size());
    }
    prob[s] = std::move(taus);
    markov[s] = std::move(rates);
  }

  ma.resize(static_cast<StateIdx>(states.size()));
  ma.initial = 0;
  for (StateIdx s = 0; s < ma.num_states; ++s) {
    ma.prob_transitions[s] = std::move(prob[s]);
    ma.markov_transitions[s] = std::move(markov[s]);
    const PollState& st = states[s];
    std::string name = "s_" + queue_string(st.q1) + (st.arriving1 ? "a" : "") + "_" +
                       queue_string(st.q2) + (st.arriving2 ? "a" : "") + "_";
    if (st.server == 0)
      name += "idle";
    else if (st.server <= N)
      name += "b" + std::to_string(st.server);
    else
      name += "f" + std::to_string(st.server - N);
    ma.state_names.push_back(name);
    if (static_cast<int>(st.q1.size()) == Q && static_cast<int>(st.q2.size()) == Q)
      ma.labels["bothFull"].insert(s);
  }
  return ma;
}

}  // namespace maqa
