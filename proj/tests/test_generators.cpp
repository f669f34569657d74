#include <doctest.h>

#include "maqa/generators.hpp"
#include "maqa/graph.hpp"
#include "oracles.hpp"

using namespace maqa;

TEST_CASE("queueing system matches the drawn eight-state model") {
  MarkovAutomaton ma = gen_queueing({1.0, 2.0, 3.0});
  CHECK(ma.num_states == 8);
  CHECK(!has_errors(validate(ma)));
  CHECK(zeno_check(ma).empty());

  // (1,1,0) offers the nondeterministic choice between the two stations.
  REQUIRE(ma.labels.count("s1_1") == 1);
  StateIdx both = -1;
  for (StateIdx s : ma.labels.at("s1_1"))
    if (ma.labels.at("s2_1").count(s) && ma.labels.at("j_0").count(s)) both = s;
  REQUIRE(both >= 0);
  CHECK(ma.prob_transitions[both].size() == 2);

  // (0,0,0) is Markovian with the two arrival rates.
  StateIdx empty = ma.initial;
  REQUIRE(ma.markov_transitions[empty].size() == 2);
  CHECK(exit_rate(ma, empty) == doctest::Approx(3.0));

  // (0,0,1): both arrivals plus service.
  StateIdx busy = -1;
  for (StateIdx s : ma.labels.at("j_1"))
    if (ma.labels.at("s1_0").count(s) && ma.labels.at("s2_0").count(s)) busy = s;
  REQUIRE(busy >= 0);
  CHECK(exit_rate(ma, busy) == doctest::Approx(6.0));
}

TEST_CASE("queueing system is symmetric under swapping equal stations") {
  MarkovAutomaton ma = gen_queueing({1.5, 1.5, 2.0});
  // The swap (s1,s2,j) -> (s2,s1,j) must be a transition-preserving bijection.
  auto swapped_name = [&](StateIdx s) {
    std::string n = ma.state_name(s);  // "qABj"
    std::swap(n[1], n[2]);
    return n;
  };
  std::map<std::string, StateIdx> by_name;
  for (StateIdx s = 0; s < ma.num_states; ++s) by_name[ma.state_name(s)] = s;
  for (StateIdx s = 0; s < ma.num_states; ++s) {
    StateIdx t = by_name.at(swapped_name(s));
    CHECK(ma.prob_transitions[s].size() == ma.prob_transitions[t].size());
    REQUIRE(ma.markov_transitions[s].size() == ma.markov_transitions[t].size());
    double rate_s = 0.0, rate_t = 0.0;
    for (const auto& e : ma.markov_transitions[s]) rate_s += e.rate;
    for (const auto& e : ma.markov_transitions[t]) rate_t += e.rate;
    CHECK(rate_s == doctest::Approx(rate_t));
  }
}

TEST_CASE("polling Q=1 N=1 instantiates the documented rates") {
  MarkovAutomaton ma = gen_polling({1, 1});
  CHECK(!has_errors(validate(ma)));
  CHECK(zeno_check(ma).empty());
  CHECK(ma.labels.count("bothFull") == 1);

  std::set<double> rates;
  for (StateIdx s = 0; s < ma.num_states; ++s)
    for (const auto& e : ma.markov_transitions[s]) rates.insert(e.rate);
  CHECK(rates == std::set<double>{3.0, 5.0, 2.0});

  // Initial state: both stations empty and idle, two arrival edges.
  REQUIRE(ma.markov_transitions[ma.initial].size() == 2);
  CHECK(exit_rate(ma, ma.initial) == doctest::Approx(8.0));
}

TEST_CASE("polling models are closed by construction") {
  for (auto [q, n] : {std::pair{1, 2}, {2, 2}, {2, 3}}) {
    MarkovAutomaton ma = gen_polling({q, n});
    CHECK(!has_errors(validate(ma)));
    for (StateIdx s = 0; s < ma.num_states; ++s) {
      bool ps = !ma.prob_transitions[s].empty();
      bool ms = !ma.markov_transitions[s].empty();
      CHECK(ps != ms);  // no deadlocks, no mixed states
    }
    // Arrival resolution offers one alternative per job type.
    bool found_arrival = false;
    for (StateIdx s = 0; s < ma.num_states; ++s) {
      if (ma.state_name(s).find('a') != std::string::npos &&
          ma.state_name(s).find("idle") != std::string::npos &&
          ma.prob_transitions[s].size() == static_cast<std::size_t>(n)) {
        found_arrival = true;
        break;
      }
    }
    CHECK(found_arrival);
  }
}

TEST_CASE("polling state count grows with Q and N") {
  int s11 = gen_polling({1, 1}).num_states;
  int s12 = gen_polling({1, 2}).num_states;
  int s22 = gen_polling({2, 2}).num_states;
  int s23 = gen_polling({2, 3}).num_states;
  CHECK(s11 <= s12);
  CHECK(s12 <= s22);
  CHECK(s22 <= s23);
}

TEST_CASE("polling reproduces the known unreduced state space sizes") {
  MarkovAutomaton q2n3 = gen_polling({2, 3});
  CHECK(q2n3.num_states == 1497);
  CHECK(q2n3.labels.at("bothFull").size() == 567);
  MarkovAutomaton q2n4 = gen_polling({2, 4});
  CHECK(q2n4.num_states == 4811);
  CHECK(q2n4.labels.at("bothFull").size() == 2304);
}
