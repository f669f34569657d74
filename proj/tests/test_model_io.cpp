#include <doctest.h>

#include <fstream>
#include <sstream>

#include "maqa/errors.hpp"
#include "maqa/model_io.hpp"
#include "oracles.hpp"

using namespace maqa;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("confused-net fixture parses to the expected shape") {
  auto [ma, goal] = parse_ma(read_fixture("confused.ma"));
  CHECK(ma.num_states == 7);
  CHECK(ma.initial == 0);
  CHECK(ma.state_name(0) == "s_p1p2");

  int tau_blocks = 0, markov_blocks = 0;
  for (StateIdx s = 0; s < ma.num_states; ++s) {
    tau_blocks += static_cast<int>(ma.prob_transitions[s].size());
    markov_blocks += ma.markov_transitions[s].empty() ? 0 : 1;
  }
  CHECK(tau_blocks == 4);
  CHECK(markov_blocks == 2);
  CHECK(goal.members.size() == 1);

  GoalSet resolved = resolve_goal(ma, "goal");
  CHECK(resolved.members == goal.members);
  CHECK(ma.state_name(*goal.members.begin()) == "s_p3p7");
}

TEST_CASE("parser reports positioned semantic errors") {
  SUBCASE("distribution sum") {
    std::string doc =
        "#INITIAL\na\n#TRANSITIONS\na tau\n* b 0.5\n* c 0.4\n";
    CHECK_THROWS_WITH_AS(parse_ma(doc), doctest::Contains("sums to 0.9"), InputError);
  }
  SUBCASE("non-positive rate") {
    std::string doc = "#INITIAL\na\n#TRANSITIONS\na !\n* b 0\n";
    CHECK_THROWS_WITH_AS(parse_ma(doc), doctest::Contains("positive"), InputError);
  }
  SUBCASE("duplicate initial") {
    std::string doc = "#INITIAL\na\n#INITIAL\nb\n#TRANSITIONS\na !\n* b 1\n";
    CHECK_THROWS_AS(parse_ma(doc), InputError);
  }
  SUBCASE("missing branches") {
    std::string doc = "#INITIAL\na\n#TRANSITIONS\na tau\n";
    CHECK_THROWS_AS(parse_ma(doc), InputError);
  }
  SUBCASE("malformed number") {
    std::string doc = "#INITIAL\na\n#TRANSITIONS\na !\n* b 1.x\n";
    CHECK_THROWS_AS(parse_ma(doc), InputError);
  }
}

TEST_CASE("empty goals section gives an empty goal set") {
  std::string doc = "#INITIAL\na\n#GOALS\n#TRANSITIONS\na !\n* a 1\n";
  auto [ma, goal] = parse_ma(doc);
  CHECK(goal.members.empty());
  CHECK(ma.num_states == 1);
}

TEST_CASE("comments and CRLF are tolerated") {
  std::string doc = "#INITIAL ; the start\r\na\r\n#TRANSITIONS\r\na ! ; block\r\n* a 2.5\r\n";
  auto [ma, goal] = parse_ma(doc);
  CHECK(ma.num_states == 1);
  CHECK(ma.markov_transitions[0][0].rate == doctest::Approx(2.5));
}

TEST_CASE("single state model writes as a minimal four-line document") {
  MarkovAutomaton ma;
  ma.resize(1);
  ma.state_names = {"s0"};
  std::string text = write_ma(ma, GoalSet{});
  CHECK(text == "#INITIAL\ns0\n#GOALS\n#TRANSITIONS\n");
}

TEST_CASE("write -> parse -> write is a byte fixpoint on random models") {
  oracles::Rng rng(23);
  for (int round = 0; round < 60; ++round) {
    MarkovAutomaton ma = oracles::random_nonzeno_ma(rng, oracles::pick(rng, 2, 25), false);
    GoalSet goal;
    goal.members.insert(oracles::pick(rng, 0, ma.num_states - 1));
    std::string once = write_ma(ma, goal);
    auto [parsed, goal2] = parse_ma(once);
    std::string twice = write_ma(parsed, goal2);
    CHECK(once == twice);
  }
}

TEST_CASE("round trip preserves every value bit-exactly") {
  oracles::Rng rng(29);
  for (int round = 0; round < 30; ++round) {
    MarkovAutomaton ma = oracles::random_nonzeno_ma(rng, 50, false);
    GoalSet goal;
    goal.members.insert(3);
    auto [back, goal2] = parse_ma(write_ma(ma, goal));
    REQUIRE(back.num_states == ma.num_states);

    // Structural comparison through state names (indices may be permuted for
    // non-canonical numberings).
    std::map<std::string, StateIdx> of_back;
    for (StateIdx s = 0; s < back.num_states; ++s) of_back[back.state_name(s)] = s;
    std::set<std::string> goal_names, goal2_names;
    for (StateIdx s : goal.members) goal_names.insert(ma.state_name(s));
    for (StateIdx s : goal2.members) goal2_names.insert(back.state_name(s));
    CHECK(goal_names == goal2_names);

    for (StateIdx s = 0; s < ma.num_states; ++s) {
      StateIdx bs = of_back.at(ma.state_name(s));
      REQUIRE(back.prob_transitions[bs].size() == ma.prob_transitions[s].size());
      REQUIRE(back.markov_transitions[bs].size() == ma.markov_transitions[s].size());
      // Each rate survives bit-exactly (edges may be reordered by target).
      std::multiset<double> rates, back_rates;
      for (const auto& e : ma.markov_transitions[s]) rates.insert(e.rate);
      for (const auto& e : back.markov_transitions[bs]) back_rates.insert(e.rate);
      CHECK(rates == back_rates);
      for (const auto& e : ma.markov_transitions[s]) {
        StateIdx bt = of_back.at(ma.state_name(e.target));
        CHECK(total_rate(back, bs, bt) == total_rate(ma, s, e.target));
      }
    }
  }
}

TEST_CASE("seventeen significant digits survive") {
  MarkovAutomaton ma;
  ma.resize(2);
  ma.state_names = {"a", "b"};
  double awkward = 0.1 + 0.2;  // 0.30000000000000004
  ma.markov_transitions[0].push_back({1, awkward});
  ma.markov_transitions[1].push_back({0, 1.0 / 3.0});
  auto [back, goal] = parse_ma(write_ma(ma, GoalSet{}));
  CHECK(back.markov_transitions[0][0].rate == awkward);
  CHECK(back.markov_transitions[1][0].rate == 1.0 / 3.0);
}

TEST_CASE("resolve_goal handles unions and unknown labels") {
  std::string doc =
      "#INITIAL\na\n#LABELS\nred a b\nblue c\n#TRANSITIONS\n"
      "a !\n* b 1\nb !\n* c 1\nc !\n* a 1\n";
  auto [ma, goal] = parse_ma(doc);
  CHECK(resolve_goal(ma, "red").members.size() == 2);
  CHECK(resolve_goal(ma, "red|blue").members.size() == 3);
  CHECK_THROWS_AS(resolve_goal(ma, "x"), InputError);
}

TEST_CASE("fuzzed documents never crash, only diagnose") {
  oracles::Rng rng(37);
  std::string base =
      "#INITIAL\na\n#GOALS\nb\n#TRANSITIONS\na tau\n* b 0.5\n* c 0.5\nb !\n* c 1\nc !\n* a 2\n";
  const std::string charset = "abc01.#*!п размер\n\t eE+-;";
  int parsed_ok = 0, rejected = 0;
  for (int round = 0; round < 400; ++round) {
    std::string doc = base;
    int edits = oracles::pick(rng, 1, 6);
    for (int e = 0; e < edits; ++e) {
      std::size_t pos = static_cast<std::size_t>(oracles::pick(rng, 0, static_cast<int>(doc.size()) - 1));
      char c = charset[static_cast<std::size_t>(
          oracles::pick(rng, 0, static_cast<int>(charset.size()) - 1))];
      if (oracles::pick(rng, 0, 1))
        doc[pos] = c;
      else
        doc.insert(pos, 1, c);
    }
    try {
      auto [ma, goal] = parse_ma(doc);
      CHECK(ma.num_states > 0);
      ++parsed_ok;
    } catch (const maqa::InputError&) {
      ++rejected;
    }
  }
  CHECK(parsed_ok + rejected == 400);
  CHECK(rejected > 0);
}

TEST_CASE("labels survive the writer extension section") {
  std::string doc =
      "#INITIAL\na\n#LABELS\nred a\n#TRANSITIONS\na !\n* b 1\nb !\n* a 1\n";
  auto [ma, goal] = parse_ma(doc);
  auto [back, goal2] = parse_ma(write_ma(ma, goal));
  CHECK(back.labels.count("red") == 1);
}
