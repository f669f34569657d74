#include <doctest.h>

#include <cmath>

#include "maqa/errors.hpp"
#include "maqa/lp.hpp"
#include "maqa/timed.hpp"
#include "oracles.hpp"

using namespace maqa;

namespace {

GoalSet goal_of(std::initializer_list<StateIdx> states) {
  GoalSet g;
  for (StateIdx s : states) g.members.insert(s);
  return g;
}

MarkovAutomaton single_rate_one() {
  MarkovAutomaton ma;
  ma.resize(2);
  ma.state_names = {"s", "g"};
  ma.markov_transitions[0].push_back({1, 1.0});
  ma.markov_transitions[1].push_back({1, 1.0});
  return ma;
}

}  // namespace

TEST_CASE("rational parsing covers decimals and exponents") {
  CHECK(Rational::parse("1") == Rational{1, 1});
  CHECK(Rational::parse("0.5") == Rational{1, 2});
  CHECK(Rational::parse("1.25e-2") == Rational{1, 80});
  CHECK(Rational::parse("2e3") == Rational{2000, 1});
  CHECK_THROWS_AS(Rational::parse("ten"), InputError);
  CHECK_THROWS_AS(Rational::parse("1..2"), InputError);
  CHECK(rational_div(Rational::parse("1"), Rational::parse("2")) == Rational{1, 2});
}

TEST_CASE("choose_delta finds the minimal admissible step count") {
  SUBCASE("coarse accuracy keeps a single step") {
    Digitisation d = choose_delta(1.0, Rational{0, 1}, Rational{1, 1}, 0.5);
    CHECK(d.k_b == 1);
    CHECK(d.delta == doctest::Approx(1.0));
    CHECK(d.error_bound == doctest::Approx(1.0 - 2.0 * std::exp(-1.0)));
  }
  SUBCASE("tight accuracy lands near the analytic seed and is minimal") {
    Digitisation d = choose_delta(1.0, Rational{0, 1}, Rational{1, 1}, 1e-3);
    CHECK(d.k_b == 500);
    CHECK(digitisation_bound(1.0, 1.0, d.k_b) <= 1e-3);
    CHECK(digitisation_bound(1.0, 1.0, d.k_b - 1) > 1e-3);
  }
  SUBCASE("lower bound forces divisibility") {
    Digitisation d = choose_delta(1.0, Rational{1, 1}, Rational{2, 1}, 0.4);
    CHECK(d.k_b % 2 == 0);
    CHECK(d.k_a * 2 == d.k_b);
    CHECK(d.error_bound <= 0.4);
  }
  SUBCASE("infeasible accuracy is a resource error") {
    CHECK_THROWS_AS(choose_delta(100.0, Rational{0, 1}, Rational{1000, 1}, 1e-6), ResourceError);
  }
}

TEST_CASE("digitised kernel matches the closed form and rows sum to one") {
  MarkovAutomaton ma;
  ma.resize(2);
  ma.markov_transitions[0].push_back({1, 1.0});
  ma.markov_transitions[1].push_back({0, 2.0});
  DigitisedMa dma = build_dma(ma, 0.1);
  double move = 1.0 - std::exp(-0.1);
  REQUIRE(dma.kernel[0].size() == 2);
  // Row layout: off-diagonal targets first, self mass last.
  CHECK(dma.kernel[0][0].first == 1);
  CHECK(dma.kernel[0][0].second == doctest::Approx(move));
  CHECK(dma.kernel[0][1].first == 0);
  CHECK(dma.kernel[0][1].second == doctest::Approx(1.0 - move));
  for (StateIdx s = 0; s < 2; ++s) {
    double sum = 0.0;
    for (const auto& [t, p] : dma.kernel[s]) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  }

  SUBCASE("small delta moves almost nothing") {
    DigitisedMa fine = build_dma(ma, 1e-8);
    CHECK(fine.kernel[0][0].second == doctest::Approx(1e-8).epsilon(1e-4));
  }
}

TEST_CASE("analytic single-transition model: bracket contains 1 - e^-1") {
  MarkovAutomaton ma = single_rate_one();
  TimedQuery q{goal_of({1}), Direction::Min, Rational{0, 1}, Rational{1, 1}, 1e-3};
  TimedTrace trace;
  AnalysisResult r = timed_reachability(ma, q, &trace);
  double exact = 1.0 - std::exp(-1.0);
  CHECK(r.value <= exact + 1e-12);       // a = 0: one-sided lower bound
  CHECK(*r.bracket_low == r.value);
  CHECK(r.value + *r.error_bound >= exact);
  CHECK(*r.error_bound <= 1e-3);
  // dMA value has the closed form 1 - (e^-delta)^k = 1 - e^-1 exactly.
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-9));
  CHECK(trace.min_horizon_delta >= -1e-12);
  CHECK(trace.min_value >= -1e-12);
  CHECK(trace.max_value <= 1.0 + 1e-12);
}

TEST_CASE("goal states at a = 0 report probability one") {
  MarkovAutomaton ma = single_rate_one();
  TimedQuery q{goal_of({0}), Direction::Max, Rational{0, 1}, Rational{1, 2}, 1e-2};
  AnalysisResult r = timed_reachability(ma, q);
  CHECK(r.value == doctest::Approx(1.0));
}

TEST_CASE("interval bounds: goal probability decays during the lower phase") {
  // Single state in G with escape rate 1: p(still in G at time 1) = e^-1 for
  // the interval [1,1]... approximated by [1, 1 + tiny] digitisation.
  MarkovAutomaton ma;
  ma.resize(2);
  ma.state_names = {"g", "away"};
  ma.markov_transitions[0].push_back({1, 1.0});
  ma.markov_transitions[1].push_back({1, 1.0});
  TimedQuery q{goal_of({0}), Direction::Max, Rational{1, 1}, Rational{1, 1}, 1e-3};
  AnalysisResult r = timed_reachability(ma, q);
  double exact = std::exp(-1.0);
  CHECK(*r.bracket_low <= exact + 1e-12);
  CHECK(r.value + *r.error_bound + 1e-12 >= exact);
  CHECK(std::abs(r.value - exact) <= 1e-9);  // closed form survives digitisation exactly
}

TEST_CASE("transient goal: closed-form interval probability lies in the bracket") {
  // s --2--> g --3--> away: g is occupied during [T, T+S] with T ~ Exp(2),
  // S ~ Exp(3); that window intersects [a,b] with probability
  //   lambda (e^{-lambda a} - e^{-mu a}) / (mu - lambda) + e^{-lambda a} - e^{-lambda b}.
  MarkovAutomaton ma;
  ma.resize(3);
  ma.state_names = {"s", "g", "away"};
  ma.markov_transitions[0].push_back({1, 2.0});
  ma.markov_transitions[1].push_back({2, 3.0});
  ma.markov_transitions[2].push_back({2, 1.0});
  double exact = 2.0 * (std::exp(-2.0) - std::exp(-3.0)) / 1.0 + std::exp(-2.0) - std::exp(-4.0);
  for (double eps : {1e-2, 1e-3}) {
    TimedQuery q{goal_of({1}), Direction::Max, Rational{1, 1}, Rational{2, 1}, eps};
    AnalysisResult r = timed_reachability(ma, q);
    // Positive lower bounds certify a two-sided bracket only.
    CHECK(*r.bracket_low <= exact + 1e-9);
    CHECK(r.value + *r.error_bound >= exact - 1e-9);
    CHECK(std::abs(r.value - exact) <= *r.error_bound);
    CHECK(*r.error_bound <= eps);
  }
}

TEST_CASE("interval query on the two-choice model stays within the bracket") {
  // From s, tau choice between a fast (rate 4) and a slow (rate 1) branch
  // into g; goal only counts within [a,b].
  MarkovAutomaton ma;
  ma.resize(4);
  ma.state_names = {"s", "fast", "slow", "g"};
  ma.prob_transitions[0].push_back({kTau, Distribution::dirac(1)});
  ma.prob_transitions[0].push_back({kTau, Distribution::dirac(2)});
  ma.markov_transitions[1].push_back({3, 4.0});
  ma.markov_transitions[2].push_back({3, 1.0});
  ma.markov_transitions[3].push_back({3, 1.0});

  // Exact values: reaching g within [0,b] via rate r is 1 - e^{-rb}; the goal
  // is absorbing so [a,b] equals [0,b].
  TimedQuery qmin{goal_of({3}), Direction::Min, Rational{0, 1}, Rational{1, 1}, 1e-3};
  TimedQuery qmax{goal_of({3}), Direction::Max, Rational{0, 1}, Rational{1, 1}, 1e-3};
  AnalysisResult rmin = timed_reachability(ma, qmin);
  AnalysisResult rmax = timed_reachability(ma, qmax);
  double slow = 1.0 - std::exp(-1.0), fast = 1.0 - std::exp(-4.0);
  CHECK(rmin.value <= slow + 1e-9);
  CHECK(rmin.value + *rmin.error_bound >= slow - 1e-9);
  CHECK(rmax.value <= fast + 1e-9);
  CHECK(rmax.value + *rmax.error_bound >= fast - 1e-9);
  CHECK(rmin.value <= rmax.value + 1e-12);

  // Interval [1,2] keeps min <= max and values within [0,1].
  TimedQuery qi{goal_of({3}), Direction::Min, Rational{1, 1}, Rational{2, 1}, 5e-3};
  TimedQuery qa{goal_of({3}), Direction::Max, Rational{1, 1}, Rational{2, 1}, 5e-3};
  AnalysisResult imin = timed_reachability(ma, qi);
  AnalysisResult imax = timed_reachability(ma, qa);
  CHECK(imin.value <= imax.value + 1e-12);
  CHECK(imin.value >= 0.0);
  CHECK(imax.value <= 1.0);
}

TEST_CASE("digitised horizons are monotone and stay in [0,1] on random models") {
  oracles::Rng rng(401);
  for (int round = 0; round < 25; ++round) {
    MarkovAutomaton ma = oracles::random_nonzeno_ma(rng, oracles::pick(rng, 3, 10), false);
    GoalSet goal = goal_of({static_cast<StateIdx>(oracles::pick(rng, 0, ma.num_states - 1))});
    TimedQuery q{goal, oracles::pick(rng, 0, 1) ? Direction::Min : Direction::Max,
                 Rational{0, 1}, Rational{1, 2}, 5e-2};
    TimedTrace trace;
    AnalysisResult r = timed_reachability(ma, q, &trace);
    CHECK(trace.min_horizon_delta >= -1e-10);
    CHECK(trace.min_value >= -1e-10);
    CHECK(trace.max_value <= 1.0 + 1e-10);
    CHECK(r.value >= 0.0);
    CHECK(r.value <= 1.0);
  }
}

TEST_CASE("halving epsilon refines consistently") {
  MarkovAutomaton ma = single_rate_one();
  ma.markov_transitions[0].push_back({0, 0.5});  // some self-rate for variety
  GoalSet goal = goal_of({1});
  double prev_value = -1.0, prev_bound = 1.0;
  for (double eps : {4e-2, 2e-2, 1e-2}) {
    TimedQuery q{goal, Direction::Max, Rational{0, 1}, Rational{1, 1}, eps};
    AnalysisResult r = timed_reachability(ma, q);
    if (prev_value >= 0.0) CHECK(r.value >= prev_value - prev_bound);
    prev_value = r.value;
    prev_bound = *r.error_bound;
  }
}

TEST_CASE("timed queries reject Zeno and empty-goal inputs") {
  MarkovAutomaton zeno;
  zeno.resize(2);
  zeno.prob_transitions[0].push_back({kTau, Distribution::dirac(1)});
  zeno.prob_transitions[1].push_back({kTau, Distribution::dirac(0)});
  CHECK_THROWS_AS(
      timed_reachability(zeno, {goal_of({0}), Direction::Min, Rational{0, 1}, Rational{1, 1}, 1e-2}),
      InputError);
  MarkovAutomaton ma = single_rate_one();
  CHECK_THROWS_AS(
      timed_reachability(ma, {GoalSet{}, Direction::Min, Rational{0, 1}, Rational{1, 1}, 1e-2}),
      InputError);
}

TEST_CASE("unbounded reachability basics") {
  MarkovAutomaton ma;
  ma.resize(4);
  ma.state_names = {"s", "a", "b", "g"};
  ma.prob_transitions[0].push_back({kTau, make_distribution({{1, 0.5}, {2, 0.5}})});
  ma.markov_transitions[1].push_back({3, 1.0});
  ma.markov_transitions[2].push_back({2, 1.0});  // trap
  ma.markov_transitions[3].push_back({3, 1.0});

  CHECK(unbounded_reachability(ma, goal_of({0}), Direction::Min).value == doctest::Approx(1.0));
  CHECK(unbounded_reachability(ma, goal_of({3}), Direction::Max).value == doctest::Approx(0.5));
  MarkovAutomaton unreachable = ma;
  CHECK(unbounded_reachability(unreachable, goal_of({2}), Direction::Min).value >= 0.0);

  GoalSet never;
  never.members.insert(1);
  MarkovAutomaton island;
  island.resize(2);
  island.markov_transitions[0].push_back({0, 1.0});
  island.markov_transitions[1].push_back({1, 1.0});
  CHECK(unbounded_reachability(island, never, Direction::Max).value == doctest::Approx(0.0));
}

TEST_CASE("unbounded reachability agrees with an independent LP on random models") {
  oracles::Rng rng(409);
  for (int round = 0; round < 40; ++round) {
    int n = oracles::pick(rng, 3, 12);
    MarkovAutomaton ma = oracles::random_nonzeno_ma(rng, n, false);
    MarkovAutomaton prepared = prepare_for_analysis(ma);
    GoalSet goal = goal_of({static_cast<StateIdx>(oracles::pick(rng, 0, n - 1))});

    AnalysisResult rmax = unbounded_reachability(ma, goal, Direction::Max, 1e-12);

    // Independent LP: minimize sum v subject to v >= P v per action, v = 1 on
    // the goal, v >= 0. The least such v is the max reach probability.
    LpProblem lp;
    lp.maximize = false;
    lp.objective.assign(prepared.num_states, 1.0);
    for (StateIdx s = 0; s < prepared.num_states; ++s) {
      auto add_row = [&](const Distribution& d) {
        LpConstraint c;
        c.coeffs.assign(prepared.num_states, 0.0);
        c.coeffs[s] += 1.0;
        for (const auto& [t, p] : d.entries) c.coeffs[t] -= p;
        c.rel = Relation::Ge;
        c.rhs = 0.0;
        lp.constraints.push_back(std::move(c));
      };
      if (goal.contains(s)) {
        LpConstraint c;
        c.coeffs.assign(prepared.num_states, 0.0);
        c.coeffs[s] = 1.0;
        c.rel = Relation::Eq;
        c.rhs = 1.0;
        lp.constraints.push_back(std::move(c));
        continue;
      }
      if (prepared.state_class(s) == StateClass::Markovian)
        add_row(embedded_probs(prepared, s));
      else
        for (const auto& t : prepared.prob_transitions[s]) add_row(t.dist);
    }
    LpSolution sol = simplex_solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    for (StateIdx s = 0; s < prepared.num_states; ++s)
      CHECK(rmax.state_values[s] == doctest::Approx(sol.x[s]).epsilon(1e-6));

    // Min direction against the independent value-iteration oracle.
    AnalysisResult rmin = unbounded_reachability(ma, goal, Direction::Min, 1e-12);
    auto vmin = oracles::vi_reach_prob(prepared, goal, false);
    for (StateIdx s = 0; s < prepared.num_states; ++s)
      CHECK(rmin.state_values[s] == doctest::Approx(vmin[s]).epsilon(1e-6));
  }
}
