#pragma once

#include <string>
#include <vector>

#include "maqa/model.hpp"
#include "maqa/ssp.hpp"

// Minimum long-run ratio objective on a two-cost MDP: the accumulated c1 over
// accumulated c2 along infinite paths, minimised over policies. Instances are
// communicating (one maximal end component); c2 is positive on some pair of
// every cycle, which keeps the ratio well defined.

namespace maqa {

struct RatioAction {
  Distribution dist;
  double c1 = 0.0;
  double c2 = 0.0;
  int ref = -1;
};

struct RatioMdp {
  int num_states = 0;
  std::vector<std::vector<RatioAction>> actions;

  void resize(int n) {
    num_states = n;
    actions.resize(n);
  }
  std::size_t row_count() const {
    std::size_t r = 0;
    for (const auto& a : actions) r += a.size();
    return r;
  }
};

enum class RatioEngine { Auto, Lp, PolicyIteration };

struct RatioSolution {
  double ratio = 0.0;
  std::vector<double> witness;  // x_s of the ratio LP (bias values)
  std::vector<int> policy;
  std::string engine;
};

// Solves: maximize k subject to
//   x_s <= c1(s,a) - k*c2(s,a) + sum_s' P(s,a,s') x_s'   for every (s,a)
// with k and all x_s free. The Auto engine uses the dense simplex up to a few
// hundred rows and switches to sparse policy iteration beyond that; both
// produce the same optimality certificate (every constraint holds, one tight
// constraint per state).
RatioSolution longrun_ratio_min(const RatioMdp& mdp, RatioEngine engine = RatioEngine::Auto);

// Largest constraint violation of a candidate (ratio, witness); <= ~1e-8 for
// a valid solution. Used by tests and the policy-iteration engine.
double ratio_certificate_slack(const RatioMdp& mdp, const RatioSolution& sol);

}  // namespace maqa
