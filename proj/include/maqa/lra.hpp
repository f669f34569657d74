#pragma once

#include "maqa/graph.hpp"
#include "maqa/longrun_ratio.hpp"
#include "maqa/model.hpp"
#include "maqa/result.hpp"

// Long-run average fraction of time spent in a goal set. Per maximal end
// component the value is a long-run ratio of residence-time costs; the
// component values then feed a quotient SSP whose decision states u_j either
// commit to their component (terminal value) or leave it.

namespace maqa {

struct LraQuery {
  GoalSet goal;
  Direction direction = Direction::Min;
  double tol = 1e-8;
  RatioEngine ratio_engine = RatioEngine::Auto;
};

AnalysisResult lra(const MarkovAutomaton& ma, const LraQuery& query);

// Residence-time two-cost MDP of one MEC: c2 = 1/E(s) on Markovian states,
// c1 additionally restricted to goal states; probabilistic actions cost 0.
// `goal` must already be intersected with the Markovian states.
RatioMdp build_mec_ratio_mdp(const MarkovAutomaton& ma, const MaxEndComponent& mec,
                             const GoalSet& goal);

// Long-run average inside one MEC. The max direction uses the complement
// identity 1 - min over the remaining Markovian states.
double lra_unichain(const MarkovAutomaton& ma, const MaxEndComponent& mec, const GoalSet& goal,
                    Direction dir, RatioEngine engine = RatioEngine::Auto,
                    RatioSolution* solution_out = nullptr);

// Quotient SSP: each MEC j collapses into a decision state u_j (with the
// MEC-leaving transitions plus a commit step) and an absorbing q_j carrying
// terminal cost mec_values[j]; everything else keeps its transitions with
// in-MEC targets redirected to u_j.
struct LraQuotient {
  SspInstance ssp;
  std::vector<std::string> names;     // per quotient state
  std::vector<StateIdx> origin;       // original state or -1 for u_j/q_j
  std::vector<int> u_index, q_index;  // per MEC
  std::vector<int> quotient_of;       // original state -> quotient state (u_j inside MECs)
  // Leaving transition behind each u_j action (besides the leading commit):
  // pairs (state, transition index) aligned with ssp.actions[u_j][1..].
  std::vector<std::vector<std::pair<StateIdx, int>>> leave_refs;
};

LraQuotient build_lra_quotient(const MarkovAutomaton& ma, const std::vector<MaxEndComponent>& mecs,
                               const std::vector<double>& mec_values);

}  // namespace maqa
