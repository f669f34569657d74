#pragma once

#include <optional>
#include <string>
#include <vector>

#include "maqa/model.hpp"

// Minimal GSPN frontend: parses a textual net description and builds its MA
// semantics by reachability-graph exploration. Immediate transitions may be
// partially weighted: in a vanishing marking all enabled weighted immediates
// fire as one probabilistic alternative (weight-proportional), while each
// enabled unweighted immediate is its own nondeterministic alternative.

namespace maqa {

struct GspnTransition {
  std::string name;
  bool timed = false;
  double rate = 0.0;                 // timed transitions
  std::optional<double> weight;      // immediate transitions; nullopt = unweighted
  std::vector<std::pair<int, int>> inputs;   // (place, multiplicity)
  std::vector<std::pair<int, int>> outputs;
};

struct GspnNet {
  std::vector<std::string> places;
  std::vector<int> initial_tokens;
  std::vector<GspnTransition> transitions;
  int bound = 1;  // token bound per place (safe nets by default)
};

// Grammar (one item per line, '#' starts a comment):
//   place <name> <tokens>
//   timed <name> <rate> ; <in-places> ; <out-places>
//   immediate <name> <weight|-> ; <in-places> ; <out-places>
//   bound <k>
// Place lists are whitespace-separated, multiplicities by repetition.
GspnNet parse_gspn(const std::string& text);

// Breadth-first exploration from the initial marking (FIFO frontier,
// transitions fired in declaration order). Vanishing markings become
// probabilistic states, tangible markings Markovian ones. Each marking is
// labelled with its marked places ("p2,p3") and each place labels the
// markings that carry a token on it.
MarkovAutomaton gspn_build_ma(const GspnNet& net, int bound, int state_limit);

}  // namespace maqa
