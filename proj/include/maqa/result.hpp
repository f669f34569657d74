#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "maqa/ssp.hpp"

namespace maqa {

// Outcome of one objective evaluation: the optimum at the initial state,
// per-state values (with an explicit infinity sentinel), accuracy metadata and
// an optional extracted stationary policy.
struct AnalysisResult {
  std::string objective;
  Direction direction = Direction::Min;
  double value = 0.0;
  bool value_infinite = false;
  std::vector<double> state_values;
  std::vector<char> state_infinite;
  std::optional<double> tolerance;
  std::optional<double> epsilon;      // timed objectives only
  std::optional<double> error_bound;  // certified digitisation bound
  std::optional<double> bracket_low;  // certified lower end (= value when one-sided)
  std::vector<std::pair<std::string, std::string>> policy;  // state -> action label
  long iterations = 0;
  double time_s = 0.0;
  StateIdx states = 0;
  std::size_t goal_states = 0;
  std::size_t transitions = 0;
  std::vector<std::string> notes;
};

}  // namespace maqa
