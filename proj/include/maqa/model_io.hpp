#pragma once

#include <string>
#include <utility>

#include "maqa/model.hpp"

// Reader/writer for the line-oriented explicit-state .ma format:
//
//   #INITIAL
//   <state-id>
//   #GOALS            ; optional states, become the label "goal"
//   <state-id>*
//   #LABELS           ; optional extension: named state sets
//   (<label-name> <state-id>*)*
//   #TRANSITIONS
//   (<state-id> <action>      ; action "!" opens a Markovian block
//    ("* <state-id> <value>")+ )*
//
// ";" starts a comment, blank lines are ignored, "tau" names the internal
// action. Markovian branch values are rates (> 0); all other branch values
// are probabilities summing to 1 (+- 1e-9). States come into existence by
// appearing anywhere; indices follow first appearance.

namespace maqa {

// Throws InputError with line/column positions on malformed documents.
std::pair<MarkovAutomaton, GoalSet> parse_ma(const std::string& text);

// Canonical serialization: states in index order, branches sorted by target,
// numbers printed with 17 significant digits. write -> parse -> write is a
// fixpoint, and parsing the output of write_ma reproduces the model exactly
// for canonically numbered inputs (index order = first appearance order).
std::string write_ma(const MarkovAutomaton& ma, const GoalSet& goal);

// Label expression: a label name or a union "l1|l2|...".
GoalSet resolve_goal(const MarkovAutomaton& ma, const std::string& expr);

}  // namespace maqa
