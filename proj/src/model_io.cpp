#include "maqa/model_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "maqa/errors.hpp"

namespace maqa {

namespace {

struct Token {
  std::string text;
  int line = 0;
  int col = 0;
};

// One vector of tokens per non-empty line; ';' comments stripped.
std::vector<std::vector<Token>> tokenize(const std::string& text) {
  std::vector<std::vector<Token>> lines;
  int line_no = 1;
  std::size_t i = 0;
  while (i <= text.size()) {
    std::size_t end = text.find('\n', i);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + i, end - i);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t comment = line.find(';');
    if (comment != std::string_view::npos) line = line.substr(0, comment);

    std::vector<Token> toks;
    std::size_t p = 0;
    while (p < line.size()) {
      while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p]))) ++p;
      std::size_t start = p;
      while (p < line.size() && !std::isspace(static_cast<unsigned char>(line[p]))) ++p;
      if (p > start)
        toks.push_back({std::string(line.substr(start, p - start)), line_no, static_cast<int>(start + 1)});
    }
    if (!toks.empty()) lines.push_back(std::move(toks));
    if (end == text.size()) break;
    i = end + 1;
    ++line_no;
  }
  return lines;
}

[[noreturn]] void fail(const Token& at, const std::string& msg) {
  throw InputError("line " + std::to_string(at.line) + ", col " + std::to_string(at.col) + ": " + msg);
}

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

double parse_number(const Token& tok) {
  for (char c : tok.text)
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+' ||
          c == 'e' || c == 'E'))
      fail(tok, "malformed number '" + tok.text + "'");
  const char* begin = tok.text.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + tok.text.size() || !std::isfinite(v))
    fail(tok, "malformed number '" + tok.text + "'");
  return v;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::pair<MarkovAutomaton, GoalSet> parse_ma(const std::string& text) {
  auto lines = tokenize(text);
  MarkovAutomaton ma;
  GoalSet goal;
  goal.source = "goal";
  std::map<std::string, StateIdx> index_of;

  auto state_index = [&](const Token& tok) {
    if (!is_identifier(tok.text)) fail(tok, "invalid state identifier '" + tok.text + "'");
    auto it = index_of.find(tok.text);
    if (it != index_of.end()) return it->second;
    StateIdx s = static_cast<StateIdx>(ma.state_names.size());
    index_of.emplace(tok.text, s);
    ma.state_names.push_back(tok.text);
    return s;
  };

  std::size_t li = 0;
  auto section_is = [&](const char* name) {
    return li < lines.size() && lines[li][0].text == name;
  };

  if (lines.empty() || !section_is("#INITIAL"))
    throw InputError("line 1: expected #INITIAL section");
  if (lines[li].size() > 1) fail(lines[li][1], "unexpected token after #INITIAL");
  ++li;
  if (li >= lines.size() || lines[li][0].text[0] == '#')
    throw InputError("missing initial state after #INITIAL");
  if (lines[li].size() != 1) fail(lines[li][1], "exactly one initial state expected");
  ma.initial = state_index(lines[li][0]);
  ++li;
  if (section_is("#INITIAL")) fail(lines[li][0], "duplicate #INITIAL section");

  if (section_is("#GOALS")) {
    if (lines[li].size() > 1) fail(lines[li][1], "unexpected token after #GOALS");
    ++li;
    while (li < lines.size() && lines[li][0].text[0] != '#') {
      for (const auto& tok : lines[li]) goal.members.insert(state_index(tok));
      ++li;
    }
  }

  if (section_is("#LABELS")) {
    ++li;
    while (li < lines.size() && lines[li][0].text[0] != '#') {
      const auto& name = lines[li][0];
      if (!is_identifier(name.text)) fail(name, "invalid label name '" + name.text + "'");
      auto& states = ma.labels[name.text];
      for (std::size_t t = 1; t < lines[li].size(); ++t) states.insert(state_index(lines[li][t]));
      ++li;
    }
  }

  if (!section_is("#TRANSITIONS")) {
    if (li < lines.size()) fail(lines[li][0], "expected #TRANSITIONS section");
    throw InputError("missing #TRANSITIONS section");
  }
  ++li;

  std::vector<std::vector<ProbTransition>> prob;
  std::vector<std::vector<MarkovEdge>> markov;
  auto ensure = [&](StateIdx s) {
    if (static_cast<std::size_t>(s) >= prob.size()) {
      prob.resize(s + 1);
      markov.resize(s + 1);
    }
  };

  while (li < lines.size()) {
    const auto& header = lines[li];
    if (header[0].text == "*") fail(header[0], "branch line without a transition header");
    if (header[0].text == "#INITIAL") fail(header[0], "duplicate #INITIAL section");
    if (header[0].text[0] == '#') fail(header[0], "unexpected section '" + header[0].text + "'");
    if (header.size() != 2) fail(header[0], "transition header must be '<state> <action>'");
    StateIdx src = state_index(header[0]);
    ensure(src);
    const Token& action_tok = header[1];
    bool markovian = action_tok.text == "!";
    if (!markovian && !is_identifier(action_tok.text))
      fail(action_tok, "invalid action '" + action_tok.text + "'");
    ++li;

    std::vector<std::pair<StateIdx, double>> branches;
    std::vector<MarkovEdge> edges;
    const Token* first_branch = nullptr;
    while (li < lines.size() && lines[li][0].text == "*") {
      const auto& bl = lines[li];
      if (bl.size() != 3) fail(bl[0], "branch line must be '* <state> <value>'");
      if (!first_branch) first_branch = &bl[0];
      StateIdx target = state_index(bl[1]);
      ensure(target);
      double value = parse_number(bl[2]);
      if (markovian) {
        if (!(value > 0.0)) fail(bl[2], "rate must be strictly positive");
        edges.push_back({target, value});
      } else {
        if (value < 0.0) fail(bl[2], "negative probability");
        branches.emplace_back(target, value);
      }
      ++li;
    }
    if (!first_branch) fail(header[0], "transition block has no branches");

    if (markovian) {
      markov[src].insert(markov[src].end(), edges.begin(), edges.end());
    } else {
      Distribution dist;
      try {
        dist = make_distribution(std::move(branches));
      } catch (const std::invalid_argument& e) {
        fail(*first_branch, e.what());
      }
      int action = action_tok.text == kTauName ? kTau : ma.add_action(action_tok.text);
      prob[src].push_back({action, std::move(dist)});
    }
  }

  ma.resize(static_cast<StateIdx>(ma.state_names.size()));
  for (StateIdx s = 0; s < static_cast<StateIdx>(prob.size()); ++s) {
    ma.prob_transitions[s] = std::move(prob[s]);
    ma.markov_transitions[s] = std::move(markov[s]);
  }
  if (ma.num_states == 0) throw InputError("document declares no states");
  if (!goal.members.empty()) ma.labels["goal"] = goal.members;
  return {std::move(ma), std::move(goal)};
}

std::string write_ma(const MarkovAutomaton& ma, const GoalSet& goal) {
  // Canonical emission order = the parser's first-appearance order of the
  // document being written. Ranks are assigned on first mention (initial,
  // then goals, labels, then transition blocks with rank-sorted branches), so
  // re-parsing the output reproduces the emitted numbering exactly.
  std::vector<int> rank(ma.num_states, -1);
  std::vector<StateIdx> order;
  auto discover = [&](StateIdx s) {
    if (rank[s] < 0) {
      rank[s] = static_cast<int>(order.size());
      order.push_back(s);
    }
  };
  discover(ma.initial);
  for (StateIdx s : goal.members) discover(s);

  std::ostringstream out;
  out << "#INITIAL\n" << ma.state_name(ma.initial) << "\n";
  out << "#GOALS\n";
  {
    std::vector<StateIdx> goals(goal.members.begin(), goal.members.end());
    std::sort(goals.begin(), goals.end(), [&](StateIdx a, StateIdx b) { return rank[a] < rank[b]; });
    for (StateIdx s : goals) out << ma.state_name(s) << "\n";
  }

  // Extension section for named state sets; only identifier-shaped names that
  // fit the grammar travel through the file format.
  std::vector<std::string> label_lines;
  for (const auto& [name, states] : ma.labels) {
    if (name == "goal" || !is_identifier(name) || states.empty()) continue;
    for (StateIdx s : states) discover(s);
    std::vector<StateIdx> sorted(states.begin(), states.end());
    std::sort(sorted.begin(), sorted.end(), [&](StateIdx a, StateIdx b) { return rank[a] < rank[b]; });
    std::string line = name;
    for (StateIdx s : sorted) line += " " + ma.state_name(s);
    label_lines.push_back(std::move(line));
  }
  if (!label_lines.empty()) {
    out << "#LABELS\n";
    for (const auto& line : label_lines) out << line << "\n";
  }

  out << "#TRANSITIONS\n";
  auto emit_blocks = [&](StateIdx s) {
    for (const auto& t : ma.prob_transitions[s]) {
      out << ma.state_name(s) << " " << ma.actions[t.action] << "\n";
      auto entries = t.dist.entries;  // already sorted by original index
      for (const auto& [target, p] : entries) discover(target);
      std::stable_sort(entries.begin(), entries.end(),
                       [&](const auto& a, const auto& b) { return rank[a.first] < rank[b.first]; });
      for (const auto& [target, p] : entries)
        out << "* " << ma.state_name(target) << " " << format_value(p) << "\n";
    }
    if (!ma.markov_transitions[s].empty()) {
      out << ma.state_name(s) << " !\n";
      auto edges = ma.markov_transitions[s];
      std::stable_sort(edges.begin(), edges.end(),
                       [](const MarkovEdge& a, const MarkovEdge& b) { return a.target < b.target; });
      for (const auto& e : edges) discover(e.target);
      std::stable_sort(edges.begin(), edges.end(),
                       [&](const MarkovEdge& a, const MarkovEdge& b) { return rank[a.target] < rank[b.target]; });
      for (const auto& e : edges)
        out << "* " << ma.state_name(e.target) << " " << format_value(e.rate) << "\n";
    }
  };
  std::size_t next = 0;
  while (true) {
    for (; next < order.size(); ++next) emit_blocks(order[next]);
    StateIdx pending = -1;
    for (StateIdx s = 0; s < ma.num_states && pending < 0; ++s)
      if (rank[s] < 0 && (!ma.prob_transitions[s].empty() || !ma.markov_transitions[s].empty()))
        pending = s;
    if (pending < 0) break;
    discover(pending);
  }
  return out.str();
}

GoalSet resolve_goal(const MarkovAutomaton& ma, const std::string& expr) {
  GoalSet goal;
  goal.source = expr;
  std::size_t pos = 0;
  while (pos <= expr.size()) {
    std::size_t bar = expr.find('|', pos);
    if (bar == std::string::npos) bar = expr.size();
    std::string name = expr.substr(pos, bar - pos);
    auto it = ma.labels.find(name);
    if (it == ma.labels.end()) throw InputError("unknown label '" + name + "'");
    goal.members.insert(it->second.begin(), it->second.end());
    pos = bar + 1;
    if (bar == expr.size()) break;
  }
  return goal;
}

}  // namespace maqa
