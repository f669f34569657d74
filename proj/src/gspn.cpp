#include "maqa/gspn.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <deque>
#include <map>
#include <sstream>

#include "maqa/errors.hpp"

namespace maqa {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_positive(const std::string& tok, int line, const char* what) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || !(v > 0.0))
    throw InputError("line " + std::to_string(line) + ": " + what + " must be a positive number, got '" +
                     tok + "'");
  return v;
}

}  // namespace

GspnNet parse_gspn(const std::string& text) {
  GspnNet net;
  std::map<std::string, int> place_of;
  std::map<std::string, int> transition_of;

  auto place_index = [&](const std::string& name, int line) {
    auto it = place_of.find(name);
    if (it == place_of.end())
      throw InputError("line " + std::to_string(line) + ": arc references undeclared place '" + name + "'");
    return it->second;
  };
  auto parse_place_list = [&](const std::string& field, int line) {
    std::vector<std::pair<int, int>> arcs;
    for (const auto& name : split_ws(field)) {
      int p = place_index(name, line);
      bool merged = false;
      for (auto& [q, mult] : arcs)
        if (q == p) {
          ++mult;
          merged = true;
        }
      if (!merged) arcs.emplace_back(p, 1);
    }
    return arcs;
  };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::size_t comment = raw.find('#');
    if (comment != std::string::npos) raw = raw.substr(0, comment);

    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      std::size_t semi = raw.find(';', pos);
      fields.push_back(raw.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos));
      if (semi == std::string::npos) break;
      pos = semi + 1;
    }
    auto head = split_ws(fields[0]);
    if (head.empty()) continue;
    const std::string& kind = head[0];

    if (kind == "place") {
      if (head.size() != 3)
        throw InputError("line " + std::to_string(line_no) + ": expected 'place <name> <tokens>'");
      if (place_of.count(head[1]))
        throw InputError("line " + std::to_string(line_no) + ": duplicate place '" + head[1] + "'");
      char* end = nullptr;
      long tokens = std::strtol(head[2].c_str(), &end, 10);
      if (end != head[2].c_str() + head[2].size() || tokens < 0)
        throw InputError("line " + std::to_string(line_no) + ": invalid token count '" + head[2] + "'");
      place_of[head[1]] = static_cast<int>(net.places.size());
      net.places.push_back(head[1]);
      net.initial_tokens.push_back(static_cast<int>(tokens));
    } else if (kind == "bound") {
      if (head.size() != 2)
        throw InputError("line " + std::to_string(line_no) + ": expected 'bound <k>'");
      net.bound = static_cast<int>(parse_positive(head[1], line_no, "bound"));
    } else if (kind == "timed" || kind == "immediate") {
      if (head.size() != 3 || fields.size() != 3)
        throw InputError("line " + std::to_string(line_no) + ": expected '" + kind +
                         " <name> <value> ; <in> ; <out>'");
      if (transition_of.count(head[1]))
        throw InputError("line " + std::to_string(line_no) + ": duplicate transition '" + head[1] + "'");
      GspnTransition t;
      t.name = head[1];
      t.timed = kind == "timed";
      if (t.timed)
        t.rate = parse_positive(head[2], line_no, "rate");
      else if (head[2] != "-")
        t.weight = parse_positive(head[2], line_no, "weight");
      t.inputs = parse_place_list(fields[1], line_no);
      t.outputs = parse_place_list(fields[2], line_no);
      transition_of[t.name] = static_cast<int>(net.transitions.size());
      net.transitions.push_back(std::move(t));
    } else {
      throw InputError("line " + std::to_string(line_no) + ": unknown directive '" + kind + "'");
    }
  }
  if (net.places.empty()) throw InputError("net declares no places");
  for (int p = 0; p < static_cast<int>(net.places.size()); ++p)
    if (net.initial_tokens[p] > net.bound)
      throw InputError("initial marking exceeds token bound on place '" + net.places[p] + "'");
  return net;
}

namespace {

using Marking = std::vector<int>;

std::string marking_label(const GspnNet& net, const Marking& m) {
  std::string label;
  for (std::size_t p = 0; p < m.size(); ++p)
    if (m[p] > 0) label += (label.empty() ? "" : ",") + net.places[p];
  return label.empty() ? "empty" : label;
}

std::string marking_name(const GspnNet& net, const Marking& m) {
  std::string name = "m";
  for (std::size_t p = 0; p < m.size(); ++p) {
    if (m[p] == 0) continue;
    name += "_" + net.places[p];
    if (m[p] > 1) name += "x" + std::to_string(m[p]);
  }
  return name == "m" ? "m_empty" : name;
}

bool enabled(const GspnTransition& t, const Marking& m) {
  for (const auto& [p, mult] : t.inputs)
    if (m[p] < mult) return false;
  return true;
}

Marking fire(const GspnNet& net, const GspnTransition& t, const Marking& m, int bound) {
  Marking out = m;
  for (const auto& [p, mult] : t.inputs) out[p] -= mult;
  for (const auto& [p, mult] : t.outputs) {
    out[p] += mult;
    if (out[p] > bound)
      throw InputError("token bound exceeded on place '" + net.places[p] + "' firing '" + t.name +
                       "' in marking {" + marking_label(net, m) + "}");
  }
  return out;
}

}  // namespace

MarkovAutomaton gspn_build_ma(const GspnNet& net, int bound, int state_limit) {
  if (state_limit <= 0) throw InputError("state limit must be positive");
  MarkovAutomaton ma;
  std::map<Marking, StateIdx> index_of;
  std::deque<Marking> frontier;
  std::vector<Marking> markings;

  auto state_of = [&](const Marking& m) {
    auto it = index_of.find(m);
    if (it != index_of.end()) return it->second;
    if (static_cast<int>(markings.size()) >= state_limit)
      throw ResourceError("state limit " + std::to_string(state_limit) + " exceeded during exploration");
    StateIdx s = static_cast<StateIdx>(markings.size());
    index_of.emplace(m, s);
    markings.push_back(m);
    frontier.push_back(m);
    return s;
  };

  Marking initial = net.initial_tokens;
  state_of(initial);

  std::vector<std::vector<ProbTransition>> prob;
  std::vector<std::vector<MarkovEdge>> markov;
  while (!frontier.empty()) {
    Marking m = frontier.front();
    frontier.pop_front();
    StateIdx s = index_of[m];

    std::vector<const GspnTransition*> weighted, unweighted, timed;
    for (const auto& t : net.transitions) {
      if (!enabled(t, m)) continue;
      if (t.timed)
        timed.push_back(&t);
      else if (t.weight)
        weighted.push_back(&t);
      else
        unweighted.push_back(&t);
    }

    std::vector<ProbTransition> taus;
    std::vector<MarkovEdge> rates;
    if (!weighted.empty() || !unweighted.empty()) {
      // Vanishing marking: timed transitions are preempted (maximal progress).
      for (const GspnTransition* t : unweighted)
        taus.push_back({kTau, Distribution::dirac(state_of(fire(net, *t, m, bound)))});
      if (!weighted.empty()) {
        double total = 0.0;
        for (const GspnTransition* t : weighted) total += *t->weight;
        std::vector<std::pair<StateIdx, double>> branches;
        for (const GspnTransition* t : weighted)
          branches.emplace_back(state_of(fire(net, *t, m, bound)), *t->weight / total);
        taus.push_back({kTau, make_distribution(std::move(branches))});
      }
    } else {
      for (const GspnTransition* t : timed)
        rates.push_back({state_of(fire(net, *t, m, bound)), t->rate});
    }
    if (prob.size() < markings.size()) {
      prob.resize(markings.size());
      markov.resize(markings.size());
    }
    prob[s] = std::move(taus);
    markov[s] = std::move(rates);
  }
  prob.resize(markings.size());
  markov.resize(markings.size());

  ma.resize(static_cast<StateIdx>(markings.size()));
  ma.initial = 0;
  for (StateIdx s = 0; s < ma.num_states; ++s) {
    ma.prob_transitions[s] = std::move(prob[s]);
    ma.markov_transitions[s] = std::move(markov[s]);
    ma.state_names.push_back(marking_name(net, markings[s]));
    ma.labels[marking_label(net, markings[s])].insert(s);
    for (std::size_t p = 0; p < net.places.size(); ++p)
      if (markings[s][p] > 0) ma.labels[net.places[p]].insert(s);
  }
  return ma;
}

}  // namespace maqa
