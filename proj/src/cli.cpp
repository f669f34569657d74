#include "maqa/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "maqa/errors.hpp"
#include "maqa/expected_time.hpp"
#include "maqa/generators.hpp"
#include "maqa/gspn.hpp"
#include "maqa/lra.hpp"
#include "maqa/model_io.hpp"
#include "maqa/timed.hpp"

namespace maqa {

namespace {

std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string slurp(const std::string& path, std::istream& stdin_stream) {
  if (path.empty() || path == "-") {
    std::ostringstream buf;
    buf << stdin_stream.rdbuf();
    return buf.str();
  }
  return slurp_file(path);
}

void write_output(const std::string& path, const std::string& text, std::ostream& stdout_stream) {
  if (path.empty() || path == "-") {
    stdout_stream << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

void print_result(const AnalysisResult& r, const std::string& format, std::ostream& out) {
  if (format == "json") {
    nlohmann::ordered_json j;
    j["objective"] = r.objective;
    j["direction"] = to_string(r.direction);
    if (r.value_infinite)
      j["value"] = "inf";
    else
      j["value"] = r.value;
    j["error_bound"] = r.error_bound ? nlohmann::ordered_json(*r.error_bound) : nullptr;
    j["epsilon"] = r.epsilon ? nlohmann::ordered_json(*r.epsilon) : nullptr;
    j["states"] = r.states;
    j["goal_states"] = r.goal_states;
    j["time_s"] = r.time_s;
    out << j.dump(2) << "\n";
    return;
  }
  out << r.objective << " = ";
  if (r.value_infinite)
    out << "inf";
  else
    out << r.value;
  out << "\n";
  if (r.error_bound)
    out << "certified bracket: [" << r.bracket_low.value_or(r.value) << ", "
        << std::min(1.0, r.value + *r.error_bound) << "] (epsilon " << *r.epsilon << ")\n";
  out << "states: " << r.states << ", goal states: " << r.goal_states
      << ", transitions: " << r.transitions << "\n";
  out << "time: " << r.time_s << " s\n";
  for (const auto& note : r.notes) out << "note: " << note << "\n";
}

void write_policy(const AnalysisResult& r, const std::string& path, std::ostream& out) {
  std::ostringstream text;
  for (const auto& [state, action] : r.policy) text << state << " " << action << "\n";
  write_output(path, text.str(), out);
}

int do_analyze(const std::string& model_path, const std::string& objective,
               const std::string& goal_expr, const std::string& from, const std::string& to,
               double epsilon, const std::string& engine, double tol, const std::string& policy_path,
               const std::string& format, std::istream& in, std::ostream& out) {
  auto [ma, file_goal] = parse_ma(slurp(model_path, in));
  GoalSet goal = goal_expr.empty() ? file_goal : resolve_goal(ma, goal_expr);

  Direction dir = objective.size() >= 3 && objective.substr(objective.size() - 3) == "min"
                      ? Direction::Min
                      : Direction::Max;
  AnalysisResult result;
  if (objective == "et-min" || objective == "et-max") {
    ExpectedTimeQuery q{goal, dir, engine == "lp" ? SspEngine::Lp : SspEngine::Vi, tol};
    result = expected_time(ma, q);
  } else if (objective == "lra-min" || objective == "lra-max") {
    LraQuery q{goal, dir, tol};
    result = lra(ma, q);
  } else if (objective == "tbr-min" || objective == "tbr-max") {
    TimedQuery q{goal, dir, Rational::parse(from), Rational::parse(to), epsilon};
    result = timed_reachability(ma, q);
  } else {
    result = unbounded_reachability(ma, goal, dir, tol);
  }
  if (!policy_path.empty()) {
    if (objective == "tbr-min" || objective == "tbr-max")
      result.notes.push_back("timed objectives have step-dependent policies; no policy written");
    else
      write_policy(result, policy_path, out);
  }
  print_result(result, format, out);
  return 0;
}

int do_validate(const std::string& path, std::istream& in, std::ostream& out, std::ostream& err) {
  std::string text = slurp(path, in);
  bool is_gspn = path.size() >= 5 && path.substr(path.size() - 5) == ".gspn";
  if (!is_gspn && text.find("#INITIAL") == std::string::npos &&
      text.find("place") != std::string::npos)
    is_gspn = true;

  if (is_gspn) {
    GspnNet net = parse_gspn(text);
    out << "ok: " << net.places.size() << " places, " << net.transitions.size() << " transitions\n";
    return 0;
  }
  auto [ma, goal] = parse_ma(text);
  auto diags = validate(ma);
  int errors = 0;
  for (const auto& d : diags) {
    err << (d.severity == Severity::Error ? "error" : "warning") << ": " << d.message
        << (d.state >= 0 ? " (state " + ma.state_name(d.state) + ")" : "") << "\n";
    errors += d.severity == Severity::Error;
  }
  if (errors > 0) return 2;
  out << "ok: " << ma.num_states << " states, " << ma.transition_count() << " transitions, "
      << goal.members.size() << " goal states\n";
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantitative analysis of Markov automata"};
  app.require_subcommand(1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Evaluate an objective on a .ma model");
  std::string model_path, objective, goal_expr, from = "0", to = "1", engine = "vi";
  std::string policy_path, format = "text";
  double epsilon = 1e-3, tol = 1e-8;
  analyze->add_option("--model", model_path, "input .ma file ('-' or omitted: stdin)");
  analyze->add_option("--objective", objective, "objective")
      ->required()
      ->check(CLI::IsMember(
          {"et-min", "et-max", "lra-min", "lra-max", "tbr-min", "tbr-max", "ur-min", "ur-max"}));
  analyze->add_option("--goal", goal_expr, "goal label expression (default: #GOALS states)");
  analyze->add_option("--from", from, "interval lower bound (tbr)");
  analyze->add_option("--to", to, "interval upper bound (tbr)");
  analyze->add_option("--epsilon", epsilon, "accuracy for timed objectives")->check(CLI::Range(1e-12, 0.9999));
  analyze->add_option("--engine", engine, "SSP engine")->check(CLI::IsMember({"vi", "lp"}));
  analyze->add_option("--tol", tol, "value iteration tolerance");
  analyze->add_option("--policy", policy_path, "write the extracted policy to this file");
  analyze->add_option("--format", format, "output format")->check(CLI::IsMember({"text", "json"}));

  // import-gspn
  auto* import = app.add_subcommand("import-gspn", "Translate a .gspn net into a .ma model");
  std::string gspn_path, import_out;
  int bound = 0, state_limit = 1'000'000;
  import->add_option("input", gspn_path, "input .gspn file")->required();
  import->add_option("-o,--output", import_out, "output .ma file ('-': stdout)");
  import->add_option("--bound", bound, "token bound override (default: net's bound)");
  import->add_option("--state-limit", state_limit, "exploration state limit");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a case-study model");
  gen->require_subcommand(1);
  auto* gen_polling = gen->add_subcommand("polling", "two-station polling system");
  int poll_q = 2, poll_n = 3;
  std::string gen_out;
  gen_polling->add_option("--Q", poll_q, "queue capacity")->required();
  gen_polling->add_option("--N", poll_n, "number of job types")->required();
  gen_polling->add_option("-o,--output", gen_out, "output .ma file ('-': stdout)");
  auto* gen_queue = gen->add_subcommand("queue", "two-station queueing system");
  double l1 = 1.0, l2 = 1.0, mu = 1.0;
  gen_queue->add_option("--l1", l1, "arrival rate of station 1")->required();
  gen_queue->add_option("--l2", l2, "arrival rate of station 2")->required();
  gen_queue->add_option("--mu", mu, "service rate")->required();
  gen_queue->add_option("-o,--output", gen_out, "output .ma file ('-': stdout)");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Check a .ma or .gspn file");
  std::string validate_path;
  validate_cmd->add_option("input", validate_path, "file to check")->required();

  std::vector<const char*> argv;
  argv.push_back("maqa");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (analyze->parsed())
      return do_analyze(model_path, objective, goal_expr, from, to, epsilon, engine, tol,
                        policy_path, format, in, out);
    if (import->parsed()) {
      GspnNet net = parse_gspn(slurp_file(gspn_path));
      MarkovAutomaton ma = gspn_build_ma(net, bound > 0 ? bound : net.bound, state_limit);
      write_output(import_out, write_ma(ma, GoalSet{}), out);
      return 0;
    }
    if (gen->parsed()) {
      MarkovAutomaton ma = gen_polling->parsed()
                               ? maqa::gen_polling({poll_q, poll_n})
                               : gen_queueing({l1, l2, mu});
      write_output(gen_out, write_ma(ma, GoalSet{}), out);
      return 0;
    }
    if (validate_cmd->parsed()) return do_validate(validate_path, in, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const ConvergenceError& e) {
    err << "convergence error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

}  // namespace maqa
