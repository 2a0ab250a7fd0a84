// npls — interpreter and runtime for NPL(s) normative programs.
//
// Subcommands:
//   check <program.npl>              validate a program
//   run <program.npl> <script>       replay a script of assert/retract/tick
//   repl <program.npl>               interactive session
//   scenario <name> <config.json>    run a packaged scenario (myjoghurt)

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "npls/engine.hpp"
#include "npls/parser.hpp"
#include "npls/printer.hpp"
#include "npls/scenario_config.hpp"
#include "npls/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitIo = 2;
constexpr int kExitExpectation = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw npls::Error("io-error", "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path) {
    if (!path.empty()) {
      out_.open(path, std::ios::binary | std::ios::trunc);
      if (!out_) throw npls::Error("io-error", "cannot write " + path);
    }
  }
  void line(const std::string& s) {
    if (out_.is_open()) {
      out_ << s << '\n';
      out_.flush();  // keep the file valid after abnormal termination
    }
  }

 private:
  std::ofstream out_;
};

int cmd_check(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const npls::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  try {
    npls::ProgramAst ast = npls::parse_program(text);
    npls::Engine::load(ast);
  } catch (const npls::ParseError& e) {
    std::cerr << path << ":" << e.line() << ":" << e.column() << ": "
              << e.what() << '\n';
    return kExitParse;
  } catch (const npls::Error& e) {
    std::cerr << path << ": " << e.code() << ": " << e.what() << '\n';
    return kExitParse;
  }
  std::cout << "ok\n";
  return kExitOk;
}

struct Directive {
  enum class Kind { Assert, Retract, Tick, Expect } kind;
  npls::TermPtr term;       // assert/retract/expect
  std::int64_t tick_ms = 0; // tick
  int line = 0;
};

std::vector<Directive> parse_script(const std::string& text) {
  std::vector<Directive> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto comment = line.find("//");
    if (comment != std::string::npos) line = line.substr(0, comment);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    if (line.back() != '.')
      throw npls::ParseError("script directive must end with '.'", lineno, 1,
                             line);
    line.pop_back();
    std::istringstream ls(line);
    std::string verb;
    ls >> verb;
    std::string rest;
    std::getline(ls, rest);
    Directive d;
    d.line = lineno;
    if (verb == "assert" || verb == "retract" || verb == "expect") {
      d.kind = verb == "assert"    ? Directive::Kind::Assert
               : verb == "retract" ? Directive::Kind::Retract
                                   : Directive::Kind::Expect;
      d.term = npls::parse_term(rest);
    } else if (verb == "tick") {
      d.kind = Directive::Kind::Tick;
      double amount;
      std::string unit;
      std::istringstream rs(rest);
      if (!(rs >> amount >> unit))
        throw npls::ParseError("tick requires '<n> <unit>'", lineno, 1, rest);
      npls::TimeSpec ts;
      if (unit.size() > 1 && unit.back() == 's' && unit != "s")
        unit.pop_back();
      if (unit == "millisecond") ts.unit = npls::TimeSpec::Unit::Millisecond;
      else if (unit == "second") ts.unit = npls::TimeSpec::Unit::Second;
      else if (unit == "minute") ts.unit = npls::TimeSpec::Unit::Minute;
      else if (unit == "hour") ts.unit = npls::TimeSpec::Unit::Hour;
      else if (unit == "day") ts.unit = npls::TimeSpec::Unit::Day;
      else
        throw npls::ParseError("unknown time unit '" + unit + "'", lineno, 1,
                               unit);
      ts.amount = amount;
      d.tick_ms = ts.duration_ms();
    } else {
      throw npls::ParseError("unknown directive '" + verb + "'", lineno, 1,
                             verb);
    }
    out.push_back(std::move(d));
  }
  return out;
}

int cmd_run(const std::string& program_path, const std::string& script_path,
            const std::string& trace_path, bool real_time,
            int max_iterations) {
  std::string program_text, script_text;
  try {
    program_text = read_file(program_path);
    script_text = read_file(script_path);
  } catch (const npls::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  npls::Engine engine;
  std::vector<Directive> script;
  try {
    engine = npls::Engine::load(npls::parse_program(program_text));
    engine.max_iterations = max_iterations;
    script = parse_script(script_text);
  } catch (const npls::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  }

  TraceWriter trace(trace_path);
  std::vector<npls::NormEvent> events;
  std::size_t cursor = 0;
  auto record = [&](const std::vector<npls::NormEvent>& evs) {
    for (const auto& e : evs) {
      trace.line(npls::trace_line(e));
      events.push_back(e);
    }
  };
  try {
    for (const auto& d : script) {
      switch (d.kind) {
        case Directive::Kind::Assert:
          record(engine.assert_fact(d.term));
          break;
        case Directive::Kind::Retract:
          record(engine.retract_fact(d.term));
          break;
        case Directive::Kind::Tick:
          if (real_time)
            std::this_thread::sleep_for(std::chrono::milliseconds(d.tick_ms));
          record(engine.tick(engine.now() + d.tick_ms));
          break;
        case Directive::Kind::Expect: {
          bool matched = false;
          for (std::size_t i = cursor; i < events.size(); ++i) {
            if (events[i].payload &&
                npls::unify(d.term, events[i].payload)) {
              cursor = i + 1;
              matched = true;
              break;
            }
          }
          if (!matched) {
            std::cerr << "expectation failed at script line " << d.line
                      << ": no event matching " << npls::to_string(d.term)
                      << '\n';
            return kExitExpectation;
          }
          break;
        }
      }
    }
  } catch (const npls::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << '\n';
    return kExitParse;
  }
  return kExitOk;
}

int cmd_repl(const std::string& program_path, int max_iterations) {
  npls::Engine engine;
  npls::ProgramAst ast;
  try {
    ast = npls::parse_program(read_file(program_path));
    engine = npls::Engine::load(ast);
    engine.max_iterations = max_iterations;
  } catch (const npls::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  }
  std::string line;
  std::cout << "npls repl — assert, retract, tick, step, norms, obligations, "
               "sanctions, facts, quit\n";
  auto show = [&](const std::vector<npls::NormEvent>& evs) {
    for (const auto& e : evs) std::cout << npls::trace_line(e) << '\n';
  };
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    std::istringstream ls(line);
    std::string verb;
    ls >> verb;
    std::string rest;
    std::getline(ls, rest);
    if (!rest.empty() && rest.back() == '.') rest.pop_back();
    try {
      if (verb == "quit" || verb == "exit") {
        break;
      } else if (verb == "assert") {
        show(engine.assert_fact(npls::parse_term(rest)));
      } else if (verb == "retract") {
        show(engine.retract_fact(npls::parse_term(rest)));
      } else if (verb == "tick") {
        double amount;
        std::string unit;
        std::istringstream rs(rest);
        if (!(rs >> amount >> unit)) {
          std::cout << "usage: tick <n> <unit>\n";
          continue;
        }
        std::string src = "`" + std::to_string(amount) + " " + unit + "`";
        // Reuse the program-level time syntax via a throwaway parse.
        npls::ProgramAst tmp = npls::parse_program(
            "np t { norm x: p -> obligation(a, true, q, " + src + ") . }");
        const auto& n = std::get<npls::NormAst>(tmp.items[0]);
        show(engine.tick(engine.now() + n.deadline_time->duration_ms()));
      } else if (verb == "step") {
        show(engine.step());
      } else if (verb == "norms") {
        for (const auto& item : ast.items)
          if (const auto* n = std::get_if<npls::NormAst>(&item)) {
            npls::print_norm(std::cout, *n);
            std::cout << '\n';
          }
      } else if (verb == "obligations") {
        npls::InstanceFilter f;
        std::istringstream rs(rest);
        std::string opt;
        while (rs >> opt) {
          auto eq = opt.find('=');
          if (eq == std::string::npos) continue;
          std::string k = opt.substr(0, eq), v = opt.substr(eq + 1);
          if (k == "state") f.state = npls::inst_state_from(v);
          else if (k == "norm") f.norm_id = v;
          else if (k == "bearer") f.bearer = v;
        }
        for (const auto& i : engine.query_instances(f)) {
          std::cout << "#" << i.id << " " << i.norm_id << " "
                    << npls::to_keyword(i.kind) << "(" << i.bearer << ", "
                    << npls::to_string(i.maintenance) << ", "
                    << npls::to_string(i.goal) << ", ";
          if (i.deadline_ms)
            std::cout << *i.deadline_ms << "ms";
          else
            std::cout << npls::to_string(i.deadline_formula);
          std::cout << ") state=" << npls::to_keyword(i.state) << '\n';
        }
      } else if (verb == "sanctions") {
        for (const auto& f : engine.facts().facts())
          if (f->kind() == npls::Term::Kind::Compound &&
              f->name() == "sanction")
            std::cout << npls::to_string(f) << '\n';
      } else if (verb == "facts") {
        auto q = npls::parse_formula(rest);
        auto sols = npls::solve(q, engine.facts());
        if (sols.empty()) {
          std::cout << "no\n";
        } else {
          for (const auto& s : sols) {
            if (s.bindings().empty()) {
              std::cout << "yes\n";
            } else {
              for (const auto& [v, t] : s.bindings())
                std::cout << v << " = " << npls::to_string(t) << "  ";
              std::cout << '\n';
            }
          }
        }
      } else {
        std::cout << "unknown command '" << verb << "'\n";
      }
    } catch (const npls::Error& e) {
      std::cout << "error: " << e.code() << ": " << e.what() << '\n';
    }
  }
  return kExitOk;
}

int cmd_scenario(const std::string& name, const std::string& config_path,
                 std::int64_t seed_override, const std::string& trace_path) {
  if (name != "myjoghurt") {
    std::cerr << "error: unknown scenario '" << name << "'\n";
    return kExitParse;
  }
  std::string text;
  try {
    text = read_file(config_path);
  } catch (const npls::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  try {
    npls::ScenarioConfig cfg = npls::scenario_config_from_string(text);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    npls::ScenarioRun run = npls::run_scenario(cfg);
    TraceWriter trace(trace_path);
    for (const auto& l : run.trace) trace.line(l);
    std::cout << npls::format_summary(run.summary);
  } catch (const npls::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << '\n';
    return kExitParse;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NPL(s) interpreter and enforcement runtime"};
  app.require_subcommand(1);

  std::string program_path, script_path, config_path, trace_path, name;
  std::int64_t seed = -1;
  bool real_time = false;
  int max_iterations = 64;

  auto* check = app.add_subcommand("check", "validate a program");
  check->add_option("program", program_path, "program file")->required();

  auto* run = app.add_subcommand("run", "replay a script against a program");
  run->add_option("program", program_path, "program file")->required();
  run->add_option("script", script_path, "script file")->required();
  run->add_option("--trace", trace_path, "trace output path");
  run->add_flag("--real-time", real_time, "map logical ms to wall ms");
  run->add_option("--max-iterations", max_iterations, "fixpoint bound");

  auto* repl = app.add_subcommand("repl", "interactive session");
  repl->add_option("program", program_path, "program file")->required();
  repl->add_option("--max-iterations", max_iterations, "fixpoint bound");

  auto* scenario = app.add_subcommand("scenario", "run a packaged scenario");
  scenario->add_option("name", name, "scenario name (myjoghurt)")->required();
  scenario->add_option("config", config_path, "config file")->required();
  scenario->add_option("--seed", seed, "seed override");
  scenario->add_option("--trace", trace_path, "trace output path");

  CLI11_PARSE(app, argc, argv);

  if (check->parsed()) return cmd_check(program_path);
  if (run->parsed())
    return cmd_run(program_path, script_path, trace_path, real_time,
                   max_iterations);
  if (repl->parsed()) return cmd_repl(program_path, max_iterations);
  if (scenario->parsed())
    return cmd_scenario(name, config_path, seed, trace_path);
  return kExitOk;
}
