#pragma once

// Shared test utilities: golden traces for the replay program, a random
// program generator for round-trip checks, a bottom-up Herbrand oracle for
// the solver, and an independent simulator for tiny ground norm programs.

#include <array>
#include <cstdint>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "npls/engine.hpp"
#include "npls/parser.hpp"
#include "npls/printer.hpp"
#include "npls/scenario.hpp"
#include "npls/trace.hpp"

namespace testutil {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string story_source() {
  return R"(np story {
  norm n1: vl(X) & X > 5
     -> obligation(alice, true, b(0), `3 seconds`)
        if unfulfilled: sr1(alice,X) .
  norm n2: sanction(A,fine(X)) & extra(C)
     -> obligation(bob, true, apply_fine(A,X*C), `2 seconds`)
        if unfulfilled: sr2 .
  sanction-rule sr1(A,V) : not emergency(A) -> sanction(A,fine(V)) .
  sanction-rule sr2 -> sanction(bob,remove_from_systems) .
}
)";
}

// Event lines for: assert vl(20); assert extra(10); tick 3s; tick 5s.
inline std::vector<std::string> golden_unfulfilled_trace() {
  return {
      "t=0 kind=created norm=n1 instance=1 agent=alice payload=b(0)",
      "t=3000 kind=unfulfilled norm=n1 instance=1 agent=alice payload=b(0)",
      "t=3000 kind=sanction norm=n1 instance=1 agent=alice "
      "payload=sanction(alice,fine(20))",
      "t=3000 kind=created norm=n2 instance=2 agent=bob "
      "payload=apply_fine(alice,200)",
      "t=5000 kind=unfulfilled norm=n2 instance=2 agent=bob "
      "payload=apply_fine(alice,200)",
      "t=5000 kind=sanction norm=n2 instance=2 agent=bob "
      "payload=sanction(bob,remove_from_systems)",
  };
}

// Event lines for: assert vl(20); assert extra(10); tick 3s; tick 4s;
// assert apply_fine(alice,200); tick 5s.
inline std::vector<std::string> golden_fulfilled_trace() {
  return {
      "t=0 kind=created norm=n1 instance=1 agent=alice payload=b(0)",
      "t=3000 kind=unfulfilled norm=n1 instance=1 agent=alice payload=b(0)",
      "t=3000 kind=sanction norm=n1 instance=1 agent=alice "
      "payload=sanction(alice,fine(20))",
      "t=3000 kind=created norm=n2 instance=2 agent=bob "
      "payload=apply_fine(alice,200)",
      "t=4000 kind=fulfilled norm=n2 instance=2 agent=bob "
      "payload=apply_fine(alice,200)",
  };
}

// ---------------------------------------------------------------------------
// Random program generator for round-trip checks. Only emits shapes the
// grammar accepts; pretty_print of the result must reparse to the same
// canonical text.

class AstGen {
 public:
  explicit AstGen(std::uint64_t seed) : rng_(seed) {}

  npls::ProgramAst program() {
    npls::ProgramAst p;
    p.name = ident();
    int srules = pick(0, 2);
    std::vector<std::pair<std::string, int>> declared;  // id, arity
    for (int i = 0; i < srules; ++i) {
      npls::SanctionRuleAst r = srule(i);
      declared.push_back({r.id, static_cast<int>(r.params.size())});
      p.items.push_back(std::move(r));
    }
    int rules = pick(0, 2);
    for (int i = 0; i < rules; ++i) p.items.push_back(rule());
    int norms = pick(1, 3);
    for (int i = 0; i < norms; ++i) p.items.push_back(norm(i, declared));
    return p;
  }

 private:
  int pick(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  bool chance(double p) {
    return std::uniform_real_distribution<double>(0, 1)(rng_) < p;
  }

  std::string ident() {
    static const char* pool[] = {"foo",  "bar",  "baz",   "qux",
                                 "alpha", "beta", "gamma", "delta"};
    return pool[pick(0, 7)];
  }
  std::string var_name() {
    static const char* pool[] = {"X", "Y", "Z", "W"};
    return pool[pick(0, 3)];
  }

  npls::TermPtr leaf() {
    switch (pick(0, 4)) {
      case 0: return npls::Term::constant(ident());
      case 1: return npls::Term::integer(pick(-9, 99));
      case 2: return npls::Term::real(pick(1, 8) * 0.25);
      case 3: return npls::Term::str("lit" + std::to_string(pick(0, 9)));
      default: return npls::Term::var(var_name());
    }
  }

  npls::TermPtr term(int depth = 0) {
    if (depth < 2 && chance(0.5)) {
      int n = pick(1, 3);
      std::vector<npls::TermPtr> args;
      for (int i = 0; i < n; ++i) args.push_back(term(depth + 1));
      return npls::Term::compound(ident(), std::move(args));
    }
    return leaf();
  }

  npls::TermPtr predicate() {
    int n = pick(0, 3);
    std::vector<npls::TermPtr> args;
    for (int i = 0; i < n; ++i) args.push_back(term(1));
    return npls::Term::compound(ident(), std::move(args));
  }

  npls::TermPtr arith_side() {
    npls::TermPtr a = chance(0.5) ? npls::Term::var(var_name())
                                  : npls::Term::integer(pick(0, 20));
    if (!chance(0.4)) return a;
    static const char* ops[] = {"+", "-", "*", "/"};
    npls::TermPtr b = chance(0.5) ? npls::Term::var(var_name())
                                  : npls::Term::integer(pick(1, 9));
    return npls::Term::compound(ops[pick(0, 3)], {a, b});
  }

  npls::FormulaPtr atom_or_cmp() {
    if (chance(0.3)) {
      static const npls::CmpOp ops[] = {npls::CmpOp::Gt, npls::CmpOp::Lt,
                                        npls::CmpOp::Ge, npls::CmpOp::Le,
                                        npls::CmpOp::Eq, npls::CmpOp::Neq};
      return npls::Formula::cmp(ops[pick(0, 5)], arith_side(), arith_side());
    }
    return npls::Formula::atom(predicate());
  }

  npls::FormulaPtr formula(int depth = 0) {
    if (depth >= 2 || chance(0.45)) return atom_or_cmp();
    switch (pick(0, 2)) {
      case 0: return npls::Formula::negation(formula(depth + 1));
      case 1:
        return npls::Formula::conj(formula(depth + 1), formula(depth + 1));
      default:
        return npls::Formula::disj(formula(depth + 1), formula(depth + 1));
    }
  }

  npls::InferenceRule rule() {
    npls::InferenceRule r;
    if (chance(0.4)) {
      // Ground fact.
      int n = pick(0, 2);
      std::vector<npls::TermPtr> args;
      for (int i = 0; i < n; ++i)
        args.push_back(chance(0.5)
                           ? npls::Term::constant(ident())
                           : npls::Term::integer(pick(0, 50)));
      r.head = npls::Term::compound(ident(), std::move(args));
      return r;
    }
    std::string v = var_name();
    r.head = npls::Term::compound(ident(), {npls::Term::var(v)});
    r.body = npls::Formula::atom(
        npls::Term::compound(ident(), {npls::Term::var(v)}));
    if (chance(0.5)) r.body = npls::Formula::conj(r.body, atom_or_cmp());
    return r;
  }

  npls::SanctionRuleAst srule(int k) {
    npls::SanctionRuleAst r;
    r.id = "sr" + std::to_string(k);
    int nparams = pick(0, 3);
    static const char* pv[] = {"P", "Q", "R"};
    for (int i = 0; i < nparams; ++i) r.params.push_back(pv[i]);
    if (chance(0.6)) {
      // Condition only over parameters keeps the closure check trivially
      // satisfied.
      std::vector<npls::TermPtr> args;
      for (const auto& pn : r.params) args.push_back(npls::Term::var(pn));
      r.condition = npls::Formula::atom(
          npls::Term::compound(ident(), std::move(args)));
      if (chance(0.3)) r.condition = npls::Formula::negation(r.condition);
    }
    r.target = r.params.empty() || chance(0.5)
                   ? npls::Term::constant(ident())
                   : npls::Term::var(r.params[0]);
    std::vector<npls::TermPtr> cargs;
    for (const auto& pn : r.params)
      if (chance(0.6)) cargs.push_back(npls::Term::var(pn));
    if (cargs.empty() && chance(0.5))
      cargs.push_back(npls::Term::integer(pick(0, 9)));
    r.content = npls::Term::compound(ident(), std::move(cargs));
    return r;
  }

  npls::NormAst norm(int k, const std::vector<std::pair<std::string, int>>& srules) {
    npls::NormAst n;
    n.id = "n" + std::to_string(k);
    n.condition = formula();
    if (chance(0.1)) {
      n.kind = npls::ConsequenceKind::Fail;
      n.fail_atom = predicate();
      return n;
    }
    switch (pick(0, 2)) {
      case 0: n.kind = npls::ConsequenceKind::Obligation; break;
      case 1: n.kind = npls::ConsequenceKind::Permission; break;
      default: n.kind = npls::ConsequenceKind::Prohibition; break;
    }
    n.bearer = chance(0.5) ? npls::Term::constant(ident())
                           : npls::Term::var(var_name());
    n.maintenance = chance(0.6) ? npls::Formula::truth() : atom_or_cmp();
    n.goal = atom_or_cmp();
    if (chance(0.7)) {
      npls::TimeSpec ts;
      ts.amount = pick(1, 5);
      static const npls::TimeSpec::Unit units[] = {
          npls::TimeSpec::Unit::Millisecond, npls::TimeSpec::Unit::Second,
          npls::TimeSpec::Unit::Minute, npls::TimeSpec::Unit::Hour,
          npls::TimeSpec::Unit::Day};
      ts.unit = units[pick(0, 4)];
      n.deadline_time = ts;
    } else {
      n.deadline_formula = atom_or_cmp();
    }
    if (!srules.empty()) {
      for (int o = 0; o < 3; ++o) {
        if (!chance(0.35)) continue;
        std::vector<npls::TermPtr> calls;
        int ncalls = pick(1, 2);
        for (int i = 0; i < ncalls; ++i) {
          const auto& [id, arity] = srules[pick(0, (int)srules.size() - 1)];
          std::vector<npls::TermPtr> args;
          for (int a = 0; a < arity; ++a)
            args.push_back(chance(0.5) ? npls::Term::var(var_name())
                                       : npls::Term::integer(pick(0, 9)));
          calls.push_back(npls::Term::compound(id, std::move(args)));
        }
        n.triggers[o] = std::move(calls);
      }
    }
    return n;
  }

  std::mt19937_64 rng_;
};

// Round-trip check: canonical text reparses to the same canonical text.
inline bool round_trips(const npls::ProgramAst& ast, std::string* why = nullptr) {
  std::string first = npls::pretty_print(ast);
  try {
    std::string second = npls::pretty_print(npls::parse_program(first));
    if (first == second) return true;
    if (why) *why = "mismatch:\n" + first + "---\n" + second;
  } catch (const npls::Error& e) {
    if (why) *why = std::string("reparse failed: ") + e.what() + "\n" + first;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Bottom-up Herbrand closure over constants {a,b,c}; negation restricted to
// base predicates so the naive fixpoint is sound.

struct HerbrandCase {
  std::set<std::string> base;                       // ground atom strings
  std::vector<npls::InferenceRule> rules;
};

inline bool herbrand_eval(const npls::FormulaPtr& f,
                          const std::set<std::string>& atoms) {
  using K = npls::Formula::Kind;
  switch (f->kind()) {
    case K::Atom: {
      if (f->is_truth()) return true;
      return atoms.count(npls::to_string(f->term())) > 0;
    }
    case K::Not: return !herbrand_eval(f->left(), atoms);
    case K::And:
      return herbrand_eval(f->left(), atoms) && herbrand_eval(f->right(), atoms);
    case K::Or:
      return herbrand_eval(f->left(), atoms) || herbrand_eval(f->right(), atoms);
    case K::Cmp: {
      npls::TermPtr a = npls::arith_normalize(f->term());
      npls::TermPtr b = npls::arith_normalize(f->rhs());
      bool num = a->is_number() && b->is_number();
      switch (f->op()) {
        case npls::CmpOp::Eq:
          return num ? a->as_double() == b->as_double() : *a == *b;
        case npls::CmpOp::Neq:
          return num ? a->as_double() != b->as_double() : !(*a == *b);
        case npls::CmpOp::Gt: return num && a->as_double() > b->as_double();
        case npls::CmpOp::Lt: return num && a->as_double() < b->as_double();
        case npls::CmpOp::Ge: return num && a->as_double() >= b->as_double();
        case npls::CmpOp::Le: return num && a->as_double() <= b->as_double();
      }
      return false;
    }
  }
  return false;
}

inline std::set<std::string> herbrand_closure(const HerbrandCase& c) {
  static const std::vector<std::string> consts = {"a", "b", "c"};
  std::set<std::string> atoms = c.base;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : c.rules) {
      std::set<std::string> vars;
      r.head->collect_vars(vars);
      if (r.body) r.body->collect_vars(vars);
      std::vector<std::string> vs(vars.begin(), vars.end());
      std::vector<std::size_t> idx(vs.size(), 0);
      for (;;) {
        npls::Substitution s;
        for (std::size_t i = 0; i < vs.size(); ++i)
          s.bind(vs[i], npls::Term::constant(consts[idx[i]]));
        bool ok = !r.body || herbrand_eval(npls::apply_subst(s, r.body), atoms);
        if (ok && atoms.insert(npls::to_string(s.apply(r.head))).second)
          changed = true;
        std::size_t i = 0;
        for (; i < idx.size(); ++i) {
          if (++idx[i] < consts.size()) break;
          idx[i] = 0;
        }
        if (i == idx.size()) break;
        if (vs.empty()) break;
      }
    }
  }
  return atoms;
}

// ---------------------------------------------------------------------------
// Tiny ground norm programs plus an independent step-semantics simulator.

struct TinySRule {
  std::string id, cond, target, content;  // cond empty means "assumed true"
};

struct TinyNorm {
  std::string id;
  std::vector<std::string> cond;  // conjunction of ground atoms
  int kind = 0;                   // 0 obligation, 1 prohibition, 2 permission
  std::string bearer, maint, goal;
  std::int64_t deadline = 0;
  std::array<std::vector<std::string>, 3> trig;  // srule ids per outcome
};

struct TinyProgram {
  std::vector<TinyNorm> norms;
  std::vector<TinySRule> srules;
};

struct TinyOp {
  enum class Kind { Assert, Retract, Tick } kind;
  std::string atom;
  std::int64_t ms = 0;
};

inline std::string render(const TinyProgram& p) {
  std::ostringstream os;
  os << "np tiny {\n";
  for (const auto& n : p.norms) {
    os << "norm " << n.id << ": ";
    for (std::size_t i = 0; i < n.cond.size(); ++i)
      os << (i ? " & " : "") << n.cond[i];
    os << " -> "
       << (n.kind == 0 ? "obligation" : n.kind == 1 ? "prohibition" : "permission")
       << "(" << n.bearer << ", " << n.maint << ", " << n.goal << ", `"
       << n.deadline << " milliseconds`)";
    static const char* ow[3] = {"fulfilled", "unfulfilled", "inactive"};
    for (int o = 0; o < 3; ++o) {
      if (n.trig[o].empty()) continue;
      os << " if " << ow[o] << ":";
      for (std::size_t i = 0; i < n.trig[o].size(); ++i)
        os << (i ? ", " : " ") << n.trig[o][i];
    }
    os << " .\n";
  }
  for (const auto& s : p.srules) {
    os << "sanction-rule " << s.id;
    if (!s.cond.empty()) os << " : " << s.cond;
    os << " -> sanction(" << s.target << ", " << s.content << ") .\n";
  }
  os << "}\n";
  return os.str();
}

// Direct transcription of the step semantics over ground atoms.
class TinyOracle {
 public:
  explicit TinyOracle(const TinyProgram& p) : p_(p) {}

  void apply(const TinyOp& op) {
    switch (op.kind) {
      case TinyOp::Kind::Assert: facts_.insert(op.atom); break;
      case TinyOp::Kind::Retract: facts_.erase(op.atom); break;
      case TinyOp::Kind::Tick: now_ += op.ms; break;
    }
    step();
  }

  const std::set<std::string>& facts() const { return facts_; }

  std::multiset<std::string> instance_states() const {
    std::multiset<std::string> out;
    static const char* names[4] = {"active", "fulfilled", "unfulfilled",
                                   "inactive"};
    for (const auto& i : insts_)
      out.insert(p_.norms[i.norm].id + ":" + names[i.state]);
    return out;
  }

 private:
  struct Inst {
    int norm;
    int state = 0;  // 0 active, 1 fulfilled, 2 unfulfilled, 3 inactive
    std::int64_t deadline = 0;
  };

  bool cond_true(const TinyNorm& n) const {
    for (const auto& a : n.cond)
      if (!facts_.count(a)) return false;
    return true;
  }
  bool has_active(int ni) const {
    for (const auto& i : insts_)
      if (i.norm == ni && i.state == 0) return true;
    return false;
  }
  const TinySRule& srule(const std::string& id) const {
    for (const auto& s : p_.srules)
      if (s.id == id) return s;
    throw std::runtime_error("unknown srule " + id);
  }

  void step() {
    for (int iter = 0;; ++iter) {
      if (iter >= 64) throw std::runtime_error("oracle fixpoint overflow");
      bool changed = false;
      for (int ni = 0; ni < static_cast<int>(p_.norms.size()); ++ni)
        if (blocked_.count(ni) && !cond_true(p_.norms[ni])) blocked_.erase(ni);
      for (int ni = 0; ni < static_cast<int>(p_.norms.size()); ++ni) {
        const TinyNorm& n = p_.norms[ni];
        if (!cond_true(n) || blocked_.count(ni) || has_active(ni)) continue;
        insts_.push_back({ni, 0, now_ + n.deadline});
        changed = true;
      }
      for (auto& i : insts_) {
        if (i.state != 0) continue;
        const TinyNorm& n = p_.norms[i.norm];
        int next = 0;
        if (n.maint != "true" && !facts_.count(n.maint))
          next = 3;
        else if (facts_.count(n.goal))
          next = n.kind == 1 ? 2 : 1;
        else if (i.deadline <= now_)
          next = n.kind == 1 ? 1 : 2;
        if (!next) continue;
        i.state = next;
        blocked_.insert(i.norm);
        changed = true;
        if (n.kind == 2) continue;  // permissions never fire triggers
        for (const auto& sid : n.trig[next - 1]) {
          const TinySRule& sr = srule(sid);
          if (!sr.cond.empty() && !facts_.count(sr.cond)) continue;
          if (facts_.insert("sanction(" + sr.target + "," + sr.content + ")")
                  .second)
            changed = true;
        }
      }
      if (!changed) return;
    }
  }

  const TinyProgram& p_;
  std::set<std::string> facts_;
  std::vector<Inst> insts_;
  std::set<int> blocked_;
  std::int64_t now_ = 0;
};

inline TinyProgram random_tiny_program(std::mt19937_64& rng) {
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto chance = [&](double p) {
    return std::uniform_real_distribution<double>(0, 1)(rng) < p;
  };
  static const char* pool[] = {"p1", "p2", "p3", "p4"};
  static const char* targets[] = {"a1", "a2"};
  static const char* contents[] = {"c1", "c2"};

  TinyProgram p;
  int nsr = pick(0, 2);
  for (int i = 0; i < nsr; ++i) {
    TinySRule s;
    s.id = "s" + std::to_string(i + 1);
    if (chance(0.4)) s.cond = pool[pick(0, 3)];
    s.target = targets[pick(0, 1)];
    s.content = contents[pick(0, 1)];
    p.srules.push_back(std::move(s));
  }
  int nn = pick(1, 3);
  for (int i = 0; i < nn; ++i) {
    TinyNorm n;
    n.id = "n" + std::to_string(i + 1);
    int nc = pick(1, 2);
    for (int c = 0; c < nc; ++c) {
      if (chance(0.25))
        n.cond.push_back(std::string("sanction(") + targets[pick(0, 1)] + "," +
                         contents[pick(0, 1)] + ")");
      else
        n.cond.push_back(pool[pick(0, 3)]);
    }
    int k = pick(0, 19);
    n.kind = k < 12 ? 0 : k < 17 ? 1 : 2;
    n.bearer = targets[pick(0, 1)];
    n.maint = chance(0.7) ? "true" : pool[pick(0, 3)];
    n.goal = pool[pick(0, 3)];
    n.deadline = 500 * pick(0, 3);
    if (!p.srules.empty()) {
      for (int o = 0; o < 3; ++o) {
        if (!chance(0.4)) continue;
        int ncalls = pick(1, 2);
        for (int c = 0; c < ncalls; ++c)
          n.trig[o].push_back(p.srules[pick(0, nsr - 1)].id);
      }
    }
    p.norms.push_back(std::move(n));
  }
  return p;
}

inline std::vector<TinyOp> random_tiny_ops(std::mt19937_64& rng) {
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  static const char* pool[] = {"p1", "p2", "p3", "p4"};
  std::vector<TinyOp> ops;
  int n = pick(5, 10);
  int ticks = 0;
  for (int i = 0; i < n; ++i) {
    int r = pick(0, 9);
    if (r < 4 || ticks >= 4) {
      ops.push_back({TinyOp::Kind::Assert, pool[pick(0, 3)], 0});
    } else if (r < 6) {
      ops.push_back({TinyOp::Kind::Retract, pool[pick(0, 3)], 0});
    } else {
      ops.push_back({TinyOp::Kind::Tick, "", 500 * pick(1, 3)});
      ++ticks;
    }
  }
  return ops;
}

// Runs one random case against both the engine and the oracle; empty return
// means full agreement after every operation.
inline std::string tiny_agreement(const TinyProgram& p,
                                  const std::vector<TinyOp>& ops) {
  npls::Engine engine = npls::Engine::load(npls::parse_program(render(p)));
  TinyOracle oracle(p);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const TinyOp& op = ops[i];
    switch (op.kind) {
      case TinyOp::Kind::Assert:
        engine.assert_fact(npls::parse_term(op.atom));
        break;
      case TinyOp::Kind::Retract:
        engine.retract_fact(npls::parse_term(op.atom));
        break;
      case TinyOp::Kind::Tick:
        engine.tick(engine.now() + op.ms);
        break;
    }
    oracle.apply(op);
    std::set<std::string> efacts;
    for (const auto& f : engine.facts().facts())
      efacts.insert(npls::to_string(f));
    if (efacts != oracle.facts()) return "fact divergence after op " +
                                         std::to_string(i) + "\n" + render(p);
    std::multiset<std::string> estates;
    for (const auto& inst : engine.query_instances())
      estates.insert(inst.norm_id + ":" + npls::to_keyword(inst.state));
    if (estates != oracle.instance_states())
      return "instance divergence after op " + std::to_string(i) + "\n" +
             render(p);
  }
  return "";
}

// ---------------------------------------------------------------------------
// Replays a scenario record log and validates the sanction gating rules:
// S2 only at >= t_clean consecutive valve violations (then reset), S4/S5
// only at exactly t_remove consecutive unit violations, S1 only below the
// cleaning threshold. Empty return means the log is consistent.
inline std::string check_sanction_gating(const npls::ScenarioSummary& s,
                                         int t_clean, int t_remove) {
  std::map<std::string, int> valve_cnt, unit_cnt;
  for (std::size_t i = 0; i < s.records.size(); ++i) {
    const npls::FillRecord& r = s.records[i];
    int& vc = valve_cnt[r.valve];
    int& uc = unit_cnt[r.unit];
    vc = r.polarity < 0 ? vc + 1 : 0;
    uc = r.polarity < 0 ? uc + 1 : 0;
    for (const auto& sid : r.sanctions) {
      if (sid == "S1" && vc >= t_clean)
        return "S1 at count " + std::to_string(vc) + " (fill " +
               std::to_string(i) + ")";
      if (sid == "S2" && vc < t_clean)
        return "S2 before " + std::to_string(t_clean) +
               " consecutive violations (fill " + std::to_string(i) + ")";
      if ((sid == "S4" || sid == "S5") && uc != t_remove)
        return sid + " at unit count " + std::to_string(uc) + " (fill " +
               std::to_string(i) + ")";
      if (!r.sanctions.empty() && r.polarity > 0 &&
          (sid == "S1" || sid == "S2" || sid == "S3"))
        return sid + " on a compliant fill (fill " + std::to_string(i) + ")";
    }
    for (const auto& sid : r.sanctions)
      if (sid == "S2") vc = 0;
  }
  return "";
}

}  // namespace testutil
