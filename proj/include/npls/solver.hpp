#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "npls/errors.hpp"
#include "npls/factbase.hpp"
#include "npls/formula.hpp"
#include "npls/term.hpp"

namespace npls {

struct SolveOptions {
  int max_depth = 256;  // rule applications along one derivation
};

namespace detail {

class Solver {
 public:
  Solver(const FactBase& fb, SolveOptions opts) : fb_(fb), opts_(opts) {}

  using Sink = std::function<void(const Substitution&)>;

  void solve(const FormulaPtr& f, const Substitution& s, int depth,
             const Sink& k) {
    switch (f->kind()) {
      case Formula::Kind::Atom:
        solve_atom(f->term(), s, depth, k);
        break;
      case Formula::Kind::And:
        solve(f->left(), s, depth, [&](const Substitution& s1) {
          solve(f->right(), s1, depth, k);
        });
        break;
      case Formula::Kind::Or:
        solve(f->left(), s, depth, k);
        solve(f->right(), s, depth, k);
        break;
      case Formula::Kind::Not: {
        FormulaPtr sub = npls::apply_subst(s, f->left());
        if (!sub->free_vars().empty())
          throw SolveError("unbound-variable-in-builtin",
                           "negation reached with free variables: not " +
                               to_string(sub));
        bool any = false;
        solve(sub, Substitution{}, depth, [&](const Substitution&) {
          any = true;
        });
        if (!any) k(s);
        break;
      }
      case Formula::Kind::Cmp: {
        if (eval_cmp(f->op(), s.apply(f->term()), s.apply(f->rhs()))) k(s);
        break;
      }
    }
  }

 private:
  void solve_atom(const TermPtr& t, const Substitution& s, int depth,
                  const Sink& k) {
    TermPtr goal = s.walk(t);
    if (goal->kind() == Term::Kind::Constant && goal->name() == "true") {
      k(s);
      return;
    }
    if (goal->kind() == Term::Kind::Var)
      throw SolveError("unbound-variable-in-builtin",
                       "predicate position holds unbound variable " +
                           goal->name());
    for (const auto& fact : fb_.facts()) {
      if (auto s1 = unify(goal, fact, s)) k(*s1);
    }
    for (const auto& rule : fb_.rules()) {
      InferenceRule fresh = rename(rule);
      auto s1 = unify(goal, fresh.head, s);
      if (!s1) continue;
      if (depth + 1 > opts_.max_depth)
        throw SolveError("rule-depth-exceeded",
                         "derivation depth limit exceeded while solving " +
                             to_string(goal));
      if (!fresh.body)
        k(*s1);
      else
        solve(fresh.body, *s1, depth + 1, k);
    }
  }

  InferenceRule rename(const InferenceRule& r) {
    std::set<std::string> vars;
    r.head->collect_vars(vars);
    if (r.body) r.body->collect_vars(vars);
    Substitution ren;
    int n = fresh_++;
    for (const auto& v : vars)
      ren.bind(v, Term::var("_R" + std::to_string(n) + "_" + v));
    InferenceRule out;
    out.head = ren.apply(r.head);
    out.body = r.body ? npls::apply_subst(ren, r.body) : nullptr;
    return out;
  }

  static TermPtr eval_arith(const TermPtr& t) {
    TermPtr n = arith_normalize(t);
    std::set<std::string> vars;
    n->collect_vars(vars);
    if (!vars.empty())
      throw SolveError("unbound-variable-in-builtin",
                       "arithmetic comparison reached with free variable " +
                           *vars.begin());
    return n;
  }

  static bool eval_cmp(CmpOp op, const TermPtr& lhs, const TermPtr& rhs) {
    TermPtr a = eval_arith(lhs);
    TermPtr b = eval_arith(rhs);
    if (op == CmpOp::Eq || op == CmpOp::Neq) {
      bool eq = (a->is_number() && b->is_number())
                    ? a->as_double() == b->as_double()
                    : *a == *b;
      return op == CmpOp::Eq ? eq : !eq;
    }
    if (!a->is_number() || !b->is_number())
      throw SolveError("type-error", "ordering comparison on non-numbers: " +
                                         to_string(a) + " vs " + to_string(b));
    double x = a->as_double(), y = b->as_double();
    switch (op) {
      case CmpOp::Gt: return x > y;
      case CmpOp::Lt: return x < y;
      case CmpOp::Ge: return x >= y;
      case CmpOp::Le: return x <= y;
      default: return false;
    }
  }

  const FactBase& fb_;
  SolveOptions opts_;
  int fresh_ = 0;
};

}  // namespace detail

// Every substitution grounding f entailed by facts plus rules, restricted to
// f's free variables, duplicates eliminated, in derivation order.
inline std::vector<Substitution> solve(const FormulaPtr& f, const FactBase& fb,
                                       SolveOptions opts = {}) {
  detail::Solver sol(fb, opts);
  std::set<std::string> vars = f->free_vars();
  std::vector<Substitution> out;
  std::set<std::string> seen;
  sol.solve(f, Substitution{}, 0, [&](const Substitution& s) {
    Substitution r = s.restrict(vars);
    std::string key;
    for (const auto& [v, t] : r.bindings()) key += v + "=" + to_string(t) + ";";
    if (seen.insert(key).second) out.push_back(std::move(r));
  });
  return out;
}

inline bool holds(const FormulaPtr& f, const FactBase& fb,
                  SolveOptions opts = {}) {
  return !solve(f, fb, opts).empty();
}

}  // namespace npls
