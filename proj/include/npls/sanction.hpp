#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "npls/ast.hpp"
#include "npls/errors.hpp"
#include "npls/solver.hpp"
#include "npls/term.hpp"

namespace npls {

// Compiled sanction rule. Condition defaults to the literal true.
struct SanctionRule {
  std::string id;
  std::vector<std::string> params;
  FormulaPtr condition;  // never null once compiled
  TermPtr target;
  TermPtr content;

  static SanctionRule compile(const SanctionRuleAst& ast) {
    SanctionRule r;
    r.id = ast.id;
    r.params = ast.params;
    r.condition = ast.condition ? ast.condition : Formula::truth();
    r.target = ast.target;
    r.content = ast.content;
    return r;
  }
};

// The fact asserted into the fact base is exactly sanction(a, s); the rest
// is metadata carried alongside.
struct SanctionFact {
  std::string target;
  TermPtr content;
  std::string rule_id;
  std::uint64_t instance_id = 0;
  Outcome outcome = Outcome::Unfulfilled;
  std::int64_t at_ms = 0;

  TermPtr as_term() const {
    return Term::compound("sanction", {Term::constant(target), content});
  }
};

// Evaluates one sanction-rule call. The call atom has already been
// instantiated with the triggering instance's bindings. One fact per
// distinct ground (target, content) solution of the condition.
inline std::vector<SanctionFact> fire_sanction_rule(
    const SanctionRule& rule, const TermPtr& call, Outcome outcome,
    std::uint64_t instance_id, std::int64_t now_ms, const FactBase& fb,
    SolveOptions opts = {}) {
  if (call->arity() != rule.params.size())
    throw EngineError("arity-mismatch",
                      "sanction rule " + rule.id + " expects " +
                          std::to_string(rule.params.size()) +
                          " arguments, called with " +
                          std::to_string(call->arity()));
  Substitution binding;
  for (std::size_t i = 0; i < rule.params.size(); ++i)
    binding.bind(rule.params[i], call->args()[i]);

  FormulaPtr cond = apply_subst(binding, rule.condition);
  std::vector<SanctionFact> out;
  std::set<std::string> seen;
  for (const auto& sol : solve(cond, fb, opts)) {
    Substitution full = binding;
    for (const auto& [v, t] : sol.bindings()) full.bind(v, t);
    TermPtr target = arith_normalize(full.apply(rule.target));
    TermPtr content = arith_normalize(full.apply(rule.content));
    if (!target->is_ground() || target->kind() == Term::Kind::Var)
      throw EngineError("unbound-target",
                        "sanction rule " + rule.id +
                            " produced a non-ground target");
    if (!content->is_ground())
      throw EngineError("unbound-target",
                        "sanction rule " + rule.id +
                            " produced a non-ground sanction content");
    SanctionFact f;
    f.target = to_string(target);
    f.content = content;
    f.rule_id = rule.id;
    f.instance_id = instance_id;
    f.outcome = outcome;
    f.at_ms = now_ms;
    std::string key = f.target + "|" + to_string(content);
    if (seen.insert(key).second) out.push_back(std::move(f));
  }
  return out;
}

}  // namespace npls
