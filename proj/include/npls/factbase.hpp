#pragma once

#include <set>
#include <string>
#include <vector>

#include "npls/errors.hpp"
#include "npls/formula.hpp"
#include "npls/term.hpp"

namespace npls {

// head :- body.  A missing body makes the head an unconditional fact schema,
// which under range restriction must be ground.
struct InferenceRule {
  TermPtr head;
  FormulaPtr body;  // may be null
};

inline void check_range_restriction(const InferenceRule& r) {
  std::set<std::string> head_vars;
  r.head->collect_vars(head_vars);
  if (head_vars.empty()) return;
  if (!r.body)
    throw LoadError("range-restriction-violation",
                    "rule head " + to_string(r.head) +
                        " has variables but no body");
  std::set<std::string> body_vars = r.body->free_vars();
  for (const auto& v : head_vars)
    if (!body_vars.count(v))
      throw LoadError("range-restriction-violation",
                      "variable " + v + " in rule head " + to_string(r.head) +
                          " does not appear in the body");
}

// Set of ground atoms plus an ordered list of inference rules.
// Owned by a single engine/agent; no internal locking.
class FactBase {
 public:
  // Returns true when the fact set actually changed.
  bool assert_fact(const TermPtr& t) {
    if (!t->is_ground())
      throw EngineError("non-ground-fact",
                        "cannot assert non-ground fact " + to_string(t));
    return facts_.insert(t).second;
  }

  bool retract_fact(const TermPtr& t) {
    if (!t->is_ground())
      throw EngineError("non-ground-fact",
                        "cannot retract non-ground fact " + to_string(t));
    return facts_.erase(t) > 0;
  }

  void add_rule(InferenceRule r) {
    check_range_restriction(r);
    if (!r.body && r.head->is_ground()) {
      assert_fact(r.head);
      return;
    }
    rules_.push_back(std::move(r));
  }

  bool contains(const TermPtr& t) const { return facts_.count(t) > 0; }

  const std::set<TermPtr, TermPtrLess>& facts() const { return facts_; }
  const std::vector<InferenceRule>& rules() const { return rules_; }

 private:
  std::set<TermPtr, TermPtrLess> facts_;
  std::vector<InferenceRule> rules_;
};

}  // namespace npls
