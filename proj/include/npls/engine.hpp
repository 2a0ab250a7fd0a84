#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "npls/ast.hpp"
#include "npls/errors.hpp"
#include "npls/sanction.hpp"
#include "npls/solver.hpp"

namespace npls {

enum class InstState { Active, Fulfilled, Unfulfilled, Inactive };

inline const char* to_keyword(InstState s) {
  switch (s) {
    case InstState::Active: return "active";
    case InstState::Fulfilled: return "fulfilled";
    case InstState::Unfulfilled: return "unfulfilled";
    case InstState::Inactive: return "inactive";
  }
  return "?";
}

inline std::optional<InstState> inst_state_from(const std::string& s) {
  if (s == "active") return InstState::Active;
  if (s == "fulfilled") return InstState::Fulfilled;
  if (s == "unfulfilled") return InstState::Unfulfilled;
  if (s == "inactive") return InstState::Inactive;
  return std::nullopt;
}

// A grounded deontic instance. fulfilled/unfulfilled/inactive are terminal.
struct ObligationInstance {
  std::uint64_t id = 0;
  std::string norm_id;
  std::string grounding_key;
  Substitution bindings;
  std::string bearer;
  ConsequenceKind kind = ConsequenceKind::Obligation;
  FormulaPtr maintenance;
  FormulaPtr goal;
  std::optional<std::int64_t> deadline_ms;  // absolute
  FormulaPtr deadline_formula;              // set iff deadline_ms absent
  InstState state = InstState::Active;
  std::int64_t created_at = 0;
  std::int64_t resolved_at = -1;
};

struct NormEvent {
  enum class Kind {
    InstanceCreated,
    InstanceFulfilled,
    InstanceUnfulfilled,
    InstanceInactive,
    SanctionCreated,
    RegimentationFailure,
    UnhandledObligation,
    FactAdded,
    Alarm,
    Error
  };

  Kind kind = Kind::InstanceCreated;
  std::int64_t t = 0;
  std::string norm_id;
  std::uint64_t instance_id = 0;
  std::string agent;
  TermPtr payload;
};

inline const char* to_keyword(NormEvent::Kind k) {
  switch (k) {
    case NormEvent::Kind::InstanceCreated: return "created";
    case NormEvent::Kind::InstanceFulfilled: return "fulfilled";
    case NormEvent::Kind::InstanceUnfulfilled: return "unfulfilled";
    case NormEvent::Kind::InstanceInactive: return "inactive";
    case NormEvent::Kind::SanctionCreated: return "sanction";
    case NormEvent::Kind::RegimentationFailure: return "regimentation";
    case NormEvent::Kind::UnhandledObligation: return "unhandled_obligation";
    case NormEvent::Kind::FactAdded: return "fact";
    case NormEvent::Kind::Alarm: return "alarm";
    case NormEvent::Kind::Error: return "error";
  }
  return "?";
}

namespace detail {

struct CompiledNorm {
  std::string id;
  FormulaPtr condition;
  ConsequenceKind kind = ConsequenceKind::Obligation;
  TermPtr fail_atom;
  TermPtr bearer;
  FormulaPtr maintenance;
  FormulaPtr goal;
  std::optional<std::int64_t> deadline_rel_ms;
  FormulaPtr deadline_formula;
  std::array<std::optional<std::vector<TermPtr>>, 3> triggers;
};

// Single atom goals expose their term; anything else is rendered opaque.
inline TermPtr formula_term(const FormulaPtr& f) {
  if (f->kind() == Formula::Kind::Atom) return f->term();
  return Term::constant("'" + to_string(f) + "'");
}

}  // namespace detail

struct InstanceFilter {
  std::optional<std::string> norm_id;
  std::optional<std::string> bearer;
  std::optional<InstState> state;

  bool matches(const ObligationInstance& i) const {
    if (norm_id && i.norm_id != *norm_id) return false;
    if (bearer && i.bearer != *bearer) return false;
    if (state && i.state != *state) return false;
    return true;
  }
};

// Interprets one loaded NPL(s) program against a fact base and a logical
// clock. Single-threaded by contract; copyable, which the assert path uses
// for regimentation rollback.
class Engine {
 public:
  int max_iterations = 64;
  SolveOptions solve_options;

  static Engine load(const ProgramAst& ast) {
    Engine e;
    std::set<std::string> norm_ids, rule_ids;
    for (const auto& item : ast.items) {
      if (const auto* r = std::get_if<InferenceRule>(&item)) {
        e.fb_.add_rule(*r);
      } else if (const auto* n = std::get_if<NormAst>(&item)) {
        if (!norm_ids.insert(n->id).second)
          throw LoadError("duplicate-id", "duplicate norm id " + n->id);
        detail::CompiledNorm cn;
        cn.id = n->id;
        cn.condition = n->condition;
        cn.kind = n->kind;
        cn.fail_atom = n->fail_atom;
        cn.bearer = n->bearer;
        cn.maintenance = n->maintenance;
        cn.goal = n->goal;
        if (n->deadline_time) cn.deadline_rel_ms = n->deadline_time->duration_ms();
        cn.deadline_formula = n->deadline_formula;
        cn.triggers = n->triggers;
        e.norms_.push_back(std::move(cn));
      } else {
        const auto& s = std::get<SanctionRuleAst>(item);
        if (!rule_ids.insert(s.id).second)
          throw LoadError("duplicate-id", "duplicate sanction rule id " + s.id);
        e.srules_.emplace(s.id, SanctionRule::compile(s));
      }
    }
    // Every trigger call must name a declared rule with matching arity.
    for (const auto& n : e.norms_) {
      for (const auto& clause : n.triggers) {
        if (!clause) continue;
        for (const auto& call : *clause) {
          auto it = e.srules_.find(call->name());
          if (it == e.srules_.end())
            throw LoadError("unresolved-sanction-rule",
                            "norm " + n.id + " references undeclared sanction "
                            "rule " + call->name());
          if (call->arity() != it->second.params.size())
            throw LoadError("unresolved-sanction-rule",
                            "norm " + n.id + " calls sanction rule " +
                                call->name() + " with arity " +
                                std::to_string(call->arity()) + ", declared " +
                                std::to_string(it->second.params.size()));
        }
      }
    }
    return e;
  }

  std::vector<NormEvent> assert_fact(const TermPtr& t) {
    return mutate_fact(t, true);
  }
  std::vector<NormEvent> retract_fact(const TermPtr& t) {
    return mutate_fact(t, false);
  }

  std::vector<NormEvent> tick(std::int64_t new_now) {
    if (new_now < now_)
      throw EngineError("clock-regression",
                        "tick to " + std::to_string(new_now) +
                            " before current time " + std::to_string(now_));
    now_ = new_now;
    return step();
  }

  // Runs norm evaluation to a fixpoint. Sanction facts asserted during the
  // step feed back into norm activation within the same call.
  std::vector<NormEvent> step() {
    std::vector<NormEvent> events;
    for (int iter = 0;; ++iter) {
      if (iter >= max_iterations)
        throw EngineError("fixpoint-not-reached",
                          "no fixpoint after " +
                              std::to_string(max_iterations) +
                              " iterations; norm/sanction cycle suspected");
      bool changed = false;

      // Groundings of every condition, also used to release edge blocks.
      std::vector<std::vector<std::pair<std::string, Substitution>>> sols;
      sols.reserve(norms_.size());
      for (const auto& n : norms_) {
        std::vector<std::pair<std::string, Substitution>> ns;
        for (const auto& s : solve(n.condition, fb_, solve_options))
          ns.emplace_back(to_string(apply_subst(s, n.condition)), s);
        sols.push_back(std::move(ns));
      }
      for (auto it = blocked_.begin(); it != blocked_.end();) {
        bool still = false;
        for (std::size_t ni = 0; ni < norms_.size(); ++ni) {
          if (norms_[ni].id != it->first) continue;
          for (const auto& [key, _] : sols[ni])
            if (key == it->second) {
              still = true;
              break;
            }
        }
        it = still ? std::next(it) : blocked_.erase(it);
      }

      for (std::size_t ni = 0; ni < norms_.size(); ++ni) {
        const auto& n = norms_[ni];
        for (const auto& [key, sub] : sols[ni]) {
          if (blocked_.count({n.id, key})) continue;
          if (has_live_instance(n.id, key)) continue;
          if (n.kind == ConsequenceKind::Fail) {
            blocked_.insert({n.id, key});
            NormEvent ev;
            ev.kind = NormEvent::Kind::RegimentationFailure;
            ev.t = now_;
            ev.norm_id = n.id;
            ev.payload = arith_normalize(sub.apply(n.fail_atom));
            events.push_back(std::move(ev));
            changed = true;
            continue;
          }
          create_instance(n, key, sub, events);
          changed = true;
        }
      }

      // Lifecycle: per active instance, maintenance first, then goal,
      // then deadline; fulfilled wins goal/deadline ties.
      for (auto& inst : instances_) {
        if (inst.state != InstState::Active) continue;
        InstState next = InstState::Active;
        if (!holds(inst.maintenance, fb_, solve_options)) {
          next = InstState::Inactive;
        } else if (holds(inst.goal, fb_, solve_options)) {
          next = inst.kind == ConsequenceKind::Prohibition
                     ? InstState::Unfulfilled
                     : InstState::Fulfilled;
        } else if (deadline_reached(inst)) {
          next = inst.kind == ConsequenceKind::Prohibition
                     ? InstState::Fulfilled
                     : InstState::Unfulfilled;
        }
        if (next == InstState::Active) continue;
        inst.state = next;
        inst.resolved_at = now_;
        blocked_.insert({inst.norm_id, inst.grounding_key});
        NormEvent ev;
        ev.kind = next == InstState::Fulfilled ? NormEvent::Kind::InstanceFulfilled
                  : next == InstState::Unfulfilled
                      ? NormEvent::Kind::InstanceUnfulfilled
                      : NormEvent::Kind::InstanceInactive;
        ev.t = now_;
        ev.norm_id = inst.norm_id;
        ev.instance_id = inst.id;
        ev.agent = inst.bearer;
        ev.payload = detail::formula_term(inst.goal);
        events.push_back(std::move(ev));
        changed = true;
        if (inst.kind != ConsequenceKind::Permission)
          fire_triggers(inst, next, events, changed);
      }

      if (!changed) break;
    }
    return events;
  }

  std::vector<ObligationInstance> query_instances(
      const InstanceFilter& filter = {}) const {
    std::vector<ObligationInstance> out;
    for (const auto& i : instances_)
      if (filter.matches(i)) out.push_back(i);
    return out;
  }

  std::optional<ObligationInstance> find_instance(std::uint64_t id) const {
    for (const auto& i : instances_)
      if (i.id == id) return i;
    return std::nullopt;
  }

  FactBase& facts() { return fb_; }
  const FactBase& facts() const { return fb_; }
  std::int64_t now() const { return now_; }
  std::size_t norm_count() const { return norms_.size(); }
  std::size_t sanction_rule_count() const { return srules_.size(); }

 private:
  std::vector<NormEvent> mutate_fact(const TermPtr& t, bool add) {
    Engine snapshot = *this;
    if (add)
      fb_.assert_fact(t);
    else
      fb_.retract_fact(t);
    std::vector<NormEvent> events = step();
    std::vector<NormEvent> regimented;
    for (const auto& e : events)
      if (e.kind == NormEvent::Kind::RegimentationFailure)
        regimented.push_back(e);
    if (!regimented.empty()) {
      *this = std::move(snapshot);
      return regimented;
    }
    return events;
  }

  bool has_live_instance(const std::string& norm_id,
                         const std::string& key) const {
    for (const auto& i : instances_)
      if (i.state == InstState::Active && i.norm_id == norm_id &&
          i.grounding_key == key)
        return true;
    return false;
  }

  void create_instance(const detail::CompiledNorm& n, const std::string& key,
                       const Substitution& sub, std::vector<NormEvent>& events) {
    ObligationInstance inst;
    inst.id = next_instance_++;
    inst.norm_id = n.id;
    inst.grounding_key = key;
    inst.bindings = sub;
    TermPtr bearer = arith_normalize(sub.apply(n.bearer));
    if (!bearer->is_ground())
      throw EngineError("unbound-bearer",
                        "norm " + n.id + " bearer not ground at activation");
    inst.bearer = to_string(bearer);
    inst.kind = n.kind;
    inst.maintenance = arith_normalize(apply_subst(sub, n.maintenance));
    inst.goal = arith_normalize(apply_subst(sub, n.goal));
    if (n.deadline_rel_ms)
      inst.deadline_ms = now_ + *n.deadline_rel_ms;
    else
      inst.deadline_formula = arith_normalize(apply_subst(sub, n.deadline_formula));
    inst.created_at = now_;
    instances_.push_back(inst);
    NormEvent ev;
    ev.kind = NormEvent::Kind::InstanceCreated;
    ev.t = now_;
    ev.norm_id = n.id;
    ev.instance_id = inst.id;
    ev.agent = inst.bearer;
    ev.payload = detail::formula_term(inst.goal);
    events.push_back(std::move(ev));
  }

  bool deadline_reached(const ObligationInstance& inst) const {
    if (inst.deadline_ms) return *inst.deadline_ms <= now_;
    return holds(inst.deadline_formula, fb_, solve_options);
  }

  // Left-to-right over the clause; each rule's facts are asserted before
  // the next rule's condition is evaluated. An error aborts the remaining
  // calls and surfaces as an error event.
  void fire_triggers(const ObligationInstance& inst, InstState terminal,
                     std::vector<NormEvent>& events, bool& changed) {
    Outcome outcome = terminal == InstState::Fulfilled ? Outcome::Fulfilled
                      : terminal == InstState::Unfulfilled
                          ? Outcome::Unfulfilled
                          : Outcome::Inactive;
    const detail::CompiledNorm* norm = nullptr;
    for (const auto& n : norms_)
      if (n.id == inst.norm_id) norm = &n;
    if (!norm) return;
    const auto& clause = norm->triggers[static_cast<int>(outcome)];
    if (!clause) return;
    for (const auto& call : *clause) {
      TermPtr ground_call = arith_normalize(inst.bindings.apply(call));
      auto it = srules_.find(ground_call->name());
      try {
        for (const auto& fact :
             fire_sanction_rule(it->second, ground_call, outcome, inst.id,
                                now_, fb_, solve_options)) {
          if (!fb_.assert_fact(fact.as_term())) continue;
          NormEvent ev;
          ev.kind = NormEvent::Kind::SanctionCreated;
          ev.t = now_;
          ev.norm_id = inst.norm_id;
          ev.instance_id = inst.id;
          ev.agent = fact.target;
          ev.payload = fact.as_term();
          events.push_back(std::move(ev));
          changed = true;
        }
      } catch (const Error& err) {
        NormEvent ev;
        ev.kind = NormEvent::Kind::Error;
        ev.t = now_;
        ev.norm_id = inst.norm_id;
        ev.instance_id = inst.id;
        ev.payload = Term::constant("'" + err.code() + ": " +
                                    std::string(err.what()) + "'");
        events.push_back(std::move(ev));
        break;
      }
    }
  }

  std::vector<detail::CompiledNorm> norms_;
  std::map<std::string, SanctionRule> srules_;
  FactBase fb_;
  std::int64_t now_ = 0;
  std::uint64_t next_instance_ = 1;
  std::vector<ObligationInstance> instances_;
  std::set<std::pair<std::string, std::string>> blocked_;
};

}  // namespace npls
