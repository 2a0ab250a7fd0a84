#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "npls/engine.hpp"
#include "npls/errors.hpp"
#include "npls/trace.hpp"

namespace npls {

// History entry for a sanction decision and its execution.
struct DeFactoRecord {
  enum class Status { Pending, Executed, Skipped };

  SanctionFact fact;
  std::string rationale;
  Status status = Status::Pending;
  double efficacy = 0.0;
  std::int64_t decided_at = 0;
  std::int64_t executed_at = -1;
};

class NormativeAgent;
class AgentSystem;

struct PlanContext {
  NormativeAgent& agent;
  AgentSystem* system = nullptr;
  const NormEvent& event;
  Substitution bindings;

  TermPtr resolve(const TermPtr& t) const {
    return arith_normalize(bindings.apply(t));
  }

  void assert_fact(const TermPtr& t);
  void retract_fact(const TermPtr& t);
  void send(const std::string& to, const TermPtr& fact);
  void record(DeFactoRecord rec);
};

// Capability plan: first plan whose trigger kind, pattern, and guard match
// an event fires; declaration order decides ties.
struct Plan {
  std::string name;
  NormEvent::Kind trigger = NormEvent::Kind::FactAdded;
  TermPtr pattern;
  FormulaPtr guard;  // optional, evaluated over the agent's fact base
  std::function<bool(PlanContext&)> body;  // false reports body failure
};

// One engine per agent. The engine's fact base is the belief base; the
// loaded program is the agent's De Jure and cannot be swapped at runtime.
class NormativeAgent {
 public:
  NormativeAgent(std::string id, Engine engine)
      : id_(std::move(id)), engine_(std::move(engine)) {}

  const std::string& id() const { return id_; }
  Engine& engine() { return engine_; }
  const Engine& engine() const { return engine_; }

  void add_plan(Plan p) { plans_.push_back(std::move(p)); }

  // Event hook, used by AgentSystem to build the interleaved trace.
  std::function<void(const NormEvent&)> on_event;

  std::vector<NormEvent> perceive(const std::vector<TermPtr>& facts) {
    std::vector<NormEvent> out;
    for (const auto& f : facts) {
      if (engine_.facts().contains(f)) continue;  // set semantics
      internal_assert(f, out);
    }
    return out;
  }

  std::vector<NormEvent> tick(std::int64_t new_now) {
    std::vector<NormEvent> evs = engine_.tick(new_now);
    for (const auto& e : evs) queue(e);
    return evs;
  }

  // Matches queued events against plans in order; each fired plan body runs
  // synchronously. Returns the number of executed plans.
  int dispatch(AgentSystem* system = nullptr) {
    int fired = 0;
    while (!pending_.empty()) {
      auto [ev, retried] = pending_.front();
      pending_.pop_front();
      const Plan* chosen = nullptr;
      Substitution bindings;
      for (const auto& p : plans_) {
        if (p.trigger != ev.kind) continue;
        Substitution b;
        if (p.pattern) {
          if (!ev.payload) continue;
          auto u = unify(p.pattern, ev.payload);
          if (!u) continue;
          b = *u;
        }
        if (p.guard) {
          auto sols = solve(apply_subst(b, p.guard), engine_.facts());
          if (sols.empty()) continue;
          for (const auto& [v, t] : sols.front().bindings()) b.bind(v, t);
        }
        chosen = &p;
        bindings = std::move(b);
        break;
      }
      if (!chosen) {
        auto inst = ev.instance_id ? engine_.find_instance(ev.instance_id)
                                   : std::nullopt;
        if (ev.kind == NormEvent::Kind::InstanceCreated && ev.agent == id_ &&
            inst && inst->kind == ConsequenceKind::Obligation) {
          NormEvent warn = ev;
          warn.kind = NormEvent::Kind::UnhandledObligation;
          emit(warn);
        }
        continue;
      }
      PlanContext ctx{*this, system, ev, std::move(bindings)};
      bool ok = false;
      try {
        ok = chosen->body(ctx);
      } catch (const Error&) {
        ok = false;
      }
      if (ok) {
        ++fired;
      } else if (!retried) {
        pending_.push_back({ev, true});  // one retry, then dead-letter
      } else {
        dead_letters_.push_back(ev);
      }
    }
    return fired;
  }

  void record_de_facto(DeFactoRecord rec) {
    de_facto_.push_back(std::move(rec));
  }

  const std::vector<DeFactoRecord>& de_facto() const { return de_facto_; }

  std::vector<DeFactoRecord> de_facto_for(const std::string& target,
                                          const std::string& rule_id = "") const {
    std::vector<DeFactoRecord> out;
    for (const auto& r : de_facto_)
      if (r.fact.target == target &&
          (rule_id.empty() || r.fact.rule_id == rule_id))
        out.push_back(r);
    return out;
  }

  const std::vector<NormEvent>& dead_letters() const { return dead_letters_; }
  std::size_t pending_count() const { return pending_.size(); }

  // Plan-level fact changes run through the same engine path as perception.
  void internal_assert(const TermPtr& fact, std::vector<NormEvent>& out) {
    NormEvent added;
    added.kind = NormEvent::Kind::FactAdded;
    added.t = engine_.now();
    added.agent = id_;
    added.payload = fact;
    queue(added);
    out.push_back(added);
    for (const auto& e : engine_.assert_fact(fact)) {
      queue(e);
      out.push_back(e);
    }
  }

  void internal_retract(const TermPtr& fact, std::vector<NormEvent>& out) {
    for (const auto& e : engine_.retract_fact(fact)) {
      queue(e);
      out.push_back(e);
    }
  }

 private:
  void queue(const NormEvent& e) {
    emit(e);
    pending_.push_back({e, false});
  }

  void emit(const NormEvent& e) {
    if (on_event) on_event(e);
  }

  std::string id_;
  Engine engine_;
  std::vector<Plan> plans_;
  std::vector<DeFactoRecord> de_facto_;
  std::deque<std::pair<NormEvent, bool>> pending_;
  std::vector<NormEvent> dead_letters_;
};

// Owns all agents and runs them in one logical thread of control.
// Messages are FIFO per sender/recipient pair; deliver drains inboxes in
// agent id order.
class AgentSystem {
 public:
  NormativeAgent& add_agent(const std::string& id, Engine engine) {
    auto [it, inserted] = agents_.emplace(
        id, std::make_unique<NormativeAgent>(id, std::move(engine)));
    if (!inserted)
      throw RuntimeError("duplicate-agent", "agent " + id + " already exists");
    NormativeAgent& a = *it->second;
    a.on_event = [this, id](const NormEvent& e) {
      trace_.push_back(trace_line(e, id));
    };
    return a;
  }

  NormativeAgent& agent(const std::string& id) {
    auto it = agents_.find(id);
    if (it == agents_.end())
      throw RuntimeError("unknown-recipient", "no agent named " + id);
    return *it->second;
  }
  bool has_agent(const std::string& id) const { return agents_.count(id) > 0; }

  void send(const std::string& from, const std::string& to,
            const TermPtr& fact) {
    if (!agents_.count(to))
      throw RuntimeError("unknown-recipient", "no agent named " + to);
    inboxes_[to].push_back({from, fact});
  }

  std::vector<NormEvent> deliver() {
    std::vector<NormEvent> out;
    for (auto& [id, agent] : agents_) {
      auto it = inboxes_.find(id);
      if (it == inboxes_.end()) continue;
      std::deque<std::pair<std::string, TermPtr>> box;
      box.swap(it->second);
      for (auto& [from, fact] : box) {
        auto evs = agent->perceive({fact});
        out.insert(out.end(), evs.begin(), evs.end());
      }
    }
    return out;
  }

  int dispatch_all() {
    int fired = 0;
    for (auto& [id, agent] : agents_) fired += agent->dispatch(this);
    return fired;
  }

  // Alternates deliver and dispatch until the system is quiescent.
  void run_until_quiet(int max_rounds = 64) {
    for (int i = 0; i < max_rounds; ++i) {
      deliver();
      int fired = dispatch_all();
      bool mail = false;
      for (const auto& [id, box] : inboxes_)
        if (!box.empty()) mail = true;
      if (!mail && fired == 0) return;
    }
    throw RuntimeError("system-not-quiescent",
                       "message/plan loop did not settle");
  }

  void note(const NormEvent& e, const std::string& agent_id) {
    trace_.push_back(trace_line(e, agent_id));
  }

  const std::vector<std::string>& trace() const { return trace_; }
  std::map<std::string, std::unique_ptr<NormativeAgent>>& agents() {
    return agents_;
  }

 private:
  std::map<std::string, std::unique_ptr<NormativeAgent>> agents_;
  std::map<std::string, std::deque<std::pair<std::string, TermPtr>>> inboxes_;
  std::vector<std::string> trace_;
};

inline void PlanContext::assert_fact(const TermPtr& t) {
  std::vector<NormEvent> out;
  agent.internal_assert(resolve(t), out);
}

inline void PlanContext::retract_fact(const TermPtr& t) {
  std::vector<NormEvent> out;
  agent.internal_retract(resolve(t), out);
}

inline void PlanContext::send(const std::string& to, const TermPtr& fact) {
  if (!system)
    throw RuntimeError("no-system", "send requires an agent system");
  system->send(agent.id(), to, resolve(fact));
}

inline void PlanContext::record(DeFactoRecord rec) {
  agent.record_de_facto(std::move(rec));
}

}  // namespace npls
