#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "npls/errors.hpp"
#include "npls/parser.hpp"
#include "npls/runtime.hpp"

namespace npls {

struct Order {
  std::string liquid;
  std::string bottle;
  double target = 0;  // ml
  double min_ml = 0;
  double max_ml = 0;
};

struct ValveModel {
  double true_rate = 10.0;   // ml/s
  double clog = 1.0;         // (0,1], multiplies the true rate
  double estimated = 10.0;   // the valve agent's belief, ml/s
  double viscosity = 1.0;    // per liquid type factor

  double effective() const { return true_rate * clog * viscosity; }
};

struct FillResult {
  std::string bottle;
  double intended = 0;
  double actual = 0;
  int polarity = 1;      // +1 compliant, -1 violated
  double magnitude = 0;  // distance outside [MN,MX] / (MX-MN)
};

// EWMA image update; value stays in [0,1].
inline double update_image(double prev, double alpha, int polarity) {
  return (1.0 - alpha) * prev + alpha * (polarity > 0 ? 1.0 : 0.0);
}

// Opening window derived from the estimated rate; the liquid actually
// delivered follows the effective rate. Clog decays after the fill.
inline FillResult simulate_fill(ValveModel& valve, const Order& order,
                                double clog_decay = 1.0,
                                double rate_factor = 1.0) {
  FillResult r;
  r.bottle = order.bottle;
  r.intended = order.target;
  double window_s = order.target / valve.estimated;
  r.actual = window_s * valve.effective() * rate_factor;
  valve.clog *= clog_decay;
  if (r.actual >= order.min_ml && r.actual <= order.max_ml) {
    r.polarity = 1;
    r.magnitude = 0;
  } else {
    r.polarity = -1;
    double outside = r.actual < order.min_ml ? order.min_ml - r.actual
                                             : r.actual - order.max_ml;
    r.magnitude = outside / (order.max_ml - order.min_ml);
  }
  return r;
}

// S1: multiplicative correction of the estimate toward the effective rate.
inline void s1_adjust(ValveModel& valve, const FillResult& result) {
  if (result.intended > 0) valve.estimated *= result.actual / result.intended;
}

struct UnitConfig {
  std::string id;
  ValveModel valve;
};

struct ScenarioConfig {
  std::vector<UnitConfig> units;
  std::vector<Order> orders;
  double alpha = 0.3;
  double image_threshold = 0.5;
  int t_clean = 3;
  int t_remove = 5;
  double clog_decay = 0.98;
  double rate_noise = 0.0;  // max fractional per-fill rate disturbance
  bool fire_s4_and_s5 = true;
  std::uint64_t seed = 0;

  void validate() const {
    auto bad = [](const std::string& m) {
      throw RuntimeError("config-invalid", m);
    };
    if (units.empty()) bad("at least one unit required");
    std::set<std::string> ids;
    for (const auto& u : units) {
      if (u.id.empty() || !ids.insert(u.id).second) bad("unit ids must be unique");
      if (u.valve.true_rate <= 0 || u.valve.estimated <= 0 ||
          u.valve.viscosity <= 0)
        bad("valve rates must be positive");
      if (u.valve.clog <= 0 || u.valve.clog > 1) bad("clog factor must be in (0,1]");
    }
    for (const auto& o : orders) {
      if (!(o.min_ml < o.max_ml)) bad("order tolerance window requires MN < MX");
      if (o.target < o.min_ml || o.target > o.max_ml)
        bad("order target must lie within [MN,MX]");
    }
    if (alpha <= 0 || alpha > 1) bad("alpha must be in (0,1]");
    if (image_threshold <= 0) bad("image threshold must be positive");
    if (t_clean <= 0 || t_remove <= 0) bad("violation thresholds must be positive");
    if (clog_decay <= 0 || clog_decay > 1) bad("clog decay must be in (0,1]");
    if (rate_noise < 0) bad("rate noise must be non-negative");
  }
};

struct FillRecord {
  int order_index = -1;
  std::string unit, valve, bottle;
  double intended = 0, actual = 0;
  int polarity = 1;
  double magnitude = 0;
  double estimated_before = 0, effective_before = 0;
  int consecutive_after = 0;       // unit-side counter for the valve
  int unit_consecutive_after = 0;  // plant-side counter for the unit
  std::vector<std::string> sanctions;  // "S1".."S5" fired on this fill
};

struct ScenarioSummary {
  std::map<std::string, int> fills;       // per unit
  std::map<std::string, int> compliant;   // per unit
  std::map<std::string, int> sanction_counts = {
      {"S1", 0}, {"S2", 0}, {"S3", 0}, {"S4", 0}, {"S5", 0}};
  std::map<std::string, double> images;  // valve images (unit view) and
                                         // unit images (plant view)
  int unassigned = 0;
  std::vector<FillRecord> records;

  double compliance_rate() const {
    int f = 0, c = 0;
    for (const auto& [u, n] : fills) f += n;
    for (const auto& [u, n] : compliant) c += n;
    return f == 0 ? 1.0 : static_cast<double>(c) / f;
  }
};

namespace detail {

inline std::string unit_de_jure(const std::string& unit,
                                const std::string& valve, int t_clean) {
  std::ostringstream os;
  os << "np " << unit << "_de_jure {\n"
     << "  valve(" << valve << ").\n"
     << "  clean_threshold(" << t_clean << ").\n"
     << "  consecutive(" << valve << ", 0).\n"
     << "  norm n1: fill_bottle(LQ, B, MN, MX)\n"
     << "     -> obligation(" << unit << ", true, filled_ok(B), `1 second`)\n"
     << "        if unfulfilled: s1(B), s2(B) .\n"
     << "  norm n2: filled(B, ACT)\n"
     << "     -> obligation(" << unit << ", true, factors_updated(B), `1 second`) .\n"
     << "  sanction-rule s1(B) : valve(V) & consecutive(V, C) & "
        "clean_threshold(T) & C < T & image_low(V)\n"
     << "     -> sanction(V, adjust_flow_rate(B)) .\n"
     << "  sanction-rule s2(B) : valve(V) & consecutive(V, C) & "
        "clean_threshold(T) & C >= T\n"
     << "     -> sanction(V, self_cleaning(B)) .\n"
     << "}\n";
  return os.str();
}

}  // namespace detail

// Filling plant with one plant agent, configured unit agents, and one valve
// agent per unit, wired through the enforcement runtime.
class MyJoghurtScenario {
 public:
  explicit MyJoghurtScenario(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    rng_.seed(cfg_.seed);
    build();
  }

  ScenarioSummary run() {
    std::int64_t t = 0;
    const std::int64_t round_ms = 10'000;
    for (std::size_t i = 0; i < cfg_.orders.size(); ++i) {
      const Order& order = cfg_.orders[i];
      std::string unit = pick_unit();
      if (unit.empty()) {
        ++summary_.unassigned;
        continue;
      }
      run_round(static_cast<int>(i), order, unit, t);
      t += round_ms;
    }
    for (const auto& [v, img] : valve_image_) summary_.images[v] = img;
    for (const auto& [u, img] : unit_image_) summary_.images[u] = img;
    return summary_;
  }

  const std::vector<std::string>& trace() const { return sys_.trace(); }

 private:
  struct UnitState {
    std::string valve_id;
  };

  void build() {
    Engine plant_engine = Engine::load(parse_program("np plant_de_jure {}"));
    NormativeAgent& plant = sys_.add_agent("plant", std::move(plant_engine));
    add_plant_plans(plant);

    for (const auto& uc : cfg_.units) {
      std::string valve_id = "v" + uc.id;
      units_[uc.id] = UnitState{valve_id};
      valves_[valve_id] = uc.valve;
      valve_image_[valve_id] = 1.0;
      valve_consecutive_[valve_id] = 0;
      unit_image_[uc.id] = 1.0;
      unit_consecutive_[uc.id] = 0;

      Engine ue = Engine::load(
          parse_program(detail::unit_de_jure(uc.id, valve_id, cfg_.t_clean)));
      NormativeAgent& ua = sys_.add_agent(uc.id, std::move(ue));
      add_unit_plans(ua, uc.id, valve_id);

      Engine ve =
          Engine::load(parse_program("np " + valve_id + "_de_jure {}"));
      NormativeAgent& va = sys_.add_agent(valve_id, std::move(ve));
      add_valve_plans(va, valve_id);
    }
  }

  // Availability: not disregarded; ties broken by highest plant-side image,
  // then lexicographic unit id.
  std::string pick_unit() const {
    std::string best;
    double best_img = -1;
    for (const auto& [id, st] : units_) {
      if (disregarded_.count(id)) continue;
      double img = unit_image_.at(id);
      if (img > best_img || (img == best_img && (best.empty() || id < best))) {
        best = id;
        best_img = img;
      }
    }
    return best;
  }

  void run_round(int order_index, const Order& order, const std::string& unit,
                 std::int64_t t) {
    const std::string& valve_id = units_.at(unit).valve_id;
    FillRecord rec;
    rec.order_index = order_index;
    rec.unit = unit;
    rec.valve = valve_id;
    rec.bottle = order.bottle;
    rec.intended = order.target;
    rec.estimated_before = valves_.at(valve_id).estimated;
    rec.effective_before = valves_.at(valve_id).effective();
    current_order_[order.bottle] = order;
    current_record_ = &rec;

    sys_.agent(unit).tick(t);
    sys_.agent(valve_id).tick(t);
    sys_.send("plant", unit,
              Term::compound("fill_bottle",
                             {Term::constant(order.liquid),
                              Term::constant(order.bottle),
                              Term::real(order.min_ml),
                              Term::real(order.max_ml)}));
    sys_.run_until_quiet();

    // Past both deadlines: an unfilled or out-of-range bottle turns n1
    // unfulfilled, which evaluates s1/s2 against the updated factors.
    sys_.agent(unit).tick(t + 2000);
    sys_.run_until_quiet();

    // Completed request leaves the belief base so the same bottle can be
    // ordered again later.
    sys_.agent(unit).engine().retract_fact(Term::compound(
        "fill_bottle",
        {Term::constant(order.liquid), Term::constant(order.bottle),
         Term::real(order.min_ml), Term::real(order.max_ml)}));

    ++summary_.fills[unit];
    if (rec.polarity > 0) ++summary_.compliant[unit];
    rec.consecutive_after = valve_consecutive_.at(valve_id);
    rec.unit_consecutive_after = unit_consecutive_.at(unit);
    summary_.records.push_back(rec);
    current_record_ = nullptr;
  }

  void add_unit_plans(NormativeAgent& agent, std::string unit,
                      std::string valve_id) {
    // Fill plan: reacts to the n1 obligation, runs the fill through the
    // valve model, and reports the measured level back into the beliefs.
    Plan fill;
    fill.name = "fill";
    fill.trigger = NormEvent::Kind::InstanceCreated;
    fill.pattern = Term::compound("filled_ok", {Term::var("B")});
    fill.body = [this, unit, valve_id](PlanContext& ctx) {
      TermPtr bt = ctx.resolve(Term::var("B"));
      std::string bottle = to_string(bt);
      auto it = current_order_.find(bottle);
      if (it == current_order_.end()) return false;
      const Order& order = it->second;
      double noise = noise_draw();
      FillResult result =
          simulate_fill(valves_.at(valve_id), order, cfg_.clog_decay, noise);
      last_fill_[bottle] = result;
      if (current_record_ && current_record_->bottle == bottle) {
        current_record_->actual = result.actual;
        current_record_->polarity = result.polarity;
        current_record_->magnitude = result.magnitude;
      }
      ctx.assert_fact(Term::compound(
          "filled", {bt, Term::real(result.actual)}));
      if (result.polarity > 0)
        ctx.assert_fact(Term::compound("filled_ok", {bt}));
      return true;
    };
    agent.add_plan(std::move(fill));

    // Evaluator bookkeeping: deviation and learning factors for the valve.
    Plan factors;
    factors.name = "factors";
    factors.trigger = NormEvent::Kind::InstanceCreated;
    factors.pattern = Term::compound("factors_updated", {Term::var("B")});
    factors.body = [this, unit, valve_id](PlanContext& ctx) {
      TermPtr bt = ctx.resolve(Term::var("B"));
      auto it = last_fill_.find(to_string(bt));
      if (it == last_fill_.end()) return false;
      const FillResult& result = it->second;
      double& image = valve_image_[valve_id];
      image = update_image(image, cfg_.alpha, result.polarity);
      int& consec = valve_consecutive_[valve_id];
      int old = consec;
      consec = result.polarity < 0 ? consec + 1 : 0;
      TermPtr v = Term::constant(valve_id);
      ctx.retract_fact(
          Term::compound("consecutive", {v, Term::integer(old)}));
      ctx.assert_fact(
          Term::compound("consecutive", {v, Term::integer(consec)}));
      TermPtr low = Term::compound("image_low", {v});
      if (image < cfg_.image_threshold) {
        if (!ctx.agent.engine().facts().contains(low)) ctx.assert_fact(low);
      } else if (ctx.agent.engine().facts().contains(low)) {
        ctx.retract_fact(low);
      }
      ctx.assert_fact(Term::compound("factors_updated", {bt}));
      ctx.send("plant",
               Term::compound("fill_result",
                              {Term::constant(unit), bt,
                               Term::integer(result.polarity)}));
      return true;
    };
    agent.add_plan(std::move(factors));

    // Executor: forward the decided sanction to the valve agent and log it.
    Plan exec;
    exec.name = "executor";
    exec.trigger = NormEvent::Kind::SanctionCreated;
    exec.pattern = Term::compound(
        "sanction", {Term::constant(valve_id), Term::var("S")});
    exec.body = [this, unit, valve_id](PlanContext& ctx) {
      TermPtr s = ctx.resolve(Term::var("S"));
      TermPtr fact =
          Term::compound("sanction", {Term::constant(valve_id), s});
      bool clean = s->name() == "self_cleaning";
      DeFactoRecord rec;
      rec.fact.target = valve_id;
      rec.fact.content = s;
      rec.fact.rule_id = clean ? "s2" : "s1";
      rec.fact.outcome = Outcome::Unfulfilled;
      rec.fact.at_ms = ctx.agent.engine().now();
      rec.rationale = clean ? "consecutive violations reached the cleaning "
                              "threshold"
                            : "valve image below threshold";
      rec.status = DeFactoRecord::Status::Executed;
      rec.decided_at = ctx.agent.engine().now();
      rec.executed_at = ctx.agent.engine().now();
      ctx.record(std::move(rec));
      if (clean) {
        // Self-cleaning resets the violation count; keep the belief base fact
        // in step with the counter or s2 would keep matching the stale value.
        int& c = valve_consecutive_[valve_id];
        TermPtr v = Term::constant(valve_id);
        ctx.retract_fact(Term::compound("consecutive", {v, Term::integer(c)}));
        ctx.assert_fact(Term::compound("consecutive", {v, Term::integer(0)}));
        c = 0;
      }
      note_sanction(clean ? "S2" : "S1");
      ctx.send(valve_id, fact);
      ctx.retract_fact(fact);
      return true;
    };
    agent.add_plan(std::move(exec));
  }

  void add_valve_plans(NormativeAgent& agent, std::string valve_id) {
    Plan exec;
    exec.name = "executor";
    exec.trigger = NormEvent::Kind::FactAdded;
    exec.pattern = Term::compound(
        "sanction", {Term::constant(valve_id), Term::var("S")});
    exec.body = [this, valve_id](PlanContext& ctx) {
      TermPtr s = ctx.resolve(Term::var("S"));
      ValveModel& model = valves_.at(valve_id);
      DeFactoRecord rec;
      rec.fact.target = valve_id;
      rec.fact.content = s;
      rec.status = DeFactoRecord::Status::Executed;
      rec.decided_at = ctx.agent.engine().now();
      rec.executed_at = ctx.agent.engine().now();
      if (s->name() == "adjust_flow_rate" && s->arity() == 1) {
        auto it = last_fill_.find(to_string(s->args()[0]));
        if (it == last_fill_.end()) return false;
        s1_adjust(model, it->second);
        rec.fact.rule_id = "s1";
        rec.rationale = "flow rate estimate corrected";
      } else if (s->name() == "self_cleaning") {
        model.clog = 1.0;
        rec.fact.rule_id = "s2";
        rec.rationale = "self-cleaning procedure run";
      } else {
        return false;
      }
      ctx.record(std::move(rec));
      ctx.retract_fact(Term::compound(
          "sanction", {Term::constant(valve_id), s}));
      return true;
    };
    agent.add_plan(std::move(exec));
  }

  void add_plant_plans(NormativeAgent& agent) {
    Plan eval;
    eval.name = "evaluator";
    eval.trigger = NormEvent::Kind::FactAdded;
    eval.pattern = Term::compound(
        "fill_result", {Term::var("U"), Term::var("B"), Term::var("P")});
    eval.body = [this](PlanContext& ctx) {
      std::string unit = to_string(ctx.resolve(Term::var("U")));
      TermPtr p = ctx.resolve(Term::var("P"));
      int polarity = p->is_number() && p->as_double() < 0 ? -1 : 1;
      double& image = unit_image_[unit];
      image = update_image(image, cfg_.alpha, polarity);
      int& consec = unit_consecutive_[unit];
      if (polarity < 0) {
        ++consec;
        if (image < cfg_.image_threshold) {
          // S3 is the image adjustment itself, recorded as a sanction.
          DeFactoRecord rec;
          rec.fact.target = unit;
          rec.fact.content = Term::compound("adjust_image",
                                            {Term::constant(unit)});
          rec.fact.rule_id = "s3";
          rec.rationale = "unit image below threshold";
          rec.status = DeFactoRecord::Status::Executed;
          rec.decided_at = ctx.agent.engine().now();
          rec.executed_at = ctx.agent.engine().now();
          ctx.record(std::move(rec));
          note_sanction("S3");
        }
        if (consec == cfg_.t_remove) {
          disregarded_.insert(unit);
          DeFactoRecord rec;
          rec.fact.target = unit;
          rec.fact.content = Term::compound("disregard",
                                            {Term::constant(unit)});
          rec.fact.rule_id = "s4";
          rec.rationale = "five consecutive violations";
          rec.status = DeFactoRecord::Status::Executed;
          rec.decided_at = ctx.agent.engine().now();
          rec.executed_at = ctx.agent.engine().now();
          ctx.record(std::move(rec));
          note_sanction("S4");
          if (cfg_.fire_s4_and_s5) {
            NormEvent alarm;
            alarm.kind = NormEvent::Kind::Alarm;
            alarm.t = ctx.agent.engine().now();
            alarm.agent = "plant";
            alarm.payload = Term::compound("manual_intervention",
                                           {Term::constant(unit)});
            sys_.note(alarm, "plant");
            DeFactoRecord r5;
            r5.fact.target = unit;
            r5.fact.content = alarm.payload;
            r5.fact.rule_id = "s5";
            r5.rationale = "five consecutive violations; repair required";
            r5.status = DeFactoRecord::Status::Executed;
            r5.decided_at = ctx.agent.engine().now();
            r5.executed_at = ctx.agent.engine().now();
            ctx.record(std::move(r5));
            note_sanction("S5");
          }
        }
      } else {
        consec = 0;
      }
      return true;
    };
    agent.add_plan(std::move(eval));
  }

  void note_sanction(const std::string& id) {
    ++summary_.sanction_counts[id];
    if (current_record_) current_record_->sanctions.push_back(id);
  }

  double noise_draw() {
    if (cfg_.rate_noise == 0) return 1.0;
    std::uniform_real_distribution<double> d(-cfg_.rate_noise, cfg_.rate_noise);
    return 1.0 + d(rng_);
  }

  ScenarioConfig cfg_;
  AgentSystem sys_;
  std::map<std::string, UnitState> units_;
  std::map<std::string, ValveModel> valves_;
  std::map<std::string, double> valve_image_, unit_image_;
  std::map<std::string, int> valve_consecutive_, unit_consecutive_;
  std::set<std::string> disregarded_;
  std::map<std::string, Order> current_order_;
  std::map<std::string, FillResult> last_fill_;
  FillRecord* current_record_ = nullptr;
  ScenarioSummary summary_;
  std::mt19937_64 rng_;
};

struct ScenarioRun {
  ScenarioSummary summary;
  std::vector<std::string> trace;
};

inline ScenarioRun run_scenario(const ScenarioConfig& cfg) {
  MyJoghurtScenario s(cfg);
  ScenarioRun out;
  out.summary = s.run();
  out.trace = s.trace();
  return out;
}

// Summary text with fixed field names.
inline std::string format_summary(const ScenarioSummary& s) {
  std::ostringstream os;
  os.precision(12);
  os << "compliance_rate=" << s.compliance_rate() << '\n';
  for (const auto& [u, n] : s.fills) {
    int c = s.compliant.count(u) ? s.compliant.at(u) : 0;
    os << "compliance_rate." << u << '='
       << (n == 0 ? 1.0 : static_cast<double>(c) / n) << '\n';
  }
  for (const auto& [id, n] : s.sanction_counts)
    os << "sanctions." << id << '=' << n << '\n';
  for (const auto& [a, img] : s.images) os << "image." << a << '=' << img << '\n';
  os << "unassigned_orders=" << s.unassigned << '\n';
  return os.str();
}

}  // namespace npls
