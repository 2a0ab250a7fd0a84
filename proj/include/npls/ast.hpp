#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "npls/factbase.hpp"
#include "npls/formula.hpp"
#include "npls/term.hpp"

namespace npls {

struct TimeSpec {
  enum class Unit { Millisecond, Second, Minute, Hour, Day };

  double amount = 0;
  Unit unit = Unit::Second;

  static std::int64_t factor_ms(Unit u) {
    switch (u) {
      case Unit::Millisecond: return 1;
      case Unit::Second: return 1000;
      case Unit::Minute: return 60'000;
      case Unit::Hour: return 3'600'000;
      case Unit::Day: return 86'400'000;
    }
    return 1;
  }

  std::int64_t duration_ms() const {
    return static_cast<std::int64_t>(amount * factor_ms(unit));
  }

  static const char* unit_name(Unit u) {
    switch (u) {
      case Unit::Millisecond: return "millisecond";
      case Unit::Second: return "second";
      case Unit::Minute: return "minute";
      case Unit::Hour: return "hour";
      case Unit::Day: return "day";
    }
    return "?";
  }
};

enum class Outcome { Fulfilled = 0, Unfulfilled = 1, Inactive = 2 };

inline const char* to_keyword(Outcome o) {
  switch (o) {
    case Outcome::Fulfilled: return "fulfilled";
    case Outcome::Unfulfilled: return "unfulfilled";
    case Outcome::Inactive: return "inactive";
  }
  return "?";
}

enum class ConsequenceKind { Fail, Obligation, Permission, Prohibition };

inline const char* to_keyword(ConsequenceKind k) {
  switch (k) {
    case ConsequenceKind::Fail: return "fail";
    case ConsequenceKind::Obligation: return "obligation";
    case ConsequenceKind::Permission: return "permission";
    case ConsequenceKind::Prohibition: return "prohibition";
  }
  return "?";
}

// norm id : condition -> consequence (trigger clauses)* .
// Trigger clauses are normalized to the fixed order fulfilled, unfulfilled,
// inactive regardless of source order.
struct NormAst {
  std::string id;
  FormulaPtr condition;
  ConsequenceKind kind = ConsequenceKind::Obligation;

  TermPtr fail_atom;  // kind == Fail only

  // dargs, for the deontic kinds:
  TermPtr bearer;  // variable or identifier constant
  FormulaPtr maintenance;
  FormulaPtr goal;
  std::optional<TimeSpec> deadline_time;
  FormulaPtr deadline_formula;  // set iff deadline_time is absent

  std::array<std::optional<std::vector<TermPtr>>, 3> triggers;  // by Outcome

  int line = 0, column = 0;
};

// sanction-rule id(params) [: condition] -> sanction(target, content) .
struct SanctionRuleAst {
  std::string id;
  std::vector<std::string> params;  // distinct variable names
  FormulaPtr condition;             // null means "assumed true"
  TermPtr target;                   // variable or identifier constant
  TermPtr content;                  // atom
  int line = 0, column = 0;
};

struct ProgramAst {
  std::string name;
  using Item = std::variant<InferenceRule, NormAst, SanctionRuleAst>;
  std::vector<Item> items;
};

}  // namespace npls
