#pragma once

#include <sstream>
#include <string>

#include "npls/ast.hpp"

namespace npls {

inline void print_time_spec(std::ostream& os, const TimeSpec& ts) {
  os << '`';
  if (ts.amount == static_cast<std::int64_t>(ts.amount))
    os << static_cast<std::int64_t>(ts.amount);
  else
    detail::print_real(os, ts.amount);
  os << ' ' << TimeSpec::unit_name(ts.unit);
  if (ts.amount != 1) os << 's';
  os << '`';
}

inline void print_norm(std::ostream& os, const NormAst& n) {
  os << "norm " << n.id << ": ";
  print_formula(os, *n.condition);
  os << " -> ";
  if (n.kind == ConsequenceKind::Fail) {
    os << "fail(";
    print_term(os, *n.fail_atom);
    os << ")";
  } else {
    os << to_keyword(n.kind) << '(';
    print_term(os, *n.bearer);
    os << ", ";
    print_formula(os, *n.maintenance);
    os << ", ";
    print_formula(os, *n.goal);
    os << ", ";
    if (n.deadline_time)
      print_time_spec(os, *n.deadline_time);
    else
      print_formula(os, *n.deadline_formula);
    os << ')';
  }
  for (int i = 0; i < 3; ++i) {
    if (!n.triggers[i]) continue;
    os << "\n     if " << to_keyword(static_cast<Outcome>(i)) << ":";
    bool first = true;
    for (const auto& call : *n.triggers[i]) {
      os << (first ? " " : ", ");
      print_term(os, *call);
      first = false;
    }
  }
  os << " .";
}

inline void print_sanction_rule(std::ostream& os, const SanctionRuleAst& r) {
  os << "sanction-rule " << r.id;
  if (!r.params.empty()) {
    os << '(';
    for (std::size_t i = 0; i < r.params.size(); ++i) {
      if (i) os << ',';
      os << r.params[i];
    }
    os << ')';
  }
  if (r.condition) {
    os << " : ";
    print_formula(os, *r.condition);
  }
  os << " -> sanction(";
  print_term(os, *r.target);
  os << ", ";
  print_term(os, *r.content);
  os << ") .";
}

inline void print_rule(std::ostream& os, const InferenceRule& r) {
  print_term(os, *r.head);
  if (r.body) {
    os << " :- ";
    print_formula(os, *r.body);
  }
  os << " .";
}

// Canonical source. parse_program(pretty_print(ast)) is structurally equal
// to ast.
inline std::string pretty_print(const ProgramAst& p) {
  std::ostringstream os;
  os << "np " << p.name << " {\n";
  for (const auto& item : p.items) {
    os << "  ";
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, InferenceRule>)
            print_rule(os, x);
          else if constexpr (std::is_same_v<T, NormAst>)
            print_norm(os, x);
          else
            print_sanction_rule(os, x);
        },
        item);
    os << '\n';
  }
  os << "}\n";
  return os.str();
}

}  // namespace npls
