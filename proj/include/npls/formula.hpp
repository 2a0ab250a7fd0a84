#pragma once

#include <memory>
#include <set>
#include <sstream>
#include <string>

#include "npls/term.hpp"

namespace npls {

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class CmpOp { Gt, Lt, Ge, Le, Eq, Neq };

inline const char* to_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Gt: return ">";
    case CmpOp::Lt: return "<";
    case CmpOp::Ge: return ">=";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "==";
    case CmpOp::Neq: return "\\==";
  }
  return "?";
}

// Boolean formula over the fact base. Conjunction and disjunction are
// binary; evaluation order is left-to-right.
class Formula {
 public:
  enum class Kind { Atom, Not, And, Or, Cmp };

  static FormulaPtr atom(TermPtr t) {
    auto f = std::make_shared<Formula>();
    f->kind_ = Kind::Atom;
    f->term_ = std::move(t);
    return f;
  }
  static FormulaPtr negation(FormulaPtr child) {
    auto f = std::make_shared<Formula>();
    f->kind_ = Kind::Not;
    f->left_ = std::move(child);
    return f;
  }
  static FormulaPtr conj(FormulaPtr a, FormulaPtr b) {
    auto f = std::make_shared<Formula>();
    f->kind_ = Kind::And;
    f->left_ = std::move(a);
    f->right_ = std::move(b);
    return f;
  }
  static FormulaPtr disj(FormulaPtr a, FormulaPtr b) {
    auto f = std::make_shared<Formula>();
    f->kind_ = Kind::Or;
    f->left_ = std::move(a);
    f->right_ = std::move(b);
    return f;
  }
  static FormulaPtr cmp(CmpOp op, TermPtr lhs, TermPtr rhs) {
    auto f = std::make_shared<Formula>();
    f->kind_ = Kind::Cmp;
    f->op_ = op;
    f->term_ = std::move(lhs);
    f->rhs_ = std::move(rhs);
    return f;
  }
  static FormulaPtr truth() { return atom(Term::constant("true")); }

  Kind kind() const { return kind_; }
  const TermPtr& term() const { return term_; }   // Atom predicate / Cmp lhs
  const TermPtr& rhs() const { return rhs_; }     // Cmp rhs
  const FormulaPtr& left() const { return left_; }
  const FormulaPtr& right() const { return right_; }
  CmpOp op() const { return op_; }

  bool is_truth() const {
    return kind_ == Kind::Atom && term_->kind() == Term::Kind::Constant &&
           term_->name() == "true";
  }

  void collect_vars(std::set<std::string>& out) const {
    switch (kind_) {
      case Kind::Atom:
        term_->collect_vars(out);
        break;
      case Kind::Cmp:
        term_->collect_vars(out);
        rhs_->collect_vars(out);
        break;
      case Kind::Not:
        left_->collect_vars(out);
        break;
      case Kind::And:
      case Kind::Or:
        left_->collect_vars(out);
        right_->collect_vars(out);
        break;
    }
  }

  std::set<std::string> free_vars() const {
    std::set<std::string> out;
    collect_vars(out);
    return out;
  }

 private:
  Kind kind_ = Kind::Atom;
  CmpOp op_ = CmpOp::Eq;
  TermPtr term_, rhs_;
  FormulaPtr left_, right_;
};

inline FormulaPtr apply_subst(const Substitution& s, const FormulaPtr& f) {
  switch (f->kind()) {
    case Formula::Kind::Atom:
      return Formula::atom(s.apply(f->term()));
    case Formula::Kind::Cmp:
      return Formula::cmp(f->op(), s.apply(f->term()), s.apply(f->rhs()));
    case Formula::Kind::Not:
      return Formula::negation(apply_subst(s, f->left()));
    case Formula::Kind::And:
      return Formula::conj(apply_subst(s, f->left()), apply_subst(s, f->right()));
    case Formula::Kind::Or:
      return Formula::disj(apply_subst(s, f->left()), apply_subst(s, f->right()));
  }
  return f;
}

inline FormulaPtr arith_normalize(const FormulaPtr& f) {
  switch (f->kind()) {
    case Formula::Kind::Atom:
      return Formula::atom(arith_normalize(f->term()));
    case Formula::Kind::Cmp:
      return Formula::cmp(f->op(), arith_normalize(f->term()),
                          arith_normalize(f->rhs()));
    case Formula::Kind::Not:
      return Formula::negation(arith_normalize(f->left()));
    case Formula::Kind::And:
      return Formula::conj(arith_normalize(f->left()),
                           arith_normalize(f->right()));
    case Formula::Kind::Or:
      return Formula::disj(arith_normalize(f->left()),
                           arith_normalize(f->right()));
  }
  return f;
}

// Precedence for minimal-parentheses printing: not > & > |.
inline void print_formula(std::ostream& os, const Formula& f,
                          int parent_prec = 0) {
  auto child = [&](const Formula& c, int prec) { print_formula(os, c, prec); };
  switch (f.kind()) {
    case Formula::Kind::Atom:
      print_term(os, *f.term());
      break;
    case Formula::Kind::Cmp:
      print_term(os, *f.term());
      os << ' ' << to_symbol(f.op()) << ' ';
      print_term(os, *f.rhs());
      break;
    case Formula::Kind::Not:
      os << "not ";
      child(*f.left(), 3);
      break;
    case Formula::Kind::And: {
      bool parens = parent_prec > 2;
      if (parens) os << '(';
      child(*f.left(), 2);
      os << " & ";
      child(*f.right(), 2);
      if (parens) os << ')';
      break;
    }
    case Formula::Kind::Or: {
      bool parens = parent_prec > 1;
      if (parens) os << '(';
      child(*f.left(), 1);
      os << " | ";
      child(*f.right(), 1);
      if (parens) os << ')';
      break;
    }
  }
}

inline std::string to_string(const Formula& f) {
  std::ostringstream os;
  print_formula(os, f);
  return os.str();
}
inline std::string to_string(const FormulaPtr& f) { return to_string(*f); }

inline bool equal(const Formula& a, const Formula& b) {
  return to_string(a) == to_string(b);
}

}  // namespace npls
