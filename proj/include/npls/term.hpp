#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace npls {

class Term;
using TermPtr = std::shared_ptr<const Term>;

// Immutable logic term. Shared pointers make copies cheap; all structure
// is value-compared.
class Term {
 public:
  enum class Kind { Constant, Int, Real, Str, Var, Compound };

  static TermPtr constant(std::string name) {
    return make(Kind::Constant, std::move(name), 0, 0.0, {}, {});
  }
  static TermPtr integer(std::int64_t v) {
    return make(Kind::Int, {}, v, 0.0, {}, {});
  }
  static TermPtr real(double v) { return make(Kind::Real, {}, 0, v, {}, {}); }
  static TermPtr str(std::string v) {
    return make(Kind::Str, {}, 0, 0.0, std::move(v), {});
  }
  static TermPtr var(std::string name) {
    return make(Kind::Var, std::move(name), 0, 0.0, {}, {});
  }
  // A 0-ary compound collapses to a constant.
  static TermPtr compound(std::string functor, std::vector<TermPtr> args) {
    if (args.empty()) return constant(std::move(functor));
    return make(Kind::Compound, std::move(functor), 0, 0.0, {}, std::move(args));
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  std::int64_t int_value() const { return int_; }
  double real_value() const { return real_; }
  const std::string& str_value() const { return str_; }
  const std::vector<TermPtr>& args() const { return args_; }
  std::size_t arity() const { return args_.size(); }

  bool is_number() const { return kind_ == Kind::Int || kind_ == Kind::Real; }
  double as_double() const {
    return kind_ == Kind::Int ? static_cast<double>(int_) : real_;
  }

  bool is_ground() const {
    if (kind_ == Kind::Var) return false;
    for (const auto& a : args_)
      if (!a->is_ground()) return false;
    return true;
  }

  void collect_vars(std::set<std::string>& out) const {
    if (kind_ == Kind::Var) {
      out.insert(name_);
      return;
    }
    for (const auto& a : args_) a->collect_vars(out);
  }

 private:
  static TermPtr make(Kind k, std::string name, std::int64_t i, double r,
                      std::string s, std::vector<TermPtr> args) {
    auto t = std::make_shared<Term>();
    t->kind_ = k;
    t->name_ = std::move(name);
    t->int_ = i;
    t->real_ = r;
    t->str_ = std::move(s);
    t->args_ = std::move(args);
    return t;
  }

  Kind kind_ = Kind::Constant;
  std::string name_;
  std::int64_t int_ = 0;
  double real_ = 0.0;
  std::string str_;
  std::vector<TermPtr> args_;
};

inline int compare(const Term& a, const Term& b) {
  if (a.kind() != b.kind())
    return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case Term::Kind::Constant:
    case Term::Kind::Var:
      return a.name().compare(b.name());
    case Term::Kind::Int:
      if (a.int_value() != b.int_value())
        return a.int_value() < b.int_value() ? -1 : 1;
      return 0;
    case Term::Kind::Real:
      if (a.real_value() != b.real_value())
        return a.real_value() < b.real_value() ? -1 : 1;
      return 0;
    case Term::Kind::Str:
      return a.str_value().compare(b.str_value());
    case Term::Kind::Compound: {
      if (int c = a.name().compare(b.name()); c != 0) return c;
      if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (int c = compare(*a.args()[i], *b.args()[i]); c != 0) return c;
      return 0;
    }
  }
  return 0;
}

inline bool operator==(const Term& a, const Term& b) { return compare(a, b) == 0; }
inline bool operator!=(const Term& a, const Term& b) { return compare(a, b) != 0; }

struct TermPtrLess {
  bool operator()(const TermPtr& a, const TermPtr& b) const {
    return compare(*a, *b) < 0;
  }
};

namespace detail {
inline void print_real(std::ostream& os, double v) {
  std::ostringstream tmp;
  tmp.precision(17);
  tmp << v;
  std::string s = tmp.str();
  // Keep a decimal marker so the text re-parses as a real.
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
    s += ".0";
  os << s;
}
}  // namespace detail

inline void print_term(std::ostream& os, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Constant:
    case Term::Kind::Var:
      os << t.name();
      break;
    case Term::Kind::Int:
      os << t.int_value();
      break;
    case Term::Kind::Real:
      detail::print_real(os, t.real_value());
      break;
    case Term::Kind::Str:
      os << '"';
      for (char c : t.str_value()) {
        if (c == '"' || c == '\\') os << '\\';
        os << c;
      }
      os << '"';
      break;
    case Term::Kind::Compound: {
      // Binary arithmetic operators print infix with minimal parentheses.
      static const std::map<std::string, int> prec = {
          {"+", 1}, {"-", 1}, {"*", 2}, {"/", 2}};
      auto it = prec.find(t.name());
      if (it != prec.end() && t.arity() == 2) {
        auto sub = [&](const Term& c, bool right) {
          auto cit = prec.find(c.name());
          bool parens = c.kind() == Term::Kind::Compound && cit != prec.end() &&
                        c.arity() == 2 &&
                        (cit->second < it->second ||
                         (cit->second == it->second && right));
          if (parens) os << '(';
          print_term(os, c);
          if (parens) os << ')';
        };
        sub(*t.args()[0], false);
        os << it->first;
        sub(*t.args()[1], true);
        break;
      }
      os << t.name() << '(';
      for (std::size_t i = 0; i < t.arity(); ++i) {
        if (i) os << ',';
        print_term(os, *t.args()[i]);
      }
      os << ')';
      break;
    }
  }
}

inline std::string to_string(const Term& t) {
  std::ostringstream os;
  print_term(os, t);
  return os.str();
}
inline std::string to_string(const TermPtr& t) { return to_string(*t); }

// Variable bindings. Bindings may reference other variables; apply()
// resolves chains fully, so applying twice equals applying once.
class Substitution {
 public:
  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }

  TermPtr lookup(const std::string& name) const {
    auto it = map_.find(name);
    return it == map_.end() ? nullptr : it->second;
  }

  // Follows variable chains until a non-variable or unbound variable.
  TermPtr walk(TermPtr t) const {
    while (t->kind() == Term::Kind::Var) {
      auto b = lookup(t->name());
      if (!b) break;
      t = b;
    }
    return t;
  }

  bool occurs(const std::string& name, const TermPtr& t) const {
    TermPtr w = walk(t);
    if (w->kind() == Term::Kind::Var) return w->name() == name;
    for (const auto& a : w->args())
      if (occurs(name, a)) return true;
    return false;
  }

  // Occurs-check enforced; returns false if binding would create a cycle.
  bool bind(const std::string& name, const TermPtr& t) {
    if (occurs(name, t)) return false;
    map_[name] = t;
    return true;
  }

  TermPtr apply(const TermPtr& t) const {
    TermPtr w = walk(t);
    if (w->kind() != Term::Kind::Compound) return w;
    std::vector<TermPtr> args;
    args.reserve(w->arity());
    bool changed = false;
    for (const auto& a : w->args()) {
      TermPtr r = apply(a);
      changed = changed || r != a;
      args.push_back(std::move(r));
    }
    if (!changed && w == t) return t;
    return Term::compound(w->name(), std::move(args));
  }

  const std::map<std::string, TermPtr>& bindings() const { return map_; }

  // Projection onto a set of variable names, fully resolved.
  Substitution restrict(const std::set<std::string>& vars) const {
    Substitution out;
    for (const auto& v : vars) {
      auto b = lookup(v);
      if (b) out.map_[v] = apply(b);
    }
    return out;
  }

 private:
  std::map<std::string, TermPtr> map_;
};

// Most general unification extending s0. Absence means no unifier exists.
inline std::optional<Substitution> unify(const TermPtr& a, const TermPtr& b,
                                         Substitution s0 = {}) {
  TermPtr x = s0.walk(a);
  TermPtr y = s0.walk(b);
  if (x->kind() == Term::Kind::Var) {
    if (y->kind() == Term::Kind::Var && y->name() == x->name()) return s0;
    if (!s0.bind(x->name(), y)) return std::nullopt;
    return s0;
  }
  if (y->kind() == Term::Kind::Var) {
    if (!s0.bind(y->name(), x)) return std::nullopt;
    return s0;
  }
  if (x->kind() != y->kind()) return std::nullopt;
  switch (x->kind()) {
    case Term::Kind::Constant:
      return x->name() == y->name() ? std::optional(s0) : std::nullopt;
    case Term::Kind::Int:
      return x->int_value() == y->int_value() ? std::optional(s0) : std::nullopt;
    case Term::Kind::Real:
      return x->real_value() == y->real_value() ? std::optional(s0)
                                                : std::nullopt;
    case Term::Kind::Str:
      return x->str_value() == y->str_value() ? std::optional(s0) : std::nullopt;
    case Term::Kind::Compound: {
      if (x->name() != y->name() || x->arity() != y->arity())
        return std::nullopt;
      std::optional<Substitution> s = s0;
      for (std::size_t i = 0; i < x->arity(); ++i) {
        s = unify(x->args()[i], y->args()[i], std::move(*s));
        if (!s) return std::nullopt;
      }
      return s;
    }
    case Term::Kind::Var:
      break;  // handled above
  }
  return std::nullopt;
}

// Reduces arithmetic subterms whose operands are ground numbers.
// apply_fine(A, X*C) with X=20, C=10 becomes apply_fine(A, 200).
inline TermPtr arith_normalize(const TermPtr& t) {
  if (t->kind() != Term::Kind::Compound) return t;
  std::vector<TermPtr> args;
  args.reserve(t->arity());
  for (const auto& a : t->args()) args.push_back(arith_normalize(a));
  const std::string& f = t->name();
  if (args.size() == 2 && (f == "+" || f == "-" || f == "*" || f == "/") &&
      args[0]->is_number() && args[1]->is_number()) {
    if (args[0]->kind() == Term::Kind::Int &&
        args[1]->kind() == Term::Kind::Int) {
      std::int64_t x = args[0]->int_value(), y = args[1]->int_value();
      if (f == "+") return Term::integer(x + y);
      if (f == "-") return Term::integer(x - y);
      if (f == "*") return Term::integer(x * y);
      if (f == "/") {
        if (y != 0 && x % y == 0) return Term::integer(x / y);
        return Term::real(static_cast<double>(x) / static_cast<double>(y));
      }
    }
    double x = args[0]->as_double(), y = args[1]->as_double();
    if (f == "+") return Term::real(x + y);
    if (f == "-") return Term::real(x - y);
    if (f == "*") return Term::real(x * y);
    return Term::real(x / y);
  }
  return Term::compound(f, std::move(args));
}

}  // namespace npls
