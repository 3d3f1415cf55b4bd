#ifndef SLOG_SUBST_HPP_
#define SLOG_SUBST_HPP_

#include <map>
#include <optional>
#include <string>

#include "slog/ast.hpp"

namespace slog {

// Variable-to-term maps. Used both for macro expansion in the parser and as
// the binding store of the solver. Application re-normalizes linear integer
// terms, so substituted limits like [K+1,M] stay canonical.

using TermSubst = std::map<std::string, TermPtr>;

// A term usable inside a linear integer expression.
inline std::optional<LinearInt> coerce_linear(const TermPtr& t) {
  if (is_intlin(t)) return t->lin;
  if (is_var(t)) return LinearInt::var(t->name);
  return std::nullopt;
}

inline LinearInt subst_linear(const LinearInt& l, const TermSubst& s) {
  LinearInt out(l.constant);
  for (const auto& [v, c] : l.monos) {
    auto it = s.find(v);
    if (it == s.end()) {
      out.add_mono(v, c);
      continue;
    }
    auto lin = coerce_linear(it->second);
    if (!lin)
      throw std::logic_error("binding a non-integer term into a linear term: " + v);
    out += lin->scaled(c);
  }
  return out;
}

inline TermPtr subst_term(const TermPtr& t, const TermSubst& s) {
  if (s.empty()) return t;
  switch (t->tag) {
    case Term::Tag::Var: {
      auto it = s.find(t->name);
      return it == s.end() ? t : it->second;
    }
    case Term::Tag::IntLin: {
      bool touched = false;
      for (const auto& [v, c] : t->lin.monos)
        if (s.count(v)) { touched = true; break; }
      return touched ? mk_int(subst_linear(t->lin, s)) : t;
    }
    case Term::Tag::UrApp: {
      bool touched = false;
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) {
        TermPtr na = subst_term(a, s);
        touched |= na.get() != a.get();
        args.push_back(std::move(na));
      }
      return touched ? mk_ur(t->name, std::move(args)) : t;
    }
    case Term::Tag::SetEmpty:
      return t;
    case Term::Tag::SetCons: {
      TermPtr e = subst_term(t->elem, s);
      TermPtr r = subst_term(t->rest, s);
      if (e.get() == t->elem.get() && r.get() == t->rest.get()) return t;
      return mk_cons(std::move(e), std::move(r));
    }
    case Term::Tag::Interval: {
      bool touched = false;
      for (const auto& [v, c] : t->lin.monos)
        if (s.count(v)) { touched = true; break; }
      for (const auto& [v, c] : t->hi.monos)
        if (s.count(v)) { touched = true; break; }
      if (!touched) return t;
      return mk_interval(subst_linear(t->lin, s), subst_linear(t->hi, s));
    }
  }
  return t;
}

inline Constraint subst_constraint(const Constraint& c, const TermSubst& s) {
  std::vector<TermPtr> args;
  args.reserve(c.args.size());
  for (const auto& a : c.args) args.push_back(subst_term(a, s));
  return Constraint(c.kind, std::move(args));
}

inline FormulaPtr subst_formula(const FormulaPtr& f, const TermSubst& s) {
  switch (f->tag) {
    case Formula::Tag::Atom: return f_atom(subst_constraint(*f->atom, s));
    case Formula::Tag::And:
      return f_and(subst_formula(f->lhs, s), subst_formula(f->rhs, s));
    case Formula::Tag::Or:
      return f_or(subst_formula(f->lhs, s), subst_formula(f->rhs, s));
    default: return f;
  }
}

}  // namespace slog

#endif  // SLOG_SUBST_HPP_
