#ifndef SLOG_PRINT_HPP_
#define SLOG_PRINT_HPP_

#include <sstream>
#include <string>

#include "slog/ast.hpp"

// Rendering back to the concrete syntax. Everything printed here re-parses
// to the same term/constraint, which the CLI relies on.

namespace slog {

inline std::string show(const LinearInt& l) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, c] : l.monos) {
    if (first) {
      if (c == 1) os << v;
      else if (c == -1) os << "-" << v;
      else os << c << "*" << v;
      first = false;
    } else {
      if (c > 0) os << " + ";
      else os << " - ";
      Int a = c > 0 ? c : Int(-c);
      if (a == 1) os << v;
      else os << a << "*" << v;
    }
  }
  if (l.constant != 0 || first) {
    if (first) os << l.constant;
    else if (l.constant > 0) os << " + " << l.constant;
    else os << " - " << Int(-l.constant);
  }
  return os.str();
}

inline std::string show(const TermPtr& t);

namespace detail {

// pair/2 chains print back as tuples: pair(a, pair(b, c)) -> [a,b,c].
inline bool is_pair(const TermPtr& t) {
  return is_urapp(t) && t->name == "pair" && t->args.size() == 2;
}

inline void show_tuple(std::ostringstream& os, const TermPtr& t) {
  os << "[" << show(t->args[0]);
  TermPtr cur = t->args[1];
  while (is_pair(cur)) {
    os << "," << show(cur->args[0]);
    cur = cur->args[1];
  }
  os << "," << show(cur) << "]";
}

}  // namespace detail

inline std::string show(const TermPtr& t) {
  std::ostringstream os;
  switch (t->tag) {
    case Term::Tag::Var:
      os << t->name;
      break;
    case Term::Tag::IntLin:
      os << show(t->lin);
      break;
    case Term::Tag::UrApp:
      if (detail::is_pair(t)) {
        detail::show_tuple(os, t);
      } else {
        os << t->name;
        if (!t->args.empty()) {
          os << "(";
          for (size_t i = 0; i < t->args.size(); ++i) {
            if (i) os << ",";
            os << show(t->args[i]);
          }
          os << ")";
        }
      }
      break;
    case Term::Tag::SetEmpty:
      os << "{}";
      break;
    case Term::Tag::SetCons: {
      ConsSpine s = cons_spine(t);
      os << "{";
      for (size_t i = 0; i < s.elems.size(); ++i) {
        if (i) os << ",";
        os << show(s.elems[i]);
      }
      if (!is_empty(s.tail)) os << "/" << show(s.tail);
      os << "}";
      break;
    }
    case Term::Tag::Interval:
      os << "int(" << show(t->lin) << "," << show(t->hi) << ")";
      break;
  }
  return os.str();
}

inline std::string show(const Constraint& c) {
  std::ostringstream os;
  auto infix = [&](const char* op) {
    os << show(c.args[0]) << " " << op << " " << show(c.args[1]);
  };
  auto prefix = [&](const char* name) {
    os << name << "(";
    for (size_t i = 0; i < c.args.size(); ++i) {
      if (i) os << ",";
      os << show(c.args[i]);
    }
    os << ")";
  };
  switch (c.kind) {
    case CKind::Eq: case CKind::IntEq: infix("="); break;
    case CKind::Neq: case CKind::IntNeq: infix("neq"); break;
    case CKind::In: infix("in"); break;
    case CKind::Nin: infix("nin"); break;
    case CKind::IntLeq: infix("=<"); break;
    case CKind::IntLt: infix("<"); break;
    case CKind::Un: prefix("un"); break;
    case CKind::Nun: prefix("nun"); break;
    case CKind::Disj: prefix("disj"); break;
    case CKind::Ndisj: prefix("ndisj"); break;
    case CKind::Size: prefix("size"); break;
    case CKind::Nsize: prefix("nsize"); break;
    case CKind::Subset: prefix("subset"); break;
    case CKind::Inters: prefix("inters"); break;
    case CKind::Ninters: prefix("ninters"); break;
    case CKind::Diff: prefix("diff"); break;
    case CKind::Ndiff: prefix("ndiff"); break;
    case CKind::NInteger: prefix("ninteger"); break;
  }
  return os.str();
}

inline std::string show(const FormulaPtr& f) {
  switch (f->tag) {
    case Formula::Tag::True: return "true";
    case Formula::Tag::False: return "false";
    case Formula::Tag::Atom: return show(*f->atom);
    case Formula::Tag::And: {
      auto side = [](const FormulaPtr& g) {
        std::string s = show(g);
        if (g->tag == Formula::Tag::Or) return "(" + s + ")";
        return s;
      };
      return side(f->lhs) + " & " + side(f->rhs);
    }
    case Formula::Tag::Or:
      return show(f->lhs) + " or " + show(f->rhs);
  }
  return "";
}

}  // namespace slog

#endif  // SLOG_PRINT_HPP_
