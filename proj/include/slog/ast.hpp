#ifndef SLOG_AST_HPP_
#define SLOG_AST_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slog/bigint.hpp"

// Three-sorted term language for finite hybrid sets with integer intervals:
// terms, constraint atoms, formulas, and the canonical form of linear
// integer expressions.

namespace slog {

// Variables of sort Any have not been forced into a sort yet; they arise for
// variables the source uses only in sort-neutral positions (set elements,
// equality arguments). Constraint processing pins them per search branch.
enum class Sort : std::uint8_t { Set, Int, Ur, Any };

inline const char* sort_name(Sort s) {
  switch (s) {
    case Sort::Set: return "set";
    case Sort::Int: return "int";
    case Sort::Ur: return "ur";
    default: return "any";
  }
}

// Greatest lower bound in the flat lattice with Any on top.
inline std::optional<Sort> sort_meet(Sort a, Sort b) {
  if (a == Sort::Any) return b;
  if (b == Sort::Any || a == b) return a;
  return std::nullopt;
}

class NonLinearError : public std::runtime_error {
 public:
  explicit NonLinearError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Linear integer terms, kept normalized: constant + sum of monomials with
// nonzero coefficients, monomials ordered by variable name. Structural
// equality then coincides with polynomial identity.

struct LinearInt {
  Int constant;
  std::map<std::string, Int> monos;  // var name -> nonzero coefficient

  LinearInt() : constant(0) {}
  explicit LinearInt(Int c) : constant(std::move(c)) {}
  static LinearInt var(const std::string& name) {
    LinearInt t;
    t.monos.emplace(name, 1);
    return t;
  }

  bool is_constant() const { return monos.empty(); }
  bool is_var() const {
    return constant == 0 && monos.size() == 1 && monos.begin()->second == 1;
  }
  const std::string& var_name() const { return monos.begin()->first; }

  void add_mono(const std::string& v, const Int& coeff) {
    auto it = monos.find(v);
    if (it == monos.end()) {
      if (coeff != 0) monos.emplace(v, coeff);
    } else {
      it->second += coeff;
      if (it->second == 0) monos.erase(it);
    }
  }

  LinearInt& operator+=(const LinearInt& o) {
    constant += o.constant;
    for (const auto& [v, c] : o.monos) add_mono(v, c);
    return *this;
  }
  LinearInt& operator-=(const LinearInt& o) {
    constant -= o.constant;
    for (const auto& [v, c] : o.monos) add_mono(v, -c);
    return *this;
  }
  LinearInt operator+(const LinearInt& o) const {
    LinearInt r = *this;
    r += o;
    return r;
  }
  LinearInt operator-(const LinearInt& o) const {
    LinearInt r = *this;
    r -= o;
    return r;
  }
  LinearInt scaled(const Int& k) const {
    LinearInt r;
    if (k == 0) return r;
    r.constant = constant * k;
    for (const auto& [v, c] : monos) r.monos.emplace(v, c * k);
    return r;
  }
  // The grammar admits only linear terms; a product of two non-constant
  // operands has no normal form here.
  LinearInt times(const LinearInt& o) const {
    if (is_constant()) return o.scaled(constant);
    if (o.is_constant()) return scaled(o.constant);
    throw NonLinearError("nonlinear product of integer terms");
  }

  bool operator==(const LinearInt& o) const {
    return constant == o.constant && monos == o.monos;
  }
  bool operator!=(const LinearInt& o) const { return !(*this == o); }
  bool operator<(const LinearInt& o) const {
    if (constant != o.constant) return constant < o.constant;
    return monos < o.monos;
  }
};

inline LinearInt operator+(const LinearInt& a, const Int& c) {
  LinearInt r = a;
  r.constant += c;
  return r;
}
inline LinearInt operator-(const LinearInt& a, const Int& c) {
  LinearInt r = a;
  r.constant -= c;
  return r;
}

// ---------------------------------------------------------------------------
// Terms. Immutable; shared freely between goals and branches.

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Tag : std::uint8_t {
    Var,       // Set / Ur / Any variable (Int variables live inside IntLin)
    IntLin,    // linear integer term
    UrApp,     // uninterpreted constant or function application
    SetEmpty,  // {}
    SetCons,   // {elem / rest}
    Interval,  // int(lo, hi)
  };

  Tag tag;
  // Var
  std::string name;
  Sort var_sort = Sort::Any;
  // IntLin / Interval
  LinearInt lin, hi;
  // UrApp: name + args (args may be of any sort; tuples mix sorts)
  std::vector<TermPtr> args;
  // SetCons
  TermPtr elem, rest;

  explicit Term(Tag t) : tag(t) {}
};

inline TermPtr mk_var(std::string name, Sort s) {
  auto t = std::make_shared<Term>(Term::Tag::Var);
  t->name = std::move(name);
  t->var_sort = s;
  return t;
}
inline TermPtr mk_int(LinearInt l) {
  auto t = std::make_shared<Term>(Term::Tag::IntLin);
  t->lin = std::move(l);
  return t;
}
inline TermPtr mk_int(Int c) { return mk_int(LinearInt(std::move(c))); }
inline TermPtr mk_int(long c) { return mk_int(LinearInt(Int(c))); }
inline TermPtr mk_intvar(const std::string& name) {
  return mk_int(LinearInt::var(name));
}
inline TermPtr mk_ur(std::string functor, std::vector<TermPtr> args = {}) {
  auto t = std::make_shared<Term>(Term::Tag::UrApp);
  t->name = std::move(functor);
  t->args = std::move(args);
  return t;
}
inline TermPtr mk_empty() {
  static const TermPtr e = std::make_shared<Term>(Term::Tag::SetEmpty);
  return e;
}
inline TermPtr mk_cons(TermPtr elem, TermPtr rest) {
  auto t = std::make_shared<Term>(Term::Tag::SetCons);
  t->elem = std::move(elem);
  t->rest = std::move(rest);
  return t;
}
inline TermPtr mk_interval(LinearInt lo, LinearInt hi) {
  auto t = std::make_shared<Term>(Term::Tag::Interval);
  t->lin = std::move(lo);
  t->hi = std::move(hi);
  return t;
}
inline TermPtr mk_set(const std::vector<TermPtr>& elems, TermPtr tail = nullptr) {
  TermPtr s = tail ? tail : mk_empty();
  for (auto it = elems.rbegin(); it != elems.rend(); ++it) s = mk_cons(*it, s);
  return s;
}

inline bool is_var(const TermPtr& t) { return t->tag == Term::Tag::Var; }
inline bool is_empty(const TermPtr& t) { return t->tag == Term::Tag::SetEmpty; }
inline bool is_cons(const TermPtr& t) { return t->tag == Term::Tag::SetCons; }
inline bool is_interval(const TermPtr& t) { return t->tag == Term::Tag::Interval; }
inline bool is_intlin(const TermPtr& t) { return t->tag == Term::Tag::IntLin; }
inline bool is_urapp(const TermPtr& t) { return t->tag == Term::Tag::UrApp; }

// An integer variable in term position. Kept canonical as a singleton
// linear term.
inline bool is_int_var(const TermPtr& t) {
  return is_intlin(t) && t->lin.is_var();
}
// Any variable occurrence, regardless of sort.
inline bool is_any_var(const TermPtr& t) { return is_var(t) || is_int_var(t); }
inline const std::string& var_name_of(const TermPtr& t) {
  return is_var(t) ? t->name : t->lin.var_name();
}

inline Sort sort_of(const TermPtr& t) {
  switch (t->tag) {
    case Term::Tag::Var: return t->var_sort;
    case Term::Tag::IntLin: return Sort::Int;
    case Term::Tag::UrApp: return Sort::Ur;
    default: return Sort::Set;
  }
}

inline int term_cmp(const TermPtr& a, const TermPtr& b);

inline int lin_cmp(const LinearInt& a, const LinearInt& b) {
  if (a == b) return 0;
  return a < b ? -1 : 1;
}

inline int term_cmp(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return 0;
  if (a->tag != b->tag) return a->tag < b->tag ? -1 : 1;
  switch (a->tag) {
    case Term::Tag::Var:
      return a->name.compare(b->name);
    case Term::Tag::IntLin:
      return lin_cmp(a->lin, b->lin);
    case Term::Tag::UrApp: {
      if (int c = a->name.compare(b->name)) return c;
      if (a->args.size() != b->args.size())
        return a->args.size() < b->args.size() ? -1 : 1;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (int c = term_cmp(a->args[i], b->args[i])) return c;
      return 0;
    }
    case Term::Tag::SetEmpty:
      return 0;
    case Term::Tag::SetCons: {
      if (int c = term_cmp(a->elem, b->elem)) return c;
      return term_cmp(a->rest, b->rest);
    }
    case Term::Tag::Interval: {
      if (int c = lin_cmp(a->lin, b->lin)) return c;
      return lin_cmp(a->hi, b->hi);
    }
  }
  return 0;
}

inline bool term_eq(const TermPtr& a, const TermPtr& b) {
  return term_cmp(a, b) == 0;
}

// Whether variable `v` occurs anywhere in `t` (inside elements, tails,
// functor arguments, linear terms, interval limits).
inline bool occurs(const std::string& v, const TermPtr& t) {
  switch (t->tag) {
    case Term::Tag::Var: return t->name == v;
    case Term::Tag::IntLin: return t->lin.monos.count(v) != 0;
    case Term::Tag::UrApp:
      for (const auto& a : t->args)
        if (occurs(v, a)) return true;
      return false;
    case Term::Tag::SetEmpty: return false;
    case Term::Tag::SetCons: return occurs(v, t->elem) || occurs(v, t->rest);
    case Term::Tag::Interval:
      return t->lin.monos.count(v) != 0 || t->hi.monos.count(v) != 0;
  }
  return false;
}

template <class F>
inline void for_each_var(const TermPtr& t, F&& f) {
  switch (t->tag) {
    case Term::Tag::Var: f(t->name, t->var_sort); break;
    case Term::Tag::IntLin:
      for (const auto& [v, c] : t->lin.monos) f(v, Sort::Int);
      break;
    case Term::Tag::UrApp:
      for (const auto& a : t->args) for_each_var(a, f);
      break;
    case Term::Tag::SetEmpty: break;
    case Term::Tag::SetCons:
      for_each_var(t->elem, f);
      for_each_var(t->rest, f);
      break;
    case Term::Tag::Interval:
      for (const auto& [v, c] : t->lin.monos) f(v, Sort::Int);
      for (const auto& [v, c] : t->hi.monos) f(v, Sort::Int);
      break;
  }
}

// Walks the {e1 / {e2 / ... / tail}} spine of an extensional set term.
struct ConsSpine {
  std::vector<TermPtr> elems;
  TermPtr tail;  // SetEmpty, Var, or Interval
};
inline ConsSpine cons_spine(const TermPtr& t) {
  ConsSpine s;
  TermPtr cur = t;
  while (is_cons(cur)) {
    s.elems.push_back(cur->elem);
    cur = cur->rest;
  }
  s.tail = cur;
  return s;
}

// ---------------------------------------------------------------------------
// Constraints and formulas.

enum class CKind : std::uint8_t {
  Eq, Neq, In, Nin,
  Un, Nun, Disj, Ndisj,
  Size, Nsize,
  Subset, Inters, Ninters, Diff, Ndiff,
  NInteger,
  IntLeq, IntLt, IntEq, IntNeq,
};

inline bool is_int_kind(CKind k) {
  return k == CKind::IntLeq || k == CKind::IntLt || k == CKind::IntEq ||
         k == CKind::IntNeq;
}

struct Constraint {
  CKind kind;
  std::vector<TermPtr> args;

  Constraint(CKind k, std::vector<TermPtr> a) : kind(k), args(std::move(a)) {}
};

inline int constraint_cmp(const Constraint& a, const Constraint& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.args.size() != b.args.size())
    return a.args.size() < b.args.size() ? -1 : 1;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (int c = term_cmp(a.args[i], b.args[i])) return c;
  return 0;
}

// Declared argument sorts per predicate (Any = position admits every sort).
inline const std::vector<Sort>& constraint_signature(CKind k) {
  static const std::vector<Sort> eq = {Sort::Any, Sort::Any};
  static const std::vector<Sort> mem = {Sort::Any, Sort::Set};
  static const std::vector<Sort> s3 = {Sort::Set, Sort::Set, Sort::Set};
  static const std::vector<Sort> s2 = {Sort::Set, Sort::Set};
  static const std::vector<Sort> size = {Sort::Set, Sort::Int};
  static const std::vector<Sort> ii = {Sort::Int, Sort::Int};
  static const std::vector<Sort> any1 = {Sort::Any};
  switch (k) {
    case CKind::Eq: case CKind::Neq: return eq;
    case CKind::In: case CKind::Nin: return mem;
    case CKind::Un: case CKind::Nun: case CKind::Inters: case CKind::Ninters:
    case CKind::Diff: case CKind::Ndiff: return s3;
    case CKind::Disj: case CKind::Ndisj: case CKind::Subset: return s2;
    case CKind::Size: case CKind::Nsize: return size;
    case CKind::NInteger: return any1;
    default: return ii;
  }
}

// Sort check against the predicate signature. Variables of sort Any pass
// everywhere (their sort is settled by inference or during search); every
// non-variable term has a definite sort and must match.
inline bool wellsorted(const Constraint& c) {
  const auto& sig = constraint_signature(c.kind);
  if (c.args.size() != sig.size()) return false;
  for (size_t i = 0; i < sig.size(); ++i) {
    if (sig[i] == Sort::Any) continue;
    Sort s = sort_of(c.args[i]);
    if (s == Sort::Any) continue;
    if (s != sig[i]) return false;
  }
  return true;
}

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Tag : std::uint8_t { True, False, Atom, And, Or };
  Tag tag;
  std::optional<Constraint> atom;
  FormulaPtr lhs, rhs;

  explicit Formula(Tag t) : tag(t) {}
};

inline FormulaPtr f_true() {
  static const FormulaPtr t = std::make_shared<Formula>(Formula::Tag::True);
  return t;
}
inline FormulaPtr f_false() {
  static const FormulaPtr f = std::make_shared<Formula>(Formula::Tag::False);
  return f;
}
inline FormulaPtr f_atom(Constraint c) {
  auto f = std::make_shared<Formula>(Formula::Tag::Atom);
  f->atom = std::move(c);
  return f;
}
inline FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
  if (a->tag == Formula::Tag::True) return b;
  if (b->tag == Formula::Tag::True) return a;
  if (a->tag == Formula::Tag::False || b->tag == Formula::Tag::False)
    return f_false();
  auto f = std::make_shared<Formula>(Formula::Tag::And);
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}
inline FormulaPtr f_or(FormulaPtr a, FormulaPtr b) {
  if (a->tag == Formula::Tag::False) return b;
  if (b->tag == Formula::Tag::False) return a;
  if (a->tag == Formula::Tag::True || b->tag == Formula::Tag::True)
    return f_true();
  auto f = std::make_shared<Formula>(Formula::Tag::Or);
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

template <class F>
inline void for_each_atom(const FormulaPtr& f, F&& fn) {
  switch (f->tag) {
    case Formula::Tag::Atom: fn(*f->atom); break;
    case Formula::Tag::And:
    case Formula::Tag::Or:
      for_each_atom(f->lhs, fn);
      for_each_atom(f->rhs, fn);
      break;
    default: break;
  }
}

template <class F>
inline void for_each_formula_var(const FormulaPtr& f, F&& fn) {
  for_each_atom(f, [&](const Constraint& c) {
    for (const auto& a : c.args) for_each_var(a, fn);
  });
}

// ---------------------------------------------------------------------------
// normalize_int: canonicalize a raw integer expression tree. The parser and
// the rewriting rules build LinearInt values directly, so this is exposed
// mainly as the module boundary for expression-level inputs.

struct RawInt {
  enum class Op : std::uint8_t { Const, Var, Add, Sub, Mul, Neg };
  Op op;
  Int value;
  std::string var;
  std::shared_ptr<const RawInt> a, b;

  static std::shared_ptr<const RawInt> constant(Int v) {
    auto r = std::make_shared<RawInt>();
    r->op = Op::Const;
    r->value = std::move(v);
    return r;
  }
  static std::shared_ptr<const RawInt> variable(std::string v) {
    auto r = std::make_shared<RawInt>();
    r->op = Op::Var;
    r->var = std::move(v);
    return r;
  }
  static std::shared_ptr<const RawInt> binary(Op o,
                                              std::shared_ptr<const RawInt> x,
                                              std::shared_ptr<const RawInt> y) {
    auto r = std::make_shared<RawInt>();
    r->op = o;
    r->a = std::move(x);
    r->b = std::move(y);
    return r;
  }
  static std::shared_ptr<const RawInt> neg(std::shared_ptr<const RawInt> x) {
    auto r = std::make_shared<RawInt>();
    r->op = Op::Neg;
    r->a = std::move(x);
    return r;
  }
};
using RawIntPtr = std::shared_ptr<const RawInt>;

inline LinearInt normalize_int(const RawIntPtr& e) {
  switch (e->op) {
    case RawInt::Op::Const: return LinearInt(e->value);
    case RawInt::Op::Var: return LinearInt::var(e->var);
    case RawInt::Op::Add: return normalize_int(e->a) + normalize_int(e->b);
    case RawInt::Op::Sub: return normalize_int(e->a) - normalize_int(e->b);
    case RawInt::Op::Mul: return normalize_int(e->a).times(normalize_int(e->b));
    case RawInt::Op::Neg: return normalize_int(e->a).scaled(Int(-1));
  }
  return LinearInt();
}

}  // namespace slog

#endif  // SLOG_AST_HPP_
