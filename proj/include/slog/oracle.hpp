#ifndef SLOG_ORACLE_HPP_
#define SLOG_ORACLE_HPP_

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "slog/ast.hpp"
#include "slog/print.hpp"

// Brute-force finite-model evaluator and enumerator. This is the ground
// truth the property suites compare the solver against; it favors obvious
// correctness over speed.

namespace slog {

class ExplosionGuard : public std::runtime_error {
 public:
  explicit ExplosionGuard(const std::string& m) : std::runtime_error(m) {}
};

// Ground values. Sets are kept sorted and duplicate-free, so permuting or
// duplicating elements of a set term never changes the value it denotes.
struct Value {
  enum class Tag : std::uint8_t { Int, Ur, Set } tag;
  Int i;
  std::string functor;
  std::vector<Value> args;   // ur arguments (may mix sorts)
  std::vector<Value> elems;  // canonical set elements

  static Value of_int(Int v) {
    Value x;
    x.tag = Tag::Int;
    x.i = std::move(v);
    return x;
  }
  static Value of_ur(std::string f, std::vector<Value> a = {}) {
    Value x;
    x.tag = Tag::Ur;
    x.functor = std::move(f);
    x.args = std::move(a);
    return x;
  }
  static Value of_set(std::vector<Value> es);
};

inline int value_cmp(const Value& a, const Value& b) {
  if (a.tag != b.tag) return a.tag < b.tag ? -1 : 1;
  switch (a.tag) {
    case Value::Tag::Int:
      if (a.i == b.i) return 0;
      return a.i < b.i ? -1 : 1;
    case Value::Tag::Ur: {
      if (int c = a.functor.compare(b.functor)) return c;
      if (a.args.size() != b.args.size())
        return a.args.size() < b.args.size() ? -1 : 1;
      for (size_t i = 0; i < a.args.size(); ++i)
        if (int c = value_cmp(a.args[i], b.args[i])) return c;
      return 0;
    }
    case Value::Tag::Set: {
      if (a.elems.size() != b.elems.size())
        return a.elems.size() < b.elems.size() ? -1 : 1;
      for (size_t i = 0; i < a.elems.size(); ++i)
        if (int c = value_cmp(a.elems[i], b.elems[i])) return c;
      return 0;
    }
  }
  return 0;
}
inline bool operator<(const Value& a, const Value& b) {
  return value_cmp(a, b) < 0;
}
inline bool operator==(const Value& a, const Value& b) {
  return value_cmp(a, b) == 0;
}

inline Value Value::of_set(std::vector<Value> es) {
  std::sort(es.begin(), es.end());
  es.erase(std::unique(es.begin(), es.end(),
                       [](const Value& x, const Value& y) { return x == y; }),
           es.end());
  Value x;
  x.tag = Tag::Set;
  x.elems = std::move(es);
  return x;
}

inline std::string show(const Value& v) {
  switch (v.tag) {
    case Value::Tag::Int: return v.i.str();
    case Value::Tag::Ur: {
      std::string s = v.functor;
      if (!v.args.empty()) {
        s += "(";
        for (size_t i = 0; i < v.args.size(); ++i) {
          if (i) s += ",";
          s += show(v.args[i]);
        }
        s += ")";
      }
      return s;
    }
    case Value::Tag::Set: {
      std::string s = "{";
      for (size_t i = 0; i < v.elems.size(); ++i) {
        if (i) s += ",";
        s += show(v.elems[i]);
      }
      return s + "}";
    }
  }
  return "";
}

using Valuation = std::map<std::string, Value>;

// ---------------------------------------------------------------------------
// Evaluation under a ground valuation.

inline Int eval_linear(const LinearInt& l, const Valuation& sigma) {
  Int acc = l.constant;
  for (const auto& [v, c] : l.monos) {
    auto it = sigma.find(v);
    if (it == sigma.end() || it->second.tag != Value::Tag::Int)
      throw std::logic_error("integer valuation missing for " + v);
    acc += c * it->second.i;
  }
  return acc;
}

inline Value eval_term(const TermPtr& t, const Valuation& sigma) {
  switch (t->tag) {
    case Term::Tag::Var: {
      auto it = sigma.find(t->name);
      if (it == sigma.end())
        throw std::logic_error("valuation missing for " + t->name);
      return it->second;
    }
    case Term::Tag::IntLin:
      return Value::of_int(eval_linear(t->lin, sigma));
    case Term::Tag::UrApp: {
      std::vector<Value> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(eval_term(a, sigma));
      return Value::of_ur(t->name, std::move(args));
    }
    case Term::Tag::SetEmpty:
      return Value::of_set({});
    case Term::Tag::SetCons: {
      Value rest = eval_term(t->rest, sigma);
      if (rest.tag != Value::Tag::Set)
        throw std::logic_error("set part of a set term is not a set");
      std::vector<Value> es = std::move(rest.elems);
      es.push_back(eval_term(t->elem, sigma));
      return Value::of_set(std::move(es));
    }
    case Term::Tag::Interval: {
      Int lo = eval_linear(t->lin, sigma);
      Int hi = eval_linear(t->hi, sigma);
      if (hi - lo > 4096)
        throw ExplosionGuard("interval extension too wide: " + lo.str() +
                             ".." + hi.str());
      std::vector<Value> es;
      for (Int p = lo; p <= hi; ++p) es.push_back(Value::of_int(p));
      return Value::of_set(std::move(es));
    }
  }
  return Value::of_set({});
}

inline bool set_member(const Value& x, const Value& s) {
  return std::binary_search(s.elems.begin(), s.elems.end(), x);
}
inline Value set_union(const Value& a, const Value& b) {
  std::vector<Value> es = a.elems;
  es.insert(es.end(), b.elems.begin(), b.elems.end());
  return Value::of_set(std::move(es));
}
inline Value set_inter(const Value& a, const Value& b) {
  std::vector<Value> es;
  std::set_intersection(a.elems.begin(), a.elems.end(), b.elems.begin(),
                        b.elems.end(), std::back_inserter(es));
  return Value::of_set(std::move(es));
}
inline Value set_minus(const Value& a, const Value& b) {
  std::vector<Value> es;
  std::set_difference(a.elems.begin(), a.elems.end(), b.elems.begin(),
                      b.elems.end(), std::back_inserter(es));
  return Value::of_set(std::move(es));
}
inline bool set_subset(const Value& a, const Value& b) {
  return std::includes(b.elems.begin(), b.elems.end(), a.elems.begin(),
                       a.elems.end());
}

inline bool eval(const Constraint& c, const Valuation& sigma) {
  auto arg = [&](size_t i) { return eval_term(c.args[i], sigma); };
  auto is_set = [](const Value& v) { return v.tag == Value::Tag::Set; };
  switch (c.kind) {
    case CKind::Eq: return arg(0) == arg(1);
    case CKind::Neq: return !(arg(0) == arg(1));
    case CKind::In: {
      Value s = arg(1);
      return is_set(s) && set_member(arg(0), s);
    }
    case CKind::Nin: {
      Value s = arg(1);
      return !is_set(s) || !set_member(arg(0), s);
    }
    case CKind::Un: {
      Value a = arg(0), b = arg(1), cc = arg(2);
      return is_set(a) && is_set(b) && is_set(cc) && set_union(a, b) == cc;
    }
    case CKind::Nun: {
      Value a = arg(0), b = arg(1), cc = arg(2);
      if (!is_set(a) || !is_set(b) || !is_set(cc)) return false;
      return !(set_union(a, b) == cc);
    }
    case CKind::Disj: {
      Value a = arg(0), b = arg(1);
      return is_set(a) && is_set(b) && set_inter(a, b).elems.empty();
    }
    case CKind::Ndisj: {
      Value a = arg(0), b = arg(1);
      return is_set(a) && is_set(b) && !set_inter(a, b).elems.empty();
    }
    case CKind::Size: {
      Value a = arg(0), k = arg(1);
      return is_set(a) && k.tag == Value::Tag::Int &&
             Int(a.elems.size()) == k.i;
    }
    case CKind::Nsize: {
      Value a = arg(0), k = arg(1);
      if (!is_set(a) || k.tag != Value::Tag::Int) return false;
      return Int(a.elems.size()) != k.i;
    }
    case CKind::Subset: {
      Value a = arg(0), b = arg(1);
      return is_set(a) && is_set(b) && set_subset(a, b);
    }
    case CKind::Inters: {
      Value a = arg(0), b = arg(1), cc = arg(2);
      return is_set(a) && is_set(b) && is_set(cc) && set_inter(a, b) == cc;
    }
    case CKind::Ninters: {
      Value a = arg(0), b = arg(1), cc = arg(2);
      if (!is_set(a) || !is_set(b) || !is_set(cc)) return false;
      return !(set_inter(a, b) == cc);
    }
    case CKind::Diff: {
      Value a = arg(0), b = arg(1), cc = arg(2);
      return is_set(a) && is_set(b) && is_set(cc) && set_minus(a, b) == cc;
    }
    case CKind::Ndiff: {
      Value a = arg(0), b = arg(1), cc = arg(2);
      if (!is_set(a) || !is_set(b) || !is_set(cc)) return false;
      return !(set_minus(a, b) == cc);
    }
    case CKind::NInteger:
      return arg(0).tag != Value::Tag::Int;
    case CKind::IntLeq: {
      Value a = arg(0), b = arg(1);
      return a.tag == Value::Tag::Int && b.tag == Value::Tag::Int && a.i <= b.i;
    }
    case CKind::IntLt: {
      Value a = arg(0), b = arg(1);
      return a.tag == Value::Tag::Int && b.tag == Value::Tag::Int && a.i < b.i;
    }
    case CKind::IntEq: {
      Value a = arg(0), b = arg(1);
      return a.tag == Value::Tag::Int && b.tag == Value::Tag::Int && a.i == b.i;
    }
    case CKind::IntNeq: {
      Value a = arg(0), b = arg(1);
      return a.tag == Value::Tag::Int && b.tag == Value::Tag::Int && a.i != b.i;
    }
  }
  return false;
}

inline bool eval(const FormulaPtr& f, const Valuation& sigma) {
  switch (f->tag) {
    case Formula::Tag::True: return true;
    case Formula::Tag::False: return false;
    case Formula::Tag::Atom: return eval(*f->atom, sigma);
    case Formula::Tag::And: return eval(f->lhs, sigma) && eval(f->rhs, sigma);
    case Formula::Tag::Or: return eval(f->lhs, sigma) || eval(f->rhs, sigma);
  }
  return false;
}

// Three-valued evaluation for pruning: atoms whose variables are not all
// assigned are unknown.
enum class Tri : std::uint8_t { False, True, Unknown };

inline bool atom_ready(const Constraint& c, const Valuation& sigma) {
  bool ok = true;
  for (const auto& a : c.args)
    for_each_var(a, [&](const std::string& v, Sort) {
      if (!sigma.count(v)) ok = false;
    });
  return ok;
}

inline Tri eval3(const FormulaPtr& f, const Valuation& sigma) {
  switch (f->tag) {
    case Formula::Tag::True: return Tri::True;
    case Formula::Tag::False: return Tri::False;
    case Formula::Tag::Atom:
      if (!atom_ready(*f->atom, sigma)) return Tri::Unknown;
      return eval(*f->atom, sigma) ? Tri::True : Tri::False;
    case Formula::Tag::And: {
      Tri a = eval3(f->lhs, sigma);
      if (a == Tri::False) return Tri::False;
      Tri b = eval3(f->rhs, sigma);
      if (b == Tri::False) return Tri::False;
      return (a == Tri::True && b == Tri::True) ? Tri::True : Tri::Unknown;
    }
    case Formula::Tag::Or: {
      Tri a = eval3(f->lhs, sigma);
      if (a == Tri::True) return Tri::True;
      Tri b = eval3(f->rhs, sigma);
      if (b == Tri::True) return Tri::True;
      return (a == Tri::False && b == Tri::False) ? Tri::False : Tri::Unknown;
    }
  }
  return Tri::Unknown;
}

// ---------------------------------------------------------------------------
// Enumeration.

struct DomainSpec {
  Int int_lo = -6, int_hi = 6;
  std::vector<std::string> ur_atoms = {"a", "b"};
  int max_card = 3;
  int max_depth = 1;
  long long guard = 10'000'000;
};

// Value enumeration order: integers ascending, then ur-atoms in the given
// order, then sets ordered by cardinality and lexicographically. This is the
// order solutions are reported in.
inline std::vector<Value> scalar_pool(const DomainSpec& d) {
  std::vector<Value> pool;
  for (Int p = d.int_lo; p <= d.int_hi; ++p) pool.push_back(Value::of_int(p));
  for (const auto& u : d.ur_atoms) pool.push_back(Value::of_ur(u));
  return pool;
}

inline void subsets_up_to(const std::vector<Value>& pool, int max_card,
                          std::vector<Value>& out) {
  std::vector<size_t> idx;
  std::function<void(size_t)> rec = [&](size_t start) {
    std::vector<Value> es;
    es.reserve(idx.size());
    for (size_t i : idx) es.push_back(pool[i]);
    out.push_back(Value::of_set(std::move(es)));
    if ((int)idx.size() == max_card) return;
    for (size_t i = start; i < pool.size(); ++i) {
      idx.push_back(i);
      rec(i + 1);
      idx.pop_back();
    }
  };
  rec(0);
  std::stable_sort(out.begin(), out.end());
}

inline std::vector<Value> set_domain(const DomainSpec& d) {
  std::vector<Value> pool = scalar_pool(d);
  for (int depth = 1; depth < d.max_depth; ++depth) {
    std::vector<Value> sets;
    subsets_up_to(pool, d.max_card, sets);
    pool.insert(pool.end(), sets.begin(), sets.end());
  }
  std::vector<Value> out;
  subsets_up_to(pool, d.max_card, out);
  return out;
}

inline std::vector<Value> domain_for(const DomainSpec& d, Sort s) {
  switch (s) {
    case Sort::Int: {
      std::vector<Value> out;
      for (Int p = d.int_lo; p <= d.int_hi; ++p) out.push_back(Value::of_int(p));
      return out;
    }
    case Sort::Ur: {
      std::vector<Value> out;
      for (const auto& u : d.ur_atoms) out.push_back(Value::of_ur(u));
      return out;
    }
    case Sort::Set:
      return set_domain(d);
    case Sort::Any: {
      std::vector<Value> out = domain_for(d, Sort::Int);
      auto urs = domain_for(d, Sort::Ur);
      out.insert(out.end(), urs.begin(), urs.end());
      auto sets = set_domain(d);
      out.insert(out.end(), sets.begin(), sets.end());
      return out;
    }
  }
  return {};
}

struct VarDomain {
  std::string name;
  std::vector<Value> values;
};

// Sound domain shrinking from top-level conjunctive atoms with ground
// right-hand sides: X = g, X in g, subset(X,g), un(X,Y,g), size(X,c).
inline void reduce_domains(const FormulaPtr& f, std::vector<VarDomain>& doms) {
  std::vector<const Constraint*> conj;
  std::function<void(const FormulaPtr&)> walk = [&](const FormulaPtr& g) {
    if (g->tag == Formula::Tag::And) {
      walk(g->lhs);
      walk(g->rhs);
    } else if (g->tag == Formula::Tag::Atom) {
      conj.push_back(&*g->atom);
    }
  };
  walk(f);

  auto ground_value = [&](const TermPtr& t) -> std::optional<Value> {
    bool ground = true;
    for_each_var(t, [&](const std::string&, Sort) { ground = false; });
    if (!ground) return std::nullopt;
    try {
      return eval_term(t, {});
    } catch (const ExplosionGuard&) {
      return std::nullopt;
    }
  };
  auto dom_of = [&](const TermPtr& t) -> VarDomain* {
    if (!is_any_var(t)) return nullptr;
    for (auto& d : doms)
      if (d.name == var_name_of(t)) return &d;
    return nullptr;
  };
  auto filter = [](VarDomain* d, const std::function<bool(const Value&)>& keep) {
    if (!d) return;
    std::vector<Value> out;
    for (const auto& v : d->values)
      if (keep(v)) out.push_back(v);
    d->values = std::move(out);
  };

  for (const Constraint* c : conj) {
    switch (c->kind) {
      case CKind::Eq:
        for (int side = 0; side < 2; ++side) {
          VarDomain* d = dom_of(c->args[side]);
          auto g = ground_value(c->args[1 - side]);
          if (d && g) filter(d, [&](const Value& v) { return v == *g; });
        }
        break;
      case CKind::In: {
        VarDomain* d = dom_of(c->args[0]);
        auto g = ground_value(c->args[1]);
        if (d && g && g->tag == Value::Tag::Set)
          filter(d, [&](const Value& v) { return set_member(v, *g); });
        break;
      }
      case CKind::Subset: {
        VarDomain* d = dom_of(c->args[0]);
        auto g = ground_value(c->args[1]);
        if (d && g && g->tag == Value::Tag::Set)
          filter(d, [&](const Value& v) {
            return v.tag == Value::Tag::Set && set_subset(v, *g);
          });
        break;
      }
      case CKind::Un: {
        auto g = ground_value(c->args[2]);
        if (g && g->tag == Value::Tag::Set)
          for (int side = 0; side < 2; ++side)
            filter(dom_of(c->args[side]), [&](const Value& v) {
              return v.tag == Value::Tag::Set && set_subset(v, *g);
            });
        break;
      }
      case CKind::Size: {
        VarDomain* d = dom_of(c->args[0]);
        auto g = ground_value(c->args[1]);
        if (d && g && g->tag == Value::Tag::Int)
          filter(d, [&](const Value& v) {
            return v.tag == Value::Tag::Set && Int(v.elems.size()) == g->i;
          });
        break;
      }
      default:
        break;
    }
  }
}

// All solutions of `f` over explicit per-variable domains, in lexicographic
// order of the domain value order. Prunes with three-valued evaluation.
inline std::vector<Valuation> enumerate_over(const FormulaPtr& f,
                                             std::vector<VarDomain> doms,
                                             long long guard = 10'000'000) {
  reduce_domains(f, doms);
  double space = 1;
  for (const auto& d : doms) space *= std::max<size_t>(d.values.size(), 1);
  if (space > (double)guard)
    throw ExplosionGuard("assignment space too large");

  std::vector<Valuation> out;
  Valuation sigma;
  std::function<void(size_t)> rec = [&](size_t i) {
    Tri t = eval3(f, sigma);
    if (t == Tri::False) return;
    if (i == doms.size()) {
      if (t == Tri::True) out.push_back(sigma);
      return;
    }
    if (doms[i].values.empty()) return;
    for (const auto& v : doms[i].values) {
      sigma[doms[i].name] = v;
      rec(i + 1);
    }
    sigma.erase(doms[i].name);
  };
  rec(0);
  return out;
}

// Free variables of a formula with their statically known sorts.
inline std::vector<std::pair<std::string, Sort>> free_vars(const FormulaPtr& f) {
  std::vector<std::pair<std::string, Sort>> vars;
  std::map<std::string, size_t> pos;
  for_each_formula_var(f, [&](const std::string& v, Sort s) {
    auto it = pos.find(v);
    if (it == pos.end()) {
      pos.emplace(v, vars.size());
      vars.emplace_back(v, s);
    } else if (vars[it->second].second == Sort::Any) {
      vars[it->second].second = s;
    }
  });
  return vars;
}

inline std::vector<Valuation> enumerate(const FormulaPtr& f,
                                        const DomainSpec& d = {}) {
  std::vector<VarDomain> doms;
  for (const auto& [v, s] : free_vars(f))
    doms.push_back({v, domain_for(d, s)});
  return enumerate_over(f, std::move(doms), d.guard);
}

inline bool oracle_sat(const FormulaPtr& f, const DomainSpec& d = {}) {
  return !enumerate(f, d).empty();
}

}  // namespace slog

#endif  // SLOG_ORACLE_HPP_
