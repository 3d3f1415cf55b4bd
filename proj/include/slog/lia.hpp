#ifndef SLOG_LIA_HPP_
#define SLOG_LIA_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slog/ast.hpp"

// Decision procedure for quantifier-free linear integer arithmetic:
// conjunctions of =, <=, <, != rows decided by exact-rational simplex on the
// relaxation plus branch-and-bound on fractional variables; disequalities
// are split lazily. All arithmetic is exact.

namespace slog {

class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& m) : std::runtime_error(m) {}
};

enum class LinRel : std::uint8_t { Eq, Leq, Neq };

// expr REL 0 with integer coefficients, gcd-reduced.
struct LinRow {
  LinearInt expr;
  LinRel rel;
};

// Tightening normalization. Returns nullopt for rows that are trivially
// true; sets *infeasible for rows that are trivially false. A `<` row
// arrives here as expr+1 <= 0.
inline std::optional<LinRow> normalize_row(LinearInt e, LinRel rel,
                                           bool* infeasible) {
  if (e.monos.empty()) {
    bool holds = rel == LinRel::Eq    ? e.constant == 0
                 : rel == LinRel::Leq ? e.constant <= 0
                                      : e.constant != 0;
    if (!holds) *infeasible = true;
    return std::nullopt;
  }
  Int g = 0;
  for (const auto& [v, c] : e.monos) g = int_gcd(g, c);
  if (g > 1) {
    if (rel == LinRel::Leq) {
      // sum(a_i/g x_i) <= floor(-c/g), tightened for integers
      Int bound = floor_div(-e.constant, g);
      LinearInt out;
      for (const auto& [v, c] : e.monos) out.monos.emplace(v, c / g);
      out.constant = -bound;
      return LinRow{std::move(out), rel};
    }
    if (e.constant % g != 0) {
      // the equality has no integer solution; the disequality always holds
      if (rel == LinRel::Eq) *infeasible = true;
      return std::nullopt;
    }
    LinearInt out(e.constant / g);
    for (const auto& [v, c] : e.monos) out.monos.emplace(v, c / g);
    return LinRow{std::move(out), rel};
  }
  return LinRow{std::move(e), rel};
}

struct LiaModel {
  std::map<std::string, Int> values;
  Int value_of(const std::string& v) const {
    auto it = values.find(v);
    return it == values.end() ? Int(0) : it->second;
  }
  Int eval(const LinearInt& e) const {
    Int acc = e.constant;
    for (const auto& [v, c] : e.monos) acc += c * value_of(v);
    return acc;
  }
  bool satisfies(const LinRow& r) const {
    Int v = eval(r.expr);
    switch (r.rel) {
      case LinRel::Eq: return v == 0;
      case LinRel::Leq: return v <= 0;
      case LinRel::Neq: return v != 0;
    }
    return false;
  }
};

class LiaStore {
 public:
  // Rows are stored as written; normalization happens inside the solver.
  void add_row(LinearInt expr, LinRel rel) {
    rows_.push_back(LinRow{std::move(expr), rel});
  }

  // atoms of kind IntLeq / IntLt / IntEq / IntNeq
  void add(const Constraint& c) {
    const LinearInt& a = c.args[0]->lin;
    const LinearInt& b = c.args[1]->lin;
    switch (c.kind) {
      case CKind::IntLeq: add_row(a - b, LinRel::Leq); break;
      case CKind::IntLt: add_row((a - b) + Int(1), LinRel::Leq); break;
      case CKind::IntEq: add_row(a - b, LinRel::Eq); break;
      case CKind::IntNeq: add_row(a - b, LinRel::Neq); break;
      default: throw std::logic_error("not an integer constraint");
    }
  }

  void push() { marks_.push_back(rows_.size()); }
  void pop() {
    rows_.resize(marks_.back());
    marks_.pop_back();
  }

  const std::vector<LinRow>& rows() const { return rows_; }
  std::vector<std::string> variables() const {
    std::vector<std::string> out;
    for (const auto& r : rows_)
      for (const auto& [v, c] : r.expr.monos) out.push_back(v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  std::vector<LinRow> rows_;
  std::vector<size_t> marks_;
};

// ---------------------------------------------------------------------------
// Exact LP core: minimize c.y subject to A y = b, y >= 0, two-phase primal
// simplex with Bland's rule (no cycling).

namespace lia_detail {

struct Lp {
  size_t n = 0;                         // structural+artificial columns
  std::vector<std::vector<Rat>> rows;   // m x (n+1), last column rhs
  std::vector<int> basis;

  void pivot(size_t r, size_t c) {
    Rat p = rows[r][c];
    for (auto& x : rows[r]) x /= p;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i == r) continue;
      Rat f = rows[i][c];
      if (f == 0) continue;
      for (size_t j = 0; j <= n; ++j)
        if (rows[r][j] != 0) rows[i][j] -= f * rows[r][j];
    }
    basis[r] = (int)c;
  }

  // Minimizes obj (size n) starting from the current basic feasible
  // solution; returns false when unbounded below.
  bool minimize(const std::vector<Rat>& obj) {
    for (;;) {
      // reduced costs, entering column by Bland's rule
      size_t enter = n;
      for (size_t j = 0; j < n && enter == n; ++j) {
        Rat z = obj[j];
        for (size_t i = 0; i < rows.size(); ++i) {
          if (basis[i] < 0) continue;
          Rat cb = obj[basis[i]];
          if (cb != 0 && rows[i][j] != 0) z -= cb * rows[i][j];
        }
        if (z < 0) enter = j;
      }
      if (enter == n) return true;
      size_t leave = rows.size();
      Rat best = 0;
      for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][enter] <= 0) continue;
        Rat ratio = rows[i][n] / rows[i][enter];
        if (leave == rows.size() || ratio < best ||
            (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == rows.size()) return false;
      pivot(leave, enter);
    }
  }

  Rat objective_value(const std::vector<Rat>& obj) const {
    Rat v = 0;
    for (size_t i = 0; i < rows.size(); ++i)
      if (basis[i] >= 0) v += obj[basis[i]] * rows[i][n];
    return v;
  }

  std::vector<Rat> solution(size_t cols) const {
    std::vector<Rat> y(cols, Rat(0));
    for (size_t i = 0; i < rows.size(); ++i)
      if (basis[i] >= 0 && (size_t)basis[i] < cols) y[basis[i]] = rows[i][n];
    return y;
  }
};

// LP relaxation of integer rows over sign-free variables: x = x+ - x-.
struct Relaxation {
  std::vector<std::string> vars;
  std::map<std::string, size_t> var_index;

  explicit Relaxation(const std::vector<LinRow>& rows) {
    for (const auto& r : rows)
      for (const auto& [v, c] : r.expr.monos)
        if (var_index.emplace(v, vars.size()).second) vars.push_back(v);
  }

  // Feasibility (phase 1) and optional exact minimization (phase 2).
  // Returns false when infeasible; *unbounded set when the objective has no
  // finite infimum over the relaxation.
  bool solve(const std::vector<LinRow>& in_rows, const LinearInt* objective,
             bool* unbounded, Rat* obj_value, std::vector<Rat>* x_out) {
    size_t n_x = vars.size();
    size_t n_slack = 0;
    for (const auto& r : in_rows)
      if (r.rel == LinRel::Leq) ++n_slack;
    size_t n_struct = 2 * n_x + n_slack;
    size_t m = in_rows.size();

    Lp lp;
    lp.n = n_struct + m;
    lp.rows.assign(m, std::vector<Rat>(lp.n + 1, Rat(0)));
    lp.basis.assign(m, -1);
    size_t slack_at = 2 * n_x;
    for (size_t i = 0; i < m; ++i) {
      const LinRow& r = in_rows[i];
      Rat rhs = Rat(-r.expr.constant);
      for (const auto& [v, c] : r.expr.monos) {
        size_t j = var_index.at(v);
        lp.rows[i][j] = Rat(c);
        lp.rows[i][n_x + j] = Rat(-c);
      }
      if (r.rel == LinRel::Leq) lp.rows[i][slack_at++] = 1;
      if (rhs < 0) {
        for (size_t j = 0; j < n_struct; ++j) lp.rows[i][j] = -lp.rows[i][j];
        rhs = -rhs;
      }
      lp.rows[i][n_struct + i] = 1;
      lp.rows[i][lp.n] = rhs;
      lp.basis[i] = (int)(n_struct + i);
    }

    std::vector<Rat> phase1(lp.n, Rat(0));
    for (size_t i = 0; i < m; ++i) phase1[n_struct + i] = 1;
    lp.minimize(phase1);  // bounded below by 0
    if (lp.objective_value(phase1) != 0) return false;

    // Drive leftover artificials out of the basis; rows where that is
    // impossible are redundant and can be dropped.
    for (size_t i = 0; i < lp.rows.size();) {
      if ((size_t)lp.basis[i] < n_struct) { ++i; continue; }
      size_t j = 0;
      for (; j < n_struct; ++j)
        if (lp.rows[i][j] != 0) break;
      if (j < n_struct) {
        lp.pivot(i, j);
        ++i;
      } else {
        lp.rows.erase(lp.rows.begin() + i);
        lp.basis.erase(lp.basis.begin() + i);
      }
    }
    // Truncate the artificial columns.
    for (auto& row : lp.rows) {
      row[n_struct] = row[lp.n];
      row.resize(n_struct + 1);
    }
    lp.n = n_struct;

    if (objective) {
      std::vector<Rat> obj(lp.n, Rat(0));
      for (const auto& [v, c] : objective->monos) {
        auto it = var_index.find(v);
        if (it == var_index.end()) continue;
        obj[it->second] += Rat(c);
        obj[n_x + it->second] -= Rat(c);
      }
      if (!lp.minimize(obj)) {
        if (unbounded) *unbounded = true;
        return true;
      }
      if (unbounded) *unbounded = false;
      if (obj_value)
        *obj_value = lp.objective_value(obj) + Rat(objective->constant);
    } else if (unbounded) {
      *unbounded = false;
    }
    if (x_out) {
      std::vector<Rat> y = lp.solution(2 * n_x);
      x_out->assign(n_x, Rat(0));
      for (size_t j = 0; j < n_x; ++j) (*x_out)[j] = y[j] - y[n_x + j];
    }
    return true;
  }
};

// Interval propagation; detects some integer-infeasible systems that the
// rational relaxation alone would not, and keeps branch-and-bound from
// wandering on equality-free systems.
struct Bounds {
  std::map<std::string, std::pair<std::optional<Int>, std::optional<Int>>> b;
};

inline bool propagate_bounds(const std::vector<LinRow>& rows, Bounds& bounds) {
  std::vector<LinRow> leqs;
  for (const auto& r : rows) {
    if (r.rel == LinRel::Eq) {
      leqs.push_back({r.expr, LinRel::Leq});
      leqs.push_back({r.expr.scaled(Int(-1)), LinRel::Leq});
    } else if (r.rel == LinRel::Leq) {
      leqs.push_back(r);
    }
  }
  for (int pass = 0; pass < 40; ++pass) {
    bool changed = false;
    for (const auto& r : leqs) {
      for (const auto& [vj, aj] : r.expr.monos) {
        // a_j x_j <= -c - sum_{i != j} a_i x_i
        Int rhs = -r.expr.constant;
        bool known = true;
        for (const auto& [vi, ai] : r.expr.monos) {
          if (vi == vj) continue;
          const auto& [lo, hi] = bounds.b[vi];
          if (ai > 0) {
            if (!lo) { known = false; break; }
            rhs -= ai * *lo;
          } else {
            if (!hi) { known = false; break; }
            rhs -= ai * *hi;
          }
        }
        if (!known) continue;
        auto& [lo, hi] = bounds.b[vj];
        if (aj > 0) {
          Int nb = floor_div(rhs, aj);
          if (!hi || *hi > nb) {
            hi = nb;
            changed = true;
            if (lo && *lo > *hi) return false;
          }
        } else {
          Int nb = ceil_div(rhs, aj);
          if (!lo || *lo < nb) {
            lo = nb;
            changed = true;
            if (hi && *lo > *hi) return false;
          }
        }
      }
    }
    if (!changed) break;
  }
  return true;
}

struct Eliminated {
  std::string var;
  LinearInt def;  // var = def over the remaining variables
};

// Gaussian elimination of equalities with a +-1 coefficient; keeps the
// system small and makes most engine-produced stores equality-free.
inline bool eliminate_units(std::vector<LinRow>& rows,
                            std::vector<Eliminated>& defs) {
  for (;;) {
    size_t pick_row = rows.size();
    std::string pick_var;
    for (size_t i = 0; i < rows.size() && pick_row == rows.size(); ++i) {
      if (rows[i].rel != LinRel::Eq) continue;
      for (const auto& [v, c] : rows[i].expr.monos)
        if (c == 1 || c == -1) {
          pick_row = i;
          pick_var = v;
          break;
        }
    }
    if (pick_row == rows.size()) return true;
    LinRow row = rows[pick_row];
    rows.erase(rows.begin() + pick_row);
    Int a = row.expr.monos.at(pick_var);
    row.expr.monos.erase(pick_var);
    // a*v + rest = 0  =>  v = -rest (a=1) | rest (a=-1)
    LinearInt def = row.expr.scaled(a == 1 ? Int(-1) : Int(1));
    std::vector<LinRow> next;
    bool infeasible = false;
    for (auto& r : rows) {
      auto it = r.expr.monos.find(pick_var);
      if (it != r.expr.monos.end()) {
        Int coeff = it->second;
        r.expr.monos.erase(it);
        r.expr += def.scaled(coeff);
      }
      auto nr = normalize_row(std::move(r.expr), r.rel, &infeasible);
      if (infeasible) return false;
      if (nr) next.push_back(std::move(*nr));
    }
    rows = std::move(next);
    defs.push_back({pick_var, std::move(def)});
  }
}

struct Solver {
  long node_cap = 400000;
  long nodes = 0;

  std::optional<LiaModel> feasible(const std::vector<LinRow>& in) {
    std::vector<LinRow> rows;
    std::vector<Eliminated> defs;
    if (!prepare(in, rows, defs)) return std::nullopt;
    auto model = bb(rows);
    if (!model) return std::nullopt;
    finish_model(*model, defs);
    return model;
  }

  // minimal objective over integer models; nullopt when infeasible
  std::optional<LiaModel> minimize(const std::vector<LinRow>& in,
                                   const LinearInt& objective, bool* unbounded,
                                   Int* best) {
    *unbounded = false;
    std::vector<LinRow> rows;
    std::vector<Eliminated> defs;
    if (!prepare(in, rows, defs)) return std::nullopt;
    // forward through the elimination order: each definition may mention
    // variables eliminated later
    LinearInt obj = objective;
    for (const auto& d : defs) {
      auto f = obj.monos.find(d.var);
      if (f == obj.monos.end()) continue;
      Int c = f->second;
      obj.monos.erase(f);
      obj += d.def.scaled(c);
    }
    // objective variables absent from every row are free directions
    std::map<std::string, bool> in_rows;
    for (const auto& r : rows)
      for (const auto& [v, c] : r.expr.monos) in_rows[v] = true;
    for (const auto& [v, c] : obj.monos)
      if (c != 0 && !in_rows.count(v)) {
        if (bb(rows)) {
          *unbounded = true;
          return std::nullopt;
        }
        return std::nullopt;  // infeasible anyway
      }
    std::optional<LiaModel> incumbent;
    Int incumbent_val = 0;
    bb_min(rows, obj, incumbent, incumbent_val, unbounded);
    if (*unbounded || !incumbent) return std::nullopt;
    finish_model(*incumbent, defs);
    *best = incumbent_val;
    return incumbent;
  }

 private:
  bool prepare(const std::vector<LinRow>& in, std::vector<LinRow>& rows,
               std::vector<Eliminated>& defs) {
    bool inf = false;
    for (const auto& r : in) {
      auto nr = normalize_row(LinearInt(r.expr), r.rel, &inf);
      if (inf) return false;
      if (nr) rows.push_back(std::move(*nr));
    }
    if (!eliminate_units(rows, defs)) return false;
    Bounds bounds;
    return propagate_bounds(rows, bounds);
  }

  void finish_model(LiaModel& m, const std::vector<Eliminated>& defs) {
    for (auto it = defs.rbegin(); it != defs.rend(); ++it)
      m.values[it->var] = m.eval(it->def);
  }

  void bump() {
    if (++nodes > node_cap)
      throw ResourceLimitError("integer solver node limit exceeded");
  }

  // most fractional first; returns vars.size() when the point is integral
  static size_t pick_branch(const Relaxation& relax,
                            const std::vector<Rat>& x) {
    size_t frac = relax.vars.size();
    Rat best_dist = 0;
    for (size_t j = 0; j < relax.vars.size(); ++j) {
      Rat f = x[j] - Rat(rat_floor(x[j]));
      if (f == 0) continue;
      Rat dist = f <= Rat(1, 2) ? f : Rat(1) - f;
      if (frac == relax.vars.size() || dist > best_dist) {
        frac = j;
        best_dist = dist;
      }
    }
    return frac;
  }

  static void add_branch_rows(std::vector<LinRow>& lower,
                              std::vector<LinRow>& upper,
                              const std::string& v, const Int& fl) {
    LinearInt le = LinearInt::var(v);
    le.constant = -fl;  // v - fl <= 0
    lower.push_back({std::move(le), LinRel::Leq});
    LinearInt ge = LinearInt::var(v).scaled(Int(-1));
    ge.constant = fl + 1;  // fl + 1 - v <= 0
    upper.push_back({std::move(ge), LinRel::Leq});
  }

  std::optional<LiaModel> bb(const std::vector<LinRow>& rows) {
    bump();
    Relaxation relax(rows);
    std::vector<Rat> x;
    if (!relax.solve(rows, nullptr, nullptr, nullptr, &x)) return std::nullopt;
    size_t j = pick_branch(relax, x);
    if (j == relax.vars.size()) {
      LiaModel m;
      for (size_t i = 0; i < relax.vars.size(); ++i)
        m.values[relax.vars[i]] = rat_floor(x[i]);
      return m;
    }
    std::vector<LinRow> lower = rows, upper = rows;
    add_branch_rows(lower, upper, relax.vars[j], rat_floor(x[j]));
    if (auto m = bb(lower)) return m;
    return bb(upper);
  }

  void bb_min(const std::vector<LinRow>& rows, const LinearInt& obj,
              std::optional<LiaModel>& incumbent, Int& incumbent_val,
              bool* unbounded) {
    bump();
    Relaxation relax(rows);
    std::vector<Rat> x;
    bool unb = false;
    Rat value;
    if (!relax.solve(rows, &obj, &unb, &value, &x)) return;
    if (unb) {
      *unbounded = true;
      return;
    }
    if (incumbent && Rat(incumbent_val) <= value) return;
    size_t j = pick_branch(relax, x);
    if (j == relax.vars.size()) {
      LiaModel m;
      for (size_t i = 0; i < relax.vars.size(); ++i)
        m.values[relax.vars[i]] = rat_floor(x[i]);
      Int got = m.eval(obj);
      if (!incumbent || got < incumbent_val) {
        incumbent = std::move(m);
        incumbent_val = got;
      }
      return;
    }
    std::vector<LinRow> lower = rows, upper = rows;
    add_branch_rows(lower, upper, relax.vars[j], rat_floor(x[j]));
    bb_min(lower, obj, incumbent, incumbent_val, unbounded);
    if (*unbounded) return;
    bb_min(upper, obj, incumbent, incumbent_val, unbounded);
  }
};

// expr != 0 splits into expr <= -1 or -expr <= -1; leaf returns true to stop.
template <class F>
inline bool split_neqs(std::vector<LinRow>& base, std::vector<LinRow>& neqs,
                       size_t i, F&& leaf) {
  if (i == neqs.size()) return leaf(base);
  LinRow low{neqs[i].expr + Int(1), LinRel::Leq};
  LinRow high{neqs[i].expr.scaled(Int(-1)) + Int(1), LinRel::Leq};
  base.push_back(std::move(low));
  if (split_neqs(base, neqs, i + 1, leaf)) {
    base.pop_back();
    return true;
  }
  base.back() = std::move(high);
  bool r = split_neqs(base, neqs, i + 1, leaf);
  base.pop_back();
  return r;
}

}  // namespace lia_detail

// ---------------------------------------------------------------------------

struct LiaSatResult {
  bool sat;
  LiaModel model;
};

struct LiaMinResult {
  enum class Kind { Min, Unsat, Unbounded } kind;
  Int value;
  LiaModel model;
};

inline LiaSatResult lia_sat(const LiaStore& store, long node_cap = 400000) {
  std::vector<LinRow> base, neqs;
  for (const auto& r : store.rows())
    (r.rel == LinRel::Neq ? neqs : base).push_back(r);
  lia_detail::Solver solver;
  solver.node_cap = node_cap;
  LiaSatResult result{false, {}};
  lia_detail::split_neqs(base, neqs, 0, [&](std::vector<LinRow>& rows) {
    auto m = solver.feasible(rows);
    if (m) {
      result = {true, std::move(*m)};
      return true;
    }
    return false;
  });
  return result;
}

inline LiaMinResult lia_minimize(const LiaStore& store,
                                 const LinearInt& objective,
                                 long node_cap = 400000) {
  std::vector<LinRow> base, neqs;
  for (const auto& r : store.rows())
    (r.rel == LinRel::Neq ? neqs : base).push_back(r);
  lia_detail::Solver solver;
  solver.node_cap = node_cap;

  bool any_unbounded = false;
  std::optional<LiaModel> best_model;
  Int best_val = 0;
  lia_detail::split_neqs(base, neqs, 0, [&](std::vector<LinRow>& rows) {
    bool unb = false;
    Int val = 0;
    auto m = solver.minimize(rows, objective, &unb, &val);
    if (unb) {
      any_unbounded = true;
      return true;  // no finite minimum overall
    }
    if (m && (!best_model || val < best_val)) {
      best_model = std::move(m);
      best_val = val;
    }
    return false;  // scan every split: the global minimum is wanted
  });
  if (any_unbounded) return {LiaMinResult::Kind::Unbounded, 0, {}};
  if (!best_model) return {LiaMinResult::Kind::Unsat, 0, {}};
  return {LiaMinResult::Kind::Min, best_val, std::move(*best_model)};
}

}  // namespace slog

#endif  // SLOG_LIA_HPP_
