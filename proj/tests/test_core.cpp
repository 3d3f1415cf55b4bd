#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "slog/ast.hpp"
#include "slog/parser.hpp"
#include "slog/print.hpp"

using namespace slog;

static LinearInt lin(const char* v) { return LinearInt::var(v); }

TEST_CASE("normalize_int canonicalizes linear expressions") {
  // k + 1 - 1  ->  k
  auto k = RawInt::variable("k");
  auto e1 = RawInt::binary(RawInt::Op::Sub,
                           RawInt::binary(RawInt::Op::Add, k, RawInt::constant(1)),
                           RawInt::constant(1));
  CHECK(normalize_int(e1) == lin("k"));

  // 2*m + 3 + m  ->  3*m + 3
  auto m = RawInt::variable("m");
  auto e2 = RawInt::binary(
      RawInt::Op::Add,
      RawInt::binary(RawInt::Op::Add,
                     RawInt::binary(RawInt::Op::Mul, RawInt::constant(2), m),
                     RawInt::constant(3)),
      m);
  LinearInt want;
  want.constant = 3;
  want.add_mono("m", 3);
  CHECK(normalize_int(e2) == want);
  CHECK(show(normalize_int(e2)) == "3*m + 3");

  // m*k is not linear
  auto e3 = RawInt::binary(RawInt::Op::Mul, m, RawInt::variable("k"));
  CHECK_THROWS_AS(normalize_int(e3), NonLinearError);
}

TEST_CASE("normalize_int is idempotent and additive") {
  std::mt19937 rng(7);
  auto rnd_lin = [&]() {
    LinearInt l(Int((int)(rng() % 11) - 5));
    const char* vars[] = {"x", "y", "z"};
    for (const char* v : vars)
      if (rng() % 2) l.add_mono(v, Int((int)(rng() % 9) - 4));
    return l;
  };
  for (int i = 0; i < 200; ++i) {
    LinearInt a = rnd_lin(), b = rnd_lin();
    // already-normal values are fixed points of +/- recombination
    CHECK((a + b) - b == a);
    CHECK((a - b) + b == a);
    // structural equality iff equal at enough sample points: spot-check by
    // evaluating on a grid
    LinearInt s = a + b;
    for (int x = -2; x <= 2; ++x)
      for (int y = -2; y <= 2; ++y) {
        std::map<std::string, Int> env{{"x", x}, {"y", y}, {"z", 1}};
        Int va = a.constant, vb = b.constant, vs = s.constant;
        for (const auto& [v, c] : a.monos) va += c * env[v];
        for (const auto& [v, c] : b.monos) vb += c * env[v];
        for (const auto& [v, c] : s.monos) vs += c * env[v];
        CHECK(vs == va + vb);
      }
  }
}

TEST_CASE("sort_of") {
  CHECK(sort_of(mk_interval(LinearInt(-3), lin("m").scaled(2))) == Sort::Set);
  CHECK(sort_of(mk_int(lin("k") + Int(4))) == Sort::Int);
  CHECK(sort_of(mk_ur("f", {mk_ur("a"), mk_ur("b")})) == Sort::Ur);
  CHECK(sort_of(mk_empty()) == Sort::Set);
  CHECK(sort_of(mk_cons(mk_int(1), mk_empty())) == Sort::Set);
}

TEST_CASE("wellsorted") {
  TermPtr A = mk_var("A", Sort::Set), B = mk_var("B", Sort::Set);
  TermPtr D = mk_var("D", Sort::Set), x = mk_var("X", Sort::Any);
  CHECK(wellsorted(Constraint(CKind::Un, {A, B, mk_cons(x, D)})));
  CHECK_FALSE(wellsorted(Constraint(CKind::Un, {A, B, mk_int(23)})));
  CHECK(wellsorted(Constraint(
      CKind::Size, {mk_interval(lin("k"), lin("m")), mk_intvar("p")})));
  CHECK_FALSE(wellsorted(Constraint(CKind::Size, {A, mk_ur("a")})));
  CHECK_FALSE(wellsorted(Constraint(CKind::In, {x, mk_int(5)})));
}

TEST_CASE("parse of the basic constraint forms") {
  Program prog;
  Query q = prog.parse_query(
      "un({X/A},B,int(K1,M)) & K1 is K + 1 & size(A,P).");
  CHECK(show(q.formula) == "un({X/A},B,int(K1,M)) & K1 = K + 1 & size(A,P)");
  CHECK(q.vars == std::vector<std::string>{"X", "A", "B", "K1", "M", "K", "P"});
}

TEST_CASE("interval limits are restricted in the source syntax") {
  Program prog;
  CHECK_THROWS_WITH(prog.parse_query("un(A,B,int(K + 1,M))."),
                    Catch::Matchers::ContainsSubstring("restriction error"));
  CHECK_THROWS_WITH(prog.parse_query("size(A,P - 3)."),
                    Catch::Matchers::ContainsSubstring("restriction error"));
  // negative constants are fine
  CHECK_NOTHROW(prog.parse_query("un(A,B,int(-3,M))."));
}

TEST_CASE("empty set and set sugar") {
  Program prog;
  Query q = prog.parse_query("A = {}.");
  CHECK(show(q.formula) == "A = {}");
  Query q2 = prog.parse_query("A = {1,2/R}.");
  CHECK(show(q2.formula) == "A = {1,2/R}");
  // desugaring is right-nested
  const Constraint& c = *q2.formula->atom;
  REQUIRE(is_cons(c.args[1]));
  CHECK(is_cons(c.args[1]->rest));
  CHECK(is_var(c.args[1]->rest->rest));
}

TEST_CASE("formula connectives and relational operators") {
  Program prog;
  Query q = prog.parse_query("X in A & (K =< M or M < K) & F >= G & 3 > K.");
  CHECK(show(q.formula) ==
        "X in A & (K =< M or M < K) & G =< F & K < 3");
}

TEST_CASE("cross-sort usage is rejected statically") {
  Program prog;
  CHECK_THROWS_WITH(prog.parse_query("un(A,B,C) & A =< 3."),
                    Catch::Matchers::ContainsSubstring("sort error"));
  CHECK_THROWS_WITH(prog.parse_query("un(A,B,23)."),
                    Catch::Matchers::ContainsSubstring("sort error"));
}

TEST_CASE("definitions expand with fresh locals per call site") {
  Program prog;
  prog.consult("smin(S,M) :- M in S & subset(S,int(M,_)).");
  Query q = prog.parse_query("smin(S,M) & smin(T,N).");
  // the two expansions must not share their anonymous upper limits
  std::string s = show(q.formula);
  CAPTURE(s);
  std::vector<std::string> names;
  for_each_formula_var(q.formula, [&](const std::string& v, Sort) {
    if (v[0] == '_') names.push_back(v);
  });
  REQUIRE(names.size() == 2);
  CHECK(names[0] != names[1]);
}

TEST_CASE("each occurrence of _ is a distinct variable") {
  Program prog;
  Query q = prog.parse_query("_ in A & _ in A.");
  std::set<std::string> names;
  for_each_formula_var(q.formula,
                       [&](const std::string& v, Sort) { names.insert(v); });
  CHECK(names.size() == 3);  // A plus two anonymous variables
  CHECK(q.vars == std::vector<std::string>{"A"});
}

TEST_CASE("unknown predicates, arity mismatch, recursion") {
  Program prog;
  CHECK_THROWS_WITH(prog.parse_query("foo(X)."),
                    Catch::Matchers::ContainsSubstring("unknown predicate"));
  prog.consult("p(X) :- X in A.");
  CHECK_THROWS_WITH(prog.parse_query("p(X,Y)."),
                    Catch::Matchers::ContainsSubstring("arity"));
  CHECK_THROWS_WITH(prog.consult("q(X) :- q(X)."),
                    Catch::Matchers::ContainsSubstring("recursion"));
  // forward references are unknown (covers mutual recursion)
  CHECK_THROWS_WITH(prog.consult("r(X) :- s(X). s(X) :- r(X)."),
                    Catch::Matchers::ContainsSubstring("unknown predicate"));
}

TEST_CASE("parse round-trips through the printer") {
  Program prog;
  const char* samples[] = {
      "un({3,X,1},{Y,5},int(K,M)).",
      "size(A,P) & 0 =< P & disj(A,B).",
      "X in int(K,M) & Y nin {1,2/B}.",
      "diff(R,{F},R1) & inters(A,B,C) & ninteger(U).",
      "[F,Nf,D] = [3,3,closed] & Lift neq [A,B,C].",
      "nun(A,B,C) or ndisj(A,B) or nsize(A,K).",
      "subset(A,int(-2,K)) & ndiff(A,B,C) & ninters(A,B,C).",
  };
  for (const char* s : samples) {
    Query q1 = prog.parse_query(s);
    std::string printed = show(q1.formula) + ".";
    Query q2 = prog.parse_query(printed);
    CHECK(show(q2.formula) == show(q1.formula));
  }
}

TEST_CASE("tuples are right-nested pairs") {
  Program prog;
  Query q = prog.parse_query("Lift = [3,5,closed,halted,up,{2,5}].");
  const Constraint& c = *q.formula->atom;
  REQUIRE(is_urapp(c.args[1]));
  CHECK(c.args[1]->name == "pair");
  CHECK(show(c.args[1]) == "[3,5,closed,halted,up,{2,5}]");
}

TEST_CASE("consult accepts clauses plus a query") {
  Program prog;
  auto q = prog.consult(
      "% elevator toy\n"
      "inv(L) :- L = [F,Nf] & F =< Nf.\n"
      "?- inv([2,3]).\n");
  REQUIRE(q.has_value());
  CHECK(show(q->formula) == "[2,3] = [_F1,_Nf2] & _F1 =< _Nf2");
}
