#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "slog/lia.hpp"

using namespace slog;

static LinearInt v(const char* n) { return LinearInt::var(n); }

TEST_CASE("lia_sat: forced unique model") {
  LiaStore st;
  // m - k + 1 = 5, k <= 3, 3 <= m, k <= 1, 5 <= m
  st.add_row(v("m") - v("k") + Int(1) - Int(5), LinRel::Eq);
  st.add_row(v("k") - Int(3), LinRel::Leq);
  st.add_row(LinearInt(3) - v("m"), LinRel::Leq);
  st.add_row(v("k") - Int(1), LinRel::Leq);
  st.add_row(LinearInt(5) - v("m"), LinRel::Leq);
  auto r = lia_sat(st);
  REQUIRE(r.sat);
  CHECK(r.model.value_of("k") == 1);
  CHECK(r.model.value_of("m") == 5);
  for (const auto& row : st.rows()) CHECK(r.model.satisfies(row));
}

TEST_CASE("lia_sat: contradictions") {
  LiaStore st;
  st.add_row(v("m") - v("k") + Int(1), LinRel::Leq);  // m < k
  st.add_row(v("k") - v("m"), LinRel::Leq);           // k <= m
  CHECK_FALSE(lia_sat(st).sat);
}

TEST_CASE("lia_sat: disequality split") {
  LiaStore st;
  st.add_row(v("x"), LinRel::Neq);                  // x != 0
  st.add_row(v("x").scaled(Int(-1)), LinRel::Leq);  // 0 <= x
  st.add_row(v("x") - Int(1), LinRel::Leq);         // x <= 1
  auto r = lia_sat(st);
  REQUIRE(r.sat);
  CHECK(r.model.value_of("x") == 1);
}

TEST_CASE("integrality matters") {
  LiaStore st;
  // 2x = 2y + 1 is rationally feasible, integrally infeasible
  st.add_row(v("x").scaled(2) - v("y").scaled(2) - Int(1), LinRel::Eq);
  CHECK_FALSE(lia_sat(st).sat);

  LiaStore st2;
  // 1 <= 2x <= 1 forces the fraction x = 1/2
  st2.add_row(LinearInt(1) - v("x").scaled(2), LinRel::Leq);
  st2.add_row(v("x").scaled(2) - Int(1), LinRel::Leq);
  CHECK_FALSE(lia_sat(st2).sat);
}

TEST_CASE("lia_minimize basics") {
  LiaStore st;
  st.add_row(v("n").scaled(Int(-1)), LinRel::Leq);     // 0 <= n
  st.add_row(LinearInt(5) - v("n"), LinRel::Leq);      // 5 <= n
  auto r = lia_minimize(st, v("n"));
  REQUIRE(r.kind == LiaMinResult::Kind::Min);
  CHECK(r.value == 5);
  CHECK(r.model.value_of("n") == 5);

  LiaStore st2;
  st2.add_row(v("s") - Int(1), LinRel::Leq);
  st2.add_row(LinearInt(2) - v("s"), LinRel::Leq);  // 2 <= s <= 1
  CHECK(lia_minimize(st2, v("s")).kind == LiaMinResult::Kind::Unsat);

  LiaStore st3;
  st3.add_row(v("y").scaled(Int(-1)), LinRel::Leq);  // 0 <= y
  auto r3 = lia_minimize(st3, v("x") - v("y"));
  CHECK(r3.kind == LiaMinResult::Kind::Unbounded);
}

TEST_CASE("push/pop restores the previous verdict") {
  LiaStore st;
  st.add_row(LinearInt(1) - v("x"), LinRel::Leq);  // 1 <= x
  REQUIRE(lia_sat(st).sat);
  st.push();
  st.add_row(v("x"), LinRel::Leq);  // x <= 0
  CHECK_FALSE(lia_sat(st).sat);
  st.pop();
  CHECK(lia_sat(st).sat);
}

// Brute-force agreement on bounded random stores. The acceptance suite runs
// the full-size version of this check.
TEST_CASE("agreement with grid enumeration") {
  std::mt19937 rng(2024);
  const char* names[3] = {"x", "y", "z"};
  for (int round = 0; round < 150; ++round) {
    LiaStore st;
    // box all variables into [-8, 8]
    for (const char* n : names) {
      st.add_row(v(n) - Int(8), LinRel::Leq);
      st.add_row(v(n).scaled(Int(-1)) - Int(8), LinRel::Leq);
    }
    int rows = 1 + rng() % 4;
    for (int i = 0; i < rows; ++i) {
      LinearInt e(Int((int)(rng() % 13) - 6));
      for (const char* n : names)
        if (rng() % 2) e.add_mono(n, Int((int)(rng() % 7) - 3));
      int kind = rng() % 4;
      st.add_row(e, kind == 0 ? LinRel::Eq
                              : kind <= 2 ? LinRel::Leq : LinRel::Neq);
    }
    // oracle: grid walk
    bool oracle_sat = false;
    Int oracle_min = 0;
    bool have_min = false;
    for (int x = -8; x <= 8 && !0; ++x)
      for (int y = -8; y <= 8; ++y)
        for (int z = -8; z <= 8; ++z) {
          LiaModel m;
          m.values = {{"x", x}, {"y", y}, {"z", z}};
          bool ok = true;
          for (const auto& row : st.rows())
            if (!m.satisfies(row)) { ok = false; break; }
          if (!ok) continue;
          oracle_sat = true;
          Int obj = m.value_of("x") + 2 * m.value_of("y") - m.value_of("z");
          if (!have_min || obj < oracle_min) {
            oracle_min = obj;
            have_min = true;
          }
        }
    auto got = lia_sat(st);
    REQUIRE(got.sat == oracle_sat);
    if (got.sat)
      for (const auto& row : st.rows()) CHECK(got.model.satisfies(row));
    auto mn = lia_minimize(st, v("x") + v("y").scaled(2) - v("z"));
    if (!oracle_sat) {
      CHECK(mn.kind == LiaMinResult::Kind::Unsat);
    } else {
      REQUIRE(mn.kind == LiaMinResult::Kind::Min);
      CHECK(mn.value == oracle_min);
    }
  }
}
