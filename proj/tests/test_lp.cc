// test_lp.cc - Unit tests for the dense bounded-variable simplex: contract
// examples, duality and scaling properties, rational/float agreement, and a
// randomized cross-check against an independent exact vertex-enumeration
// oracle (which shares no code with the solver).

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "fusion/lp.hpp"
#include "fusion/util.hpp"

using namespace fusion;

namespace {

// Independent oracle: enumerate all vertices of a compact feasible region by
// activating every n-subset of constraints (rows and finite bounds) as
// equalities, solving exactly, and keeping feasible points.
struct BruteOutcome {
  bool feasible = false;
  Rat best = 0;
};

BruteOutcome brute_force_opt(const LinearProgram& lp) {
  const int n = lp.num_vars();
  std::vector<Vec> normals;
  std::vector<Rat> offsets;  // constraint normal . x = offset when active
  for (int i = 0; i < lp.num_rows(); ++i) {
    normals.push_back(lp.rows[i]);
    offsets.push_back(lp.rhs[i]);
  }
  for (int j = 0; j < n; ++j) {
    Vec e(n, Rat(0));
    e[j] = 1;
    if (lp.bounds[j].has_lower) {
      normals.push_back(e);
      offsets.push_back(lp.bounds[j].lower);
    }
    if (lp.bounds[j].has_upper) {
      normals.push_back(e);
      offsets.push_back(lp.bounds[j].upper);
    }
  }
  const int m = static_cast<int>(normals.size());
  BruteOutcome out;

  auto feasible_point = [&](const Vec& x) {
    for (int i = 0; i < lp.num_rows(); ++i) {
      Rat ax = vdot(lp.rows[i], x);
      if (lp.senses[i] == RowSense::LE && ax > lp.rhs[i]) return false;
      if (lp.senses[i] == RowSense::GE && ax < lp.rhs[i]) return false;
      if (lp.senses[i] == RowSense::EQ && ax != lp.rhs[i]) return false;
    }
    for (int j = 0; j < n; ++j) {
      if (lp.bounds[j].has_lower && x[j] < lp.bounds[j].lower) return false;
      if (lp.bounds[j].has_upper && x[j] > lp.bounds[j].upper) return false;
    }
    return true;
  };

  std::vector<int> comb(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      std::vector<Vec> M;
      Vec rhs;
      for (int k = 0; k < n; ++k) {
        M.push_back(normals[comb[k]]);
        rhs.push_back(offsets[comb[k]]);
      }
      Vec x;
      if (!rat_solve(M, rhs, x)) return;
      if (!feasible_point(x)) return;
      Rat z = vdot(lp.objective, x);
      if (!out.feasible || (lp.maximize ? z > out.best : z < out.best)) {
        out.feasible = true;
        out.best = z;
      }
      return;
    }
    for (int i = start; i < m; ++i) {
      comb[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}

LinearProgram random_compact_lp(DetRng& rng) {
  const int n = 2 + static_cast<int>(rng.next_below(2));  // 2..3 vars
  LinearProgram lp(n);
  for (int j = 0; j < n; ++j) {
    lp.objective[j] = Rat(static_cast<long>(rng.next_below(7)) - 3);
    lp.set_range(j, Rat(0), Rat(static_cast<long>(1 + rng.next_below(3))));
  }
  const int rows = 1 + static_cast<int>(rng.next_below(3));
  for (int i = 0; i < rows; ++i) {
    Vec row(n);
    for (int j = 0; j < n; ++j) row[j] = Rat(static_cast<long>(rng.next_below(7)) - 3);
    RowSense s = RowSense::LE;
    std::uint64_t pick = rng.next_below(4);
    if (pick == 1) s = RowSense::GE;
    if (pick == 2) s = RowSense::EQ;
    lp.add_row(std::move(row), s, Rat(static_cast<long>(rng.next_below(9)) - 2));
  }
  lp.maximize = rng.next_below(2) == 0;
  return lp;
}

}  // namespace

TEST_CASE("one-variable bound optimum") {
  LinearProgram lp(1);
  lp.objective[0] = 1;
  lp.add_row({Rat(1)}, RowSense::LE, Rat(3));
  LpSolution sol = lp_solve(lp, LpMode::Rational);
  CHECK(sol.status == LpStatus::Optimal);
  CHECK(sol.primal[0] == 3);
  CHECK(sol.objective == 3);
  CHECK(sol.rational);
}

TEST_CASE("simplex-face duality: max x+y subject to x+y <= 1") {
  LinearProgram lp(2);
  lp.objective = {Rat(1), Rat(1)};
  lp.add_row({Rat(1), Rat(1)}, RowSense::LE, Rat(1));
  LpSolution sol = lp_solve(lp, LpMode::Rational);
  CHECK(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == 1);
  CHECK(sol.dual[0] == 1);
}

TEST_CASE("empty polytope is Infeasible with a verified Farkas ray") {
  LinearProgram lp(1);
  lp.add_row({Rat(1)}, RowSense::LE, Rat(-1));  // x <= -1 while x >= 0
  LpSolution sol = lp_solve(lp, LpMode::Rational);
  CHECK(sol.status == LpStatus::Infeasible);
  CHECK(sol.has_farkas);
  CHECK(verify_farkas(lp, sol.dual));
}

TEST_CASE("unbounded directions are reported with an improving ray") {
  LinearProgram lp(1);
  lp.objective[0] = 1;  // max x over x >= 0
  LpSolution sol = lp_solve(lp, LpMode::Rational);
  CHECK(sol.status == LpStatus::Unbounded);
  REQUIRE(sol.ray.size() == 1);
  CHECK(sol.ray[0] > 0);
}

TEST_CASE("free and negative-bound variables") {
  LinearProgram lp(2);
  lp.objective = {Rat(1), Rat(-1)};
  lp.set_range(0, Rat(-2), Rat(1));
  lp.free_var(1);
  lp.add_row({Rat(1), Rat(1)}, RowSense::EQ, Rat(0));
  LpSolution sol = lp_solve(lp, LpMode::Rational);
  CHECK(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == 2);  // x = 1, y = -1
  CHECK(sol.primal[0] == 1);
  CHECK(sol.primal[1] == -1);
}

TEST_CASE("degenerate pivoting terminates (classic cycling instance)") {
  LinearProgram lp(4);
  lp.objective = {Rat(3) / 4, Rat(-150), Rat(1) / 50, Rat(-6)};
  lp.add_row({Rat(1) / 4, Rat(-60), Rat(-1) / 25, Rat(9)}, RowSense::LE, Rat(0));
  lp.add_row({Rat(1) / 2, Rat(-90), Rat(-1) / 50, Rat(3)}, RowSense::LE, Rat(0));
  lp.add_row({Rat(0), Rat(0), Rat(1), Rat(0)}, RowSense::LE, Rat(1));
  LpSolution sol = lp_solve(lp, LpMode::Rational);
  CHECK(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == Rat(1) / 20);
}

TEST_CASE("flat objective face is not a singleton; witness pair spans it") {
  LinearProgram lp(1);
  lp.objective[0] = 0;
  lp.set_range(0, Rat(0), Rat(1));
  LpSolution sol = lp_solve(lp, LpMode::Rational);
  REQUIRE(sol.status == LpStatus::Optimal);
  FaceProbe probe = optimal_face_is_singleton(lp, sol);
  CHECK_FALSE(probe.singleton);
  Rat a = probe.witness_a[0], b = probe.witness_b[0];
  CHECK(a != b);
  CHECK(((a == 0 && b == 1) || (a == 1 && b == 0)));
}

TEST_CASE("vertex optimum is a singleton face") {
  LinearProgram lp(1);
  lp.objective[0] = 1;
  lp.set_range(0, Rat(0), Rat(1));
  LpSolution sol = lp_solve(lp, LpMode::Rational);
  FaceProbe probe = optimal_face_is_singleton(lp, sol);
  CHECK(probe.singleton);
  CHECK(probe.seed == 0x5eedf00dULL);
}

TEST_CASE("row scaling: primal unchanged, dual scales inversely") {
  LinearProgram lp(2);
  lp.objective = {Rat(2), Rat(1)};
  lp.add_row({Rat(1), Rat(1)}, RowSense::LE, Rat(4));
  lp.add_row({Rat(1), Rat(0)}, RowSense::LE, Rat(3));
  LpSolution base = lp_solve(lp, LpMode::Rational);
  LinearProgram scaled = lp;
  for (auto& c : scaled.rows[0]) c *= 5;
  scaled.rhs[0] *= 5;
  LpSolution s2 = lp_solve(scaled, LpMode::Rational);
  REQUIRE(base.status == LpStatus::Optimal);
  REQUIRE(s2.status == LpStatus::Optimal);
  CHECK(base.objective == s2.objective);
  CHECK(veq(base.primal, s2.primal));
  CHECK(s2.dual[0] * 5 == base.dual[0]);
  CHECK(s2.dual[1] == base.dual[1]);
}

TEST_CASE("malformed programs are rejected") {
  LinearProgram lp(2);
  CHECK_THROWS_AS(lp.add_row({Rat(1)}, RowSense::LE, Rat(0)), MalformedProgram);
  LinearProgram crossed(1);
  crossed.set_range(0, Rat(2), Rat(1));
  CHECK_THROWS_AS(lp_solve(crossed), MalformedProgram);
}

TEST_CASE("dump emits exact rationals, one row per constraint") {
  LinearProgram lp(2);
  lp.objective = {Rat(1) / 3, Rat(-2)};
  lp.add_row({Rat(1), Rat(2) / 7}, RowSense::GE, Rat(-5) / 2);
  std::string text = lp.dump();
  CHECK(text.find("lp vars=2 rows=1 maximize") != std::string::npos);
  CHECK(text.find("obj 1/3 -2") != std::string::npos);
  CHECK(text.find("row 0 >= -5/2 : 1 2/7") != std::string::npos);
}

TEST_CASE("randomized cross-check against the vertex-enumeration oracle") {
  DetRng rng(20260815ull);
  int optimal_seen = 0, infeasible_seen = 0;
  for (int trial = 0; trial < 160; ++trial) {
    LinearProgram lp = random_compact_lp(rng);
    BruteOutcome oracle = brute_force_opt(lp);
    LpSolution sol = lp_solve(lp, LpMode::Rational);
    if (oracle.feasible) {
      REQUIRE(sol.status == LpStatus::Optimal);
      CHECK(sol.objective == oracle.best);
      ++optimal_seen;
    } else {
      REQUIRE(sol.status == LpStatus::Infeasible);
      CHECK(sol.has_farkas);
      ++infeasible_seen;
    }
  }
  CHECK(optimal_seen > 40);
  CHECK(infeasible_seen > 10);
}

TEST_CASE("rational and float modes agree on status and objective") {
  DetRng rng(775555ull);
  for (int trial = 0; trial < 60; ++trial) {
    LinearProgram lp = random_compact_lp(rng);
    LpSolution ra = lp_solve(lp, LpMode::Rational);
    LpSolution fl = lp_solve(lp, LpMode::Float);
    CHECK(ra.status == fl.status);
    if (ra.status == LpStatus::Optimal)
      CHECK(std::abs(to_double(ra.objective) - to_double(fl.objective)) <= 1e-7);
  }
}
