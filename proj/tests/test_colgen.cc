// Tests for the block column-generation engine against a direct dense
// formulation of the same programs: one nonnegative variable per (block,
// choice) pair, a convexity row per block, and the shared coupling rows.
#include <doctest.h>

#include <vector>

#include "fusion/colgen.hpp"
#include "fusion/lp.hpp"
#include "fusion/util.hpp"

using namespace fusion;

namespace {

struct Instance {
  int coupling_rows = 0;
  std::vector<RowSense> senses;
  std::vector<Rat> rhs;
  // data[b][t] = (coupling entries, cost)
  std::vector<std::vector<BlockChoice>> data;
};

BlockTransportLp build(const Instance& ins) {
  BlockTransportLp prog(ins.coupling_rows);
  for (int r = 0; r < ins.coupling_rows; ++r)
    prog.set_coupling(r, ins.senses[r], ins.rhs[r]);
  for (const auto& block : ins.data) {
    int b = prog.add_block();
    for (const auto& ch : block) prog.add_choice(b, ch);
  }
  return prog;
}

LpSolution direct_solve(const Instance& ins, bool maximize) {
  int nvars = 0;
  for (const auto& block : ins.data) nvars += static_cast<int>(block.size());
  LinearProgram lp(nvars);
  lp.maximize = maximize;
  int base = 0;
  std::vector<int> offsets;
  for (const auto& block : ins.data) {
    offsets.push_back(base);
    Vec conv(nvars, Rat(0));
    for (std::size_t t = 0; t < block.size(); ++t) {
      lp.objective[base + static_cast<int>(t)] = block[t].cost;
      conv[base + static_cast<int>(t)] = 1;
    }
    lp.add_row(std::move(conv), RowSense::EQ, 1);
    base += static_cast<int>(block.size());
  }
  for (int r = 0; r < ins.coupling_rows; ++r) {
    Vec row(nvars, Rat(0));
    for (std::size_t b = 0; b < ins.data.size(); ++b)
      for (std::size_t t = 0; t < ins.data[b].size(); ++t)
        for (const auto& [rr, v] : ins.data[b][t].coupling)
          if (rr == r) row[offsets[b] + static_cast<int>(t)] += v;
    lp.add_row(std::move(row), ins.senses[r], ins.rhs[r]);
  }
  return lp_solve(lp, LpMode::Rational);
}

BlockChoice choice(std::vector<std::pair<int, Rat>> coupling, Rat cost) {
  BlockChoice c;
  c.coupling = std::move(coupling);
  c.cost = std::move(cost);
  return c;
}

}  // namespace

TEST_CASE("two blocks sharing one unit of coupling capacity") {
  Instance ins;
  ins.coupling_rows = 1;
  ins.senses = {RowSense::EQ};
  ins.rhs = {Rat(1)};
  ins.data = {
      {choice({{0, Rat(1)}}, Rat(3)), choice({}, Rat(1))},
      {choice({{0, Rat(1)}}, Rat(2)), choice({}, Rat(1))},
  };
  auto res = build(ins).solve(true);
  REQUIRE(res.status == LpStatus::Optimal);
  // Block 0 places the unit (cost 3), block 1 idles (cost 1).
  CHECK(res.objective == Rat(4));
  REQUIRE(res.weights[0].size() == 1);
  REQUIRE(res.weights[1].size() == 1);
  CHECK(res.weights[0][0].first == 0);
  CHECK(res.weights[1][0].first == 1);
  // Dual optimality over assignments: cost - y.col - y0 <= 0 for all four.
  for (int t0 = 0; t0 < 2; ++t0)
    for (int t1 = 0; t1 < 2; ++t1) {
      Rat rc = -res.convexity_dual;
      rc += ins.data[0][t0].cost + ins.data[1][t1].cost;
      for (const auto& [r, v] : ins.data[0][t0].coupling) rc -= res.duals[r] * v;
      for (const auto& [r, v] : ins.data[1][t1].coupling) rc -= res.duals[r] * v;
      CHECK(rc <= 0);
    }
}

TEST_CASE("weights are convex combinations reconstructing the coupling rows") {
  // Block 0 can place 2 units or 0; block 1 can place 1 unit or 0. Coupling
  // row demands exactly 2 units, so either block 0 alone or a split between
  // fractional proposals.
  Instance ins;
  ins.coupling_rows = 1;
  ins.senses = {RowSense::EQ};
  ins.rhs = {Rat(2)};
  ins.data = {
      {choice({{0, Rat(2)}}, Rat(1)), choice({}, Rat(0))},
      {choice({{0, Rat(1)}}, Rat(5)), choice({}, Rat(0))},
  };
  auto res = build(ins).solve(true);
  REQUIRE(res.status == LpStatus::Optimal);
  auto direct = direct_solve(ins, true);
  REQUIRE(direct.status == LpStatus::Optimal);
  CHECK(res.objective == direct.objective);
  // Reconstruct the coupling row value and the convexity sums from weights.
  Rat coupled = 0;
  for (int b = 0; b < 2; ++b) {
    Rat total = 0;
    for (const auto& [t, w] : res.weights[b]) {
      CHECK(w > 0);
      total += w;
      for (const auto& [r, v] : ins.data[b][t].coupling) coupled += w * v;
    }
    CHECK(total == Rat(1));
  }
  CHECK(coupled == Rat(2));
}

TEST_CASE("infeasible coupling yields a verified assignment-space certificate") {
  // Both blocks contribute at most 1 unit each but the row demands 3.
  Instance ins;
  ins.coupling_rows = 1;
  ins.senses = {RowSense::EQ};
  ins.rhs = {Rat(3)};
  ins.data = {
      {choice({{0, Rat(1)}}, Rat(0)), choice({}, Rat(0))},
      {choice({{0, Rat(1)}}, Rat(0)), choice({}, Rat(0))},
  };
  auto res = build(ins).solve(false);
  REQUIRE(res.status == LpStatus::Infeasible);
  auto direct = direct_solve(ins, false);
  CHECK(direct.status == LpStatus::Infeasible);
  // Certificate: f.col + f0 >= 0 for every assignment, f.rhs + f0 < 0.
  const Vec& f = res.farkas;
  const Rat& f0 = res.farkas_convexity;
  for (int t0 = 0; t0 < 2; ++t0)
    for (int t1 = 0; t1 < 2; ++t1) {
      Rat v = f0;
      for (const auto& [r, val] : ins.data[0][t0].coupling) v += f[r] * val;
      for (const auto& [r, val] : ins.data[1][t1].coupling) v += f[r] * val;
      CHECK(v >= 0);
    }
  Rat rhsval = f0;
  for (int r = 0; r < ins.coupling_rows; ++r) rhsval += f[r] * ins.rhs[r];
  CHECK(rhsval < 0);
}

TEST_CASE("randomized agreement with the direct dense formulation") {
  DetRng rng(0xc01d5eedULL);
  int optimal_seen = 0, infeasible_seen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Instance ins;
    ins.coupling_rows = 1 + static_cast<int>(rng.next_u64() % 3);
    for (int r = 0; r < ins.coupling_rows; ++r) {
      switch (rng.next_u64() % 3) {
        case 0: ins.senses.push_back(RowSense::LE); break;
        case 1: ins.senses.push_back(RowSense::EQ); break;
        default: ins.senses.push_back(RowSense::GE); break;
      }
      ins.rhs.push_back(Rat(static_cast<long>(rng.next_u64() % 7) - 1));
    }
    const int blocks = 2 + static_cast<int>(rng.next_u64() % 3);
    for (int b = 0; b < blocks; ++b) {
      std::vector<BlockChoice> bc;
      const int k = 2 + static_cast<int>(rng.next_u64() % 3);
      for (int t = 0; t < k; ++t) {
        BlockChoice c;
        for (int r = 0; r < ins.coupling_rows; ++r)
          if (rng.next_u64() % 2)
            c.coupling.emplace_back(r, Rat(static_cast<long>(rng.next_u64() % 5) - 2));
        c.cost = Rat(static_cast<long>(rng.next_u64() % 9) - 4);
        bc.push_back(std::move(c));
      }
      ins.data.push_back(std::move(bc));
    }
    const bool maximize = rng.next_u64() % 2 == 0;
    auto res = build(ins).solve(maximize);
    auto direct = direct_solve(ins, maximize);
    REQUIRE(res.status == direct.status);
    if (res.status == LpStatus::Optimal) {
      ++optimal_seen;
      CHECK(res.objective == direct.objective);
      for (const auto& wb : res.weights) {
        Rat total = 0;
        for (const auto& [t, w] : wb) total += w;
        CHECK(total == Rat(1));
      }
    } else {
      ++infeasible_seen;
    }
  }
  CHECK(optimal_seen > 20);
  CHECK(infeasible_seen > 5);
}

TEST_CASE("seeded proposals do not change the optimum") {
  Instance ins;
  ins.coupling_rows = 2;
  ins.senses = {RowSense::LE, RowSense::GE};
  ins.rhs = {Rat(2), Rat(1)};
  ins.data = {
      {choice({{0, Rat(1)}, {1, Rat(1)}}, Rat(2)), choice({{0, Rat(2)}}, Rat(3))},
      {choice({{1, Rat(1)}}, Rat(1)), choice({}, Rat(0))},
  };
  auto plain = build(ins).solve(true);
  auto seeded_prog = build(ins);
  seeded_prog.seed_proposal({1, 0});
  seeded_prog.seed_proposal({0, 1});
  auto seeded = seeded_prog.solve(true);
  REQUIRE(plain.status == LpStatus::Optimal);
  REQUIRE(seeded.status == LpStatus::Optimal);
  CHECK(plain.objective == seeded.objective);
}
