// colgen.cc - Dantzig-Wolfe master/pricing loop for block-separable transport
// programs, on top of the exact simplex. Masters are first solved in floating
// point to harvest columns cheaply; the loop switches to rational masters for
// the endgame, so the returned duals and Farkas rays are exact certificates.

#include "fusion/colgen.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace fusion {

BlockTransportLp::BlockTransportLp(int coupling_rows) : rows_(coupling_rows) {}

void BlockTransportLp::set_coupling(int row, RowSense sense, Rat rhs) {
  rows_.at(row) = {sense, std::move(rhs)};
}

int BlockTransportLp::add_block() {
  choices_.emplace_back();
  return static_cast<int>(choices_.size()) - 1;
}

void BlockTransportLp::add_choice(int block, BlockChoice choice) {
  choices_.at(block).push_back(std::move(choice));
}

void BlockTransportLp::seed_proposal(std::vector<int> choice_per_block) {
  seeds_.push_back(std::move(choice_per_block));
}

BlockTransportLp::Result BlockTransportLp::solve(bool maximize) const {
  const int m = static_cast<int>(rows_.size());
  const int nb = num_blocks();
  for (int b = 0; b < nb; ++b)
    if (choices_[b].empty())
      throw std::invalid_argument("block with no choices");

  // A proposal is one choice index per block; its master column aggregates
  // the per-block coupling contributions. Columns are cached: each round
  // adds one proposal, so recomputing them would cost rounds^2.
  std::vector<std::vector<int>> proposals;
  std::vector<Vec> colcache;
  std::vector<Rat> costcache;
  std::map<std::vector<int>, int> seen;
  auto add_proposal = [&](std::vector<int> p) -> bool {
    auto [it, fresh] = seen.emplace(std::move(p), static_cast<int>(proposals.size()));
    if (!fresh) return false;
    proposals.push_back(it->first);
    Vec col(m, Rat(0));
    Rat cost = 0;
    for (int b = 0; b < nb; ++b) {
      const BlockChoice& c = choices_[b][proposals.back()[b]];
      for (const auto& [r, v] : c.coupling) col[r] += v;
      cost += c.cost;
    }
    colcache.push_back(std::move(col));
    costcache.push_back(std::move(cost));
    return true;
  };
  for (const auto& s : seeds_) {
    if (static_cast<int>(s.size()) != nb)
      throw std::invalid_argument("seed proposal has wrong block count");
    add_proposal(s);
  }
  {
    int kmax = 0;
    for (int b = 0; b < nb; ++b) kmax = std::max(kmax, num_choices(b));
    for (int t = 0; t < kmax; ++t) {
      std::vector<int> p(nb);
      for (int b = 0; b < nb; ++b) p[b] = t % num_choices(b);
      add_proposal(p);
    }
  }

  Result res;
  const int cap = 20000;
  // Masters grow by one column per round and are re-solved from scratch, so
  // exact rounds dominate the cost. Rounds therefore run in floating point
  // until float pricing stops making clear progress, then switch to rational
  // masters. Only exact rounds can return a verdict.
  const Rat presolve_tol(1, 10000000);
  bool exact = false;
  for (int round = 0; round < cap; ++round) {
    res.iterations = round + 1;
    const int ncols = static_cast<int>(proposals.size());
    if (round % 10 == 0)
      std::fprintf(stderr, "[colgen] round %d ncols %d exact %d\n", round, ncols,
                   int(exact));
    LinearProgram master(ncols);
    master.maximize = maximize;
    master.objective = costcache;
    for (int r = 0; r < m; ++r) {
      Vec row(ncols);
      for (int j = 0; j < ncols; ++j) row[j] = colcache[j][r];
      master.add_row(std::move(row), rows_[r].sense, rows_[r].rhs);
    }
    {
      Vec ones(ncols, Rat(1));
      master.add_row(std::move(ones), RowSense::EQ, Rat(1));
    }
    LpSolution sol;
    if (exact) {
      sol = lp_solve(master, LpMode::Rational);
    } else {
      try {
        sol = lp_solve(master, LpMode::Float);
      } catch (const std::logic_error&) {
        exact = true;  // float numerics gave up; redo the round exactly
        continue;
      }
    }
    if (sol.status == LpStatus::Unbounded) {
      if (!exact) {
        exact = true;
        continue;
      }
      throw std::logic_error("transport master cannot be unbounded");
    }

    if (sol.status == LpStatus::Infeasible) {
      // Farkas pricing: look for an assignment with f.col + f0 < 0.
      const Vec& f = sol.dual;  // length m + 1
      Rat total = f[m];
      std::vector<int> pick(nb, 0);
      for (int b = 0; b < nb; ++b) {
        int best_t = 0;
        Rat best_v;
        for (int t = 0; t < num_choices(b); ++t) {
          Rat v = 0;
          for (const auto& [r, val] : choices_[b][t].coupling) v += f[r] * val;
          if (t == 0 || v < best_v) {
            best_v = v;
            best_t = t;
          }
        }
        pick[b] = best_t;
        total += best_v;
      }
      if (!exact) {
        // The float ray has arbitrary scale, so the progress test is
        // relative; anything marginal is deferred to the exact phase.
        Rat scale(0);
        for (const Rat& v : f) {
          Rat av = Rat(abs(v));
          if (av > scale) scale = av;
        }
        if (sgn(scale) > 0 && total < -presolve_tol * scale && add_proposal(pick)) continue;
        exact = true;
        continue;
      }
      if (total < 0) {
        if (!add_proposal(pick))
          throw std::logic_error("farkas pricing regenerated a known column");
        continue;
      }
      res.status = LpStatus::Infeasible;
      res.farkas.assign(f.begin(), f.begin() + m);
      res.farkas_convexity = f[m];
      return res;
    }

    // Reduced-cost pricing: y over coupling rows, y0 on the convexity row.
    // rc(assignment) = sum_b [cost(b,t_b) - y.col(b,t_b)] - y0; an improving
    // column has rc > 0 when maximizing, rc < 0 when minimizing.
    const Vec& y = sol.dual;
    const Rat& y0 = y[m];
    Rat rc = -y0;
    std::vector<int> pick(nb, 0);
    for (int b = 0; b < nb; ++b) {
      bool first = true;
      Rat best_v;
      int best_t = 0;
      for (int t = 0; t < num_choices(b); ++t) {
        Rat v = choices_[b][t].cost;
        for (const auto& [r, val] : choices_[b][t].coupling) v -= y[r] * val;
        if (first || (maximize ? v > best_v : v < best_v)) {
          best_v = v;
          best_t = t;
          first = false;
        }
      }
      pick[b] = best_t;
      rc += best_v;
    }
    if (!exact) {
      Rat scale(1);
      for (const Vec::value_type& v : y) {
        Rat av = Rat(abs(v));
        if (av > scale) scale = av;
      }
      if ((maximize ? rc > presolve_tol * scale : rc < -presolve_tol * scale) &&
          add_proposal(pick))
        continue;
      exact = true;
      continue;
    }
    if (maximize ? rc > 0 : rc < 0) {
      if (add_proposal(pick)) continue;
      // The extremal assignment is already a column; at a master optimum its
      // reduced cost cannot still be improving in exact arithmetic.
      throw std::logic_error("pricing regenerated a known column");
    }

    res.status = LpStatus::Optimal;
    res.objective = sol.objective;
    res.duals.assign(y.begin(), y.begin() + m);
    res.convexity_dual = y0;
    res.weights.assign(nb, {});
    for (int j = 0; j < ncols; ++j) {
      if (sgn(sol.primal[j]) == 0) continue;
      res.support.push_back(proposals[j]);
      for (int b = 0; b < nb; ++b) {
        auto& wb = res.weights[b];
        int t = proposals[j][b];
        bool found = false;
        for (auto& [tt, w] : wb)
          if (tt == t) {
            w += sol.primal[j];
            found = true;
            break;
          }
        if (!found) wb.emplace_back(t, sol.primal[j]);
      }
    }
    return res;
  }
  throw std::logic_error("column generation exceeded its round cap");
}

}  // namespace fusion
