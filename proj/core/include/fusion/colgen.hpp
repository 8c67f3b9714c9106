// colgen.hpp - Exact Dantzig-Wolfe column generation for block-separable
// transport programs. Each block independently splits a unit of decision
// weight over a small choice set; coupling rows constrain weighted sums of
// per-choice contributions. Master columns are full assignments (one choice
// per block), so the master LP keeps (#coupling rows + 1) rows no matter how
// many blocks there are; pricing is an exact per-block argmax. Termination is
// guaranteed in rational arithmetic: every generated column is new, and the
// column space is finite.
#pragma once

#include <vector>

#include "fusion/lp.hpp"
#include "fusion/rational.hpp"
#include "fusion/vec.hpp"

namespace fusion {

// Contribution of one block choice: sparse coupling-row entries plus a cost.
// Entries are for the block's full weight (callers bake masses in).
struct BlockChoice {
  std::vector<std::pair<int, Rat>> coupling;
  Rat cost = 0;
};

class BlockTransportLp {
 public:
  explicit BlockTransportLp(int coupling_rows);

  void set_coupling(int row, RowSense sense, Rat rhs);
  int add_block();
  void add_choice(int block, BlockChoice choice);
  // Optional warm-start proposal (one choice index per block).
  void seed_proposal(std::vector<int> choice_per_block);

  int num_blocks() const { return static_cast<int>(choices_.size()); }
  int num_choices(int block) const { return static_cast<int>(choices_[block].size()); }

  struct Result {
    LpStatus status = LpStatus::Infeasible;
    Rat objective = 0;
    // Per block: (choice, weight) entries with weights summing to one.
    std::vector<std::vector<std::pair<int, Rat>>> weights;
    Vec duals;                  // coupling-row duals y (Optimal): for every
    Rat convexity_dual = 0;     // assignment, cost - y.col - y0 <= 0 (max)
    Vec farkas;                 // coupling part of the infeasibility ray:
    Rat farkas_convexity = 0;   // for every assignment, f.col + f0 >= 0 while
                                // f.rhs + f0 < 0
    int iterations = 0;
    // Support of the optimum (positive-weight proposals); feed these back in
    // through seed_proposal to warm-start a related solve.
    std::vector<std::vector<int>> support;
  };

  Result solve(bool maximize = true) const;

 private:
  struct RowSpec {
    RowSense sense = RowSense::EQ;
    Rat rhs = 0;
  };

  std::vector<RowSpec> rows_;
  std::vector<std::vector<BlockChoice>> choices_;
  std::vector<std::vector<int>> seeds_;
};

}  // namespace fusion
