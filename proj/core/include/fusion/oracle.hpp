// oracle.hpp - Independent reference computations used to freeze expected
// values before the main-path implementations are trusted: brute-force cell
// assignment, grid quadrature, and exhaustive one-dimensional split search.
// These share only domain types (Rat/Vec/GridMeasure) with the main path;
// every loop below is written from scratch against the definitions.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fusion/measure.hpp"
#include "fusion/rational.hpp"
#include "fusion/vec.hpp"

namespace fusion {

// One frozen comparison between an oracle and the main path. Agreement holds
// iff |difference| <= tolerance; reports serialize to JSON fixture files.
struct OracleReport {
  std::string oracle;       // which reference computation produced this
  std::string instance;     // digest of a canonical instance description
  std::string oracle_value; // exact rational rendering (or digest for vectors)
  std::string main_value;
  Rat difference = 0;       // |oracle - main| when scalar; 0/1 for digests
  Rat tolerance = 0;
  bool agree = false;

  std::string to_json() const;
  static OracleReport from_json(const std::string& text);
};

OracleReport make_scalar_report(const std::string& oracle, const std::string& instance,
                                const Rat& oracle_value, const Rat& main_value,
                                const Rat& tolerance);
OracleReport make_digest_report(const std::string& oracle, const std::string& instance,
                                const std::string& oracle_digest,
                                const std::string& main_digest);

// Stable digest of a canonical instance dump (FNV-1a, hex).
std::string instance_digest(const std::string& canonical_dump);

// Per-grid-atom index of the site minimizing |x - s_i|^2 - w_i, ties to the
// lowest index. A straight double loop over atoms and sites.
std::vector<int> brute_cell_assign(const std::vector<Vec>& sites,
                                   const std::vector<Rat>& weights,
                                   const GridMeasure& grid);

// Sum of f(cell center) * cell mass over the grid.
Rat quadrature(const std::function<Rat(const Vec&)>& f, const GridMeasure& grid);

// Exhaustive two-group split of a one-dimensional grid: every cut between
// consecutive atoms is scored as mass_L * V(bary_L) + mass_R * V(bary_R);
// the best cut (ties to the leftmost) is returned.
struct SplitSearchResult {
  Rat split = 0;                 // cut coordinate (grid cell boundary)
  Rat payoff = 0;
  std::vector<Rat> prototypes;   // group barycenters, left then right
  std::vector<Rat> masses;
};
SplitSearchResult split_search_1d(const GridMeasure& mu,
                                  const std::function<Rat(const Rat&)>& V);

}  // namespace fusion
