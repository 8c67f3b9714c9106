// order.hpp - Convex-order machinery: dominance checks with constructive
// transport witnesses or convex counterexample functions, barycentric
// decompositions of a prior along a target measure, and feasible signed
// mass shifts between overlapping measures.
#pragma once

#include <optional>
#include <vector>

#include "fusion/lp.hpp"
#include "fusion/measure.hpp"
#include "fusion/rational.hpp"
#include "fusion/vec.hpp"

namespace fusion {

// Transport witness for dominance: a flow matrix from source atoms onto the
// target support with prescribed row sums, column sums and per-column
// barycenters.
struct TransportKernel {
  std::vector<Vec> sources;
  std::vector<Rat> source_masses;
  std::vector<Vec> targets;
  std::vector<Rat> target_masses;
  std::vector<std::vector<Rat>> flow;  // flow[i][j], sources x targets

  // Exact invariant checks: row sums match source masses, column sums match
  // target masses, and each column's barycenter is its target point.
  bool rows_match() const;
  bool cols_match() const;
  bool barycenters_match() const;
};

// Max-of-affine convex function certifying non-dominance: its integral
// against the candidate fusion strictly exceeds its integral against the
// prior, which no fusion allows.
struct ConvexWitness {
  std::vector<Vec> gradients;
  std::vector<Rat> intercepts;

  Rat eval(const Vec& x) const;
  Rat integral(const std::vector<Vec>& points, const std::vector<Rat>& masses) const;
  // integral(nu) - integral(mu); strictly positive iff the witness refutes
  // dominance.
  Rat gap(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const;
};

struct OrderVerdict {
  bool dominated = false;
  std::optional<TransportKernel> kernel;    // present iff dominated
  std::optional<ConvexWitness> witness;     // present iff not dominated
  // Grid resolution of the discretized prior, when the source was a grid;
  // verdicts hold for the discretization, not the underlying density.
  std::vector<int> resolution;
};

// Decides whether nu is a fusion (mean-preserving contraction) of mu by
// solving the transport feasibility program. A total-mass mismatch beyond
// kMassTol short-circuits to a constant witness. Exact rational arithmetic
// throughout.
OrderVerdict check_convex_order(const GridMeasure& mu, const DiscreteMeasure& nu);
OrderVerdict check_convex_order(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Splits mu into one component per target atom: mass(component_j) = nu_j,
// barycenter(component_j) = y_j, and the components sum to mu cell by cell.
// Among all feasible kernels the one minimizing total squared transport cost
// is used, which makes the output deterministic and geometrically tight.
// Throws NotDominated when no kernel exists, MassMismatch on unequal totals.
std::vector<GridMeasure> cartier_decompose(const GridMeasure& mu,
                                           const DiscreteMeasure& nu);

// Certified common-interior point of the convex hulls of two supports: a
// point z and a radius r > 0 with the Euclidean ball B_r(z) inside both
// hulls (certified through 2n axis-aligned hull memberships per hull).
struct InteriorBall {
  Vec center;
  Rat radius;
};
std::optional<InteriorBall> common_interior(const std::vector<Vec>& support_a,
                                            const std::vector<Vec>& support_b,
                                            const Rat& margin);

// Largest shift magnitude guaranteed feasible for shift_mass in direction d,
// derived from a certified interior ball and submeasure-mass programs. The
// bound is valid but conservative; it may undershoot the true supremum.
Rat shift_mass_bound(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                     const Vec& d, const Rat& margin = 0);

// Signed measure pi with mu1 + pi >= 0, mu2 - pi >= 0, pi(X) = a and
// integral x dpi = eps * d, supported on the joint atom set; among feasible
// solutions the one of minimum total variation is returned. Requires
// |a| <= eps and eps < shift_mass_bound(mu1, mu2, d, margin).
// Throws NoCommonInterior or EpsTooLarge.
DiscreteMeasure shift_mass(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                           const Vec& d, const Rat& a, const Rat& eps,
                           const Rat& margin = 0);

}  // namespace fusion
