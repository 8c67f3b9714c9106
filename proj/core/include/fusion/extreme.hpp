// extreme.hpp - Extremality certification for fusions of a grid prior: convex
// partitions discovered from transport components, per-cell dominance and
// affine-independence reports, the feasible-flow linear program whose unique
// zero solution certifies extremality, flow perturbation to nearby
// partitions, and the explicit two-fusion decomposition built from a nonzero
// flow when one exists.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fusion/lp.hpp"
#include "fusion/measure.hpp"
#include "fusion/order.hpp"
#include "fusion/rational.hpp"
#include "fusion/vec.hpp"

namespace fusion {

// A system of signed measures on the grid atoms, one per partition cell.
// Feasibility means, with membership taken at cell centers (ties to the
// lowest cell, -1 when no cell contains the atom):
//   (1) 0 <= u_P <= mu at atoms outside P,
//   (2) -mu <= u_P <= 0 at atoms of P,
//   (3) u_P(X) = 0 for every P,
//   (4) integral x du_P = 0 per axis for every P,
//   (5) sum_P u_P = 0 atom by atom.
struct FlowSystem {
  ConvexPartition partition;
  std::vector<int> assignment;       // grid atom -> cell index, or -1
  std::vector<std::vector<Rat>> u;   // u[cell][atom]

  bool is_zero() const;
  // Total mass the system moves across cells: sum of off-cell positive parts.
  Rat cross_mass() const;
};

// Standalone exact verification of the five conditions above. Recomputes the
// atom membership from the partition; on failure, `why` (when supplied)
// names the first violated condition.
bool flow_conditions_ok(const GridMeasure& mu, const FlowSystem& flow,
                        std::string* why = nullptr);

// Per-cell report of the necessary extremality conditions: the candidate
// fusion restricted to the cell is dominated by the prior restricted to the
// cell, the restricted support is affinely independent, and cell masses
// agree. Throws AtomOnBoundary unless every nu atom lies strictly inside
// exactly one cell.
struct CellReport {
  int cell = -1;
  int atom_count = 0;
  bool order_ok = false;
  bool affinely_independent_support = false;
  Rat mass_gap = 0;  // |nu(P) - mu(P)|, exact
  bool ok() const { return order_ok && affinely_independent_support && sgn(mass_gap) == 0; }
};
std::vector<CellReport> verify_prop1_conditions(const GridMeasure& mu,
                                                const DiscreteMeasure& nu,
                                                const ConvexPartition& partition);

// Partition discovery: decompose mu along nu's atoms, link components whose
// support hulls share interior volume, and separate the resulting groups by
// maximum-margin hyperplanes. Degrades to the trivial one-cell partition
// (separated = false) whenever separation or coverage fails; detects full
// revelation (nu equals the positive grid atoms) and flags it.
struct DiscoveredPartition {
  ConvexPartition partition;
  bool separated = false;        // true iff more than one cell was certified
  bool full_revelation = false;
  std::vector<std::vector<int>> groups;  // nu atom indices per cell
};
DiscoveredPartition discover_partition(const GridMeasure& mu, const DiscreteMeasure& nu);

// Maximizes the cross-cell mass of a feasible flow system on the partition.
// The optimum is 0 exactly when the zero flow is the unique feasible system,
// which together with passing per-cell reports certifies extremality. Always
// solved in exact rational arithmetic. Throws EmptyCell when a cell carries
// no prior mass, OutOfDomain when the partition does not cover the grid.
struct FlowCertificate {
  FlowSystem flow;   // a maximizing feasible system (zero iff optimum is 0)
  Rat optimum = 0;
};
FlowCertificate max_flow_certificate(const GridMeasure& mu, const ConvexPartition& partition);

// True iff every cell bounded by at most one halfspace (a halfspace cut of
// the box) has all its cross terms identically zero in `flow` - the
// structural vanishing that holds for every feasible system.
bool halfspace_zero_flow_check(const FlowSystem& flow);

// Transplants a feasible flow onto a perturbed partition (cell i of
// `perturbed` standing for cell i of flow.partition): each off-cell mass
// parcel is rebuilt inside the perturbed cells at the same barycenter with
// magnitude delta, found by line search. Requires every parcel barycenter to
// lie strictly inside its perturbed cell (PreconditionFailed otherwise);
// throws NoFeasibleDelta when no positive delta admits the transplant. An
// exactly identical partition returns the input flow scaled by 1/2.
FlowSystem perturb_partition_flow(const GridMeasure& mu, const ConvexPartition& partition,
                                  const FlowSystem& flow, const ConvexPartition& perturbed);

// Explicit non-extremality witness built from a nonzero feasible flow: m
// per-cell-perturbed fusions nu^i (one per cell) whose uniform average is nu
// exactly, repackaged as a pair nu = (nu1 + nu2) / 2 with nu1 != nu2. All
// dominance checks re-verified before returning; std::nullopt when the
// construction fails for every tried epsilon (the honest outcome when cell
// supports cannot absorb the perturbed moments).
struct NonExtremePair {
  DiscreteMeasure nu1, nu2;
  std::vector<DiscreteMeasure> per_cell_fusions;  // the m verified fusions nu^i
  Rat epsilon = 0;
};
std::optional<NonExtremePair> build_nonextreme_from_flow(const GridMeasure& mu,
                                                         const DiscreteMeasure& nu,
                                                         const FlowSystem& flow);

enum class ExtremalityVerdict { CertifiedExtreme, CertifiedNotExtreme, Inconclusive };

struct ExtremalityReport {
  ExtremalityVerdict verdict = ExtremalityVerdict::Inconclusive;
  bool is_fusion = false;
  bool full_revelation = false;
  DiscoveredPartition discovery;
  std::vector<CellReport> cells;
  Rat flow_optimum = 0;
  std::optional<FlowSystem> flow;        // maximizing witness when optimum > 0
  std::optional<NonExtremePair> pair;    // decomposition when not extreme
  std::string note;
};

// End-to-end certification: dominance check, partition (discovered unless
// provided), per-cell conditions, flow program, and - when the flow is
// nonzero - the constructive decomposition attempt. Certificates are only
// emitted from exact arithmetic; everything else degrades to Inconclusive
// with an explanatory note.
ExtremalityReport certify_extreme(const GridMeasure& mu, const DiscreteMeasure& nu,
                                  const std::optional<ConvexPartition>& partition = std::nullopt);

}  // namespace fusion
