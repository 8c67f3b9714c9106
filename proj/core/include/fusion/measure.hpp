// measure.hpp - Measures on a compact axis-aligned box: finitely supported
// (possibly signed) atomic measures, cell-center grid discretizations of
// absolutely continuous priors, convex regions and partitions, barycenters,
// restrictions and mirror symmetries. All coordinates and masses are exact
// rationals; doubles only appear in views.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fusion/errors.hpp"
#include "fusion/rational.hpp"
#include "fusion/vec.hpp"

namespace fusion {

inline constexpr double kRankTol = 1e-9;        // elimination pivot threshold
inline constexpr double kAtomMergeEps = 1e-12;  // duplicate-point merge radius
inline constexpr double kMassTol = 1e-9;        // total-mass comparisons

struct Box {
  Vec lo, hi;

  Box() = default;
  Box(Vec lower, Vec upper);
  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& x) const;  // closed membership, exact
  Vec center() const;
  Rat volume() const;
  // Per-axis cell edge for a given resolution.
  Rat spacing(int axis, int cells) const { return (hi[axis] - lo[axis]) / cells; }
};

struct Atom {
  Vec point;
  Rat mass;
};

// Finitely supported measure; duplicate points merge on build. Unless the
// signed flag is set, all masses must be strictly positive.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  DiscreteMeasure(Box box, std::vector<Atom> atoms, bool is_signed = false);

  const Box& box() const { return box_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  bool is_signed() const { return signed_; }
  int size() const { return static_cast<int>(atoms_.size()); }
  Rat total_mass() const;
  Vec barycenter_point() const;  // throws ZeroMass

 private:
  Box box_;
  std::vector<Atom> atoms_;
  bool signed_ = false;
};

struct ConvexRegion;

// Cell-center discretization of an absolutely continuous measure on the box:
// a regular grid, one atom per cell at the cell center.
class GridMeasure {
 public:
  GridMeasure() = default;
  GridMeasure(Box box, std::vector<int> resolution, std::vector<Rat> cell_masses);

  static GridMeasure uniform(const Box& box, std::vector<int> resolution);

  const Box& box() const { return box_; }
  const std::vector<int>& resolution() const { return res_; }
  int num_cells() const { return static_cast<int>(masses_.size()); }
  const std::vector<Rat>& masses() const { return masses_; }
  const Rat& mass(int cell) const { return masses_[cell]; }
  Vec cell_center(int cell) const;
  std::vector<int> cell_coords(int cell) const;
  Rat total_mass() const;
  Vec barycenter_point() const;  // throws ZeroMass
  // Maximum cell diameter (diagonal), as a double view.
  double cell_diameter() const;
  // Smallest per-axis spacing, exact.
  Rat min_spacing() const;
  DiscreteMeasure positive_atoms() const;  // atoms for LP source sides

  GridMeasure with_masses(std::vector<Rat> masses) const;

 private:
  Box box_;
  std::vector<int> res_;
  std::vector<Rat> masses_;
  std::vector<int> stride_;
};

// Intersection of halfspaces a.x <= b with the ambient box. Halfspaces are
// stored exactly; unit_normals() exposes the normalized double view.
struct Halfspace {
  Vec normal;
  Rat offset;
};

struct ConvexRegion {
  std::vector<Halfspace> halfspaces;

  bool contains(const Vec& x) const;  // exact; box handled by callers
  // Normalized (unit-norm) view of each halfspace for display/serialization.
  std::vector<std::pair<DVec, double>> unit_normals() const;
  static ConvexRegion whole_space() { return ConvexRegion{}; }
};

enum class PartitionProvenance { Manual, PowerDiagram, OverlapGraph };

struct ConvexPartition {
  std::vector<ConvexRegion> cells;
  PartitionProvenance provenance = PartitionProvenance::Manual;

  int size() const { return static_cast<int>(cells.size()); }
  // Cell index per grid atom: membership at cell centers, ties to the lowest
  // cell index. Throws OutOfDomain if some grid atom lies in no cell.
  std::vector<int> assign(const GridMeasure& grid) const;
  int cell_of(const Vec& x) const;  // -1 when uncovered
};

// Operations ---------------------------------------------------------------

Vec barycenter(const DiscreteMeasure& m);
Vec barycenter(const GridMeasure& m);

// Zeroes the masses of grid atoms outside r (exact halfspace evaluation at
// cell centers).
GridMeasure restrict_grid(const GridMeasure& m, const ConvexRegion& r);

// Restriction of a finitely supported measure (used for fusion components).
DiscreteMeasure restrict_discrete(const DiscreteMeasure& m, const ConvexRegion& r);

// Reflects coordinate `axis` about `pivot`; throws OutOfDomain when a
// reflected atom leaves the box.
DiscreteMeasure mirror(const DiscreteMeasure& m, int axis, const Rat& pivot);

// True iff rank{x_i - x_0} == count-1. Rank uses exact elimination, then a
// double-precision pivoted pass with threshold kRankTol downgrades sets that
// are only independent below tolerance.
bool affinely_independent(const std::vector<Vec>& points);

// Exact convex-hull membership by LP feasibility.
bool in_convex_hull(const Vec& x, const std::vector<Vec>& hull_points);

// True iff no point lies in the convex hull of the others. Weaker than
// affine independence; duplicate points are convexly dependent.
bool convexly_independent(const std::vector<Vec>& points);

// Exact equality of atom lists (atom order is canonical after construction).
bool measures_equal(const DiscreteMeasure& a, const DiscreteMeasure& b);

// Exact L1 distance between the two mass vectors on the union support.
Rat measure_l1_distance(const DiscreteMeasure& a, const DiscreteMeasure& b);

// Weighted sum of finitely supported measures (atoms merge on build).
DiscreteMeasure combine(const Box& box,
                        const std::vector<std::pair<Rat, DiscreteMeasure>>& parts,
                        bool is_signed = false);

}  // namespace fusion
