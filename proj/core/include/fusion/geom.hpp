// geom.hpp - Power diagrams and their convex piecewise-affine lifts: cell
// halfspaces in any dimension, exact 2D cell polygons by sequential convex
// clipping, and the inverse problem of fitting a diagram to a candidate
// convex partition with prescribed per-cell gradients.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fusion/measure.hpp"
#include "fusion/rational.hpp"
#include "fusion/vec.hpp"

namespace fusion {

// Sites and raw weights. Cell membership compares the shifted squared
// distances g_i(x) = |x - s_i|^2 - w_i, so adding one constant to every
// weight changes nothing; normalized_weights() shifts the minimum to zero
// for display and comparison. Raw weights are kept because natural
// constructions (fitting a two-cell split of a wide box) produce negative
// ones.
struct PowerDiagram {
  std::vector<Vec> sites;
  std::vector<Rat> weights;
  Box box;

  PowerDiagram() = default;
  // Validates dimensions and pairwise-distinct sites.
  PowerDiagram(std::vector<Vec> sites, std::vector<Rat> weights, Box box);

  int size() const { return static_cast<int>(sites.size()); }
  std::vector<Rat> normalized_weights() const;
  Rat g(int i, const Vec& x) const;   // |x - s_i|^2 - w_i, exact
  int cell_of(const Vec& x) const;    // argmin_i g_i, ties to lowest index
  std::vector<int> assign(const GridMeasure& grid) const;
};

// Convex max-of-affine lift: piece i has gradient 2 s_i and intercept
// w_i - |s_i|^2, so argmax piece == argmin g cell for every point.
struct LiftingFunction {
  std::vector<Vec> gradients;
  std::vector<Rat> intercepts;

  int size() const { return static_cast<int>(gradients.size()); }
  // Maximum value and the lowest maximizing piece index.
  std::pair<Rat, int> eval(const Vec& x) const;
};

// Convex polygon cell of a 2D diagram, clipped to the box.
struct Cell2D {
  std::vector<Vec> vertices;  // counterclockwise; empty when fully clipped
  int site = -1;

  bool empty() const { return vertices.empty(); }
  Rat area() const;
  bool degenerate() const { return area() == 0; }
};

// Halfspace description of cell i: 2(s_j - s_i).x <= |s_j|^2 - |s_i|^2 +
// w_i - w_j for every j != i, each scaled so the largest |coefficient| is 1.
ConvexRegion cell_halfspaces(const PowerDiagram& pd, int i);

LiftingFunction lift(const PowerDiagram& pd);

// Exact polygon helpers (2D).
std::vector<Vec> box_polygon(const Box& box);
std::vector<Vec> clip_polygon(const std::vector<Vec>& poly, const Halfspace& h);
std::vector<Vec> region_polygon_2d(const ConvexRegion& region, const Box& box);
Rat polygon_area(const std::vector<Vec>& poly);

// All cells clipped to the box; empty and zero-area cells are kept (their
// degenerate() flag is set) and the nonempty areas sum to the box area.
std::vector<Cell2D> extract_cells_2d(const PowerDiagram& pd);

// One halfspace region per site, tagged with diagram provenance.
ConvexPartition partition_from_diagram(const PowerDiagram& pd);

// Inverse problem (2D): find weights making the max-of-affine lift with
// pieces gradient_i induce exactly this partition. Sites are gradient_i / 2;
// weight differences follow from continuity across every shared facet, made
// consistent over a spanning tree with weight 0 on cell 0 and checked on all
// remaining facets. Throws NotRegular (with the offending cell pair) when a
// facet normal is not parallel to the site difference, a continuity cycle is
// inconsistent, sites collide, or the induced diagram disagrees with the
// partition at some grid atom of check_grid.
PowerDiagram fit_power_diagram(const ConvexPartition& partition,
                               const std::vector<Vec>& gradients, const Box& box,
                               const GridMeasure* check_grid = nullptr);

// Free-gradient variant (dimension 1 or 2): search by LP for any convex
// max-of-affine function whose argmax regions reproduce the partition. Piece
// dominance is imposed at every cell vertex (enough, by convexity, for the
// whole cell) and with a maximized common margin at every cell centroid; a
// positive margin pins the walls exactly and yields the diagram. Returns
// nullopt when no margin is positive, i.e. no power diagram induces this
// partition. Throws PreconditionFailed on empty cells or dimension > 2.
std::optional<PowerDiagram> fit_any_power_diagram(const ConvexPartition& partition,
                                                  const Box& box,
                                                  const GridMeasure* check_grid = nullptr);

}  // namespace fusion
