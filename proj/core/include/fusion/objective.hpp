// objective.hpp - Payoff and cost functions over the box: max/min-of-affine
// families evaluable anywhere, and exact tabulated values on a fixed atom
// set. Each objective carries a declared Lipschitz constant that tests
// validate against measured grid differences.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fusion/measure.hpp"
#include "fusion/rational.hpp"
#include "fusion/vec.hpp"

namespace fusion {

enum class ObjectiveKind { MaxAffine, MinAffine, Table };

struct Objective {
  ObjectiveKind kind = ObjectiveKind::MaxAffine;

  // MaxAffine / MinAffine: value(x) = max/min over k of gradients[k].x +
  // intercepts[k]. Evaluable at any point of the box.
  std::vector<Vec> gradients;
  std::vector<Rat> intercepts;

  // Table: exact-point lookup, sorted lexicographically by point. Evaluable
  // only at the tabulated points; anything else throws OutOfDomain.
  std::vector<Vec> points;
  std::vector<Rat> values;

  // Declared Lipschitz constant (Euclidean). For affine kinds the builders
  // derive a certified upper bound from the gradients.
  Rat lipschitz = 0;

  Rat eval(const Vec& x) const;
  bool evaluable_anywhere() const { return kind != ObjectiveKind::Table; }
  int num_pieces() const { return static_cast<int>(gradients.size()); }

  // Index of the active affine piece at x (max for MaxAffine, min for
  // MinAffine; ties resolve to the lowest index). Table kind throws.
  int active_piece(const Vec& x) const;

  static Objective max_affine(std::vector<Vec> grads, std::vector<Rat> icepts);
  static Objective min_affine(std::vector<Vec> grads, std::vector<Rat> icepts);
  static Objective table(std::vector<Vec> pts, std::vector<Rat> vals, Rat lipschitz);
  // Tabulates f at every grid atom (cell center), including zero-mass cells.
  static Objective table_on_grid(const GridMeasure& grid,
                                 const std::function<Rat(const Vec&)>& f,
                                 Rat lipschitz);
};

// Largest |f(a) - f(b)| / spacing over axis-adjacent grid atoms. Every
// objective must satisfy measured <= declared * (1 + 1e-6).
Rat measured_grid_lipschitz(const Objective& obj, const GridMeasure& grid);

// Linearization slope at x: the active piece's gradient for affine kinds;
// for tables, per-axis finite differences between the tabulated neighbors of
// the grid atom nearest to x (central where both neighbors exist).
Vec objective_gradient_at(const Objective& obj, const GridMeasure& grid, const Vec& x);

// Pointwise combination a + scale * b, tabulated on the grid atoms. Both
// operands must be evaluable there. Declared Lipschitz adds in magnitude.
Objective combine_on_grid(const GridMeasure& grid, const Objective& a,
                          const Objective& b, const Rat& scale);

}  // namespace fusion
