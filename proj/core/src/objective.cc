// objective.cc - Evaluation, builders, and grid-difference validation for
// payoff/cost objectives.

#include "fusion/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fusion/errors.hpp"

namespace fusion {

namespace {

Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

void sort_table(std::vector<Vec>& pts, std::vector<Rat>& vals) {
  std::vector<int> idx(pts.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return pts[a] < pts[b]; });
  std::vector<Vec> p2;
  std::vector<Rat> v2;
  p2.reserve(pts.size());
  v2.reserve(vals.size());
  for (int i : idx) {
    if (!p2.empty() && p2.back() == pts[i]) {
      if (v2.back() != vals[i])
        throw std::invalid_argument("table objective lists one point with two values");
      continue;
    }
    p2.push_back(pts[i]);
    v2.push_back(vals[i]);
  }
  pts = std::move(p2);
  vals = std::move(v2);
}

Rat affine_lipschitz_bound(const std::vector<Vec>& grads) {
  Rat best = 0;
  for (const Vec& g : grads) best = std::max(best, Rat(sqrt_upper(vnorm2(g))));
  return best;
}

}  // namespace

Rat Objective::eval(const Vec& x) const {
  if (kind == ObjectiveKind::Table) {
    auto it = std::lower_bound(points.begin(), points.end(), x);
    if (it == points.end() || *it != x)
      throw OutOfDomain("table objective queried off its tabulated points");
    return values[static_cast<std::size_t>(it - points.begin())];
  }
  if (gradients.empty()) throw std::logic_error("affine objective with no pieces");
  Rat best = vdot(gradients[0], x) + intercepts[0];
  for (std::size_t k = 1; k < gradients.size(); ++k) {
    Rat v = vdot(gradients[k], x) + intercepts[k];
    if (kind == ObjectiveKind::MaxAffine ? v > best : v < best) best = Rat(v);
  }
  return best;
}

int Objective::active_piece(const Vec& x) const {
  if (kind == ObjectiveKind::Table)
    throw std::logic_error("table objectives have no affine pieces");
  if (gradients.empty()) throw std::logic_error("affine objective with no pieces");
  int best = 0;
  Rat bestv = vdot(gradients[0], x) + intercepts[0];
  for (std::size_t k = 1; k < gradients.size(); ++k) {
    Rat v = vdot(gradients[k], x) + intercepts[k];
    if (kind == ObjectiveKind::MaxAffine ? v > bestv : v < bestv) {
      bestv = v;
      best = static_cast<int>(k);
    }
  }
  return best;
}

Objective Objective::max_affine(std::vector<Vec> grads, std::vector<Rat> icepts) {
  if (grads.empty() || grads.size() != icepts.size())
    throw std::invalid_argument("max_affine needs matching, nonempty piece lists");
  Objective o;
  o.kind = ObjectiveKind::MaxAffine;
  o.lipschitz = affine_lipschitz_bound(grads);
  o.gradients = std::move(grads);
  o.intercepts = std::move(icepts);
  return o;
}

Objective Objective::min_affine(std::vector<Vec> grads, std::vector<Rat> icepts) {
  Objective o = max_affine(std::move(grads), std::move(icepts));
  o.kind = ObjectiveKind::MinAffine;
  return o;
}

Objective Objective::table(std::vector<Vec> pts, std::vector<Rat> vals, Rat lipschitz) {
  if (pts.empty() || pts.size() != vals.size())
    throw std::invalid_argument("table objective needs matching, nonempty lists");
  sort_table(pts, vals);
  Objective o;
  o.kind = ObjectiveKind::Table;
  o.points = std::move(pts);
  o.values = std::move(vals);
  o.lipschitz = std::move(lipschitz);
  return o;
}

Objective Objective::table_on_grid(const GridMeasure& grid,
                                   const std::function<Rat(const Vec&)>& f,
                                   Rat lipschitz) {
  std::vector<Vec> pts;
  std::vector<Rat> vals;
  pts.reserve(static_cast<std::size_t>(grid.num_cells()));
  for (int c = 0; c < grid.num_cells(); ++c) {
    Vec x = grid.cell_center(c);
    vals.push_back(f(x));
    pts.push_back(std::move(x));
  }
  return table(std::move(pts), std::move(vals), std::move(lipschitz));
}

Rat measured_grid_lipschitz(const Objective& obj, const GridMeasure& grid) {
  const auto& res = grid.resolution();
  const int dim = static_cast<int>(res.size());
  Rat best = 0;
  for (int c = 0; c < grid.num_cells(); ++c) {
    const std::vector<int> coords = grid.cell_coords(c);
    const Vec x = grid.cell_center(c);
    const Rat fx = obj.eval(x);
    for (int axis = 0; axis < dim; ++axis) {
      if (coords[axis] + 1 >= res[axis]) continue;
      Vec y = x;
      const Rat h = grid.box().spacing(axis, res[axis]);
      y[axis] += h;
      Rat slope = rat_abs(obj.eval(y) - fx) / h;
      best = std::max(best, slope);
    }
  }
  return best;
}

Vec objective_gradient_at(const Objective& obj, const GridMeasure& grid, const Vec& x) {
  if (obj.kind != ObjectiveKind::Table) return obj.gradients[static_cast<std::size_t>(obj.active_piece(x))];

  // Snap to the nearest grid atom, then difference against tabulated
  // neighbors along each axis.
  const auto& res = grid.resolution();
  const int dim = grid.box().dim();
  std::vector<int> coords(static_cast<std::size_t>(dim));
  for (int axis = 0; axis < dim; ++axis) {
    const Rat h = grid.box().spacing(axis, res[axis]);
    Rat t = (x[axis] - grid.box().lo[axis]) / h - Rat(1, 2);
    long best = std::lround(to_double(t));
    best = std::max(0L, std::min(static_cast<long>(res[axis] - 1), best));
    coords[static_cast<std::size_t>(axis)] = static_cast<int>(best);
  }
  Vec grad(static_cast<std::size_t>(dim), Rat(0));
  for (int axis = 0; axis < dim; ++axis) {
    const Rat h = grid.box().spacing(axis, res[axis]);
    auto center_at = [&](int shift) {
      std::vector<int> c2 = coords;
      c2[static_cast<std::size_t>(axis)] += shift;
      Vec p(static_cast<std::size_t>(dim));
      for (int a = 0; a < dim; ++a)
        p[static_cast<std::size_t>(a)] =
            grid.box().lo[a] + grid.box().spacing(a, res[a]) * Rat(2 * c2[static_cast<std::size_t>(a)] + 1, 2);
      return p;
    };
    const int i = coords[static_cast<std::size_t>(axis)];
    const bool has_lo = i > 0, has_hi = i + 1 < res[axis];
    if (has_lo && has_hi)
      grad[static_cast<std::size_t>(axis)] = (obj.eval(center_at(1)) - obj.eval(center_at(-1))) / (2 * h);
    else if (has_hi)
      grad[static_cast<std::size_t>(axis)] = (obj.eval(center_at(1)) - obj.eval(center_at(0))) / h;
    else if (has_lo)
      grad[static_cast<std::size_t>(axis)] = (obj.eval(center_at(0)) - obj.eval(center_at(-1))) / h;
  }
  return grad;
}

Objective combine_on_grid(const GridMeasure& grid, const Objective& a,
                          const Objective& b, const Rat& scale) {
  Rat lip = a.lipschitz + rat_abs(scale) * b.lipschitz;
  return Objective::table_on_grid(
      grid, [&](const Vec& x) { return a.eval(x) + scale * b.eval(x); }, std::move(lip));
}

}  // namespace fusion
