// geom.cc - Power-diagram cells, exact 2D polygon extraction by halfspace
// clipping, the convex max-of-affine lift, and the inverse fit from a convex
// partition with prescribed gradients.
#include "fusion/geom.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>

#include "fusion/errors.hpp"
#include "fusion/lp.hpp"

namespace fusion {
namespace {

Rat rat_abs(const Rat& v) { return v < 0 ? Rat(-v) : v; }

Rat cross2(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

// Scales normal.x <= offset so the largest |coefficient| equals one, keeping
// equivalent constructions byte-comparable while staying exact.
Halfspace scaled_halfspace(Vec normal, Rat offset) {
  Rat big = 0;
  for (const Rat& c : normal) big = std::max(big, rat_abs(c));
  if (big != 0) {
    for (Rat& c : normal) c /= big;
    offset /= big;
  }
  return Halfspace{std::move(normal), std::move(offset)};
}

}  // namespace

PowerDiagram::PowerDiagram(std::vector<Vec> sites_in, std::vector<Rat> weights_in,
                           Box box_in)
    : sites(std::move(sites_in)),
      weights(std::move(weights_in)),
      box(std::move(box_in)) {
  if (sites.empty()) throw PreconditionFailed("power diagram needs at least one site");
  if (sites.size() != weights.size())
    throw PreconditionFailed("power diagram needs one weight per site");
  for (const Vec& s : sites)
    if (static_cast<int>(s.size()) != box.dim())
      throw PreconditionFailed("site dimension does not match the box");
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = i + 1; j < sites.size(); ++j)
      if (veq(sites[i], sites[j]))
        throw PreconditionFailed("power diagram sites must be pairwise distinct");
}

std::vector<Rat> PowerDiagram::normalized_weights() const {
  std::vector<Rat> out = weights;
  if (out.empty()) return out;
  const Rat lo = *std::min_element(out.begin(), out.end());
  for (Rat& w : out) w -= lo;
  return out;
}

Rat PowerDiagram::g(int i, const Vec& x) const {
  return vnorm2(vsub(x, sites[i])) - weights[i];
}

int PowerDiagram::cell_of(const Vec& x) const {
  int best = 0;
  Rat best_g = g(0, x);
  for (int i = 1; i < size(); ++i) {
    Rat gi = g(i, x);
    if (gi < best_g) {
      best_g = gi;
      best = i;
    }
  }
  return best;
}

std::vector<int> PowerDiagram::assign(const GridMeasure& grid) const {
  std::vector<int> out(grid.num_cells());
  for (int c = 0; c < grid.num_cells(); ++c) out[c] = cell_of(grid.cell_center(c));
  return out;
}

std::pair<Rat, int> LiftingFunction::eval(const Vec& x) const {
  if (gradients.empty()) throw PreconditionFailed("empty lifting function");
  Rat best = vdot(gradients[0], x) + intercepts[0];
  int arg = 0;
  for (int i = 1; i < size(); ++i) {
    Rat v = vdot(gradients[i], x) + intercepts[i];
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  return {best, arg};
}

Rat Cell2D::area() const { return polygon_area(vertices); }

ConvexRegion cell_halfspaces(const PowerDiagram& pd, int i) {
  if (i < 0 || i >= pd.size()) throw PreconditionFailed("cell index out of range");
  ConvexRegion region;
  for (int j = 0; j < pd.size(); ++j) {
    if (j == i) continue;
    Vec normal = vscale(2, vsub(pd.sites[j], pd.sites[i]));
    Rat offset =
        vnorm2(pd.sites[j]) - vnorm2(pd.sites[i]) + pd.weights[i] - pd.weights[j];
    region.halfspaces.push_back(scaled_halfspace(std::move(normal), std::move(offset)));
  }
  return region;
}

LiftingFunction lift(const PowerDiagram& pd) {
  LiftingFunction f;
  for (int i = 0; i < pd.size(); ++i) {
    f.gradients.push_back(vscale(2, pd.sites[i]));
    f.intercepts.push_back(pd.weights[i] - vnorm2(pd.sites[i]));
  }
  return f;
}

std::vector<Vec> box_polygon(const Box& box) {
  if (box.dim() != 2) throw PreconditionFailed("box polygon requires dimension two");
  return {Vec{box.lo[0], box.lo[1]}, Vec{box.hi[0], box.lo[1]},
          Vec{box.hi[0], box.hi[1]}, Vec{box.lo[0], box.hi[1]}};
}

std::vector<Vec> clip_polygon(const std::vector<Vec>& poly, const Halfspace& h) {
  std::vector<Vec> out;
  const std::size_t n = poly.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec& cur = poly[k];
    const Vec& nxt = poly[(k + 1) % n];
    const Rat fc = h.offset - vdot(h.normal, cur);  // >= 0 means inside
    const Rat fn = h.offset - vdot(h.normal, nxt);
    if (fc >= 0) out.push_back(cur);
    if ((fc > 0 && fn < 0) || (fc < 0 && fn > 0)) {
      const Rat t = fc / (fc - fn);
      out.push_back(vadd(cur, vscale(t, vsub(nxt, cur))));
    }
  }
  std::vector<Vec> dedup;
  for (const Vec& v : out)
    if (dedup.empty() || !veq(dedup.back(), v)) dedup.push_back(v);
  while (dedup.size() > 1 && veq(dedup.front(), dedup.back())) dedup.pop_back();
  return dedup;
}

std::vector<Vec> region_polygon_2d(const ConvexRegion& region, const Box& box) {
  std::vector<Vec> poly = box_polygon(box);
  for (const Halfspace& h : region.halfspaces) {
    poly = clip_polygon(poly, h);
    if (poly.empty()) break;
  }
  return poly;
}

Rat polygon_area(const std::vector<Vec>& poly) {
  if (poly.size() < 3) return Rat(0);
  Rat twice = 0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Vec& a = poly[k];
    const Vec& b = poly[(k + 1) % poly.size()];
    twice += a[0] * b[1] - a[1] * b[0];
  }
  return Rat(twice / 2);
}

std::vector<Cell2D> extract_cells_2d(const PowerDiagram& pd) {
  if (pd.box.dim() != 2)
    throw PreconditionFailed("cell extraction requires dimension two");
  std::vector<Cell2D> cells;
  for (int i = 0; i < pd.size(); ++i) {
    Cell2D cell;
    cell.site = i;
    cell.vertices = region_polygon_2d(cell_halfspaces(pd, i), pd.box);
    cells.push_back(std::move(cell));
  }
  return cells;
}

ConvexPartition partition_from_diagram(const PowerDiagram& pd) {
  ConvexPartition part;
  for (int i = 0; i < pd.size(); ++i) part.cells.push_back(cell_halfspaces(pd, i));
  part.provenance = PartitionProvenance::PowerDiagram;
  return part;
}

namespace {

struct Facet {
  int a = 0, b = 0;  // adjacent cells, a < b
  Vec normal;        // outward normal of cell a along the shared segment
  Vec midpoint;      // relative-interior point of the shared segment
};

// Positive-length boundary segments shared by two cell polygons. Both
// polygons are counterclockwise, so a shared segment appears as collinear
// edges traversed in opposite directions.
std::vector<Facet> shared_facets(const std::vector<std::vector<Vec>>& polys) {
  std::vector<Facet> facets;
  for (std::size_t a = 0; a < polys.size(); ++a) {
    for (std::size_t b = a + 1; b < polys.size(); ++b) {
      const auto& pa = polys[a];
      const auto& pb = polys[b];
      for (std::size_t i = 0; i < pa.size(); ++i) {
        const Vec& p = pa[i];
        const Vec& q = pa[(i + 1) % pa.size()];
        const Vec d = vsub(q, p);
        const Rat len2 = vnorm2(d);
        if (len2 == 0) continue;
        for (std::size_t j = 0; j < pb.size(); ++j) {
          const Vec& r = pb[j];
          const Vec& s = pb[(j + 1) % pb.size()];
          if (cross2(d, vsub(s, r)) != 0 || cross2(d, vsub(r, p)) != 0) continue;
          const Rat tr = vdot(d, vsub(r, p));
          const Rat ts = vdot(d, vsub(s, p));
          const Rat lo = std::max(Rat(0), std::min(tr, ts));
          const Rat hi = std::min(len2, std::max(tr, ts));
          if (lo >= hi) continue;
          Facet f;
          f.a = static_cast<int>(a);
          f.b = static_cast<int>(b);
          f.normal = Vec{d[1], -d[0]};  // outward for the counterclockwise cell a
          f.midpoint = vadd(p, vscale(Rat((lo + hi) / 2) / len2, d));
          facets.push_back(std::move(f));
        }
      }
    }
  }
  return facets;
}

}  // namespace

PowerDiagram fit_power_diagram(const ConvexPartition& partition,
                               const std::vector<Vec>& gradients, const Box& box,
                               const GridMeasure* check_grid) {
  const int k = partition.size();
  if (k == 0) throw PreconditionFailed("cannot fit a diagram to an empty partition");
  if (static_cast<int>(gradients.size()) != k)
    throw PreconditionFailed("need one gradient per partition cell");
  if (box.dim() != 2) throw PreconditionFailed("diagram fitting requires dimension two");

  std::vector<Vec> sites;
  for (const Vec& grad : gradients) {
    if (static_cast<int>(grad.size()) != 2)
      throw PreconditionFailed("gradient dimension does not match the box");
    sites.push_back(vscale(Rat(1, 2), grad));
  }
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (veq(sites[i], sites[j]))
        throw NotRegular("two cells have the same gradient", i, j);

  std::vector<std::vector<Vec>> polys;
  for (const ConvexRegion& cell : partition.cells) {
    polys.push_back(region_polygon_2d(cell, box));
    if (polys.back().size() < 3)
      throw PreconditionFailed("partition cell clips to an empty polygon");
  }

  const std::vector<Facet> facets = shared_facets(polys);
  for (const Facet& f : facets) {
    const Vec diff = vsub(sites[f.a], sites[f.b]);
    if (cross2(diff, f.normal) != 0)
      throw NotRegular("facet normal is not parallel to the site difference", f.a, f.b);
    if (vdot(diff, f.normal) > 0)
      throw NotRegular("cells sit on the wrong sides of their shared facet", f.a, f.b);
  }

  // Continuity of the lift across a facet with interior point x* fixes the
  // weight difference: w_a - w_b = |s_a|^2 - |s_b|^2 - 2(s_a - s_b).x*.
  std::vector<Rat> weights(k, Rat(0));
  std::vector<char> known(k, 0);
  known[0] = 1;
  bool grew = true;
  while (grew) {
    grew = false;
    for (const Facet& f : facets) {
      const Rat dw = vnorm2(sites[f.a]) - vnorm2(sites[f.b]) -
                     2 * vdot(vsub(sites[f.a], sites[f.b]), f.midpoint);
      if (known[f.a] && !known[f.b]) {
        weights[f.b] = Rat(weights[f.a] - dw);
        known[f.b] = 1;
        grew = true;
      } else if (known[f.b] && !known[f.a]) {
        weights[f.a] = Rat(weights[f.b] + dw);
        known[f.a] = 1;
        grew = true;
      }
    }
  }
  for (int i = 0; i < k; ++i)
    if (!known[i]) throw PreconditionFailed("partition adjacency graph is disconnected");
  for (const Facet& f : facets) {
    const Rat dw = vnorm2(sites[f.a]) - vnorm2(sites[f.b]) -
                   2 * vdot(vsub(sites[f.a], sites[f.b]), f.midpoint);
    if (weights[f.a] - weights[f.b] != dw)
      throw NotRegular("weights are inconsistent around an adjacency cycle", f.a, f.b);
  }

  PowerDiagram pd(std::move(sites), std::move(weights), box);
  if (check_grid != nullptr) {
    const std::vector<int> want = partition.assign(*check_grid);
    const std::vector<int> got = pd.assign(*check_grid);
    for (int c = 0; c < check_grid->num_cells(); ++c)
      if (want[c] != got[c])
        throw NotRegular("induced diagram disagrees with the partition at a grid atom",
                         want[c], got[c]);
  }
  return pd;
}

namespace {

// Vertices and an interior point of a cell clipped to the box. Dimension one
// reduces to interval endpoints; dimension two uses the exact clipped polygon
// (the vertex average of a convex polygon with area is interior).
struct CellShape {
  std::vector<Vec> vertices;
  Vec inner;
};

CellShape cell_shape(const ConvexRegion& cell, const Box& box) {
  if (box.dim() == 1) {
    Rat lo = box.lo[0], hi = box.hi[0];
    for (const Halfspace& h : cell.halfspaces) {
      const int s = sgn(h.normal[0]);
      if (s == 0) {
        if (sgn(h.offset) < 0) return {};
        continue;
      }
      const Rat edge(h.offset / h.normal[0]);
      if (s > 0 && edge < hi) hi = edge;
      if (s < 0 && edge > lo) lo = edge;
    }
    if (lo >= hi) return {};
    return {{Vec{lo}, Vec{hi}}, Vec{Rat((lo + hi) / 2)}};
  }
  std::vector<Vec> poly = region_polygon_2d(cell, box);
  if (poly.size() < 3 || polygon_area(poly) == 0) return {};
  Vec c(2, Rat(0));
  for (const Vec& v : poly) c = vadd(c, v);
  c = vscale(Rat(1, static_cast<int>(poly.size())), c);
  return {std::move(poly), std::move(c)};
}

}  // namespace

std::optional<PowerDiagram> fit_any_power_diagram(const ConvexPartition& partition,
                                                  const Box& box,
                                                  const GridMeasure* check_grid) {
  const int k = partition.size();
  const int d = box.dim();
  if (k == 0) throw PreconditionFailed("cannot fit a diagram to an empty partition");
  if (d != 1 && d != 2)
    throw PreconditionFailed("free-gradient fitting requires dimension one or two");
  if (k == 1) return PowerDiagram({box.center()}, {Rat(0)}, box);

  std::vector<CellShape> shapes;
  for (const ConvexRegion& cell : partition.cells) {
    shapes.push_back(cell_shape(cell, box));
    if (shapes.back().vertices.empty())
      throw PreconditionFailed("partition cell clips to an empty interior");
  }

  // Variables: per-cell gradient (boxed so the margin has a scale), per-cell
  // intercept with cell zero pinned, and the common margin. Piece i must beat
  // piece j by >= 0 at i's vertices and by >= margin at i's inner point.
  const int nv = k * (d + 1) + 1;
  const int tv = nv - 1;
  auto gvar = [&](int cell, int axis) { return cell * (d + 1) + axis; };
  auto bvar = [&](int cell) { return cell * (d + 1) + d; };
  LinearProgram lp(nv);
  lp.maximize = true;
  lp.objective[tv] = Rat(1);
  for (int i = 0; i < k; ++i) {
    for (int a = 0; a < d; ++a) lp.set_range(gvar(i, a), Rat(-1), Rat(1));
    lp.free_var(bvar(i));
  }
  lp.fix_var(bvar(0), Rat(0));
  lp.set_range(tv, Rat(0), Rat(1));

  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      auto dominance_row = [&](const Vec& x, bool with_margin) {
        Vec row(nv, Rat(0));
        for (int a = 0; a < d; ++a) {
          row[gvar(i, a)] = x[a];
          row[gvar(j, a)] = Rat(-x[a]);
        }
        row[bvar(i)] = Rat(1);
        row[bvar(j)] = Rat(-1);
        if (with_margin) row[tv] = Rat(-1);
        lp.add_row(std::move(row), RowSense::GE, Rat(0));
      };
      for (const Vec& v : shapes[i].vertices) dominance_row(v, false);
      dominance_row(shapes[i].inner, true);
    }

  const LpSolution sol = lp_solve(lp, LpMode::Rational);
  if (sol.status != LpStatus::Optimal)
    throw std::logic_error("diagram-fitting program must have an optimum");
  if (sgn(sol.objective) <= 0) return std::nullopt;

  // Lift correspondence: piece g.x + b == site g/2, weight b + |g/2|^2. A
  // positive margin forces pairwise-distinct gradients, hence valid sites.
  std::vector<Vec> sites;
  std::vector<Rat> weights;
  for (int i = 0; i < k; ++i) {
    Vec s(d);
    for (int a = 0; a < d; ++a) s[a] = sol.primal[gvar(i, a)] / 2;
    weights.push_back(Rat(sol.primal[bvar(i)] + vnorm2(s)));
    sites.push_back(std::move(s));
  }
  PowerDiagram pd(std::move(sites), std::move(weights), box);
  if (check_grid != nullptr) {
    const std::vector<int> want = partition.assign(*check_grid);
    const std::vector<int> got = pd.assign(*check_grid);
    for (int c = 0; c < check_grid->num_cells(); ++c)
      if (want[c] != got[c])
        throw std::logic_error("fitted diagram disagrees with the partition at a grid atom");
  }
  return pd;
}

}  // namespace fusion
