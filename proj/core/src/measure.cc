// measure.cc - Boxes, atomic measures, grid discretizations, convex regions
// and partitions, plus barycenter/restriction/mirror operations and the
// affine/convex independence tests.

#include "fusion/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fusion/lp.hpp"

namespace fusion {

Box::Box(Vec lower, Vec upper) : lo(std::move(lower)), hi(std::move(upper)) {
  if (lo.size() != hi.size() || lo.empty())
    throw std::invalid_argument("box bounds must share a positive dimension");
  for (std::size_t a = 0; a < lo.size(); ++a)
    if (!(lo[a] < hi[a])) throw std::invalid_argument("box needs lower < upper per axis");
}

bool Box::contains(const Vec& x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (std::size_t a = 0; a < lo.size(); ++a)
    if (x[a] < lo[a] || x[a] > hi[a]) return false;
  return true;
}

Vec Box::center() const {
  Vec c(lo.size());
  for (std::size_t a = 0; a < lo.size(); ++a) c[a] = (lo[a] + hi[a]) / 2;
  return c;
}

Rat Box::volume() const {
  Rat v = 1;
  for (std::size_t a = 0; a < lo.size(); ++a) v *= hi[a] - lo[a];
  return v;
}

namespace {
bool lex_less(const Vec& a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}
}  // namespace

DiscreteMeasure::DiscreteMeasure(Box box, std::vector<Atom> atoms, bool is_signed)
    : box_(std::move(box)), signed_(is_signed) {
  const Rat merge_eps = rat_from_double(kAtomMergeEps);
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return lex_less(a.point, b.point); });
  for (auto& at : atoms) {
    if (static_cast<int>(at.point.size()) != box_.dim())
      throw OutOfDomain("atom dimension does not match box");
    if (!box_.contains(at.point))
      throw OutOfDomain("atom lies outside the ambient box");
    bool merged = false;
    if (!atoms_.empty()) {
      const Vec& prev = atoms_.back().point;
      bool close = true;
      for (std::size_t a = 0; a < prev.size() && close; ++a) {
        Rat d = at.point[a] - prev[a];
        if (d < 0) d = -d;
        if (d > merge_eps) close = false;
      }
      if (close) {
        atoms_.back().mass += at.mass;
        merged = true;
      }
    }
    if (!merged) atoms_.push_back(std::move(at));
  }
  std::vector<Atom> kept;
  kept.reserve(atoms_.size());
  for (auto& at : atoms_) {
    if (sgn(at.mass) == 0) continue;
    if (!signed_ && sgn(at.mass) < 0)
      throw std::invalid_argument("negative atom mass in an unsigned measure");
    kept.push_back(std::move(at));
  }
  atoms_ = std::move(kept);
}

Rat DiscreteMeasure::total_mass() const {
  Rat t = 0;
  for (const auto& a : atoms_) t += a.mass;
  return t;
}

Vec DiscreteMeasure::barycenter_point() const { return barycenter(*this); }

GridMeasure::GridMeasure(Box box, std::vector<int> resolution, std::vector<Rat> cell_masses)
    : box_(std::move(box)), res_(std::move(resolution)), masses_(std::move(cell_masses)) {
  if (static_cast<int>(res_.size()) != box_.dim())
    throw std::invalid_argument("grid resolution rank != box dimension");
  long long cells = 1;
  for (int r : res_) {
    if (r <= 0) throw std::invalid_argument("grid resolution must be positive");
    cells *= r;
  }
  if (static_cast<long long>(masses_.size()) != cells)
    throw std::invalid_argument("cell mass count != product of resolutions");
  for (const Rat& m : masses_)
    if (sgn(m) < 0) throw OutOfDomain("grid cell masses must be nonnegative");
  stride_.assign(res_.size(), 1);
  for (int a = static_cast<int>(res_.size()) - 2; a >= 0; --a)
    stride_[a] = stride_[a + 1] * res_[a + 1];
}

GridMeasure GridMeasure::uniform(const Box& box, std::vector<int> resolution) {
  long long cells = 1;
  for (int r : resolution) cells *= r;
  std::vector<Rat> masses(cells, Rat(1) / Rat(static_cast<long>(cells)));
  return GridMeasure(box, std::move(resolution), std::move(masses));
}

std::vector<int> GridMeasure::cell_coords(int cell) const {
  std::vector<int> coords(res_.size());
  for (std::size_t a = 0; a < res_.size(); ++a) {
    coords[a] = cell / stride_[a];
    cell %= stride_[a];
  }
  return coords;
}

Vec GridMeasure::cell_center(int cell) const {
  std::vector<int> coords = cell_coords(cell);
  Vec x(res_.size());
  for (std::size_t a = 0; a < res_.size(); ++a) {
    Rat h = box_.spacing(static_cast<int>(a), res_[a]);
    x[a] = box_.lo[a] + h * (Rat(2 * coords[a] + 1) / 2);
  }
  return x;
}

Rat GridMeasure::total_mass() const {
  Rat t = 0;
  for (const Rat& m : masses_) t += m;
  return t;
}

Vec GridMeasure::barycenter_point() const { return barycenter(*this); }

double GridMeasure::cell_diameter() const {
  Rat d2 = 0;
  for (std::size_t a = 0; a < res_.size(); ++a) {
    Rat h = box_.spacing(static_cast<int>(a), res_[a]);
    d2 += h * h;
  }
  return std::sqrt(to_double(d2));
}

Rat GridMeasure::min_spacing() const {
  Rat best = 0;
  for (std::size_t a = 0; a < res_.size(); ++a) {
    Rat h = box_.spacing(static_cast<int>(a), res_[a]);
    if (a == 0 || h < best) best = h;
  }
  return best;
}

DiscreteMeasure GridMeasure::positive_atoms() const {
  std::vector<Atom> atoms;
  for (int c = 0; c < num_cells(); ++c)
    if (sgn(masses_[c]) > 0) atoms.push_back({cell_center(c), masses_[c]});
  return DiscreteMeasure(box_, std::move(atoms));
}

GridMeasure GridMeasure::with_masses(std::vector<Rat> masses) const {
  return GridMeasure(box_, res_, std::move(masses));
}

bool ConvexRegion::contains(const Vec& x) const {
  for (const auto& h : halfspaces)
    if (vdot(h.normal, x) > h.offset) return false;
  return true;
}

std::vector<std::pair<DVec, double>> ConvexRegion::unit_normals() const {
  std::vector<std::pair<DVec, double>> out;
  for (const auto& h : halfspaces) {
    double nrm = vnorm(h.normal);
    DVec a = to_dvec(h.normal);
    for (double& v : a) v /= nrm;
    out.emplace_back(std::move(a), to_double(h.offset) / nrm);
  }
  return out;
}

int ConvexPartition::cell_of(const Vec& x) const {
  for (int i = 0; i < size(); ++i)
    if (cells[i].contains(x)) return i;
  return -1;
}

std::vector<int> ConvexPartition::assign(const GridMeasure& grid) const {
  std::vector<int> out(grid.num_cells(), -1);
  for (int c = 0; c < grid.num_cells(); ++c) {
    out[c] = cell_of(grid.cell_center(c));
    if (out[c] < 0)
      throw OutOfDomain("grid atom covered by no partition cell");
  }
  return out;
}

Vec barycenter(const DiscreteMeasure& m) {
  Rat total = m.total_mass();
  if (sgn(total) == 0) throw ZeroMass("barycenter of a zero-mass measure");
  Vec acc(m.box().dim(), Rat(0));
  for (const auto& a : m.atoms())
    for (int d = 0; d < m.box().dim(); ++d) acc[d] += a.mass * a.point[d];
  for (auto& v : acc) v /= total;
  return acc;
}

Vec barycenter(const GridMeasure& m) {
  Rat total = m.total_mass();
  if (sgn(total) == 0) throw ZeroMass("barycenter of a zero-mass measure");
  Vec acc(m.box().dim(), Rat(0));
  for (int c = 0; c < m.num_cells(); ++c) {
    if (sgn(m.mass(c)) == 0) continue;
    Vec x = m.cell_center(c);
    for (int d = 0; d < m.box().dim(); ++d) acc[d] += m.mass(c) * x[d];
  }
  for (auto& v : acc) v /= total;
  return acc;
}

GridMeasure restrict_grid(const GridMeasure& m, const ConvexRegion& r) {
  std::vector<Rat> masses(m.masses());
  for (int c = 0; c < m.num_cells(); ++c)
    if (!r.contains(m.cell_center(c))) masses[c] = 0;
  return m.with_masses(std::move(masses));
}

DiscreteMeasure restrict_discrete(const DiscreteMeasure& m, const ConvexRegion& r) {
  std::vector<Atom> atoms;
  for (const auto& a : m.atoms())
    if (r.contains(a.point)) atoms.push_back(a);
  return DiscreteMeasure(m.box(), std::move(atoms), m.is_signed());
}

DiscreteMeasure mirror(const DiscreteMeasure& m, int axis, const Rat& pivot) {
  if (axis < 0 || axis >= m.box().dim())
    throw std::invalid_argument("mirror axis out of range");
  std::vector<Atom> atoms = m.atoms();
  for (auto& a : atoms) {
    a.point[axis] = 2 * pivot - a.point[axis];
    if (!m.box().contains(a.point))
      throw OutOfDomain("mirrored atom leaves the ambient box");
  }
  return DiscreteMeasure(m.box(), std::move(atoms), m.is_signed());
}

bool affinely_independent(const std::vector<Vec>& points) {
  if (points.empty()) throw std::invalid_argument("empty point list");
  const std::size_t k = points.size();
  if (k == 1) return true;
  const std::size_t n = points[0].size();
  if (k - 1 > n) return false;

  std::vector<Vec> rows;
  for (std::size_t i = 1; i < k; ++i) rows.push_back(vsub(points[i], points[0]));
  if (rat_rank(rows) != k - 1) return false;

  // Tolerance pass: pivoted double elimination; a best pivot below kRankTol
  // downgrades near-dependent sets.
  std::vector<DVec> d;
  for (std::size_t i = 1; i < k; ++i) d.push_back(to_dvec(vsub(points[i], points[0])));
  std::size_t rank = 0;
  std::vector<bool> used_col(n, false);
  for (std::size_t r = 0; r < d.size(); ++r) {
    std::size_t bi = 0, bj = 0;
    double best = 0;
    for (std::size_t i = r; i < d.size(); ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!used_col[j] && std::fabs(d[i][j]) > best) {
          best = std::fabs(d[i][j]);
          bi = i;
          bj = j;
        }
    if (best < kRankTol) break;
    std::swap(d[r], d[bi]);
    used_col[bj] = true;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (i == r) continue;
      double f = d[i][bj] / d[r][bj];
      if (f == 0) continue;
      for (std::size_t j = 0; j < n; ++j) d[i][j] -= f * d[r][j];
    }
    ++rank;
  }
  return rank == k - 1;
}

bool in_convex_hull(const Vec& x, const std::vector<Vec>& hull_points) {
  const int h = static_cast<int>(hull_points.size());
  const int n = static_cast<int>(x.size());
  LinearProgram lp(h);
  Vec ones(h, Rat(1));
  lp.add_row(ones, RowSense::EQ, Rat(1));
  for (int d = 0; d < n; ++d) {
    Vec row(h);
    for (int j = 0; j < h; ++j) row[j] = hull_points[j][d];
    lp.add_row(std::move(row), RowSense::EQ, x[d]);
  }
  LpSolution sol = lp_solve(lp, LpMode::Rational);
  return sol.status == LpStatus::Optimal;
}

bool convexly_independent(const std::vector<Vec>& points) {
  if (points.empty()) throw std::invalid_argument("empty point list");
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<Vec> others;
    for (std::size_t j = 0; j < points.size(); ++j)
      if (j != i) others.push_back(points[j]);
    if (others.empty()) continue;
    if (in_convex_hull(points[i], others)) return false;
  }
  return true;
}

bool measures_equal(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i) {
    if (!veq(a.atoms()[i].point, b.atoms()[i].point)) return false;
    if (a.atoms()[i].mass != b.atoms()[i].mass) return false;
  }
  return true;
}

Rat measure_l1_distance(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  // Atom lists are lexicographically sorted; merge-walk the union support.
  Rat acc = 0;
  std::size_t i = 0, j = 0;
  const auto& A = a.atoms();
  const auto& B = b.atoms();
  while (i < A.size() || j < B.size()) {
    if (j == B.size() || (i < A.size() && lex_less(A[i].point, B[j].point))) {
      acc += abs(A[i].mass);
      ++i;
    } else if (i == A.size() || lex_less(B[j].point, A[i].point)) {
      acc += abs(B[j].mass);
      ++j;
    } else {
      acc += abs(A[i].mass - B[j].mass);
      ++i;
      ++j;
    }
  }
  return acc;
}

DiscreteMeasure combine(const Box& box,
                        const std::vector<std::pair<Rat, DiscreteMeasure>>& parts,
                        bool is_signed) {
  std::vector<Atom> atoms;
  for (const auto& [w, m] : parts)
    for (const auto& a : m.atoms()) atoms.push_back({a.point, w * a.mass});
  return DiscreteMeasure(box, std::move(atoms), is_signed);
}

}  // namespace fusion
