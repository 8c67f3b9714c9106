// extreme.cc - Feasible-flow programs, partition discovery, and constructive
// extremality / non-extremality certificates.

#include "fusion/extreme.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

#include "fusion/errors.hpp"

namespace fusion {

namespace {

Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

// Positive-mass atoms of the grid with their membership under a partition
// (cell_of at the center: ties to the lowest cell, -1 when uncovered).
struct PosAtoms {
  std::vector<int> grid_cell;  // index back into the grid
  std::vector<Vec> point;
  std::vector<Rat> mass;
  std::vector<int> member;

  int size() const { return static_cast<int>(point.size()); }
};

PosAtoms positive_atoms_with_membership(const GridMeasure& mu,
                                        const ConvexPartition& partition) {
  PosAtoms out;
  for (int c = 0; c < mu.num_cells(); ++c) {
    if (sgn(mu.mass(c)) <= 0) continue;
    Vec x = mu.cell_center(c);
    out.member.push_back(partition.cell_of(x));
    out.grid_cell.push_back(c);
    out.point.push_back(std::move(x));
    out.mass.push_back(mu.mass(c));
  }
  return out;
}

bool strictly_inside(const ConvexRegion& region, const Vec& x) {
  for (const auto& h : region.halfspaces)
    if (vdot(h.normal, x) >= h.offset) return false;
  return true;
}

// Index of the unique cell whose interior holds x; AtomOnBoundary otherwise.
int strict_cell_of(const ConvexPartition& partition, const Vec& x) {
  int found = -1;
  for (int p = 0; p < partition.size(); ++p) {
    if (!strictly_inside(partition.cells[p], x)) continue;
    if (found >= 0)
      throw AtomOnBoundary("atom lies in the interior of two partition cells");
    found = p;
  }
  if (found < 0)
    throw AtomOnBoundary("atom does not lie strictly inside any partition cell");
  return found;
}

ConvexPartition trivial_partition() {
  ConvexPartition part;
  part.cells.push_back(ConvexRegion::whole_space());
  part.provenance = PartitionProvenance::OverlapGraph;
  return part;
}

struct Separator {
  Vec normal;  // oriented so group `a` satisfies normal . x <= offset
  Rat offset;
};

// Maximum-margin affine separator between two point clouds under an
// infinity-norm bound on the normal. Returns nullopt when no positive
// margin exists.
std::optional<Separator> max_margin_separator(const std::vector<Vec>& a,
                                              const std::vector<Vec>& b) {
  if (a.empty() || b.empty()) return std::nullopt;
  const int dim = static_cast<int>(a[0].size());
  // Variables: normal (dim, in [-1,1]), offset (free), margin t >= 0.
  LinearProgram lp(dim + 2);
  for (int c = 0; c < dim; ++c) lp.set_range(c, Rat(-1), Rat(1));
  lp.free_var(dim);
  lp.objective[dim + 1] = 1;
  lp.maximize = true;
  for (const Vec& x : a) {
    Vec row(lp.num_vars(), Rat(0));
    for (int c = 0; c < dim; ++c) row[c] = x[c];
    row[dim] = -1;
    row[dim + 1] = 1;
    lp.add_row(std::move(row), RowSense::LE, 0);  // n.x - b + t <= 0
  }
  for (const Vec& x : b) {
    Vec row(lp.num_vars(), Rat(0));
    for (int c = 0; c < dim; ++c) row[c] = x[c];
    row[dim] = -1;
    row[dim + 1] = -1;
    lp.add_row(std::move(row), RowSense::GE, 0);  // n.x - b - t >= 0
  }
  const auto sol = lp_solve(lp, LpMode::Rational);
  if (sol.status != LpStatus::Optimal || sol.objective <= 0) return std::nullopt;
  Separator sep;
  sep.normal.assign(sol.primal.begin(), sol.primal.begin() + dim);
  // Place the cut mid-margin so both groups keep strict clearance.
  sep.offset = sol.primal[static_cast<std::size_t>(dim)];
  return sep;
}

Halfspace scaled_halfspace(Vec normal, Rat offset) {
  Rat scale = 0;
  for (const Rat& v : normal) scale = std::max(scale, rat_abs(v));
  if (sgn(scale) != 0) {
    for (Rat& v : normal) v /= scale;
    offset /= scale;
  }
  return Halfspace{std::move(normal), std::move(offset)};
}

bool halfspace_equal(const Halfspace& a, const Halfspace& b) {
  return a.normal == b.normal && a.offset == b.offset;
}

}  // namespace

bool FlowSystem::is_zero() const {
  for (const auto& row : u)
    for (const Rat& v : row)
      if (sgn(v) != 0) return false;
  return true;
}

Rat FlowSystem::cross_mass() const {
  Rat total = 0;
  for (std::size_t p = 0; p < u.size(); ++p)
    for (std::size_t a = 0; a < u[p].size(); ++a)
      if (assignment[a] != static_cast<int>(p) && sgn(u[p][a]) > 0) total += u[p][a];
  return total;
}

bool flow_conditions_ok(const GridMeasure& mu, const FlowSystem& flow, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  const int k = flow.partition.size();
  const int n_atoms = mu.num_cells();
  if (static_cast<int>(flow.u.size()) != k)
    return fail("flow has the wrong number of cell rows");
  for (const auto& row : flow.u)
    if (static_cast<int>(row.size()) != n_atoms)
      return fail("flow row length does not match the grid");
  if (static_cast<int>(flow.assignment.size()) != n_atoms)
    return fail("assignment length does not match the grid");

  const int dim = mu.box().dim();
  for (int a = 0; a < n_atoms; ++a) {
    const Vec x = mu.cell_center(a);
    const int member = flow.partition.cell_of(x);
    if (member != flow.assignment[a])
      return fail("stored assignment disagrees with the partition");
    Rat col = 0;
    for (int p = 0; p < k; ++p) {
      const Rat& v = flow.u[static_cast<std::size_t>(p)][static_cast<std::size_t>(a)];
      if (p == member) {
        if (sgn(v) > 0 || v < -mu.mass(a))
          return fail("condition 2: in-cell value outside [-mu, 0]");
      } else {
        if (sgn(v) < 0 || v > mu.mass(a))
          return fail("condition 1: off-cell value outside [0, mu]");
      }
      col += v;
    }
    if (sgn(col) != 0) return fail("condition 5: atomwise sum over cells is nonzero");
  }
  for (int p = 0; p < k; ++p) {
    Rat mass = 0;
    Vec moment(static_cast<std::size_t>(dim), Rat(0));
    for (int a = 0; a < n_atoms; ++a) {
      const Rat& v = flow.u[static_cast<std::size_t>(p)][static_cast<std::size_t>(a)];
      if (sgn(v) == 0) continue;
      mass += v;
      const Vec x = mu.cell_center(a);
      for (int c = 0; c < dim; ++c) moment[static_cast<std::size_t>(c)] += v * x[c];
    }
    if (sgn(mass) != 0) return fail("condition 3: cell row has nonzero total mass");
    for (int c = 0; c < dim; ++c)
      if (sgn(moment[static_cast<std::size_t>(c)]) != 0)
        return fail("condition 4: cell row has a nonzero first moment");
  }
  return true;
}

std::vector<CellReport> verify_prop1_conditions(const GridMeasure& mu,
                                                const DiscreteMeasure& nu,
                                                const ConvexPartition& partition) {
  const int k = partition.size();
  std::vector<std::vector<Atom>> per_cell(static_cast<std::size_t>(k));
  for (const Atom& atom : nu.atoms())
    per_cell[static_cast<std::size_t>(strict_cell_of(partition, atom.point))].push_back(atom);

  const std::vector<int> assignment = partition.assign(mu);
  std::vector<CellReport> reports;
  for (int p = 0; p < k; ++p) {
    CellReport rep;
    rep.cell = p;
    rep.atom_count = static_cast<int>(per_cell[static_cast<std::size_t>(p)].size());

    std::vector<Rat> masses(static_cast<std::size_t>(mu.num_cells()), Rat(0));
    Rat cell_mass = 0;
    for (int a = 0; a < mu.num_cells(); ++a)
      if (assignment[static_cast<std::size_t>(a)] == p) {
        masses[static_cast<std::size_t>(a)] = mu.mass(a);
        cell_mass += mu.mass(a);
      }

    Rat nu_mass = 0;
    std::vector<Vec> support;
    for (const Atom& atom : per_cell[static_cast<std::size_t>(p)]) {
      nu_mass += atom.mass;
      support.push_back(atom.point);
    }
    rep.mass_gap = rat_abs(nu_mass - cell_mass);
    rep.affinely_independent_support = support.empty() || affinely_independent(support);
    if (per_cell[static_cast<std::size_t>(p)].empty()) {
      rep.order_ok = sgn(cell_mass) == 0;
    } else {
      const GridMeasure restricted = mu.with_masses(std::move(masses));
      DiscreteMeasure nu_p(mu.box(), per_cell[static_cast<std::size_t>(p)]);
      rep.order_ok = check_convex_order(restricted, nu_p).dominated;
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

DiscoveredPartition discover_partition(const GridMeasure& mu, const DiscreteMeasure& nu) {
  DiscoveredPartition out;
  out.partition = trivial_partition();
  out.groups.assign(1, {});
  for (int j = 0; j < nu.size(); ++j) out.groups[0].push_back(j);

  if (measures_equal(nu, mu.positive_atoms())) {
    out.full_revelation = true;
    return out;
  }
  if (nu.size() < 2) return out;

  const std::vector<GridMeasure> components = cartier_decompose(mu, nu);
  std::vector<std::vector<Vec>> supports;
  supports.reserve(components.size());
  for (const auto& comp : components) {
    std::vector<Vec> pts;
    for (int c = 0; c < comp.num_cells(); ++c)
      if (sgn(comp.mass(c)) > 0) pts.push_back(comp.cell_center(c));
    supports.push_back(std::move(pts));
  }

  // Union components whose support hulls share an interior ball.
  const Rat margin = mu.min_spacing() / 2;
  std::vector<int> parent(supports.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) {
    return parent[static_cast<std::size_t>(v)] == v
               ? v
               : parent[static_cast<std::size_t>(v)] =
                     find(parent[static_cast<std::size_t>(v)]);
  };
  for (std::size_t i = 0; i < supports.size(); ++i)
    for (std::size_t j = i + 1; j < supports.size(); ++j)
      if (common_interior(supports[i], supports[j], margin))
        parent[static_cast<std::size_t>(find(static_cast<int>(i)))] =
            find(static_cast<int>(j));

  auto collect_groups = [&]() {
    std::map<int, std::vector<int>> by_root;
    for (std::size_t j = 0; j < supports.size(); ++j)
      by_root[find(static_cast<int>(j))].push_back(static_cast<int>(j));
    std::vector<std::vector<int>> groups;
    for (auto& [root, members] : by_root) groups.push_back(std::move(members));
    // Deterministic order: by smallest member atom index.
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return groups;
  };

  // Separate groups pairwise; merge any pair that fails and retry.
  std::vector<std::vector<int>> groups = collect_groups();
  std::vector<std::vector<Vec>> group_pts;
  std::vector<std::vector<std::optional<Separator>>> seps;
  while (true) {
    if (groups.size() < 2) return out;  // trivial: nothing separable
    group_pts.assign(groups.size(), {});
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (int j : groups[g])
        group_pts[g].insert(group_pts[g].end(), supports[static_cast<std::size_t>(j)].begin(),
                            supports[static_cast<std::size_t>(j)].end());
    bool merged = false;
    seps.assign(groups.size(), std::vector<std::optional<Separator>>(groups.size()));
    for (std::size_t g1 = 0; g1 < groups.size() && !merged; ++g1)
      for (std::size_t g2 = g1 + 1; g2 < groups.size() && !merged; ++g2) {
        auto sep = max_margin_separator(group_pts[g1], group_pts[g2]);
        if (!sep) {
          for (int j : groups[g2]) parent[static_cast<std::size_t>(find(j))] = find(groups[g1][0]);
          groups = collect_groups();
          merged = true;
        } else {
          seps[g1][g2] = std::move(sep);
        }
      }
    if (!merged) break;
  }

  ConvexPartition partition;
  partition.provenance = PartitionProvenance::OverlapGraph;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    ConvexRegion region;
    for (std::size_t o = 0; o < groups.size(); ++o) {
      if (o == g) continue;
      const auto& sep = (g < o) ? seps[g][o] : seps[o][g];
      Halfspace h = (g < o)
                        ? scaled_halfspace(sep->normal, sep->offset)
                        : scaled_halfspace(vscale(Rat(-1), sep->normal), Rat(-sep->offset));
      bool dup = false;
      for (const auto& have : region.halfspaces)
        if (halfspace_equal(have, h)) dup = true;
      if (!dup) region.halfspaces.push_back(std::move(h));
    }
    partition.cells.push_back(std::move(region));
  }

  // Verification: the partition must cover the grid and keep every group's
  // support (and atoms) in its own cell; otherwise degrade to trivial.
  try {
    partition.assign(mu);
  } catch (const OutOfDomain&) {
    return out;
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const Vec& x : group_pts[g])
      if (partition.cell_of(x) != static_cast<int>(g)) return out;
    for (int j : groups[g])
      if (partition.cell_of(nu.atoms()[static_cast<std::size_t>(j)].point) != static_cast<int>(g))
        return out;
  }

  out.partition = std::move(partition);
  out.separated = true;
  out.groups = std::move(groups);
  return out;
}

FlowCertificate max_flow_certificate(const GridMeasure& mu, const ConvexPartition& partition) {
  const int k = partition.size();
  const int dim = mu.box().dim();
  partition.assign(mu);  // throws OutOfDomain when some atom is uncovered
  const PosAtoms atoms = positive_atoms_with_membership(mu, partition);
  for (int p = 0; p < k; ++p) {
    Rat cell_mass = 0;
    for (int j = 0; j < atoms.size(); ++j)
      if (atoms.member[static_cast<std::size_t>(j)] == p)
        cell_mass += atoms.mass[static_cast<std::size_t>(j)];
    if (sgn(cell_mass) <= 0)
      throw EmptyCell("partition cell carries no prior mass");
  }

  const int npos = atoms.size();
  auto var = [&](int p, int j) { return p * npos + j; };
  LinearProgram lp(k * npos);
  lp.maximize = true;
  for (int p = 0; p < k; ++p)
    for (int j = 0; j < npos; ++j) {
      if (atoms.member[static_cast<std::size_t>(j)] == p) {
        lp.set_range(var(p, j), Rat(-atoms.mass[static_cast<std::size_t>(j)]), Rat(0));
      } else {
        lp.set_range(var(p, j), Rat(0), atoms.mass[static_cast<std::size_t>(j)]);
        lp.objective[static_cast<std::size_t>(var(p, j))] = 1;
      }
    }
  for (int p = 0; p < k; ++p) {
    Vec mass_row(lp.num_vars(), Rat(0));
    for (int j = 0; j < npos; ++j) mass_row[static_cast<std::size_t>(var(p, j))] = 1;
    lp.add_row(std::move(mass_row), RowSense::EQ, 0);
    for (int c = 0; c < dim; ++c) {
      Vec row(lp.num_vars(), Rat(0));
      for (int j = 0; j < npos; ++j)
        row[static_cast<std::size_t>(var(p, j))] = atoms.point[static_cast<std::size_t>(j)][c];
      lp.add_row(std::move(row), RowSense::EQ, 0);
    }
  }
  for (int j = 0; j < npos; ++j) {
    Vec row(lp.num_vars(), Rat(0));
    for (int p = 0; p < k; ++p) row[static_cast<std::size_t>(var(p, j))] = 1;
    lp.add_row(std::move(row), RowSense::EQ, 0);
  }

  const auto sol = lp_solve(lp, LpMode::Rational);
  if (sol.status != LpStatus::Optimal)
    throw std::logic_error("flow program must be solvable (zero is feasible)");

  FlowCertificate cert;
  cert.optimum = sol.objective;
  cert.flow.partition = partition;
  cert.flow.assignment.assign(static_cast<std::size_t>(mu.num_cells()), -1);
  for (int a = 0; a < mu.num_cells(); ++a)
    cert.flow.assignment[static_cast<std::size_t>(a)] =
        partition.cell_of(mu.cell_center(a));
  cert.flow.u.assign(static_cast<std::size_t>(k),
                     std::vector<Rat>(static_cast<std::size_t>(mu.num_cells()), Rat(0)));
  for (int p = 0; p < k; ++p)
    for (int j = 0; j < npos; ++j)
      cert.flow.u[static_cast<std::size_t>(p)]
                 [static_cast<std::size_t>(atoms.grid_cell[static_cast<std::size_t>(j)])] =
          sol.primal[static_cast<std::size_t>(var(p, j))];

  std::string why;
  if (!flow_conditions_ok(mu, cert.flow, &why))
    throw std::logic_error("flow witness failed its own conditions: " + why);
  return cert;
}

bool halfspace_zero_flow_check(const FlowSystem& flow) {
  const int k = flow.partition.size();
  for (int p = 0; p < k; ++p) {
    if (flow.partition.cells[static_cast<std::size_t>(p)].halfspaces.size() > 1) continue;
    for (std::size_t a = 0; a < flow.assignment.size(); ++a) {
      const bool in_p = flow.assignment[a] == p;
      // Row p vanishes off-cell; every other row vanishes on p.
      if (!in_p && sgn(flow.u[static_cast<std::size_t>(p)][a]) != 0) return false;
      if (in_p)
        for (int q = 0; q < k; ++q)
          if (q != p && sgn(flow.u[static_cast<std::size_t>(q)][a]) != 0) return false;
    }
  }
  return true;
}

FlowSystem perturb_partition_flow(const GridMeasure& mu, const ConvexPartition& partition,
                                  const FlowSystem& flow, const ConvexPartition& perturbed) {
  const int k = partition.size();
  if (perturbed.size() != k || flow.partition.size() != k)
    throw PreconditionFailed("partition, flow, and perturbation must have equal cell counts");

  // Exactly identical partitions: the input flow scaled by 1/2 transplants
  // verbatim.
  bool identical = true;
  for (int p = 0; p < k && identical; ++p) {
    const auto& a = partition.cells[static_cast<std::size_t>(p)].halfspaces;
    const auto& b = perturbed.cells[static_cast<std::size_t>(p)].halfspaces;
    if (a.size() != b.size()) identical = false;
    for (std::size_t h = 0; identical && h < a.size(); ++h)
      if (!halfspace_equal(a[h], b[h])) identical = false;
  }
  if (identical) {
    FlowSystem copy = flow;
    copy.partition = perturbed;
    for (auto& row : copy.u)
      for (Rat& v : row) v /= 2;
    return copy;
  }

  const int dim = mu.box().dim();
  const PosAtoms atoms = positive_atoms_with_membership(mu, perturbed);

  // Off-cell parcels of the input flow: mass and barycenter of u_Q
  // restricted to each foreign cell P (membership from the input flow).
  struct Parcel {
    int row = -1, cell = -1;
    Rat mass = 0;
    Vec barycenter;
  };
  std::vector<Parcel> parcels;
  for (int q = 0; q < k; ++q)
    for (int p = 0; p < k; ++p) {
      if (p == q) continue;
      Rat mass = 0;
      Vec moment(static_cast<std::size_t>(dim), Rat(0));
      for (std::size_t a = 0; a < flow.assignment.size(); ++a) {
        if (flow.assignment[a] != p) continue;
        const Rat& v = flow.u[static_cast<std::size_t>(q)][a];
        if (sgn(v) == 0) continue;
        mass += v;
        const Vec x = mu.cell_center(static_cast<int>(a));
        for (int c = 0; c < dim; ++c) moment[static_cast<std::size_t>(c)] += v * x[c];
      }
      if (sgn(mass) == 0) continue;
      Parcel parcel;
      parcel.row = q;
      parcel.cell = p;
      parcel.mass = mass;
      parcel.barycenter = vscale(Rat(1) / mass, moment);
      if (!strictly_inside(perturbed.cells[static_cast<std::size_t>(p)], parcel.barycenter))
        throw PreconditionFailed(
            "a parcel barycenter does not lie strictly inside its perturbed cell");
      parcels.push_back(std::move(parcel));
    }

  FlowSystem result;
  result.partition = perturbed;
  result.assignment.assign(static_cast<std::size_t>(mu.num_cells()), -1);
  for (int a = 0; a < mu.num_cells(); ++a)
    result.assignment[static_cast<std::size_t>(a)] = perturbed.cell_of(mu.cell_center(a));
  result.u.assign(static_cast<std::size_t>(k),
                  std::vector<Rat>(static_cast<std::size_t>(mu.num_cells()), Rat(0)));
  if (parcels.empty()) return result;  // zero flow transplants as zero

  Rat delta(1, 2);
  for (int attempt = 0; attempt < 40; ++attempt, delta /= 2) {
    bool ok = true;
    for (auto& row : result.u) std::fill(row.begin(), row.end(), Rat(0));
    for (const Parcel& parcel : parcels) {
      // Rebuild the parcel inside the perturbed cell: mass delta * m at the
      // same barycenter, capped at mu/k per atom, concentrated by a
      // squared-distance objective for determinism.
      std::vector<int> idx;
      for (int j = 0; j < atoms.size(); ++j)
        if (atoms.member[static_cast<std::size_t>(j)] == parcel.cell) idx.push_back(j);
      LinearProgram lp(static_cast<int>(idx.size()));
      lp.maximize = false;
      for (std::size_t v = 0; v < idx.size(); ++v) {
        const int j = idx[v];
        lp.set_upper(static_cast<int>(v), atoms.mass[static_cast<std::size_t>(j)] / k);
        lp.objective[v] = vnorm2(vsub(atoms.point[static_cast<std::size_t>(j)],
                                      parcel.barycenter));
      }
      Vec mass_row(idx.size(), Rat(1));
      lp.add_row(std::move(mass_row), RowSense::EQ, delta * parcel.mass);
      for (int c = 0; c < dim; ++c) {
        Vec row(idx.size(), Rat(0));
        for (std::size_t v = 0; v < idx.size(); ++v)
          row[v] = atoms.point[static_cast<std::size_t>(idx[v])][c] - parcel.barycenter[c];
        lp.add_row(std::move(row), RowSense::EQ, 0);
      }
      const auto sol = lp_solve(lp, LpMode::Rational);
      if (sol.status != LpStatus::Optimal) {
        ok = false;
        break;
      }
      for (std::size_t v = 0; v < idx.size(); ++v) {
        const Rat& xi = sol.primal[v];
        if (sgn(xi) == 0) continue;
        const int grid_cell = atoms.grid_cell[static_cast<std::size_t>(idx[v])];
        result.u[static_cast<std::size_t>(parcel.row)][static_cast<std::size_t>(grid_cell)] += xi;
        result.u[static_cast<std::size_t>(parcel.cell)][static_cast<std::size_t>(grid_cell)] -= xi;
      }
    }
    if (!ok) continue;
    std::string why;
    if (!flow_conditions_ok(mu, result, &why))
      throw std::logic_error("transplanted flow failed its conditions: " + why);
    return result;
  }
  throw NoFeasibleDelta("no positive delta admits the parcel transplant");
}

std::optional<NonExtremePair> build_nonextreme_from_flow(const GridMeasure& mu,
                                                         const DiscreteMeasure& nu,
                                                         const FlowSystem& flow) {
  const int m = flow.partition.size();
  if (m < 2) return std::nullopt;
  const int dim = mu.box().dim();
  const int natoms = nu.size();

  std::vector<int> atom_cell(static_cast<std::size_t>(natoms));
  for (int j = 0; j < natoms; ++j)
    atom_cell[static_cast<std::size_t>(j)] =
        strict_cell_of(flow.partition, nu.atoms()[static_cast<std::size_t>(j)].point);

  // Base per-cell mass and moment of the prior under the flow's membership.
  std::vector<Rat> base_mass(static_cast<std::size_t>(m), Rat(0));
  std::vector<Vec> base_moment(static_cast<std::size_t>(m), Vec(static_cast<std::size_t>(dim), Rat(0)));
  for (int a = 0; a < mu.num_cells(); ++a) {
    const int p = flow.assignment[static_cast<std::size_t>(a)];
    if (p < 0 || sgn(mu.mass(a)) == 0) continue;
    base_mass[static_cast<std::size_t>(p)] += mu.mass(a);
    const Vec x = mu.cell_center(a);
    for (int c = 0; c < dim; ++c)
      base_moment[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)] += mu.mass(a) * x[c];
  }

  // Signed per-cell perturbations induced by each row i of the flow:
  // cell i gains row i's off-cell part; every other cell P loses row i's
  // positive part on P.
  std::vector<std::vector<Rat>> dmass(static_cast<std::size_t>(m),
                                      std::vector<Rat>(static_cast<std::size_t>(m), Rat(0)));
  std::vector<std::vector<Vec>> dmoment(
      static_cast<std::size_t>(m),
      std::vector<Vec>(static_cast<std::size_t>(m), Vec(static_cast<std::size_t>(dim), Rat(0))));
  for (int i = 0; i < m; ++i)
    for (int a = 0; a < mu.num_cells(); ++a) {
      const int p = flow.assignment[static_cast<std::size_t>(a)];
      if (p < 0) continue;
      const Rat& v = flow.u[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
      if (sgn(v) == 0) continue;
      const Vec x = mu.cell_center(a);
      if (p != i) {
        // v >= 0 here: row i's off-cell mass on cell p.
        dmass[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] += v;
        dmass[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)] -= v;
        for (int c = 0; c < dim; ++c) {
          dmoment[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]
                 [static_cast<std::size_t>(c)] += v * x[c];
          dmoment[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)]
                 [static_cast<std::size_t>(c)] -= v * x[c];
        }
      }
    }

  Rat eps(1, 2);
  for (int attempt = 0; attempt < 40; ++attempt, eps /= 2) {
    // One coupled feasibility program: weights w[i][j] >= 0 of fusion nu^i at
    // nu atom j, matching each perturbed cell's mass and moment, with the m
    // copies averaging to nu exactly.
    LinearProgram lp(m * natoms);
    lp.maximize = false;
    auto var = [&](int i, int j) { return i * natoms + j; };
    for (int i = 0; i < m; ++i)
      for (int p = 0; p < m; ++p) {
        const Rat rhs_mass =
            base_mass[static_cast<std::size_t>(p)] +
            eps * dmass[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)];
        Vec mass_row(lp.num_vars(), Rat(0));
        for (int j = 0; j < natoms; ++j)
          if (atom_cell[static_cast<std::size_t>(j)] == p)
            mass_row[static_cast<std::size_t>(var(i, j))] = 1;
        lp.add_row(std::move(mass_row), RowSense::EQ, rhs_mass);
        for (int c = 0; c < dim; ++c) {
          const Rat rhs_moment =
              base_moment[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)] +
              eps * dmoment[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)]
                           [static_cast<std::size_t>(c)];
          Vec row(lp.num_vars(), Rat(0));
          for (int j = 0; j < natoms; ++j)
            if (atom_cell[static_cast<std::size_t>(j)] == p)
              row[static_cast<std::size_t>(var(i, j))] =
                  nu.atoms()[static_cast<std::size_t>(j)].point[c];
          lp.add_row(std::move(row), RowSense::EQ, rhs_moment);
        }
      }
    for (int j = 0; j < natoms; ++j) {
      Vec row(lp.num_vars(), Rat(0));
      for (int i = 0; i < m; ++i) row[static_cast<std::size_t>(var(i, j))] = 1;
      lp.add_row(std::move(row), RowSense::EQ,
                 Rat(m) * nu.atoms()[static_cast<std::size_t>(j)].mass);
    }
    const auto sol = lp_solve(lp, LpMode::Rational);
    if (sol.status != LpStatus::Optimal) continue;

    std::vector<DiscreteMeasure> fusions;
    bool all_fusions = true;
    for (int i = 0; i < m && all_fusions; ++i) {
      std::vector<Atom> atoms;
      for (int j = 0; j < natoms; ++j) {
        const Rat& w = sol.primal[static_cast<std::size_t>(var(i, j))];
        if (sgn(w) > 0)
          atoms.push_back(Atom{nu.atoms()[static_cast<std::size_t>(j)].point, w});
      }
      if (atoms.empty()) {
        all_fusions = false;
        break;
      }
      DiscreteMeasure nui(mu.box(), std::move(atoms));
      if (!check_convex_order(mu, nui).dominated) {
        all_fusions = false;
        break;
      }
      fusions.push_back(std::move(nui));
    }
    if (!all_fusions) continue;

    int distinct = -1;
    for (int i = 0; i < m; ++i)
      if (!measures_equal(fusions[static_cast<std::size_t>(i)], nu)) {
        distinct = i;
        break;
      }
    if (distinct < 0) return std::nullopt;  // flow does not move the fusion

    const Rat t(1, m - 1);
    NonExtremePair pair;
    pair.nu1 = combine(mu.box(), {{Rat(1) - t, nu}, {t, fusions[static_cast<std::size_t>(distinct)]}});
    std::vector<std::pair<Rat, DiscreteMeasure>> rest;
    for (int i = 0; i < m; ++i)
      if (i != distinct) rest.push_back({t, fusions[static_cast<std::size_t>(i)]});
    pair.nu2 = combine(mu.box(), rest);
    pair.per_cell_fusions = std::move(fusions);
    pair.epsilon = eps;

    if (measures_equal(pair.nu1, pair.nu2)) continue;
    const DiscreteMeasure avg =
        combine(mu.box(), {{Rat(1, 2), pair.nu1}, {Rat(1, 2), pair.nu2}});
    if (!measures_equal(avg, nu))
      throw std::logic_error("decomposition average failed to reproduce the fusion");
    if (!check_convex_order(mu, pair.nu1).dominated ||
        !check_convex_order(mu, pair.nu2).dominated)
      continue;
    return pair;
  }
  return std::nullopt;
}

ExtremalityReport certify_extreme(const GridMeasure& mu, const DiscreteMeasure& nu,
                                  const std::optional<ConvexPartition>& partition) {
  ExtremalityReport report;
  report.is_fusion = check_convex_order(mu, nu).dominated;
  if (!report.is_fusion) {
    report.note = "the candidate is not a fusion of the prior; no verdict applies";
    return report;
  }

  if (measures_equal(nu, mu.positive_atoms())) {
    report.full_revelation = true;
    report.discovery.partition = trivial_partition();
    report.discovery.full_revelation = true;
    report.verdict = ExtremalityVerdict::CertifiedExtreme;
    report.note =
        "full revelation: the prior is maximal in convex order, so it cannot "
        "be a nontrivial average of fusions";
    return report;
  }

  if (partition) {
    report.discovery.partition = *partition;
    report.discovery.separated = partition->size() > 1;
    report.discovery.groups.assign(static_cast<std::size_t>(partition->size()), {});
    for (int j = 0; j < nu.size(); ++j) {
      const int cell = partition->cell_of(nu.atoms()[static_cast<std::size_t>(j)].point);
      if (cell >= 0) report.discovery.groups[static_cast<std::size_t>(cell)].push_back(j);
    }
  } else {
    report.discovery = discover_partition(mu, nu);
  }

  try {
    report.cells = verify_prop1_conditions(mu, nu, report.discovery.partition);
  } catch (const AtomOnBoundary& e) {
    report.note = std::string("per-cell conditions unavailable: ") + e.what();
    return report;
  }
  bool prop1_ok = true;
  for (const auto& cell : report.cells) prop1_ok = prop1_ok && cell.ok();

  FlowCertificate cert;
  try {
    cert = max_flow_certificate(mu, report.discovery.partition);
  } catch (const EmptyCell& e) {
    report.note = std::string("flow program unavailable: ") + e.what();
    return report;
  }
  report.flow_optimum = cert.optimum;

  if (sgn(cert.optimum) == 0) {
    if (prop1_ok) {
      report.verdict = ExtremalityVerdict::CertifiedExtreme;
      report.note = "zero flow is the unique feasible system and all per-cell "
                    "conditions hold";
    } else {
      report.note = "zero flow, but a per-cell condition failed; no verdict";
    }
    return report;
  }

  report.flow = cert.flow;
  report.pair = build_nonextreme_from_flow(mu, nu, cert.flow);
  if (report.pair) {
    report.verdict = ExtremalityVerdict::CertifiedNotExtreme;
    report.note = "nonzero feasible flow yields a verified two-fusion decomposition";
  } else {
    report.note = "a nonzero feasible flow exists, but no decomposition over the "
                  "given support was constructible; extremality is undecided";
  }
  return report;
}

}  // namespace fusion
