// expose.cc - Lipschitz-exposure certificates: per-cell admissibility checks,
// gauge dents on full-revelation cells with exact convexity safeguards, the
// exact primal/dual identity, and uniqueness probing of the reduced fusion
// program via column generation. Everything is rational; square roots only
// appear as certified one-sided bounds.

#include "fusion/expose.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <utility>

#include "fusion/colgen.hpp"
#include "fusion/extreme.hpp"
#include "fusion/lp.hpp"
#include "fusion/order.hpp"
#include "fusion/util.hpp"

namespace fusion {
namespace {

// Largest multiple of 2^-20 that is <= x (or x itself when that would be 0).
// Certified square-root bounds carry ~60-bit numerators; quantities that feed
// exact LPs are floored onto this grid so simplex pivots stay small.
Rat coarse_floor(const Rat& x) {
  const long grid = 1L << 20;
  if (sgn(x) <= 0) return x;
  const mpz_class q = mpz_class(x.get_num() * grid) / x.get_den();
  if (q == 0) return x;
  return Rat(q) / grid;
}

// Exact area centroid of a nondegenerate convex CCW polygon.
Vec polygon_centroid(const std::vector<Vec>& poly) {
  const int n = static_cast<int>(poly.size());
  Rat twice_area(0);
  Vec acc(2, Rat(0));
  for (int i = 0; i < n; ++i) {
    const Vec& p = poly[i];
    const Vec& q = poly[(i + 1) % n];
    const Rat cross = p[0] * q[1] - q[0] * p[1];
    twice_area += cross;
    acc[0] += (p[0] + q[0]) * cross;
    acc[1] += (p[1] + q[1]) * cross;
  }
  if (sgn(twice_area) <= 0)
    throw PreconditionFailed("centroid needs a positively oriented polygon");
  return {acc[0] / (3 * twice_area), acc[1] / (3 * twice_area)};
}

GaugeBump make_bump(const PowerDiagram& pd, int cell) {
  GaugeBump bump;
  bump.cell = cell;
  bump.polygon = region_polygon_2d(cell_halfspaces(pd, cell), pd.box);
  if (bump.polygon.size() < 3 || polygon_area(bump.polygon) == 0)
    throw EmptyCell("full-revelation cell has no interior to dent");
  bump.anchor = polygon_centroid(bump.polygon);

  const int n = static_cast<int>(bump.polygon.size());
  Rat max_grad2(0);
  for (int i = 0; i < n; ++i) {
    const Vec& p = bump.polygon[i];
    const Vec& q = bump.polygon[(i + 1) % n];
    const Vec edge = vsub(q, p);
    const Vec normal{edge[1], Rat(-edge[0])};  // outward for a CCW polygon
    const Rat offset = vdot(normal, vsub(p, bump.anchor));
    if (sgn(offset) <= 0)
      throw std::logic_error("polygon centroid must be strictly interior");
    Vec grad = vscale(Rat(1) / offset, normal);
    const Rat g2 = vnorm2(grad);
    if (g2 > max_grad2) max_grad2 = g2;
    bump.edge_gradients.push_back(std::move(grad));
  }

  // Cap the scale so the dent's boundary slope stays below half of every
  // wall kink of the lift (kink across cells A,B is 2|s_A - s_B|); then the
  // price remains convex in the continuum, not only on the grid.
  Rat cap(1);
  for (int j = 0; j < pd.size(); ++j) {
    if (j == cell) continue;
    const Rat kink = sqrt_lower(vnorm2(vsub(pd.sites[j], pd.sites[cell])));
    const Rat bound = kink / (2 * sqrt_upper(max_grad2));
    if (bound < cap) cap = bound;
  }
  if (sgn(cap) <= 0) throw std::logic_error("distinct sites give a positive cap");
  bump.scale = coarse_floor(cap);
  bump.lipschitz = 2 * bump.scale * sqrt_upper(max_grad2);
  return bump;
}

struct SupportSet {
  std::vector<Vec> points;   // distinct atom locations, first-seen order
  std::vector<Rat> masses;   // accumulated nu mass per point
};

SupportSet collect_support(const DiscreteMeasure& nu) {
  SupportSet s;
  std::map<Vec, int> index;
  for (const Atom& a : nu.atoms()) {
    auto [it, fresh] = index.emplace(a.point, static_cast<int>(s.points.size()));
    if (fresh) {
      s.points.push_back(a.point);
      s.masses.push_back(a.mass);
    } else {
      s.masses[it->second] += a.mass;
    }
  }
  return s;
}

// Positive-mass grid atoms in block order.
struct GridAtoms {
  std::vector<Vec> points;
  std::vector<Rat> masses;
};

GridAtoms positive_grid_atoms(const GridMeasure& mu) {
  GridAtoms g;
  for (int c = 0; c < mu.num_cells(); ++c) {
    if (sgn(mu.mass(c)) == 0) continue;
    g.points.push_back(mu.cell_center(c));
    g.masses.push_back(mu.mass(c));
  }
  return g;
}

// The reduced fusion program: every source atom splits its mass over the
// support points, each support point receives mass with barycenter exactly
// there. Coupling rows are the per-target moment conditions (2 per target),
// plus an optional trailing value-pinning row.
BlockTransportLp reduced_fusion_program(const GridAtoms& src, const SupportSet& sup,
                                        const std::vector<Rat>& cost_per_target,
                                        const Rat* pin_value,
                                        const std::vector<Rat>* pin_coeffs) {
  const int m = static_cast<int>(sup.points.size());
  const int dim = static_cast<int>(sup.points.empty() ? 0 : sup.points[0].size());
  const int rows = m * dim + (pin_value != nullptr ? 1 : 0);
  BlockTransportLp prog(rows);
  for (int j = 0; j < m; ++j)
    for (int c = 0; c < dim; ++c) prog.set_coupling(j * dim + c, RowSense::EQ, Rat(0));
  if (pin_value != nullptr) prog.set_coupling(m * dim, RowSense::EQ, *pin_value);

  std::vector<int> nearest;
  for (int i = 0; i < static_cast<int>(src.points.size()); ++i) {
    const int b = prog.add_block();
    int best = 0;
    Rat best_d;
    for (int j = 0; j < m; ++j) {
      BlockChoice ch;
      for (int c = 0; c < dim; ++c)
        ch.coupling.emplace_back(j * dim + c,
                                 src.masses[i] * (src.points[i][c] - sup.points[j][c]));
      if (pin_value != nullptr)
        ch.coupling.emplace_back(m * dim, src.masses[i] * (*pin_coeffs)[j]);
      ch.cost = src.masses[i] * cost_per_target[j];
      prog.add_choice(b, ch);
      const Rat d = vnorm2(vsub(src.points[i], sup.points[j]));
      if (j == 0 || d < best_d) {
        best_d = d;
        best = j;
      }
    }
    nearest.push_back(best);
  }
  prog.seed_proposal(std::move(nearest));
  return prog;
}

DiscreteMeasure extract_lambda(const Box& box, const SupportSet& sup,
                               const GridAtoms& src,
                               const BlockTransportLp::Result& res) {
  std::vector<Rat> lam(sup.points.size(), Rat(0));
  for (int b = 0; b < static_cast<int>(src.points.size()); ++b)
    for (const auto& [choice, weight] : res.weights[b])
      lam[choice] += src.masses[b] * weight;
  std::vector<Atom> atoms;
  for (std::size_t j = 0; j < lam.size(); ++j)
    if (sgn(lam[j]) > 0) atoms.push_back({sup.points[j], lam[j]});
  return DiscreteMeasure(box, std::move(atoms));
}

}  // namespace

Rat GaugeBump::gauge(const Vec& x) const {
  const Vec z = vsub(x, anchor);
  Rat best(0);
  for (const Vec& g : edge_gradients) {
    const Rat v = vdot(g, z);
    if (v > best) best = v;
  }
  return best;
}

Rat GaugeBump::value(const Vec& x) const {
  const Rat g = gauge(x);
  if (g > 1) return Rat(0);
  return scale * (g * g - 1);
}

Rat ExposureCertificate::price(const Vec& x) const {
  Rat v = lifting.eval(x).first;
  for (const GaugeBump& b : bumps) v += b.value(x);
  return v;
}

Rat ExposureCertificate::u(const Vec& x) const {
  bool first = true;
  Rat best(0);
  for (const Vec& s : support_points) {
    const Rat d = vnorm2(vsub(x, s));
    if (first || d < best) {
      best = d;
      first = false;
    }
  }
  return price(x) - sqrt_lower(best);
}

ExposureCertificate build_certificate(const GridMeasure& mu, const DiscreteMeasure& nu,
                                      const PowerDiagram& pd,
                                      const std::vector<int>& full_revelation_cells,
                                      int probe_count, std::uint64_t probe_seed) {
  const int k = pd.size();
  if (mu.box().dim() != pd.box.dim() || !veq(mu.box().lo, pd.box.lo) ||
      !veq(mu.box().hi, pd.box.hi))
    throw PreconditionFailed("diagram and prior live on different boxes");
  if (probe_count < 1) throw PreconditionFailed("need at least one uniqueness probe");

  ExposureCertificate cert;
  cert.diagram = pd;
  cert.lifting = lift(pd);
  cert.modes.assign(k, CellMode::Pooling);
  for (int idx : full_revelation_cells) {
    if (idx < 0 || idx >= k)
      throw PreconditionFailed("full-revelation index outside the diagram");
    cert.modes[idx] = CellMode::FullRevelation;
  }
  cert.probe_seed = probe_seed;

  // Partition the prior and the fusion by diagram cell (ties to the lowest
  // cell on both sides, so walls are handled consistently).
  const std::vector<int> owner = pd.assign(mu);
  std::vector<std::vector<Rat>> cell_masses(k,
                                            std::vector<Rat>(mu.num_cells(), Rat(0)));
  for (int c = 0; c < mu.num_cells(); ++c) cell_masses[owner[c]][c] = mu.mass(c);
  std::vector<std::vector<Atom>> cell_atoms(k);
  for (const Atom& a : nu.atoms()) {
    if (!mu.box().contains(a.point))
      throw OutOfDomain("fusion atom outside the prior's box");
    cell_atoms[pd.cell_of(a.point)].push_back(a);
  }

  for (int p = 0; p < k; ++p) {
    const GridMeasure mu_p = mu.with_masses(std::vector<Rat>(cell_masses[p]));
    Rat cell_mass(0);
    for (const Rat& m : cell_masses[p]) cell_mass += m;
    if (sgn(cell_mass) == 0) throw EmptyCell("diagram cell carries no prior mass");
    if (cell_atoms[p].empty())
      throw Eq1Violated("a diagram cell carries prior mass but no fusion mass");
    const DiscreteMeasure nu_p(mu.box(), std::vector<Atom>(cell_atoms[p]));
    if (cert.modes[p] == CellMode::FullRevelation) {
      if (!measures_equal(nu_p, mu_p.positive_atoms()))
        throw Eq1Violated("full-revelation cell does not reproduce the prior");
    } else {
      if (!check_convex_order(mu_p, nu_p).dominated)
        throw Eq1Violated("pooling cell restriction is not dominated");
    }
  }

  // Dents on full-revelation cells: start at the continuum-safe scale, then
  // shrink until midpoint convexity holds across all grid atom pairs.
  for (int p = 0; p < k; ++p)
    if (cert.modes[p] == CellMode::FullRevelation) cert.bumps.push_back(make_bump(pd, p));
  if (!cert.bumps.empty()) {
    std::vector<Vec> pts;
    for (int c = 0; c < mu.num_cells(); ++c) pts.push_back(mu.cell_center(c));
    const int n = static_cast<int>(pts.size());
    std::vector<Rat> lift_val(n);
    for (int i = 0; i < n; ++i) lift_val[i] = cert.lifting.eval(pts[i]).first;
    // Dent values scale linearly, so evaluate the unit-scale dents once; the
    // search shrinks every dent by one shared multiplier (per-cell caps were
    // already folded into the initial scales).
    std::vector<std::vector<Rat>> dent_pt(cert.bumps.size(), std::vector<Rat>(n, Rat(0)));
    for (std::size_t bi = 0; bi < cert.bumps.size(); ++bi)
      for (int i = 0; i < n; ++i) {
        const Rat g = cert.bumps[bi].gauge(pts[i]);
        if (g <= 1) dent_pt[bi][i] = g * g - 1;
      }
    struct Mid {
      int a, b;
      Vec point;
    };
    std::vector<Mid> mids;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        mids.push_back({a, b, vscale(Rat(1, 2), vadd(pts[a], pts[b]))});
    std::vector<Rat> lift_mid(mids.size());
    std::vector<std::vector<Rat>> dent_mid(cert.bumps.size(),
                                           std::vector<Rat>(mids.size(), Rat(0)));
    for (std::size_t mi = 0; mi < mids.size(); ++mi) {
      lift_mid[mi] = cert.lifting.eval(mids[mi].point).first;
      for (std::size_t bi = 0; bi < cert.bumps.size(); ++bi) {
        const Rat g = cert.bumps[bi].gauge(mids[mi].point);
        if (g <= 1) dent_mid[bi][mi] = g * g - 1;
      }
    }
    Rat shrink(1);
    bool convex_ok = false;
    for (int round = 0; round < 60 && !convex_ok; ++round) {
      convex_ok = true;
      for (std::size_t mi = 0; mi < mids.size() && convex_ok; ++mi) {
        Rat mid_val = lift_mid[mi];
        Rat end_sum = lift_val[mids[mi].a] + lift_val[mids[mi].b];
        for (std::size_t bi = 0; bi < cert.bumps.size(); ++bi) {
          const Rat s = cert.bumps[bi].scale * shrink;
          mid_val += s * dent_mid[bi][mi];
          end_sum += s * (dent_pt[bi][mids[mi].a] + dent_pt[bi][mids[mi].b]);
        }
        if (2 * mid_val > end_sum) convex_ok = false;
      }
      if (!convex_ok) shrink /= 2;
    }
    if (!convex_ok)
      throw ConvexityBroken("no dent scale keeps the price midpoint-convex");
    for (GaugeBump& b : cert.bumps) {
      b.scale *= shrink;
      b.lipschitz *= shrink;
    }
  }

  // Exact duality bookkeeping. The price equals the lift on pooling cells
  // and dips below it inside full-revelation cells; u subtracts a certified
  // positive lower bound on the distance to the support set.
  const SupportSet sup = collect_support(nu);
  const int m = static_cast<int>(sup.points.size());
  cert.support_points = sup.points;
  for (int j = 0; j < m; ++j) cert.u_support.push_back(cert.price(sup.points[j]));
  cert.u_grid.resize(mu.num_cells());
  cert.dual_value = 0;
  for (int c = 0; c < mu.num_cells(); ++c) {
    const Vec x = mu.cell_center(c);
    Rat d2(0);
    bool first = true;
    for (const Vec& s : sup.points) {
      const Rat d = vnorm2(vsub(x, s));
      if (first || d < d2) {
        d2 = d;
        first = false;
      }
    }
    const Rat px = cert.price(x);
    cert.u_grid[c] = px - sqrt_lower(d2);
    cert.dual_value += mu.mass(c) * px;
  }
  cert.primal_value = 0;
  for (int j = 0; j < m; ++j) cert.primal_value += sup.masses[j] * cert.u_support[j];
  if (cert.primal_value != cert.dual_value)
    throw Eq1Violated("primal and dual integrals disagree");

  // Uniqueness. Every maximizer of u over fusions of mu must live on the
  // support set (the distance term is strictly positive elsewhere and the
  // price is convex), so probing the reduced program's optimal face with
  // random functionals covers the full feasible class.
  const GridAtoms src = positive_grid_atoms(mu);
  std::fprintf(stderr, "[expose] base solve...\n");
  const auto base =
      reduced_fusion_program(src, sup, cert.u_support, nullptr, nullptr).solve(true);
  std::fprintf(stderr, "[expose] base done, %d iterations\n", base.iterations);
  if (base.status != LpStatus::Optimal)
    throw std::logic_error("reduced fusion program must be solvable");
  if (base.objective != cert.primal_value)
    throw std::logic_error("reduced optimum must match the certified value");
  {
    const DiscreteMeasure top = extract_lambda(mu.box(), sup, src, base);
    if (!measures_equal(top, nu))
      throw NotUniqueWithWitness("another fusion attains the certified value", top);
  }
  DetRng rng(probe_seed);
  for (int probe = 0; probe < probe_count; ++probe) {
    std::vector<Rat> g(m);
    for (int j = 0; j < m; ++j)
      g[j] = Rat(static_cast<long>(rng.next_sym() * (1L << 20))) / (1L << 20);
    DiscreteMeasure extremes[2] = {nu, nu};
    for (int dir = 0; dir < 2; ++dir) {
      BlockTransportLp prog =
          reduced_fusion_program(src, sup, g, &cert.primal_value, &cert.u_support);
      for (const auto& s : base.support) prog.seed_proposal(s);
      const auto res = prog.solve(/*maximize=*/dir == 0);
      std::fprintf(stderr, "[expose] probe %d dir %d done, %d iterations\n", probe, dir,
                   res.iterations);
      if (res.status != LpStatus::Optimal)
        throw std::logic_error("optimal-face probe must stay feasible");
      extremes[dir] = extract_lambda(mu.box(), sup, src, res);
    }
    for (int dir = 0; dir < 2; ++dir)
      if (!measures_equal(extremes[dir], nu))
        throw NotUniqueWithWitness("uniqueness probe found a second optimizer",
                                   extremes[dir]);
  }
  cert.unique = true;
  cert.valid = true;
  return cert;
}

Prop2Check check_prop2_condition(const GridMeasure& mu, const DiscreteMeasure& nu,
                                 const PowerDiagram& pd) {
  const int k = pd.size();
  const std::vector<int> owner = pd.assign(mu);
  std::vector<std::vector<int>> cell_sources(k);
  for (int c = 0; c < mu.num_cells(); ++c)
    if (sgn(mu.mass(c)) > 0) cell_sources[owner[c]].push_back(c);
  std::vector<std::vector<Atom>> cell_atoms(k);
  for (const Atom& a : nu.atoms()) {
    if (!mu.box().contains(a.point))
      throw OutOfDomain("fusion atom outside the prior's box");
    cell_atoms[pd.cell_of(a.point)].push_back(a);
  }

  for (int p = 0; p < k; ++p) {
    const int na = static_cast<int>(cell_sources[p].size());
    const int ns = static_cast<int>(cell_atoms[p].size());
    if (na == 0 && ns == 0) continue;
    std::vector<Rat> masses(mu.num_cells(), Rat(0));
    for (int c : cell_sources[p]) masses[c] = mu.mass(c);
    const GridMeasure mu_p = mu.with_masses(std::move(masses));
    if (ns == 0 || na == 0 ||
        !check_convex_order(mu_p, DiscreteMeasure(mu.box(),
                                                  std::vector<Atom>(cell_atoms[p])))
             .dominated)
      throw PreconditionFailed("nu itself violates the per-cell condition");

    std::vector<Vec> targets;
    for (const Atom& a : cell_atoms[p]) targets.push_back(a.point);
    if (affinely_independent(targets)) continue;  // weights are forced

    // Extremize each support mass over per-cell transports; any value away
    // from nu's mass yields a competing lambda.
    const int dim = mu.box().dim();
    auto var = [&](int a, int s) { return a * ns + s; };
    for (int t = 0; t < ns; ++t)
      for (int want_max = 0; want_max < 2; ++want_max) {
        LinearProgram lp(na * ns);
        lp.maximize = want_max == 1;
        for (int a = 0; a < na; ++a) lp.objective[var(a, t)] = Rat(1);
        for (int a = 0; a < na; ++a) {
          Vec row(na * ns, Rat(0));
          for (int s = 0; s < ns; ++s) row[var(a, s)] = Rat(1);
          lp.add_row(std::move(row), RowSense::EQ, mu.mass(cell_sources[p][a]));
        }
        for (int s = 0; s < ns; ++s)
          for (int axis = 0; axis < dim; ++axis) {
            Vec row(na * ns, Rat(0));
            for (int a = 0; a < na; ++a)
              row[var(a, s)] =
                  mu.cell_center(cell_sources[p][a])[axis] - targets[s][axis];
            lp.add_row(std::move(row), RowSense::EQ, Rat(0));
          }
        const auto sol = lp_solve(lp, LpMode::Rational);
        if (sol.status != LpStatus::Optimal)
          throw std::logic_error("per-cell search must stay feasible");
        if (sol.objective == cell_atoms[p][t].mass) continue;

        std::vector<Atom> atoms;
        for (int q = 0; q < k; ++q) {
          if (q == p) continue;
          for (const Atom& a : cell_atoms[q]) atoms.push_back(a);
        }
        for (int s = 0; s < ns; ++s) {
          Rat lam(0);
          for (int a = 0; a < na; ++a) lam += sol.primal[var(a, s)];
          if (sgn(lam) > 0) atoms.push_back({targets[s], lam});
        }
        Prop2Check out;
        out.holds = false;
        out.witness = DiscreteMeasure(mu.box(), std::move(atoms));
        return out;
      }
  }
  Prop2Check out;
  out.holds = true;
  return out;
}

ConvexIndependenceCheck necessary_convex_independence(const GridMeasure& mu,
                                                      const DiscreteMeasure& nu) {
  ConvexIndependenceCheck out;
  const SupportSet sup = collect_support(nu);

  if (convexly_independent(sup.points)) {
    out.passes = true;
    out.diagram = PowerDiagram({mu.box().center()}, {Rat(0)}, mu.box());
    out.note = "the whole support is convexly independent (trivial diagram)";
    return out;
  }

  const DiscoveredPartition disc = discover_partition(mu, nu);
  if (!disc.separated) {
    out.note =
        "support is convexly dependent and no nontrivial partition was discovered";
    return out;
  }
  std::optional<PowerDiagram> fitted;
  try {
    fitted = fit_any_power_diagram(disc.partition, mu.box(), &mu);
  } catch (const PreconditionFailed&) {
    fitted.reset();
  }
  if (!fitted) {
    out.note =
        "support is convexly dependent and the discovered partition admits no "
        "power diagram";
    return out;
  }
  std::vector<std::vector<Vec>> per_cell(fitted->size());
  for (const Vec& pt : sup.points) per_cell[fitted->cell_of(pt)].push_back(pt);
  for (int p = 0; p < fitted->size(); ++p)
    if (!per_cell[p].empty() && !convexly_independent(per_cell[p])) {
      out.note = "the fitted diagram leaves a cell's support convexly dependent";
      return out;
    }
  out.passes = true;
  out.diagram = std::move(fitted);
  out.note = "a diagram fitted to the discovered partition certifies independence";
  return out;
}

}  // namespace fusion
