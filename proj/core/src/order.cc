// order.cc - Convex-order dominance, barycentric decomposition, and signed
// mass shifts. Dominance is a block transport program (one block per source
// atom, coupled by per-target mass and moment rows); infeasibility rays turn
// into max-of-affine convex witnesses. Shifts are small dense LPs minimizing
// total variation, guarded by a certified common-interior ball.

#include "fusion/order.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "fusion/colgen.hpp"
#include "fusion/errors.hpp"

namespace fusion {
namespace {

struct AtomList {
  std::vector<Vec> points;
  std::vector<Rat> masses;

  int size() const { return static_cast<int>(points.size()); }
  Rat total() const {
    Rat s = 0;
    for (const Rat& m : masses) s += m;
    return s;
  }
};

AtomList atom_list(const DiscreteMeasure& m) {
  AtomList out;
  for (const Atom& a : m.atoms()) {
    if (a.mass < 0) throw PreconditionFailed("order operations need positive measures");
    out.points.push_back(a.point);
    out.masses.push_back(a.mass);
  }
  return out;
}

// Positive-mass grid cells; `cells` records their flat indices for scatter.
AtomList atom_list(const GridMeasure& g, std::vector<int>* cells = nullptr) {
  AtomList out;
  for (int c = 0; c < g.num_cells(); ++c) {
    if (g.mass(c) == 0) continue;
    if (g.mass(c) < 0) throw PreconditionFailed("order operations need positive measures");
    out.points.push_back(g.cell_center(c));
    out.masses.push_back(g.mass(c));
    if (cells) cells->push_back(c);
  }
  return out;
}

ConvexWitness constant_witness(int dim, const Rat& value) {
  ConvexWitness w;
  w.gradients = {Vec(dim, Rat(0))};
  w.intercepts = {value};
  return w;
}

// Feasibility (or minimum squared displacement) of the transport program:
// one block per source atom choosing a target; target j owns a mass row and
// one moment row per coordinate.
OrderVerdict transport_verdict(const AtomList& mu, const AtomList& nu, bool min_cost) {
  OrderVerdict out;
  const Rat mu_total = mu.total();
  const Rat nu_total = nu.total();
  const int dim = !mu.points.empty() ? static_cast<int>(mu.points[0].size())
                 : !nu.points.empty() ? static_cast<int>(nu.points[0].size())
                                      : 0;
  if (mu_total != nu_total) {
    out.dominated = false;
    out.witness = constant_witness(dim, nu_total > mu_total ? Rat(1) : Rat(-1));
    return out;
  }
  if (nu.points.empty()) {  // both measures are zero
    out.dominated = true;
    out.kernel = TransportKernel{};
    return out;
  }

  const int m = nu.size();
  BlockTransportLp prog(m * (dim + 1));
  for (int j = 0; j < m; ++j) {
    prog.set_coupling(j * (dim + 1), RowSense::EQ, nu.masses[j]);
    for (int c = 0; c < dim; ++c)
      prog.set_coupling(j * (dim + 1) + 1 + c, RowSense::EQ, nu.masses[j] * nu.points[j][c]);
  }
  for (int i = 0; i < mu.size(); ++i) {
    const int b = prog.add_block();
    for (int j = 0; j < m; ++j) {
      BlockChoice ch;
      ch.coupling.emplace_back(j * (dim + 1), mu.masses[i]);
      for (int c = 0; c < dim; ++c)
        ch.coupling.emplace_back(j * (dim + 1) + 1 + c, mu.masses[i] * mu.points[i][c]);
      if (min_cost) ch.cost = mu.masses[i] * vnorm2(vsub(mu.points[i], nu.points[j]));
      prog.add_choice(b, ch);
    }
  }

  const auto res = prog.solve(/*maximize=*/false);
  if (res.status == LpStatus::Optimal) {
    TransportKernel k;
    k.sources = mu.points;
    k.source_masses = mu.masses;
    k.targets = nu.points;
    k.target_masses = nu.masses;
    k.flow.assign(mu.size(), std::vector<Rat>(m, Rat(0)));
    for (int b = 0; b < mu.size(); ++b)
      for (const auto& [choice, weight] : res.weights[b])
        k.flow[b][choice] += mu.masses[b] * weight;
    out.dominated = true;
    out.kernel = std::move(k);
    return out;
  }

  // Infeasible: the ray's per-target entries define affine pieces whose
  // pointwise maximum (negated) integrates strictly larger against nu.
  ConvexWitness w;
  for (int j = 0; j < m; ++j) {
    Vec grad(dim);
    for (int c = 0; c < dim; ++c) grad[c] = -res.farkas[j * (dim + 1) + 1 + c];
    w.gradients.push_back(std::move(grad));
    w.intercepts.push_back(-res.farkas[j * (dim + 1)]);
  }
  Rat gap = w.integral(nu.points, nu.masses) - w.integral(mu.points, mu.masses);
  if (gap <= 0) throw std::logic_error("infeasibility ray failed to separate the measures");
  out.dominated = false;
  out.witness = std::move(w);
  return out;
}

// Largest mass of a submeasure of `m` with barycenter exactly c (zero when
// c is outside the support's hull).
Rat max_submass(const AtomList& m, const Vec& c) {
  LinearProgram lp(m.size());
  for (int p = 0; p < m.size(); ++p) {
    lp.set_upper(p, m.masses[p]);
    lp.objective[p] = 1;
  }
  lp.maximize = true;
  const int dim = static_cast<int>(c.size());
  for (int axis = 0; axis < dim; ++axis) {
    Vec row(m.size());
    for (int p = 0; p < m.size(); ++p) row[p] = m.points[p][axis] - c[axis];
    lp.add_row(std::move(row), RowSense::EQ, 0);
  }
  const auto sol = lp_solve(lp, LpMode::Rational);
  if (sol.status != LpStatus::Optimal)
    throw std::logic_error("submeasure program must be feasible (zero is)");
  return sol.objective;
}

Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

}  // namespace

Rat ConvexWitness::eval(const Vec& x) const {
  Rat best = intercepts[0] + vdot(gradients[0], x);
  for (std::size_t p = 1; p < gradients.size(); ++p) {
    Rat v = intercepts[p] + vdot(gradients[p], x);
    if (v > best) best = v;
  }
  return best;
}

Rat ConvexWitness::integral(const std::vector<Vec>& points,
                            const std::vector<Rat>& masses) const {
  Rat acc = 0;
  for (std::size_t i = 0; i < points.size(); ++i) acc += masses[i] * eval(points[i]);
  return acc;
}

Rat ConvexWitness::gap(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
  const AtomList a = atom_list(mu);
  const AtomList b = atom_list(nu);
  return integral(b.points, b.masses) - integral(a.points, a.masses);
}

bool TransportKernel::rows_match() const {
  for (std::size_t i = 0; i < sources.size(); ++i) {
    Rat s = 0;
    for (const Rat& f : flow[i]) s += f;
    if (s != source_masses[i]) return false;
  }
  return true;
}

bool TransportKernel::cols_match() const {
  for (std::size_t j = 0; j < targets.size(); ++j) {
    Rat s = 0;
    for (std::size_t i = 0; i < sources.size(); ++i) s += flow[i][j];
    if (s != target_masses[j]) return false;
  }
  return true;
}

bool TransportKernel::barycenters_match() const {
  for (std::size_t j = 0; j < targets.size(); ++j) {
    Vec moment(targets[j].size(), Rat(0));
    for (std::size_t i = 0; i < sources.size(); ++i)
      moment = vadd(moment, vscale(flow[i][j], sources[i]));
    if (!veq(moment, vscale(target_masses[j], targets[j]))) return false;
  }
  return true;
}

OrderVerdict check_convex_order(const GridMeasure& mu, const DiscreteMeasure& nu) {
  OrderVerdict v = transport_verdict(atom_list(mu), atom_list(nu), /*min_cost=*/false);
  v.resolution = mu.resolution();
  return v;
}

OrderVerdict check_convex_order(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return transport_verdict(atom_list(mu), atom_list(nu), /*min_cost=*/false);
}

std::vector<GridMeasure> cartier_decompose(const GridMeasure& mu,
                                           const DiscreteMeasure& nu) {
  std::vector<int> cells;
  const AtomList src = atom_list(mu, &cells);
  const AtomList tgt = atom_list(nu);
  if (src.total() != tgt.total())
    throw MassMismatch("decomposition needs equal total masses");
  const OrderVerdict v = transport_verdict(src, tgt, /*min_cost=*/true);
  if (!v.dominated)
    throw NotDominated("target is not dominated in the convex order; no decomposition");
  std::vector<GridMeasure> components;
  for (int j = 0; j < tgt.size(); ++j) {
    std::vector<Rat> masses(mu.num_cells(), Rat(0));
    for (int i = 0; i < src.size(); ++i) masses[cells[i]] = v.kernel->flow[i][j];
    components.push_back(mu.with_masses(std::move(masses)));
  }
  return components;
}

std::optional<InteriorBall> common_interior(const std::vector<Vec>& support_a,
                                            const std::vector<Vec>& support_b,
                                            const Rat& margin) {
  if (support_a.empty() || support_b.empty()) return std::nullopt;
  const int dim = static_cast<int>(support_a[0].size());
  const int na = static_cast<int>(support_a.size());
  const int nb = static_cast<int>(support_b.size());
  // Variables: center y (free), radius t, then hull weights for each of the
  // 2*dim offset points y +/- t e_axis against each hull.
  const int offsets = 2 * dim;
  LinearProgram lp(dim + 1 + offsets * (na + nb));
  for (int c = 0; c < dim; ++c) lp.free_var(c);
  lp.objective[dim] = 1;
  lp.maximize = true;

  int base = dim + 1;
  for (int k = 0; k < offsets; ++k) {
    const int axis = k / 2;
    const Rat sign = (k % 2 == 0) ? Rat(1) : Rat(-1);
    for (const auto* hull : {&support_a, &support_b}) {
      const int count = static_cast<int>(hull->size());
      for (int c = 0; c < dim; ++c) {
        Vec row(lp.num_vars(), Rat(0));
        for (int p = 0; p < count; ++p) row[base + p] = (*hull)[p][c];
        row[c] = -1;
        if (c == axis) row[dim] = -sign;
        lp.add_row(std::move(row), RowSense::EQ, 0);
      }
      Vec conv(lp.num_vars(), Rat(0));
      for (int p = 0; p < count; ++p) conv[base + p] = 1;
      lp.add_row(std::move(conv), RowSense::EQ, 1);
      base += count;
    }
  }

  const auto sol = lp_solve(lp);
  if (sol.status != LpStatus::Optimal) return std::nullopt;
  // The 2*dim offset points span a cross-polytope containing the Euclidean
  // ball of radius t / sqrt(dim); divide by an upper bound to stay valid.
  const Rat radius = sol.objective / sqrt_upper(Rat(dim));
  if (radius <= margin) return std::nullopt;
  InteriorBall ball;
  ball.center.assign(sol.primal.begin(), sol.primal.begin() + dim);
  ball.radius = radius;
  return ball;
}

Rat shift_mass_bound(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                     const Vec& d, const Rat& margin) {
  const AtomList a1 = atom_list(mu1);
  const AtomList a2 = atom_list(mu2);
  const auto ball = common_interior(a1.points, a2.points, margin);
  if (!ball) throw NoCommonInterior("support hulls share no interior point");
  const int dim = static_cast<int>(ball->center.size());

  // delta: ball around the center whose surrounding cube stays certified.
  Rat root = sqrt_upper(Rat(dim));
  if (root < 2) root = 2;
  const Rat delta = ball->radius / root;

  // Minimum guaranteed submeasure mass over the delta-ball: the max-submass
  // function is concave, so its minimum over the cube's corners bounds it.
  Rat min_mass = 0;
  bool first = true;
  for (int mask = 0; mask < (1 << dim); ++mask) {
    Vec corner = ball->center;
    for (int c = 0; c < dim; ++c)
      corner[c] += ((mask >> c) & 1) ? delta : Rat(-delta);
    const Rat m = std::min(max_submass(a1, corner), max_submass(a2, corner));
    if (first || m < min_mass) min_mass = m;
    first = false;
  }
  if (min_mass <= 0) return 0;

  Rat bound = min_mass / 2;
  const Rat dnorm = sqrt_upper(vnorm2(d));
  if (dnorm > 0) bound = std::min(bound, Rat(delta * min_mass / dnorm));
  const Rat znorm = sqrt_upper(vnorm2(ball->center));
  bound = std::min(bound, Rat(delta * min_mass / (znorm + delta)));
  return bound;
}

DiscreteMeasure shift_mass(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                           const Vec& d, const Rat& a, const Rat& eps,
                           const Rat& margin) {
  if (mu1.box().dim() != mu2.box().dim() ||
      static_cast<int>(d.size()) != mu1.box().dim())
    throw PreconditionFailed("dimension mismatch between measures and direction");
  if (eps < 0 || rat_abs(a) > eps)
    throw PreconditionFailed("need |a| <= eps and eps >= 0");
  const Rat bound = shift_mass_bound(mu1, mu2, d, margin);
  if (eps > bound) throw EpsTooLarge("eps exceeds the certified shift bound");

  const auto& from = mu1.atoms();  // negative part lives on mu1
  const auto& onto = mu2.atoms();  // positive part lives on mu2
  const int n2 = static_cast<int>(onto.size());
  const int n1 = static_cast<int>(from.size());
  const int dim = mu1.box().dim();

  LinearProgram lp(n2 + n1);
  for (int j = 0; j < n2; ++j) {
    lp.set_upper(j, onto[j].mass);
    lp.objective[j] = 1;
  }
  for (int i = 0; i < n1; ++i) {
    lp.set_upper(n2 + i, from[i].mass);
    lp.objective[n2 + i] = 1;
  }
  lp.maximize = false;

  Vec mass_row(n2 + n1, Rat(0));
  for (int j = 0; j < n2; ++j) mass_row[j] = 1;
  for (int i = 0; i < n1; ++i) mass_row[n2 + i] = -1;
  lp.add_row(std::move(mass_row), RowSense::EQ, a);
  for (int axis = 0; axis < dim; ++axis) {
    Vec row(n2 + n1, Rat(0));
    for (int j = 0; j < n2; ++j) row[j] = onto[j].point[axis];
    for (int i = 0; i < n1; ++i) row[n2 + i] = -from[i].point[axis];
    lp.add_row(std::move(row), RowSense::EQ, eps * d[axis]);
  }

  const auto sol = lp_solve(lp, LpMode::Rational);
  if (sol.status != LpStatus::Optimal)
    throw EpsTooLarge("shift program infeasible at the requested eps");

  Vec jlo(dim), jhi(dim);
  for (int c = 0; c < dim; ++c) {
    jlo[c] = std::min(mu1.box().lo[c], mu2.box().lo[c]);
    jhi[c] = std::max(mu1.box().hi[c], mu2.box().hi[c]);
  }
  const Box joint(std::move(jlo), std::move(jhi));
  std::vector<Atom> atoms;
  for (int j = 0; j < n2; ++j)
    if (sol.primal[j] != 0) atoms.push_back({onto[j].point, sol.primal[j]});
  for (int i = 0; i < n1; ++i)
    if (sol.primal[n2 + i] != 0) atoms.push_back({from[i].point, -sol.primal[n2 + i]});
  return DiscreteMeasure(joint, std::move(atoms), /*is_signed=*/true);
}

}  // namespace fusion
