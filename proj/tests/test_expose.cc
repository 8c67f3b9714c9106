// Tests for exposure certificates: exact duality bookkeeping, gauge dents on
// full-revelation cells, uniqueness probing with verified witnesses, the
// per-cell rigidity check, and the convex-independence necessary test.

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fusion/errors.hpp"
#include "fusion/expose.hpp"
#include "fusion/geom.hpp"
#include "fusion/measure.hpp"
#include "fusion/order.hpp"
#include "fusion/util.hpp"

using namespace fusion;

namespace {

Box wide_box() { return Box{{Rat(0), Rat(0)}, {Rat(2), Rat(1)}}; }
Box unit_box() { return Box{{Rat(0), Rat(0)}, {Rat(1), Rat(1)}}; }

// Splits the wide box at x = 1: lift is max(0, x1 - 1).
PowerDiagram worked_diagram() {
  return PowerDiagram({{Rat(0), Rat(0)}, {Rat(1, 2), Rat(0)}}, {Rat(0), Rat(-3, 4)},
                      wide_box());
}

PowerDiagram trivial_diagram(const Box& box) {
  return PowerDiagram({box.center()}, {Rat(0)}, box);
}

// Five-point contraction: the right half pools to its barycenter, each left
// quarter-rectangle spreads onto two horizontally offset atoms.
DiscreteMeasure five_point_contraction() {
  std::vector<Atom> atoms = {
      {{Rat(3, 8), Rat(1, 4)}, Rat(1, 8)}, {{Rat(5, 8), Rat(1, 4)}, Rat(1, 8)},
      {{Rat(3, 8), Rat(3, 4)}, Rat(1, 8)}, {{Rat(5, 8), Rat(3, 4)}, Rat(1, 8)},
      {{Rat(3, 2), Rat(1, 2)}, Rat(1, 2)},
  };
  return DiscreteMeasure(wide_box(), std::move(atoms));
}

// Four-point contraction with three collinear atoms on the left half.
DiscreteMeasure collinear_contraction() {
  std::vector<Atom> atoms = {
      {{Rat(3, 2), Rat(1, 2)}, Rat(1, 2)},
      {{Rat(1, 2), Rat(1, 4)}, Rat(1, 4)},
      {{Rat(1, 2), Rat(7, 10)}, Rat(1, 8)},
      {{Rat(1, 2), Rat(4, 5)}, Rat(1, 8)},
  };
  return DiscreteMeasure(wide_box(), std::move(atoms));
}

// Reveals the left cell atom-for-atom and pools the right half.
DiscreteMeasure half_revelation(const GridMeasure& mu) {
  std::vector<Atom> atoms;
  for (int c = 0; c < mu.num_cells(); ++c) {
    const Vec x = mu.cell_center(c);
    if (x[0] < 1) atoms.push_back({x, mu.mass(c)});
  }
  atoms.push_back({{Rat(3, 2), Rat(1, 2)}, Rat(1, 2)});
  return DiscreteMeasure(wide_box(), std::move(atoms));
}

bool supported_on(const DiscreteMeasure& lam, const DiscreteMeasure& nu) {
  for (const Atom& a : lam.atoms()) {
    bool found = false;
    for (const Atom& b : nu.atoms())
      if (veq(a.point, b.point)) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

// Voronoi pooling of the prior onto a few distinct grid centers.
DiscreteMeasure random_pooling(const GridMeasure& mu, DetRng& rng) {
  const int r = 1 + static_cast<int>(rng.next_below(5));
  std::vector<int> picked;
  while (static_cast<int>(picked.size()) < r) {
    const int c = static_cast<int>(rng.next_below(mu.num_cells()));
    if (std::find(picked.begin(), picked.end(), c) == picked.end()) picked.push_back(c);
  }
  std::vector<Vec> sites;
  for (int c : picked) sites.push_back(mu.cell_center(c));
  const PowerDiagram pd(std::move(sites), std::vector<Rat>(r, Rat(0)), mu.box());
  const std::vector<int> owner = pd.assign(mu);
  std::vector<Rat> mass(r, Rat(0));
  std::vector<Vec> moment(r, Vec(mu.box().dim(), Rat(0)));
  for (int c = 0; c < mu.num_cells(); ++c) {
    mass[owner[c]] += mu.mass(c);
    moment[owner[c]] = vadd(moment[owner[c]], vscale(mu.mass(c), mu.cell_center(c)));
  }
  std::vector<Atom> atoms;
  for (int j = 0; j < r; ++j)
    if (sgn(mass[j]) > 0) atoms.push_back({vscale(Rat(1) / mass[j], moment[j]), mass[j]});
  return DiscreteMeasure(mu.box(), std::move(atoms));
}

}  // namespace

TEST_CASE("convex independence is weaker than affine independence") {
  const Vec a{Rat(0), Rat(0)}, b{Rat(1), Rat(0)}, c{Rat(0), Rat(1)}, d{Rat(1), Rat(1)};
  CHECK(convexly_independent({a, b, c, d}));       // square corners
  CHECK_FALSE(affinely_independent({a, b, c, d}));
  CHECK_FALSE(convexly_independent({a, b, {Rat(1, 2), Rat(0)}}));  // collinear
  CHECK_FALSE(convexly_independent({a, a}));                       // duplicates
  CHECK(convexly_independent({a}));
}

TEST_CASE("the worked two-cell certificate pins the exposed value exactly") {
  const GridMeasure mu = GridMeasure::uniform(wide_box(), {8, 4});
  const DiscreteMeasure nu = five_point_contraction();
  const ExposureCertificate cert = build_certificate(mu, nu, worked_diagram(), {});

  CHECK(cert.valid);
  CHECK(cert.unique);
  CHECK(cert.primal_value == Rat(1, 4));
  CHECK(cert.dual_value == Rat(1, 4));
  CHECK(cert.bumps.empty());
  REQUIRE(cert.modes.size() == 2);
  CHECK(cert.modes[0] == CellMode::Pooling);
  CHECK(cert.modes[1] == CellMode::Pooling);

  // Without dents the price is the lift, so u equals it on the support and
  // sits strictly below it on every other grid atom.
  REQUIRE(cert.support_points.size() == 5);
  for (std::size_t j = 0; j < cert.support_points.size(); ++j)
    CHECK(cert.u_support[j] == cert.lifting.eval(cert.support_points[j]).first);
  for (int c = 0; c < mu.num_cells(); ++c)
    CHECK(cert.u_grid[c] < cert.price(mu.cell_center(c)));
}

TEST_CASE("pooling everything to the barycenter is certified unique") {
  const GridMeasure mu = GridMeasure::uniform(unit_box(), {4, 4});
  const DiscreteMeasure nu(unit_box(), {Atom{mu.barycenter_point(), mu.total_mass()}});
  const ExposureCertificate cert = build_certificate(mu, nu, trivial_diagram(unit_box()), {});
  CHECK(cert.valid);
  CHECK(cert.unique);
  CHECK(cert.primal_value == cert.dual_value);
  CHECK(cert.support_points.size() == 1);
}

TEST_CASE("collinear support raises a verified non-uniqueness witness") {
  const GridMeasure mu = GridMeasure::uniform(wide_box(), {16, 8});
  const DiscreteMeasure nu = collinear_contraction();
  bool threw = false;
  try {
    build_certificate(mu, nu, trivial_diagram(wide_box()), {});
  } catch (const NotUniqueWithWitness& e) {
    threw = true;
    const DiscreteMeasure& w = e.counterexample;
    CHECK(supported_on(w, nu));
    CHECK_FALSE(measures_equal(w, nu));
    CHECK(check_convex_order(mu, w).dominated);
  }
  CHECK(threw);
}

TEST_CASE("full revelation cells get dented prices and stay certified") {
  const GridMeasure mu = GridMeasure::uniform(wide_box(), {6, 4});
  const DiscreteMeasure nu = half_revelation(mu);
  const ExposureCertificate cert = build_certificate(mu, nu, worked_diagram(), {0});

  CHECK(cert.valid);
  CHECK(cert.unique);
  CHECK(cert.primal_value == cert.dual_value);
  REQUIRE(cert.modes.size() == 2);
  CHECK(cert.modes[0] == CellMode::FullRevelation);
  CHECK(cert.modes[1] == CellMode::Pooling);

  REQUIRE(cert.bumps.size() == 1);
  const GaugeBump& bump = cert.bumps[0];
  CHECK(bump.cell == 0);
  CHECK(polygon_area(bump.polygon) == 1);  // the left unit square
  CHECK(veq(bump.anchor, Vec{Rat(1, 2), Rat(1, 2)}));
  // The wall kink is 2 |s1 - s0| = 1 and the gauge slope is 2, so the cap is
  // 1/8 up to the conservative square-root rounding.
  CHECK(bump.scale > Rat(1, 9));
  CHECK(bump.scale <= Rat(1, 8));
  CHECK(bump.lipschitz > 0);
  CHECK(bump.gauge(bump.anchor) == 0);
  CHECK(bump.value(bump.anchor) == -bump.scale);
  for (const Vec& v : bump.polygon) CHECK(bump.value(v) == 0);
  CHECK(bump.value(Vec{Rat(3, 2), Rat(1, 2)}) == 0);

  // The dent pulls the price strictly below the lift inside the cell.
  const Vec inside{Rat(1, 2), Rat(5, 8)};
  CHECK(cert.price(inside) < cert.lifting.eval(inside).first);
  for (std::size_t j = 0; j < cert.support_points.size(); ++j)
    CHECK(cert.u_support[j] == cert.price(cert.support_points[j]));
}

TEST_CASE("the certified dual value bounds every pooled fusion exactly") {
  const GridMeasure mu = GridMeasure::uniform(wide_box(), {6, 4});
  const ExposureCertificate cert =
      build_certificate(mu, half_revelation(mu), worked_diagram(), {0});
  DetRng rng(0x5eedf00dULL);
  for (int trial = 0; trial < 100; ++trial) {
    const DiscreteMeasure lam = random_pooling(mu, rng);
    Rat value(0);
    for (const Atom& a : lam.atoms()) value += a.mass * cert.u(a.point);
    CHECK(value <= cert.dual_value);
  }
}

TEST_CASE("translating the instance shifts both integrals by the same amount") {
  const GridMeasure mu = GridMeasure::uniform(wide_box(), {8, 4});
  const ExposureCertificate cert =
      build_certificate(mu, five_point_contraction(), worked_diagram(), {});

  const Vec t{Rat(1, 4), Rat(0)};
  const Box box2{vadd(wide_box().lo, t), vadd(wide_box().hi, t)};
  const GridMeasure mu2 = GridMeasure::uniform(box2, {8, 4});
  std::vector<Atom> atoms2;
  for (const Atom& a : five_point_contraction().atoms())
    atoms2.push_back({vadd(a.point, t), a.mass});
  const PowerDiagram pd2({{Rat(1, 4), Rat(0)}, {Rat(3, 4), Rat(0)}},
                         {Rat(0), Rat(-3, 4)}, box2);
  const ExposureCertificate cert2 =
      build_certificate(mu2, DiscreteMeasure(box2, std::move(atoms2)), pd2, {});

  CHECK(cert2.valid);
  CHECK(cert2.unique);
  // Shifting sites and data by t changes the lift by 2 t.x + |t|^2 minus a
  // translation, so both integrals move by 2 t.bary + |t|^2 = 9/16.
  CHECK(cert2.primal_value == cert.primal_value + Rat(9, 16));
  CHECK(cert2.dual_value == cert.dual_value + Rat(9, 16));
}

TEST_CASE("the exposing objective stays within the price's slope budget") {
  const GridMeasure mu = GridMeasure::uniform(wide_box(), {6, 4});
  const ExposureCertificate cert =
      build_certificate(mu, half_revelation(mu), worked_diagram(), {0});
  double lip_price = 0, lip_u = 0;
  for (int i = 0; i < mu.num_cells(); ++i)
    for (int j = i + 1; j < mu.num_cells(); ++j) {
      const Vec xi = mu.cell_center(i), xj = mu.cell_center(j);
      const double d = vnorm(vsub(xi, xj));
      lip_price = std::max(
          lip_price, std::abs(to_double(Rat(cert.price(xi) - cert.price(xj)))) / d);
      lip_u = std::max(lip_u,
                       std::abs(to_double(Rat(cert.u_grid[i] - cert.u_grid[j]))) / d);
    }
  CHECK(lip_u <= lip_price + 1.0 + 1e-6);
}

TEST_CASE("per-cell rigidity holds for the worked instance") {
  const GridMeasure mu = GridMeasure::uniform(wide_box(), {8, 4});
  const Prop2Check res = check_prop2_condition(mu, five_point_contraction(), worked_diagram());
  CHECK(res.holds);
  CHECK_FALSE(res.witness.has_value());
}

TEST_CASE("per-cell rigidity trivially holds for affinely independent support") {
  const GridMeasure mu = GridMeasure::uniform(unit_box(), {4, 4});
  const DiscreteMeasure nu(unit_box(), {Atom{mu.barycenter_point(), mu.total_mass()}});
  const Prop2Check res = check_prop2_condition(mu, nu, trivial_diagram(unit_box()));
  CHECK(res.holds);
}

TEST_CASE("per-cell rigidity fails for collinear support with a witness") {
  const GridMeasure mu = GridMeasure::uniform(wide_box(), {16, 8});
  const DiscreteMeasure nu = collinear_contraction();
  const Prop2Check res = check_prop2_condition(mu, nu, trivial_diagram(wide_box()));
  REQUIRE_FALSE(res.holds);
  REQUIRE(res.witness.has_value());
  CHECK(supported_on(*res.witness, nu));
  CHECK_FALSE(measures_equal(*res.witness, nu));
  CHECK(check_convex_order(mu, *res.witness).dominated);
}

TEST_CASE("convex independence necessary test separates the two contractions") {
  SUBCASE("five-point support is convexly independent via the trivial diagram") {
    const GridMeasure mu = GridMeasure::uniform(wide_box(), {8, 4});
    const ConvexIndependenceCheck res =
        necessary_convex_independence(mu, five_point_contraction());
    CHECK(res.passes);
    REQUIRE(res.diagram.has_value());
    CHECK(res.diagram->size() == 1);
  }
  SUBCASE("collinear support fails every candidate diagram") {
    const GridMeasure mu = GridMeasure::uniform(wide_box(), {8, 4});
    const ConvexIndependenceCheck res =
        necessary_convex_independence(mu, collinear_contraction());
    CHECK_FALSE(res.passes);
    CHECK_FALSE(res.note.empty());
  }
  SUBCASE("a single pooled atom passes") {
    const GridMeasure mu = GridMeasure::uniform(unit_box(), {4, 4});
    const DiscreteMeasure nu(unit_box(), {Atom{mu.barycenter_point(), mu.total_mass()}});
    CHECK(necessary_convex_independence(mu, nu).passes);
  }
}

TEST_CASE("certificate construction rejects malformed inputs") {
  const GridMeasure mu = GridMeasure::uniform(wide_box(), {8, 4});
  const DiscreteMeasure nu = five_point_contraction();

  SUBCASE("full-revelation index out of range") {
    CHECK_THROWS_AS(build_certificate(mu, nu, worked_diagram(), {7}), PreconditionFailed);
  }
  SUBCASE("a cell without prior mass") {
    std::vector<Rat> masses = mu.masses();
    for (int c = 0; c < mu.num_cells(); ++c)
      if (mu.cell_center(c)[0] > 1) masses[c] = 0;
    const GridMeasure left_only = mu.with_masses(std::move(masses));
    std::vector<Atom> atoms(five_point_contraction().atoms().begin(),
                            five_point_contraction().atoms().end() - 1);
    CHECK_THROWS_AS(build_certificate(left_only, DiscreteMeasure(wide_box(), atoms),
                                      worked_diagram(), {}),
                    EmptyCell);
  }
  SUBCASE("a pooling cell that is not dominated") {
    std::vector<Atom> atoms = {
        {{Rat(3, 8), Rat(1, 4)}, Rat(1, 8)}, {{Rat(5, 8), Rat(1, 4)}, Rat(1, 8)},
        {{Rat(3, 8), Rat(3, 4)}, Rat(1, 8)}, {{Rat(5, 8), Rat(3, 4)}, Rat(1, 8)},
        {{Rat(7, 4), Rat(1, 2)}, Rat(1, 2)},
    };
    CHECK_THROWS_AS(build_certificate(mu, DiscreteMeasure(wide_box(), std::move(atoms)),
                                      worked_diagram(), {}),
                    Eq1Violated);
  }
  SUBCASE("a full-revelation cell that does not reproduce the prior") {
    CHECK_THROWS_AS(build_certificate(mu, nu, worked_diagram(), {0}), Eq1Violated);
  }
}
