// Tests for convex-order dominance checks, barycentric decompositions and
// signed mass shifts: worked instances with exactly known kernels, refuted
// instances with verified convex witnesses, and randomized order properties.
#include <doctest.h>

#include <vector>

#include "fusion/errors.hpp"
#include "fusion/measure.hpp"
#include "fusion/order.hpp"
#include "fusion/util.hpp"

using namespace fusion;

namespace {

Box unit_strip() { return Box({Rat(0), Rat(0)}, {Rat(2), Rat(1)}); }

// The worked five-atom contraction of the uniform prior on [0,2]x[0,1]:
// four corner atoms of mass 1/8 in the left half plus the right half pooled
// at its barycenter.
DiscreteMeasure five_atom_contraction(const Box& box) {
  std::vector<Atom> atoms = {
      {{Rat(3, 8), Rat(1, 4)}, Rat(1, 8)}, {{Rat(5, 8), Rat(1, 4)}, Rat(1, 8)},
      {{Rat(3, 8), Rat(3, 4)}, Rat(1, 8)}, {{Rat(5, 8), Rat(3, 4)}, Rat(1, 8)},
      {{Rat(3, 2), Rat(1, 2)}, Rat(1, 2)},
  };
  return DiscreteMeasure(box, atoms);
}

Rat total_of(const DiscreteMeasure& m) { return m.total_mass(); }

}  // namespace

TEST_CASE("full pooling onto the barycenter is dominated") {
  auto mu = GridMeasure::uniform(unit_strip(), {4, 2});
  DiscreteMeasure nu(unit_strip(), {{barycenter(mu), Rat(1)}});
  auto v = check_convex_order(mu, nu);
  REQUIRE(v.dominated);
  REQUIRE(v.kernel.has_value());
  CHECK(!v.witness.has_value());
  CHECK(v.resolution == std::vector<int>{4, 2});
  CHECK(v.kernel->rows_match());
  CHECK(v.kernel->cols_match());
  CHECK(v.kernel->barycenters_match());

  auto parts = cartier_decompose(mu, nu);
  REQUIRE(parts.size() == 1);
  CHECK(parts[0].masses() == mu.masses());
}

TEST_CASE("five-atom contraction of the uniform prior is dominated") {
  for (std::vector<int> res : {std::vector<int>{8, 4}, std::vector<int>{16, 8}}) {
    auto mu = GridMeasure::uniform(unit_strip(), res);
    auto nu = five_atom_contraction(unit_strip());
    auto v = check_convex_order(mu, nu);
    REQUIRE(v.dominated);
    CHECK(v.resolution == res);
    CHECK(v.kernel->rows_match());
    CHECK(v.kernel->cols_match());
    CHECK(v.kernel->barycenters_match());
  }
}

TEST_CASE("decomposition components have prescribed masses and barycenters") {
  auto mu = GridMeasure::uniform(unit_strip(), {8, 4});
  auto nu = five_atom_contraction(unit_strip());
  auto parts = cartier_decompose(mu, nu);
  REQUIRE(parts.size() == 5);
  for (int j = 0; j < 5; ++j) {
    CHECK(parts[j].total_mass() == nu.atoms()[j].mass);
    CHECK(veq(barycenter(parts[j]), nu.atoms()[j].point));
  }
  // Components re-sum to the prior cell by cell.
  for (int c = 0; c < mu.num_cells(); ++c) {
    Rat s = 0;
    for (const auto& part : parts) s += part.mass(c);
    CHECK(s == mu.mass(c));
  }
}

TEST_CASE("quadrant restriction splits into its two target atoms") {
  auto grid = GridMeasure::uniform(unit_strip(), {8, 4});
  ConvexRegion quadrant{{Halfspace{{Rat(1), Rat(0)}, Rat(1)},
                         Halfspace{{Rat(0), Rat(1)}, Rat(1, 2)}}};
  auto mu = restrict_grid(grid, quadrant);
  REQUIRE(mu.total_mass() == Rat(1, 4));
  DiscreteMeasure nu(unit_strip(), {{{Rat(3, 8), Rat(1, 4)}, Rat(1, 8)},
                                    {{Rat(5, 8), Rat(1, 4)}, Rat(1, 8)}});
  auto parts = cartier_decompose(mu, nu);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].total_mass() == Rat(1, 8));
  CHECK(parts[1].total_mass() == Rat(1, 8));
  CHECK(veq(barycenter(parts[0]), {Rat(3, 8), Rat(1, 4)}));
  CHECK(veq(barycenter(parts[1]), {Rat(5, 8), Rat(1, 4)}));
}

TEST_CASE("grid's own atoms decompose as single-cell slices") {
  auto mu = GridMeasure::uniform(Box({Rat(0), Rat(0)}, {Rat(1), Rat(1)}), {2, 2});
  auto nu = mu.positive_atoms();
  auto parts = cartier_decompose(mu, nu);
  REQUIRE(parts.size() == 4);
  for (int j = 0; j < 4; ++j) {
    CHECK(parts[j].total_mass() == Rat(1, 4));
    // The minimum-displacement kernel keeps each atom in place.
    CHECK(veq(barycenter(parts[j]), nu.atoms()[j].point));
    int support_cells = 0;
    for (int c = 0; c < parts[j].num_cells(); ++c)
      if (parts[j].mass(c) != 0) ++support_cells;
    CHECK(support_cells == 1);
  }
}

TEST_CASE("corner point mass is refuted by a verified convex witness") {
  auto mu = GridMeasure::uniform(unit_strip(), {4, 2});
  DiscreteMeasure nu(unit_strip(), {{{Rat(0), Rat(0)}, Rat(1)}});
  auto v = check_convex_order(mu, nu);
  REQUIRE(!v.dominated);
  CHECK(!v.kernel.has_value());
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->gap(mu.positive_atoms(), nu) > 0);
}

TEST_CASE("unequal totals short-circuit to a constant witness") {
  auto mu = GridMeasure::uniform(unit_strip(), {4, 2});
  DiscreteMeasure nu(unit_strip(), {{barycenter(mu), Rat(1, 2)}});
  auto v = check_convex_order(mu, nu);
  REQUIRE(!v.dominated);
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->gap(mu.positive_atoms(), nu) == Rat(1, 2));
  CHECK_THROWS_AS(cartier_decompose(mu, nu), MassMismatch);
}

TEST_CASE("refusing a decomposition of an undominated target") {
  auto mu = GridMeasure::uniform(unit_strip(), {4, 2});
  DiscreteMeasure nu(unit_strip(), {{{Rat(0), Rat(0)}, Rat(1)}});
  CHECK_THROWS_AS(cartier_decompose(mu, nu), NotDominated);
}

TEST_CASE("dominance is transitive across random contractions") {
  DetRng rng(0x0bde7a11ULL);
  const Box box({Rat(0), Rat(0)}, {Rat(1), Rat(1)});
  for (int trial = 0; trial < 8; ++trial) {
    // A random five-atom measure ...
    std::vector<Atom> atoms;
    for (int i = 0; i < 5; ++i) {
      Vec p = {Rat(static_cast<long>(rng.next_u64() % 9), 8),
               Rat(static_cast<long>(rng.next_u64() % 9), 8)};
      atoms.push_back({p, Rat(static_cast<long>(rng.next_u64() % 4) + 1, 8)});
    }
    DiscreteMeasure mu(box, atoms);
    // ... contracted twice by merging random groups to their barycenters.
    auto contract = [&](const DiscreteMeasure& m, int groups) {
      std::vector<std::pair<Rat, Vec>> agg(groups, {Rat(0), Vec(2, Rat(0))});
      for (const auto& a : m.atoms()) {
        int g = static_cast<int>(rng.next_u64() % groups);
        agg[g].first += a.mass;
        agg[g].second = vadd(agg[g].second, vscale(a.mass, a.point));
      }
      std::vector<Atom> merged;
      for (const auto& [mass, moment] : agg)
        if (mass > 0) merged.push_back({vscale(1 / mass, moment), mass});
      return DiscreteMeasure(box, merged);
    };
    auto nu = contract(mu, 3);
    auto lam = contract(nu, 2);
    CHECK(check_convex_order(mu, nu).dominated);
    CHECK(check_convex_order(nu, lam).dominated);
    CHECK(check_convex_order(mu, lam).dominated);
  }
}

TEST_CASE("dominated pairs pass every random convex test function") {
  auto mu = GridMeasure::uniform(unit_strip(), {8, 4}).positive_atoms();
  auto nu = five_atom_contraction(unit_strip());
  REQUIRE(check_convex_order(mu, nu).dominated);
  DetRng rng(0xfacade00ULL);
  for (int k = 0; k < 50; ++k) {
    ConvexWitness phi;
    for (int piece = 0; piece < 3; ++piece) {
      phi.gradients.push_back({Rat(static_cast<long>(rng.next_u64() % 17) - 8, 8),
                               Rat(static_cast<long>(rng.next_u64() % 17) - 8, 8)});
      phi.intercepts.push_back(Rat(static_cast<long>(rng.next_u64() % 17) - 8, 8));
    }
    // Dominance forces integral(nu) <= integral(mu), exactly in rationals.
    CHECK(phi.gap(mu, nu) <= 0);
  }
}

TEST_CASE("certified interior ball of two overlapping 1d hulls") {
  auto mu1 = GridMeasure::uniform(Box({Rat(0)}, {Rat(1)}), {4}).positive_atoms();
  auto mu2 = GridMeasure::uniform(Box({Rat(1, 2)}, {Rat(3, 2)}), {4}).positive_atoms();
  std::vector<Vec> pa, pb;
  for (const auto& a : mu1.atoms()) pa.push_back(a.point);
  for (const auto& a : mu2.atoms()) pb.push_back(a.point);
  auto ball = common_interior(pa, pb, Rat(0));
  REQUIRE(ball.has_value());
  // Hulls are [1/8,7/8] and [5/8,11/8]; the deepest point of [5/8,7/8].
  CHECK(ball->center == Vec{Rat(3, 4)});
  CHECK(ball->radius > Rat(1, 9));
  CHECK(ball->radius <= Rat(1, 8));
  CHECK(!common_interior(pa, pb, Rat(1, 2)).has_value());
}

TEST_CASE("zero-target shift returns the zero measure") {
  auto mu1 = GridMeasure::uniform(Box({Rat(0)}, {Rat(1)}), {4}).positive_atoms();
  auto mu2 = GridMeasure::uniform(Box({Rat(1, 2)}, {Rat(3, 2)}), {4}).positive_atoms();
  Rat bound = shift_mass_bound(mu1, mu2, {Rat(0)});
  REQUIRE(bound > 0);
  auto pi = shift_mass(mu1, mu2, {Rat(0)}, Rat(0), bound / 2);
  CHECK(pi.size() == 0);
  CHECK(pi.is_signed());
}

TEST_CASE("directed shift moves the prescribed moment at zero net mass") {
  auto mu1 = GridMeasure::uniform(Box({Rat(0)}, {Rat(1)}), {4}).positive_atoms();
  auto mu2 = GridMeasure::uniform(Box({Rat(1, 2)}, {Rat(3, 2)}), {4}).positive_atoms();
  const Vec d = {Rat(1)};
  Rat bound = shift_mass_bound(mu1, mu2, d);
  REQUIRE(bound > 0);
  const Rat eps = bound / 2;
  auto pi = shift_mass(mu1, mu2, d, Rat(0), eps);
  CHECK(pi.size() > 0);
  CHECK(pi.total_mass() == 0);
  Rat moment = 0;
  for (const auto& a : pi.atoms()) moment += a.mass * a.point[0];
  CHECK(moment == eps);
  // mu1 + pi and mu2 - pi stay positive atom by atom.
  auto plus = combine(pi.box(), {{Rat(1), mu1}, {Rat(1), pi}}, true);
  for (const auto& a : plus.atoms()) CHECK(a.mass >= 0);
  auto minus = combine(pi.box(), {{Rat(1), mu2}, {Rat(-1), pi}}, true);
  for (const auto& a : minus.atoms()) CHECK(a.mass >= 0);
}

TEST_CASE("shift carries net mass when a is nonzero") {
  auto mu1 = GridMeasure::uniform(Box({Rat(0)}, {Rat(1)}), {4}).positive_atoms();
  auto mu2 = GridMeasure::uniform(Box({Rat(1, 2)}, {Rat(3, 2)}), {4}).positive_atoms();
  const Vec d = {Rat(-1)};
  Rat bound = shift_mass_bound(mu1, mu2, d);
  const Rat eps = bound / 2;
  auto pi = shift_mass(mu1, mu2, d, eps, eps);
  CHECK(pi.total_mass() == eps);
  Rat moment = 0;
  for (const auto& a : pi.atoms()) moment += a.mass * a.point[0];
  CHECK(moment == -eps);
  auto plus = combine(pi.box(), {{Rat(1), mu1}, {Rat(1), pi}}, true);
  for (const auto& a : plus.atoms()) CHECK(a.mass >= 0);
  auto minus = combine(pi.box(), {{Rat(1), mu2}, {Rat(-1), pi}}, true);
  for (const auto& a : minus.atoms()) CHECK(a.mass >= 0);
}

TEST_CASE("disjoint supports admit no shift") {
  auto mu1 = GridMeasure::uniform(Box({Rat(0)}, {Rat(1)}), {2}).positive_atoms();
  auto mu2 = GridMeasure::uniform(Box({Rat(2)}, {Rat(3)}), {2}).positive_atoms();
  CHECK_THROWS_AS(shift_mass(mu1, mu2, {Rat(1)}, Rat(0), Rat(1, 100)), NoCommonInterior);
}

TEST_CASE("shift rejections: eps beyond the bound, |a| beyond eps") {
  auto mu1 = GridMeasure::uniform(Box({Rat(0)}, {Rat(1)}), {4}).positive_atoms();
  auto mu2 = GridMeasure::uniform(Box({Rat(1, 2)}, {Rat(3, 2)}), {4}).positive_atoms();
  const Vec d = {Rat(1)};
  Rat bound = shift_mass_bound(mu1, mu2, d);
  CHECK_THROWS_AS(shift_mass(mu1, mu2, d, Rat(0), bound * 2), EpsTooLarge);
  CHECK_THROWS_AS(shift_mass(mu1, mu2, d, bound, bound / 2), PreconditionFailed);
}
