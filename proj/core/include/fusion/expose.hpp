// expose.hpp - Lipschitz-exposure certificates for fusions of a grid prior:
// the convex price built from a power diagram's lift plus boundary-zero gauge
// dents on full-revelation cells, the exposing objective u = price - distance
// to the support set, exact duality bookkeeping, LP-level uniqueness probing
// on the reduced support universe, and the convex-independence necessary
// test over candidate diagrams.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fusion/errors.hpp"
#include "fusion/geom.hpp"
#include "fusion/measure.hpp"
#include "fusion/rational.hpp"
#include "fusion/vec.hpp"

namespace fusion {

// NotUnique enriched with the competing optimizer that witnesses the tie.
class NotUniqueWithWitness : public NotUnique {
 public:
  NotUniqueWithWitness(const std::string& what, DiscreteMeasure counterexample)
      : NotUnique(what), counterexample(std::move(counterexample)) {}
  DiscreteMeasure counterexample;
};

// Convex boundary-zero dent on one diagram cell: scale * (gauge^2 - 1) where
// gauge is the Minkowski gauge of the cell polygon about its exact area
// centroid, extended by zero outside the cell. The dent vanishes on the cell
// boundary, is strictly negative at the anchor, and is convex on the cell;
// the scale is capped so the price keeps its convex kinks across the cell's
// walls and then shrunk until midpoint convexity holds over all grid atom
// pairs.
struct GaugeBump {
  int cell = -1;
  std::vector<Vec> polygon;
  Vec anchor;
  std::vector<Vec> edge_gradients;  // gauge pieces about the anchor
  Rat scale = 0;                    // multiplier k applied to (gauge^2 - 1)
  Rat lipschitz = 0;                // upper bound on the scaled dent's slope

  Rat gauge(const Vec& x) const;  // max(0, max_e grad_e . (x - anchor))
  Rat value(const Vec& x) const;  // scale * (gauge^2 - 1) inside, 0 outside
};

enum class CellMode { Pooling, FullRevelation };

// Certificate that nu is the unique maximizer of the integral of u over all
// fusions of mu. The price is the diagram lift plus the full-revelation
// dents; u subtracts a positive lower bound on the distance to the support
// set, so u equals the price exactly on supp(nu) and is strictly smaller
// everywhere else. Validity means the primal and dual integrals agree
// exactly and the uniqueness probes all concur; build_certificate only
// returns valid certificates and throws otherwise.
struct ExposureCertificate {
  PowerDiagram diagram;
  LiftingFunction lifting;     // p, the diagram's convex lift
  std::vector<CellMode> modes;  // per diagram cell
  std::vector<GaugeBump> bumps;  // one per full-revelation cell
  std::vector<Vec> support_points;  // distinct supp(nu) locations
  std::vector<Rat> u_grid;     // u at every grid atom center
  std::vector<Rat> u_support;  // u at each support point
  Rat primal_value = 0;        // integral of u against nu
  Rat dual_value = 0;          // integral of the price against mu
  bool unique = false;
  std::uint64_t probe_seed = 0;
  bool valid = false;

  Rat price(const Vec& x) const;  // lift plus dents, convex
  Rat u(const Vec& x) const;      // price - sqrt_lower(dist^2 to support)
};

// Builds and verifies the certificate: checks per-cell dominance on pooling
// cells and atomwise equality on full-revelation cells, fits dent scales,
// verifies the exact primal = dual identity, and probes the maximizer set of
// the reduced fusion program (targets restricted to supp(nu), where every
// maximizer must live) with random functionals over the optimal face.
// Throws EmptyCell (a cell without prior mass), Eq1Violated (inputs
// inconsistent with the construction), ConvexityBroken (no dent scale keeps
// the price midpoint-convex), NotUniqueWithWitness (a second optimizer
// exists; carries it).
ExposureCertificate build_certificate(const GridMeasure& mu, const DiscreteMeasure& nu,
                                      const PowerDiagram& pd,
                                      const std::vector<int>& full_revelation_cells,
                                      int probe_count = 16,
                                      std::uint64_t probe_seed = 0x5eedf00dULL);

// The uniqueness condition behind pooling certificates: does lambda|_P
// dominated by mu|_P per cell plus supp(lambda) inside supp(nu) force
// lambda = nu? Cells whose support is affinely independent are forced
// outright; the rest are searched exactly by per-cell transport programs
// extremizing each support mass. Returns a differing lambda as witness when
// the condition fails.
struct Prop2Check {
  bool holds = false;
  std::optional<DiscreteMeasure> witness;
};
Prop2Check check_prop2_condition(const GridMeasure& mu, const DiscreteMeasure& nu,
                                 const PowerDiagram& pd);

// Necessary condition for exposure: some power diagram must leave every
// cell's share of supp(nu) convexly independent. Candidates are the trivial
// one-cell diagram and any diagram fitted (free gradients) to the discovered
// transport partition; returns the first certifying diagram, or failure with
// a note describing why every candidate is refuted.
struct ConvexIndependenceCheck {
  bool passes = false;
  std::optional<PowerDiagram> diagram;
  std::string note;
};
ConvexIndependenceCheck necessary_convex_independence(const GridMeasure& mu,
                                                      const DiscreteMeasure& nu);

}  // namespace fusion
