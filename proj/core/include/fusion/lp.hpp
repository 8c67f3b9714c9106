// lp.hpp - Self-contained dense linear programming: bounded-variable two-phase
// simplex with Bland's anti-cycling rule, exact-rational or float arithmetic,
// dual values / Farkas rays / unbounded rays, and optimal-face probing.
// Every certification module formulates its transport and flow problems here.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fusion/rational.hpp"
#include "fusion/vec.hpp"

namespace fusion {

enum class RowSense { LE, EQ, GE };
enum class LpStatus { Optimal, Infeasible, Unbounded };
enum class LpMode { Rational, Float, Auto };

struct Tolerances {
  double feas_tol = 1e-9;        // feasibility / complementary-slackness residual
  double duality_tol = 1e-7;     // |primal - dual| gap allowance in Float mode
  double uniqueness_tol = 1e-6;  // optimal-face probe agreement
};

class MalformedProgram : public std::runtime_error {
 public:
  explicit MalformedProgram(const std::string& what) : std::runtime_error(what) {}
};

// A dense LP: maximize (or minimize) objective . x subject to row constraints
// and per-variable bounds. Variables default to [0, +inf).
struct LinearProgram {
  struct Bound {
    bool has_lower = true;
    Rat lower = 0;
    bool has_upper = false;
    Rat upper = 0;
  };

  Vec objective;                  // one coefficient per variable
  bool maximize = true;
  std::vector<Vec> rows;          // dense coefficient rows
  std::vector<RowSense> senses;
  Vec rhs;
  std::vector<Bound> bounds;      // one per variable

  explicit LinearProgram(int nvars = 0)
      : objective(nvars, Rat(0)), bounds(nvars) {}

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  void add_row(Vec coeffs, RowSense sense, Rat rhs_value);
  void set_lower(int var, std::optional<Rat> lo);
  void set_upper(int var, std::optional<Rat> up);
  void set_range(int var, std::optional<Rat> lo, std::optional<Rat> up);
  void free_var(int var) { set_range(var, std::nullopt, std::nullopt); }
  void fix_var(int var, Rat value) { set_range(var, value, value); }

  // Throws MalformedProgram on dimension mismatches or crossed bounds.
  void validate() const;

  // Line-oriented plain-text dump with exact p/q rationals, for external
  // cross-checking of any program this library formulates.
  std::string dump() const;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vec primal;               // structural variable values (Optimal)
  Vec dual;                 // per-row duals (Optimal) or Farkas ray (Infeasible)
  Rat objective = 0;
  std::vector<int> basis;   // basic variable indices; structurals first, then slacks
  std::string basis_id;     // stable fingerprint of the basis
  bool rational = false;    // true when solved in exact arithmetic
  bool has_farkas = false;  // dual holds an infeasibility certificate
  Vec ray;                  // improving primal ray (Unbounded)
};

// Solves the program. Auto mode selects Rational for instances with at most
// 2000 variables (exact certificates on all desk-scale programs) and Float
// beyond. Optimal solutions are post-checked: feasibility residual, bound
// residual, and the strong-duality identity (exact in Rational mode, within
// duality_tol in Float mode); a violation throws std::logic_error.
LpSolution lp_solve(const LinearProgram& lp, LpMode mode = LpMode::Auto,
                    const Tolerances& tol = Tolerances{});

// Exact check that `farkas` certifies infeasibility: with the sense-implied
// sign conditions, min over the variable box of farkas . (Ax - b) must be > 0.
bool verify_farkas(const LinearProgram& lp, const Vec& farkas);

struct FaceProbe {
  bool singleton = true;
  Vec witness_a;            // two distinct optimizers when singleton is false
  Vec witness_b;
  std::uint64_t seed = 0;   // recorded for replay
  int probe_count = 0;
};

// Pins the objective to its optimal value (exact equality row in Rational
// mode, a +/- uniqueness_tol band in Float mode), then maximizes and
// minimizes every coordinate functional plus probe_count seeded random
// functionals over the optimal face. Returns singleton = true iff all probes
// agree within uniqueness_tol; otherwise two distinct optimizers witness it.
FaceProbe optimal_face_is_singleton(const LinearProgram& lp, const LpSolution& sol,
                                    int probe_count = 16,
                                    std::uint64_t seed = 0x5eedf00dULL,
                                    LpMode mode = LpMode::Auto,
                                    const Tolerances& tol = Tolerances{});

}  // namespace fusion
