// lp.cc - Bounded-variable two-phase dense simplex over double or exact
// rationals. Entering variables use a most-violated rule that falls back to
// Bland's rule for the rest of a degenerate streak (cycling can only happen
// at a stalled objective, so termination is guaranteed) and returns to the
// fast rule once the objective moves. Phase one optimizes artificial
// infeasibility and yields an exact Farkas ray on failure.

#include "fusion/lp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "fusion/util.hpp"

namespace fusion {

void LinearProgram::add_row(Vec coeffs, RowSense sense, Rat rhs_value) {
  if (static_cast<int>(coeffs.size()) != num_vars())
    throw MalformedProgram("row length does not match variable count");
  rows.push_back(std::move(coeffs));
  senses.push_back(sense);
  rhs.push_back(std::move(rhs_value));
}

void LinearProgram::set_lower(int var, std::optional<Rat> lo) {
  bounds.at(var).has_lower = lo.has_value();
  if (lo) bounds.at(var).lower = *lo;
}

void LinearProgram::set_upper(int var, std::optional<Rat> up) {
  bounds.at(var).has_upper = up.has_value();
  if (up) bounds.at(var).upper = *up;
}

void LinearProgram::set_range(int var, std::optional<Rat> lo, std::optional<Rat> up) {
  set_lower(var, std::move(lo));
  set_upper(var, std::move(up));
}

void LinearProgram::validate() const {
  const std::size_t n = objective.size();
  if (bounds.size() != n) throw MalformedProgram("bounds count != variable count");
  if (rows.size() != senses.size() || rows.size() != rhs.size())
    throw MalformedProgram("row/sense/rhs counts disagree");
  for (const auto& row : rows)
    if (row.size() != n) throw MalformedProgram("row length != variable count");
  for (const auto& bd : bounds)
    if (bd.has_lower && bd.has_upper && bd.lower > bd.upper)
      throw MalformedProgram("variable lower bound exceeds upper bound");
}

std::string LinearProgram::dump() const {
  std::ostringstream os;
  os << "lp vars=" << num_vars() << " rows=" << num_rows()
     << (maximize ? " maximize\n" : " minimize\n");
  os << "obj";
  for (const auto& c : objective) os << ' ' << rat_to_string(c);
  os << '\n';
  for (int j = 0; j < num_vars(); ++j) {
    os << "bnd " << j << ' '
       << (bounds[j].has_lower ? rat_to_string(bounds[j].lower) : std::string("-inf"))
       << ' '
       << (bounds[j].has_upper ? rat_to_string(bounds[j].upper) : std::string("+inf"))
       << '\n';
  }
  for (int i = 0; i < num_rows(); ++i) {
    os << "row " << i << ' '
       << (senses[i] == RowSense::LE ? "<=" : senses[i] == RowSense::EQ ? "==" : ">=")
       << ' ' << rat_to_string(rhs[i]) << " :";
    for (const auto& a : rows[i]) os << ' ' << rat_to_string(a);
    os << '\n';
  }
  return os.str();
}

namespace {

template <typename T>
struct Pol;

template <>
struct Pol<Rat> {
  static bool zero(const Rat& v) { return sgn(v) == 0; }
  static bool price_pos(const Rat& v) { return sgn(v) > 0; }
  static bool price_neg(const Rat& v) { return sgn(v) < 0; }
  static bool piv_ok(const Rat& v) { return sgn(v) != 0; }
  static Rat clamp0(const Rat& v) { return v < 0 ? Rat(0) : v; }
};

template <>
struct Pol<double> {
  static constexpr double price_eps = 1e-9;
  static constexpr double piv_eps = 1e-11;
  static bool zero(double v) { return std::fabs(v) <= piv_eps; }
  static bool price_pos(double v) { return v > price_eps; }
  static bool price_neg(double v) { return v < -price_eps; }
  static bool piv_ok(double v) { return std::fabs(v) > piv_eps; }
  static double clamp0(double v) { return v < 0 ? 0.0 : v; }
};

enum VarState : unsigned char { kAtLower, kAtUpper, kFreeZero, kBasic };

// Full working problem: structural variables, one slack per row, one
// artificial per row. All columns are conceptually dense of length m.
template <typename T>
class Simplex {
 public:
  Simplex(const LinearProgram& lp, const Tolerances& tol) : tol_(tol) {
    n_ = lp.num_vars();
    m_ = lp.num_rows();
    sign_ = lp.maximize ? 1 : -1;
    acol_.assign(n_, std::vector<T>(m_, T(0)));
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < n_; ++j) acol_[j][i] = to_scalar<T>(lp.rows[i][j]);
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) b_[i] = to_scalar<T>(lp.rhs[i]);
    cost_.assign(total(), T(0));
    for (int j = 0; j < n_; ++j)
      cost_[j] = to_scalar<T>(lp.objective[j]) * T(sign_);
    vb_.resize(total());
    for (int j = 0; j < n_; ++j) {
      vb_[j].flo = lp.bounds[j].has_lower;
      vb_[j].fup = lp.bounds[j].has_upper;
      if (vb_[j].flo) vb_[j].lo = to_scalar<T>(lp.bounds[j].lower);
      if (vb_[j].fup) vb_[j].up = to_scalar<T>(lp.bounds[j].upper);
    }
    for (int i = 0; i < m_; ++i) {  // slack bounds encode the row sense
      auto& s = vb_[n_ + i];
      switch (lp.senses[i]) {
        case RowSense::LE: s.flo = true; s.lo = T(0); s.fup = false; break;
        case RowSense::GE: s.fup = true; s.up = T(0); s.flo = false; break;
        case RowSense::EQ: s.flo = s.fup = true; s.lo = s.up = T(0); break;
      }
    }
    for (int i = 0; i < m_; ++i) {  // artificial bounds; sign fixed at init
      vb_[n_ + m_ + i].flo = true;
      vb_[n_ + m_ + i].lo = T(0);
      vb_[n_ + m_ + i].fup = false;
    }
    asign_.assign(m_, T(1));
  }

  LpStatus run() {
    init_phase1();
    phase1_ = true;
    LpStatus st = iterate();
    if (st != LpStatus::Optimal) throw std::logic_error("phase-1 LP cannot be unbounded");
    T z1 = current_objective();
    if (Pol<T>::price_neg(z1)) {
      farkas_ = duals();
      return LpStatus::Infeasible;
    }
    purge_artificials();
    for (int i = 0; i < m_; ++i) {  // lock artificials out of phase 2
      vb_[n_ + m_ + i].fup = true;
      vb_[n_ + m_ + i].up = T(0);
    }
    phase1_ = false;
    recompute_basics();
    return iterate();
  }

  // -- extraction ----------------------------------------------------------
  Vec primal() const {
    Vec out(n_);
    for (int j = 0; j < n_; ++j) out[j] = to_rat(value_of(j));
    return out;
  }
  Vec dual_rows() const {
    std::vector<T> y = duals();
    Vec out(m_);
    for (int i = 0; i < m_; ++i) out[i] = to_rat(y[i]) * Rat(sign_);
    return out;
  }
  Vec farkas_ray() const {
    Vec out(m_);
    for (int i = 0; i < m_; ++i) out[i] = to_rat(farkas_[i]);
    return out;
  }
  Vec unbounded_ray() const {
    Vec out(n_);
    for (int j = 0; j < n_; ++j) out[j] = to_rat(ray_[j]);
    return out;
  }
  Rat objective_value() const {
    Rat z = 0;
    for (int j = 0; j < n_; ++j) z += to_rat(cost_[j]) * to_rat(value_of(j));
    return z * Rat(sign_);
  }
  std::vector<int> basis_vars() const {
    std::vector<int> ids(basis_);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  // Exact-identity consistency check: z == y.b + sum of nonbasic reduced
  // costs times values, over all structural and slack variables.
  bool duality_identity_ok() const {
    std::vector<T> y = duals();
    T rhsval = T(0);
    for (int i = 0; i < m_; ++i) rhsval += y[i] * b_[i];
    for (int j = 0; j < n_ + m_; ++j) {
      if (st_[j] == kBasic) continue;
      T d = cost_[j] - dot_col(y, j);
      rhsval += d * value_of(j);
    }
    T z = T(0);
    for (int j = 0; j < total(); ++j) z += cost_[j] * value_of(j);
    return gap_ok(z, rhsval);
  }

 private:
  struct VB {
    bool flo = true, fup = false;
    T lo = T(0), up = T(0);
    bool fixed() const { return flo && fup && !(lo < up); }
  };

  int total() const { return n_ + 2 * m_; }

  void get_col(int j, std::vector<T>& out) const {
    std::fill(out.begin(), out.end(), T(0));
    if (j < n_) {
      out = acol_[j];
    } else if (j < n_ + m_) {
      out[j - n_] = T(1);
    } else {
      out[j - n_ - m_] = asign_[j - n_ - m_];
    }
  }

  T dot_col(const std::vector<T>& y, int j) const {
    if (j < n_) {
      T acc = T(0);
      const auto& col = acol_[j];
      for (int i = 0; i < m_; ++i) acc += y[i] * col[i];
      return acc;
    }
    if (j < n_ + m_) return y[j - n_];
    return y[j - n_ - m_] * asign_[j - n_ - m_];
  }

  T value_of(int j) const {
    if (st_[j] == kBasic) return xb_[pos_[j]];
    if (st_[j] == kAtLower) return vb_[j].lo;
    if (st_[j] == kAtUpper) return vb_[j].up;
    return T(0);
  }

  T cost_now(int j) const {
    if (phase1_) return j >= n_ + m_ ? T(-1) : T(0);
    return cost_[j];
  }

  std::vector<T> duals() const {
    std::vector<T> y(m_, T(0));
    for (int k = 0; k < m_; ++k) {
      T ck = cost_now(basis_[k]);
      if (Pol<T>::zero(ck)) continue;
      for (int i = 0; i < m_; ++i) y[i] += ck * binv_[k][i];
    }
    return y;
  }

  T current_objective() const {
    T z = T(0);
    for (int k = 0; k < m_; ++k) z += cost_now(basis_[k]) * xb_[k];
    for (int j = 0; j < total(); ++j)
      if (st_[j] != kBasic) z += cost_now(j) * value_of(j);
    return z;
  }

  bool gap_ok(const T& a, const T& b) const {
    if constexpr (ScalarTraits<T>::exact) {
      return a == b;
    } else {
      double scale = 1.0 + std::fabs(static_cast<double>(a));
      return std::fabs(static_cast<double>(a - b)) <= tol_.duality_tol * scale;
    }
  }

  static Rat to_rat(const T& v) {
    if constexpr (ScalarTraits<T>::exact) return v;
    else return rat_from_double(v);
  }

  void init_phase1() {
    st_.assign(total(), kAtLower);
    pos_.assign(total(), -1);
    for (int j = 0; j < n_ + m_; ++j) {
      if (vb_[j].flo) st_[j] = kAtLower;
      else if (vb_[j].fup) st_[j] = kAtUpper;
      else st_[j] = kFreeZero;
    }
    std::vector<T> resid = b_;
    for (int j = 0; j < n_ + m_; ++j) {
      T v = value_of(j);
      if (Pol<T>::zero(v)) continue;
      if (j < n_) {
        for (int i = 0; i < m_; ++i) resid[i] -= acol_[j][i] * v;
      } else {
        resid[j - n_] -= v;
      }
    }
    basis_.resize(m_);
    xb_.resize(m_);
    binv_.assign(m_, std::vector<T>(m_, T(0)));
    for (int i = 0; i < m_; ++i) {
      asign_[i] = Pol<T>::price_neg(resid[i]) ? T(-1) : T(1);
      basis_[i] = n_ + m_ + i;
      st_[n_ + m_ + i] = kBasic;
      pos_[n_ + m_ + i] = i;
      xb_[i] = resid[i] * asign_[i];
      if (xb_[i] < T(0)) xb_[i] = T(0);  // |resid| within float noise
      binv_[i][i] = asign_[i];
    }
  }

  void recompute_basics() {
    std::vector<T> r = b_;
    for (int j = 0; j < total(); ++j) {
      if (st_[j] == kBasic) continue;
      T v = value_of(j);
      if (sgn_zero(v)) continue;
      if (j < n_) {
        for (int i = 0; i < m_; ++i) r[i] -= acol_[j][i] * v;
      } else if (j < n_ + m_) {
        r[j - n_] -= v;
      } else {
        r[j - n_ - m_] -= asign_[j - n_ - m_] * v;
      }
    }
    for (int k = 0; k < m_; ++k) {
      T acc = T(0);
      for (int i = 0; i < m_; ++i) acc += binv_[k][i] * r[i];
      xb_[k] = acc;
    }
  }

  static bool sgn_zero(const T& v) {
    if constexpr (ScalarTraits<T>::exact) return sgn(v) == 0;
    else return v == 0.0;
  }

  // Entering: most-violated reduced cost, switching to Bland's smallest-index
  // rule for the remainder of any degenerate streak (anti-cycling).
  int pick_entering(const std::vector<T>& y, bool bland, int* dir_out) {
    int best = -1, best_dir = 0;
    T best_score = T(0);
    for (int j = 0; j < total(); ++j) {
      if (st_[j] == kBasic || vb_[j].fixed()) continue;
      T d = cost_now(j) - dot_col(y, j);
      int dir = 0;
      if (st_[j] == kAtLower && Pol<T>::price_pos(d)) dir = 1;
      else if (st_[j] == kAtUpper && Pol<T>::price_neg(d)) dir = -1;
      else if (st_[j] == kFreeZero && Pol<T>::price_pos(d)) dir = 1;
      else if (st_[j] == kFreeZero && Pol<T>::price_neg(d)) dir = -1;
      if (dir == 0) continue;
      if (bland) { *dir_out = dir; return j; }
      T score = dir > 0 ? d : -d;
      if (best < 0 || score > best_score) { best = j; best_dir = dir; best_score = score; }
    }
    *dir_out = best_dir;
    return best;
  }

  LpStatus iterate() {
    const long cap = 200000L + 400L * total();
    long degen_streak = 0;
    bool bland = false;
    std::vector<T> w(m_);
    for (long it = 0; it < cap; ++it) {
      std::vector<T> y = duals();
      int dir = 0;
      int e = pick_entering(y, bland, &dir);
      if (e < 0) return LpStatus::Optimal;
      get_col(e, w);
      w = apply_binv(w);

      bool have_limit = false;
      bool limit_is_flip = false;
      T tbest = T(0);
      int leave_pos = -1;
      if (dir > 0 ? vb_[e].fup : vb_[e].flo) {
        tbest = dir > 0 ? vb_[e].up - value_of(e) : value_of(e) - vb_[e].lo;
        have_limit = true;
        limit_is_flip = true;
      }
      for (int i = 0; i < m_; ++i) {
        T delta = -T(dir) * w[i];
        if (!Pol<T>::piv_ok(delta)) continue;
        int k = basis_[i];
        T ti;
        if (delta < T(0)) {
          if (!vb_[k].flo) continue;
          ti = Pol<T>::clamp0(xb_[i] - vb_[k].lo) / (-delta);
        } else {
          if (!vb_[k].fup) continue;
          ti = Pol<T>::clamp0(vb_[k].up - xb_[i]) / delta;
        }
        bool replace = !have_limit || ti < tbest;
        if (!replace && ti == tbest && !limit_is_flip && leave_pos >= 0 &&
            k < basis_[leave_pos])
          replace = true;  // Bland: smallest leaving index among ties
        if (replace) {
          have_limit = true;
          limit_is_flip = false;
          tbest = ti;
          leave_pos = i;
        }
      }
      if (!have_limit) {
        ray_.assign(n_, T(0));
        if (e < n_) ray_[e] = T(dir);
        for (int i = 0; i < m_; ++i)
          if (basis_[i] < n_ && !Pol<T>::zero(w[i])) ray_[basis_[i]] = -T(dir) * w[i];
        return LpStatus::Unbounded;
      }

      bool improving = Pol<T>::price_pos(tbest);
      if (!improving) {
        if (++degen_streak > 2L * (total() + m_)) bland = true;
      } else {
        // A strict step means no earlier basis can recur, so it is safe to
        // drop back to the fast pricing rule until the next stall.
        degen_streak = 0;
        bland = false;
      }

      // Apply the step.
      for (int i = 0; i < m_; ++i) xb_[i] -= T(dir) * tbest * w[i];
      T enter_val = value_of(e) + T(dir) * tbest;
      if (limit_is_flip) {
        st_[e] = (dir > 0) ? kAtUpper : kAtLower;
        continue;
      }
      int lv = basis_[leave_pos];
      T delta_lv = -T(dir) * w[leave_pos];
      st_[lv] = (delta_lv < T(0) || vb_[lv].fixed()) ? kAtLower : kAtUpper;
      if (!vb_[lv].flo && !vb_[lv].fup) st_[lv] = kFreeZero;
      pos_[lv] = -1;
      basis_[leave_pos] = e;
      st_[e] = kBasic;
      pos_[e] = leave_pos;
      pivot_binv(leave_pos, w);
      xb_[leave_pos] = enter_val;
      if constexpr (!ScalarTraits<T>::exact) {
        if (it % 64 == 63) recompute_basics();
      }
    }
    throw std::logic_error("simplex pivot cap exceeded; anti-cycling contract violated");
  }

  std::vector<T> apply_binv(const std::vector<T>& col) const {
    std::vector<T> out(m_, T(0));
    for (int k = 0; k < m_; ++k) {
      T acc = T(0);
      for (int i = 0; i < m_; ++i) acc += binv_[k][i] * col[i];
      out[k] = acc;
    }
    return out;
  }

  void pivot_binv(int r, const std::vector<T>& w) {
    T piv = w[r];
    for (int i = 0; i < m_; ++i) binv_[r][i] = binv_[r][i] / piv;
    for (int k = 0; k < m_; ++k) {
      if (k == r) continue;
      if (Pol<T>::zero(w[k])) continue;
      T f = w[k];
      for (int i = 0; i < m_; ++i) binv_[k][i] -= f * binv_[r][i];
    }
  }

  // After a feasible phase 1, swap any artificial still in the basis for a
  // structural/slack column with a nonzero pivot in that row (degenerate
  // swaps); rows with no such column are redundant and keep their artificial
  // pinned at zero.
  void purge_artificials() {
    std::vector<T> w(m_);
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < n_ + m_) continue;
      for (int j = 0; j < n_ + m_; ++j) {
        if (st_[j] == kBasic || vb_[j].fixed()) continue;
        get_col(j, w);
        std::vector<T> wb = apply_binv(w);
        if (!Pol<T>::piv_ok(wb[r])) continue;
        int lv = basis_[r];
        st_[lv] = kAtLower;
        pos_[lv] = -1;
        basis_[r] = j;
        st_[j] = kBasic;
        pos_[j] = r;
        pivot_binv(r, wb);
        recompute_basics();
        break;
      }
    }
  }

  Tolerances tol_;
  int n_ = 0, m_ = 0, sign_ = 1;
  bool phase1_ = true;
  std::vector<std::vector<T>> acol_;
  std::vector<T> b_;
  std::vector<T> cost_;
  std::vector<VB> vb_;
  std::vector<T> asign_;
  std::vector<int> basis_, pos_;
  std::vector<unsigned char> st_;
  std::vector<T> xb_;
  std::vector<std::vector<T>> binv_;
  std::vector<T> farkas_;
  std::vector<T> ray_;
};

template <typename T>
LpSolution solve_with(const LinearProgram& lp, const Tolerances& tol) {
  Simplex<T> sx(lp, tol);
  LpSolution sol;
  sol.rational = ScalarTraits<T>::exact;
  LpStatus st = sx.run();
  sol.status = st;
  if (st == LpStatus::Optimal) {
    sol.primal = sx.primal();
    sol.dual = sx.dual_rows();
    sol.objective = sx.objective_value();
    sol.basis = sx.basis_vars();
    std::string key;
    for (int v : sol.basis) key += std::to_string(v) + ",";
    sol.basis_id = hex64(fnv1a(key));
    if (!sx.duality_identity_ok())
      throw std::logic_error("strong-duality identity violated at claimed optimum");
    // Independent primal feasibility audit against the original program.
    for (int i = 0; i < lp.num_rows(); ++i) {
      Rat ax = 0;
      for (int j = 0; j < lp.num_vars(); ++j) ax += lp.rows[i][j] * sol.primal[j];
      Rat gap = ax - lp.rhs[i];
      double g = to_double(gap);
      double scale = 1.0 + std::fabs(to_double(lp.rhs[i]));
      bool ok = true;
      if (lp.senses[i] == RowSense::LE) ok = g <= tol.feas_tol * scale;
      else if (lp.senses[i] == RowSense::GE) ok = g >= -tol.feas_tol * scale;
      else ok = std::fabs(g) <= tol.feas_tol * scale;
      if (ScalarTraits<T>::exact) {
        if (lp.senses[i] == RowSense::LE) ok = gap <= 0;
        else if (lp.senses[i] == RowSense::GE) ok = gap >= 0;
        else ok = gap == 0;
      }
      if (!ok) throw std::logic_error("primal feasibility residual exceeds tolerance");
    }
  } else if (st == LpStatus::Infeasible) {
    sol.dual = sx.farkas_ray();
    sol.has_farkas = verify_farkas(lp, sol.dual);
  } else {
    sol.ray = sx.unbounded_ray();
  }
  return sol;
}

LpMode resolve_mode(const LinearProgram& lp, LpMode mode) {
  if (mode != LpMode::Auto) return mode;
  return lp.num_vars() <= 2000 ? LpMode::Rational : LpMode::Float;
}

}  // namespace

LpSolution lp_solve(const LinearProgram& lp, LpMode mode, const Tolerances& tol) {
  lp.validate();
  LpMode m = resolve_mode(lp, mode);
  if (m == LpMode::Rational) return solve_with<Rat>(lp, tol);
  return solve_with<double>(lp, tol);
}

bool verify_farkas(const LinearProgram& lp, const Vec& farkas) {
  if (static_cast<int>(farkas.size()) != lp.num_rows()) return false;
  for (int i = 0; i < lp.num_rows(); ++i) {
    if (lp.senses[i] == RowSense::LE && farkas[i] < 0) return false;
    if (lp.senses[i] == RowSense::GE && farkas[i] > 0) return false;
  }
  // min over the variable box of farkas . (Ax - b) must be strictly positive.
  Rat lo_total = 0;
  for (int j = 0; j < lp.num_vars(); ++j) {
    Rat coef = 0;
    for (int i = 0; i < lp.num_rows(); ++i) coef += farkas[i] * lp.rows[i][j];
    if (sgn(coef) == 0) continue;
    const auto& bd = lp.bounds[j];
    if (coef > 0) {
      if (!bd.has_lower) return false;
      lo_total += coef * bd.lower;
    } else {
      if (!bd.has_upper) return false;
      lo_total += coef * bd.upper;
    }
  }
  Rat yb = 0;
  for (int i = 0; i < lp.num_rows(); ++i) yb += farkas[i] * lp.rhs[i];
  return lo_total - yb > 0;
}

FaceProbe optimal_face_is_singleton(const LinearProgram& lp, const LpSolution& sol,
                                    int probe_count, std::uint64_t seed, LpMode mode,
                                    const Tolerances& tol) {
  if (sol.status != LpStatus::Optimal)
    throw std::invalid_argument("optimal_face_is_singleton requires an Optimal solution");
  LpMode m = resolve_mode(lp, mode);
  FaceProbe probe;
  probe.seed = seed;
  probe.probe_count = probe_count;

  LinearProgram face = lp;
  if (m == LpMode::Rational) {
    face.add_row(lp.objective, RowSense::EQ, sol.objective);
  } else {
    Rat band = rat_from_double(tol.uniqueness_tol);
    if (lp.maximize) {
      face.add_row(lp.objective, RowSense::GE, sol.objective - band);
    } else {
      face.add_row(lp.objective, RowSense::LE, sol.objective + band);
    }
  }

  auto extremize = [&](const Vec& functional, bool maximize) -> LpSolution {
    LinearProgram p = face;
    p.objective = functional;
    p.maximize = maximize;
    return lp_solve(p, m, tol);
  };

  auto check_gap = [&](const Vec& functional) -> bool {
    LpSolution hi = extremize(functional, true);
    if (hi.status == LpStatus::Unbounded) {
      probe.singleton = false;
      probe.witness_a = sol.primal;
      probe.witness_b = vadd(sol.primal, hi.ray);
      return true;
    }
    LpSolution lo = extremize(functional, false);
    if (lo.status == LpStatus::Unbounded) {
      probe.singleton = false;
      probe.witness_a = sol.primal;
      probe.witness_b = vadd(sol.primal, lo.ray);
      return true;
    }
    if (hi.status != LpStatus::Optimal || lo.status != LpStatus::Optimal)
      throw std::logic_error("optimal face probe became infeasible");
    Rat gap = hi.objective - lo.objective;
    if (to_double(gap) > tol.uniqueness_tol) {
      probe.singleton = false;
      probe.witness_a = hi.primal;
      probe.witness_b = lo.primal;
      return true;
    }
    return false;
  };

  const int n = lp.num_vars();
  for (int j = 0; j < n; ++j) {
    Vec ej(n, Rat(0));
    ej[j] = 1;
    if (check_gap(ej)) return probe;
  }
  DetRng rng(seed);
  for (int k = 0; k < probe_count; ++k) {
    Vec g(n);
    for (int j = 0; j < n; ++j) g[j] = rat_from_double(rng.next_sym());
    if (check_gap(g)) return probe;
  }
  probe.singleton = true;
  return probe;
}

}  // namespace fusion
