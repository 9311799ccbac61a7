// Integer projection and emptiness in the style of the Omega test: exact
// equality elimination (non-unit pivots leave a congruence behind), residue
// splitting for congruences, Fourier-Motzkin with dark shadow and splinters
// for inequalities.

#include <algorithm>
#include <map>
#include <optional>

#include "solver.hpp"

namespace eqcheck {

namespace {
thread_local std::uint64_t g_budget = kDefaultBudget;
}

ScopedBudget::ScopedBudget(std::uint64_t limit) : saved_limit_(g_budget) { g_budget = limit; }
ScopedBudget::~ScopedBudget() { g_budget = saved_limit_; }
std::uint64_t current_budget() { return g_budget; }

namespace detail {

Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Int mod_floor(const Int& a, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  if (r < 0) r += abs(m);
  return r;
}

Int gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

Int lcm(const Int& a, const Int& b) {
  Int l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

WorkMeter::WorkMeter() : limit_(current_budget()) {}

void WorkMeter::charge(std::uint64_t units) {
  used_ += units;
  if (used_ > limit_) {
    throw UnsupportedError("integer solver budget of " + std::to_string(limit_) +
                           " work units exhausted");
  }
}

namespace {

Int content(const LinearExpr& e) {
  Int g = 0;
  for (const auto& c : e.coeffs) {
    if (c != 0) g = gcd(g, c);
  }
  return g;
}

bool all_zero(const LinearExpr& e) {
  return std::all_of(e.coeffs.begin(), e.coeffs.end(), [](const Int& c) { return c == 0; });
}

void make_sign_canonical(LinearExpr& e) {
  for (const auto& c : e.coeffs) {
    if (c == 0) continue;
    if (c < 0) e = -e;
    return;
  }
}

bool coeffs_equal(const LinearExpr& a, const LinearExpr& b) { return a.coeffs == b.coeffs; }

bool coeffs_opposite(const LinearExpr& a, const LinearExpr& b) {
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    if (a.coeffs[i] != -b.coeffs[i]) return false;
  }
  return true;
}

// Returns false on infeasibility.
bool normalize_once(Conjunct& c, bool& changed) {
  auto& eqs = c.mutable_equalities();
  auto& ineqs = c.mutable_inequalities();
  auto& congs = c.mutable_congruences();

  std::vector<LinearExpr> new_eqs;
  for (auto& e : eqs) {
    Int g = content(e);
    if (g == 0) {
      if (e.constant != 0) return false;
      continue;
    }
    if (e.constant % g != 0) return false;
    if (g != 1) {
      for (auto& k : e.coeffs) k /= g;
      e.constant /= g;
    }
    make_sign_canonical(e);
    if (std::find(new_eqs.begin(), new_eqs.end(), e) == new_eqs.end()) new_eqs.push_back(std::move(e));
  }

  std::vector<LinearExpr> new_ineqs;
  for (auto& e : ineqs) {
    Int g = content(e);
    if (g == 0) {
      if (e.constant < 0) return false;
      continue;
    }
    if (g != 1) {
      for (auto& k : e.coeffs) k /= g;
      e.constant = floor_div(e.constant, g);
    }
    auto it = std::find_if(new_ineqs.begin(), new_ineqs.end(),
                           [&](const LinearExpr& o) { return coeffs_equal(o, e); });
    if (it != new_ineqs.end()) {
      if (e.constant < it->constant) it->constant = e.constant;
      continue;
    }
    new_ineqs.push_back(std::move(e));
  }

  // Opposite pairs: e >= 0 and -e + k >= 0.
  std::vector<bool> drop(new_ineqs.size(), false);
  for (std::size_t i = 0; i < new_ineqs.size(); ++i) {
    if (drop[i]) continue;
    for (std::size_t j = i + 1; j < new_ineqs.size(); ++j) {
      if (drop[j] || !coeffs_opposite(new_ineqs[i], new_ineqs[j])) continue;
      Int sum = new_ineqs[i].constant + new_ineqs[j].constant;
      if (sum < 0) return false;
      if (sum == 0) {
        LinearExpr eq = new_ineqs[i];
        make_sign_canonical(eq);
        if (std::find(new_eqs.begin(), new_eqs.end(), eq) == new_eqs.end()) new_eqs.push_back(eq);
        drop[i] = drop[j] = true;
        changed = true;
      }
      break;
    }
  }
  std::vector<LinearExpr> kept;
  for (std::size_t i = 0; i < new_ineqs.size(); ++i) {
    if (!drop[i]) kept.push_back(std::move(new_ineqs[i]));
  }

  std::vector<Congruence> new_congs;
  for (auto& cg : congs) {
    Int m = abs(cg.modulus);
    if (m == 0) {
      // Degenerate congruence: an equality.
      LinearExpr eq = cg.expr;
      new_eqs.push_back(eq);
      changed = true;
      continue;
    }
    for (auto& k : cg.expr.coeffs) k = mod_floor(k, m);
    cg.expr.constant = mod_floor(cg.expr.constant, m);
    Int g = m;
    for (const auto& k : cg.expr.coeffs) {
      if (k != 0) g = gcd(g, k);
    }
    if (all_zero(cg.expr)) {
      if (cg.expr.constant != 0) return false;
      continue;
    }
    if (cg.expr.constant % g != 0) return false;
    if (g != 1) {
      for (auto& k : cg.expr.coeffs) k /= g;
      cg.expr.constant /= g;
      m /= g;
    }
    if (m == 1) continue;
    cg.modulus = m;
    if (std::find(new_congs.begin(), new_congs.end(), cg) == new_congs.end()) new_congs.push_back(std::move(cg));
  }

  eqs = std::move(new_eqs);
  ineqs = std::move(kept);
  congs = std::move(new_congs);
  return true;
}

// Interval propagation over all constraints, plus residue tightening for
// single-variable congruences. Returning false proves there is no integer
// point; true proves nothing.
bool bounds_feasible(const Conjunct& c) {
  const std::size_t n = c.num_vars();
  if (n == 0) return true;
  std::vector<std::optional<Int>> lo(n), hi(n);
  std::vector<LinearExpr> rows = c.inequalities();
  for (const auto& e : c.equalities()) {
    rows.push_back(e);
    rows.push_back(-e);
  }
  auto tighten_low = [&](std::size_t j, const Int& v, bool& changed) {
    if (!lo[j] || v > *lo[j]) {
      lo[j] = v;
      changed = true;
    }
  };
  auto tighten_high = [&](std::size_t j, const Int& v, bool& changed) {
    if (!hi[j] || v < *hi[j]) {
      hi[j] = v;
      changed = true;
    }
  };
  for (int round = 0; round < 8; ++round) {
    bool changed = false;
    for (const LinearExpr& e : rows) {
      for (std::size_t j = 0; j < n; ++j) {
        const Int& a = e.coeffs[j];
        if (a == 0) continue;
        // a*x_j >= -(constant + max of the other terms)
        Int rest = e.constant;
        bool bounded = true;
        for (std::size_t i = 0; i < n && bounded; ++i) {
          const Int& b = e.coeffs[i];
          if (i == j || b == 0) continue;
          const auto& side = b > 0 ? hi[i] : lo[i];
          if (!side) bounded = false;
          else rest += b * *side;
        }
        if (!bounded) continue;
        if (a > 0)
          tighten_low(j, -floor_div(rest, a), changed);
        else
          tighten_high(j, floor_div(rest, -a), changed);
        if (lo[j] && hi[j] && *lo[j] > *hi[j]) return false;
      }
    }
    for (const auto& cg : c.congruences()) {
      std::size_t var = n, count = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (cg.expr.coeffs[j] != 0) var = j, ++count;
      if (count != 1 || !lo[var] || !hi[var] || *hi[var] - *lo[var] > 256) continue;
      const Int& a = cg.expr.coeffs[var];
      auto ok = [&](const Int& x) { return mod_floor(a * x + cg.expr.constant, cg.modulus) == 0; };
      Int l = *lo[var], h = *hi[var];
      while (l <= h && !ok(l)) ++l;
      while (h >= l && !ok(h)) --h;
      if (l > h) return false;
      tighten_low(var, l, changed);
      tighten_high(var, h, changed);
    }
    if (!changed) break;
  }
  return true;
}

enum class Occurs { None, Eq, Cong, Ineq };

struct VarUse {
  int eqs = 0;
  int congs = 0;
  int lowers = 0;
  int uppers = 0;
  bool lower_unit = true;
  bool upper_unit = true;
};

VarUse usage(const Conjunct& c, std::size_t v) {
  VarUse u;
  for (const auto& e : c.equalities()) u.eqs += e.coeffs[v] != 0;
  for (const auto& cg : c.congruences()) u.congs += cg.expr.coeffs[v] != 0;
  for (const auto& e : c.inequalities()) {
    const Int& k = e.coeffs[v];
    if (k > 0) {
      ++u.lowers;
      if (k != 1) u.lower_unit = false;
    } else if (k < 0) {
      ++u.uppers;
      if (k != -1) u.upper_unit = false;
    }
  }
  return u;
}

void eliminate_with_equality(Conjunct& c, std::size_t eq_index, std::size_t v) {
  auto& eqs = c.mutable_equalities();
  LinearExpr pivot = eqs[eq_index];
  eqs.erase(eqs.begin() + static_cast<std::ptrdiff_t>(eq_index));
  const Int a = pivot.coeffs[v];
  if (abs(a) == 1) {
    auto subst = [&](LinearExpr& x) {
      Int k = x.coeffs[v];
      if (k == 0) return;
      x -= pivot * (k * a);
    };
    for (auto& x : c.mutable_equalities()) subst(x);
    for (auto& x : c.mutable_inequalities()) subst(x);
    for (auto& cg : c.mutable_congruences()) subst(cg.expr);
  } else {
    const Int abs_a = abs(a);
    const Int sg = a > 0 ? 1 : -1;
    auto scale_subst = [&](LinearExpr& x) -> bool {
      Int k = x.coeffs[v];
      if (k == 0) return false;
      x = x * abs_a - pivot * (k * sg);
      return true;
    };
    for (auto& x : c.mutable_equalities()) scale_subst(x);
    for (auto& x : c.mutable_inequalities()) scale_subst(x);
    for (auto& cg : c.mutable_congruences()) {
      if (scale_subst(cg.expr)) cg.modulus *= abs_a;
    }
    LinearExpr rest = pivot;
    rest.coeffs[v] = 0;
    c.add_congruence(std::move(rest), abs_a);
  }
  remove_var(c, v);
}

// Removes every inequality mentioning v and v itself.
void drop_unbounded(Conjunct& c, std::size_t v) {
  auto& ineqs = c.mutable_inequalities();
  ineqs.erase(std::remove_if(ineqs.begin(), ineqs.end(),
                             [&](const LinearExpr& e) { return e.coeffs[v] != 0; }),
              ineqs.end());
  remove_var(c, v);
}

// Fourier-Motzkin step; with `dark` the dark shadow is produced instead of
// the real shadow.
Conjunct fm_combine(const Conjunct& c, std::size_t v, bool dark) {
  Conjunct out = c;
  auto& ineqs = out.mutable_inequalities();
  std::vector<LinearExpr> lowers, uppers, others;
  for (const auto& e : c.inequalities()) {
    const Int& k = e.coeffs[v];
    if (k > 0)
      lowers.push_back(e);
    else if (k < 0)
      uppers.push_back(e);
    else
      others.push_back(e);
  }
  ineqs = std::move(others);
  for (const auto& lo : lowers) {
    for (const auto& up : uppers) {
      const Int a = lo.coeffs[v];
      const Int b = -up.coeffs[v];
      LinearExpr comb = lo * b + up * a;
      if (dark) comb.constant -= (a - 1) * (b - 1);
      ineqs.push_back(std::move(comb));
    }
  }
  remove_var(out, v);
  return out;
}

// One elimination step on existential columns [first, num_vars). Appends
// successors to `next`. Returns false if c has no existential left.
bool eliminate_step(Conjunct& c, std::size_t first, std::vector<Conjunct>& next) {
  const std::size_t n = c.num_vars();
  if (first >= n) return false;

  // 1. Equality pivot with the smallest coefficient.
  {
    std::size_t best_eq = 0, best_v = n;
    Int best_abs = 0;
    const auto& eqs = c.equalities();
    for (std::size_t i = 0; i < eqs.size(); ++i) {
      for (std::size_t v = first; v < n; ++v) {
        const Int& k = eqs[i].coeffs[v];
        if (k == 0) continue;
        if (best_v == n || abs(k) < best_abs) {
          best_eq = i;
          best_v = v;
          best_abs = abs(k);
        }
      }
    }
    if (best_v != n) {
      eliminate_with_equality(c, best_eq, best_v);
      next.push_back(std::move(c));
      return true;
    }
  }

  std::vector<VarUse> uses;
  uses.reserve(n - first);
  for (std::size_t v = first; v < n; ++v) uses.push_back(usage(c, v));

  // 2. Unused, or free in one direction and congruence-free.
  for (std::size_t v = first; v < n; ++v) {
    const VarUse& u = uses[v - first];
    if (u.congs == 0 && (u.lowers == 0 || u.uppers == 0)) {
      drop_unbounded(c, v);
      next.push_back(std::move(c));
      return true;
    }
  }

  // 3. Single congruence, no inequality: a*v + s = 0 (mod m) is solvable
  //    iff s = 0 (mod gcd(a, m)).
  for (std::size_t v = first; v < n; ++v) {
    const VarUse& u = uses[v - first];
    if (u.congs == 1 && u.lowers == 0 && u.uppers == 0) {
      for (auto& cg : c.mutable_congruences()) {
        if (cg.expr.coeffs[v] == 0) continue;
        cg.modulus = gcd(cg.expr.coeffs[v], cg.modulus);
        cg.expr.coeffs[v] = 0;
      }
      remove_var(c, v);
      next.push_back(std::move(c));
      return true;
    }
  }

  // 4. Exact Fourier-Motzkin on a congruence-free variable.
  {
    std::size_t best = n;
    long best_pairs = 0;
    for (std::size_t v = first; v < n; ++v) {
      const VarUse& u = uses[v - first];
      if (u.congs != 0 || !(u.lower_unit || u.upper_unit)) continue;
      long pairs = static_cast<long>(u.lowers) * u.uppers;
      if (best == n || pairs < best_pairs) {
        best = v;
        best_pairs = pairs;
      }
    }
    if (best != n) {
      next.push_back(fm_combine(c, best, false));
      return true;
    }
  }

  // 5. Congruence residue split: v = r + L*v'.
  {
    std::size_t best = n;
    Int best_l = 0;
    for (std::size_t v = first; v < n; ++v) {
      if (uses[v - first].congs == 0) continue;
      Int l = 1;
      for (const auto& cg : c.congruences()) {
        if (cg.expr.coeffs[v] != 0) l = lcm(l, cg.modulus);
      }
      if (best == n || l < best_l) {
        best = v;
        best_l = l;
      }
    }
    if (best != n) {
      const std::size_t v = best;
      for (Int r = 0; r < best_l; ++r) {
        Conjunct piece = c;
        auto subst = [&](LinearExpr& x) {
          Int k = x.coeffs[v];
          if (k == 0) return;
          x.constant += k * r;
          x.coeffs[v] = k * best_l;
        };
        for (auto& x : piece.mutable_equalities()) subst(x);
        for (auto& x : piece.mutable_inequalities()) subst(x);
        for (auto& cg : piece.mutable_congruences()) subst(cg.expr);
        next.push_back(std::move(piece));
      }
      return true;
    }
  }

  // 6. Inexact elimination: dark shadow plus splinters.
  std::size_t best = n;
  long best_pairs = 0;
  for (std::size_t v = first; v < n; ++v) {
    const VarUse& u = uses[v - first];
    long pairs = static_cast<long>(u.lowers) * u.uppers;
    if (best == n || pairs < best_pairs) {
      best = v;
      best_pairs = pairs;
    }
  }
  const std::size_t v = best;
  Int b_max = 0;
  for (const auto& e : c.inequalities()) {
    if (e.coeffs[v] < 0 && -e.coeffs[v] > b_max) b_max = -e.coeffs[v];
  }
  for (const auto& lo : c.inequalities()) {
    const Int a = lo.coeffs[v];
    if (a <= 0) continue;
    Int i_max = floor_div(a * b_max - a - b_max, b_max);
    for (Int i = 0; i <= i_max; ++i) {
      Conjunct piece = c;
      LinearExpr eq = lo;
      eq.constant -= i;
      piece.add_equality(std::move(eq));
      next.push_back(std::move(piece));
    }
  }
  next.push_back(fm_combine(c, v, true));
  return true;
}

}  // namespace

bool normalize(Conjunct& c) {
  for (int round = 0; round < 8; ++round) {
    bool changed = false;
    if (!normalize_once(c, changed)) return false;
    if (!changed) return true;
  }
  return true;
}

void remove_var(Conjunct& c, std::size_t index) {
  auto drop = [&](LinearExpr& e) { e.coeffs.erase(e.coeffs.begin() + static_cast<std::ptrdiff_t>(index)); };
  for (auto& e : c.mutable_equalities()) drop(e);
  for (auto& e : c.mutable_inequalities()) drop(e);
  for (auto& cg : c.mutable_congruences()) drop(cg.expr);
  if (index < c.num_dims())
    c.set_layout(c.num_dims() - 1, c.num_exists());
  else
    c.set_layout(c.num_dims(), c.num_exists() - 1);
}

LinearExpr remap(const LinearExpr& e, const std::vector<std::size_t>& map, std::size_t nvars) {
  LinearExpr out(nvars);
  out.constant = e.constant;
  for (std::size_t i = 0; i < e.coeffs.size(); ++i) {
    if (e.coeffs[i] != 0) out.coeffs[map[i]] += e.coeffs[i];
  }
  return out;
}

Conjunct permute(const Conjunct& c, const std::vector<std::size_t>& perm, std::size_t dims,
                 std::size_t exists) {
  const std::size_t n = c.num_vars();
  std::vector<std::size_t> map(n);
  for (std::size_t i = 0; i < perm.size(); ++i) map[perm[i]] = i;
  Conjunct out(dims, exists);
  for (const auto& e : c.equalities()) out.add_equality(remap(e, map, n));
  for (const auto& e : c.inequalities()) out.add_inequality(remap(e, map, n));
  for (const auto& cg : c.congruences()) out.add_congruence(remap(cg.expr, map, n), cg.modulus);
  return out;
}

std::vector<Conjunct> eliminate_existentials(const Conjunct& c, WorkMeter& meter) {
  std::vector<Conjunct> done;
  std::vector<Conjunct> stack{c};
  std::vector<Conjunct> next;
  while (!stack.empty()) {
    Conjunct cur = std::move(stack.back());
    stack.pop_back();
    meter.charge();
    if (!normalize(cur) || !bounds_feasible(cur)) continue;
    if (cur.num_exists() == 0) {
      done.push_back(std::move(cur));
      continue;
    }
    next.clear();
    eliminate_step(cur, cur.num_dims(), next);
    for (auto& n : next) stack.push_back(std::move(n));
  }
  return done;
}

std::vector<Conjunct> eliminate_existentials(const Conjunct& c) {
  WorkMeter meter;
  return eliminate_existentials(c, meter);
}

bool conjunct_is_empty(const Conjunct& c, WorkMeter& meter) {
  Conjunct all = c;
  all.set_layout(0, c.num_vars());
  std::vector<Conjunct> stack{std::move(all)};
  std::vector<Conjunct> next;
  while (!stack.empty()) {
    Conjunct cur = std::move(stack.back());
    stack.pop_back();
    meter.charge();
    if (!normalize(cur) || !bounds_feasible(cur)) continue;
    if (cur.num_vars() == 0) return false;
    next.clear();
    eliminate_step(cur, 0, next);
    // Dark shadow is pushed last so it is explored first.
    for (auto& n : next) stack.push_back(std::move(n));
  }
  return true;
}

bool conjunct_is_empty(const Conjunct& c) {
  WorkMeter meter;
  return conjunct_is_empty(c, meter);
}

std::vector<Conjunct> subtract(const Conjunct& p, const Conjunct& q, WorkMeter& meter) {
  if (q.num_exists() != 0) throw ContractError("subtract: subtrahend must be quantifier-free");
  if (q.num_dims() != p.num_dims()) throw ContractError("subtract: dimension mismatch");
  const std::size_t n = p.num_vars();
  std::vector<std::size_t> map(q.num_vars());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = i;
  auto lift = [&](const LinearExpr& e) { return remap(e, map, n); };

  std::vector<Conjunct> out;
  Conjunct acc = p;
  auto emit = [&](Conjunct piece) {
    if (!conjunct_is_empty(piece, meter)) out.push_back(std::move(piece));
  };

  for (const auto& e : q.equalities()) {
    LinearExpr x = lift(e);
    Conjunct above = acc;
    LinearExpr hi = x;
    hi.constant -= 1;
    above.add_inequality(std::move(hi));
    emit(std::move(above));
    Conjunct below = acc;
    LinearExpr lo = -x;
    lo.constant -= 1;
    below.add_inequality(std::move(lo));
    emit(std::move(below));
    acc.add_equality(std::move(x));
    if (conjunct_is_empty(acc, meter)) return out;
  }
  for (const auto& e : q.inequalities()) {
    LinearExpr x = lift(e);
    Conjunct neg = acc;
    LinearExpr nx = -x;
    nx.constant -= 1;
    neg.add_inequality(std::move(nx));
    emit(std::move(neg));
    acc.add_inequality(std::move(x));
    if (conjunct_is_empty(acc, meter)) return out;
  }
  for (const auto& cg : q.congruences()) {
    LinearExpr x = lift(cg.expr);
    for (Int r = 1; r < cg.modulus; ++r) {
      Conjunct other = acc;
      LinearExpr shifted = x;
      shifted.constant -= r;
      other.add_congruence(std::move(shifted), cg.modulus);
      emit(std::move(other));
    }
    acc.add_congruence(std::move(x), cg.modulus);
    if (conjunct_is_empty(acc, meter)) return out;
  }
  return out;
}

}  // namespace detail
}  // namespace eqcheck
