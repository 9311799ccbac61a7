#include <algorithm>
#include <numeric>
#include <set>

#include "eqcheck/relation.hpp"
#include "solver.hpp"

namespace eqcheck {

using detail::conjunct_is_empty;
using detail::eliminate_existentials;
using detail::normalize;
using detail::remap;
using detail::WorkMeter;

Space Space::anonymous(std::size_t arity) { return Space(std::vector<std::string>(arity)); }

// --- LinearExpr ---------------------------------------------------------------

LinearExpr LinearExpr::var(std::size_t nvars, std::size_t index, long coeff) {
  LinearExpr e(nvars);
  e.coeffs.at(index) = coeff;
  return e;
}

LinearExpr LinearExpr::constant_expr(std::size_t nvars, const Int& value) {
  LinearExpr e(nvars);
  e.constant = value;
  return e;
}

bool LinearExpr::is_constant() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const Int& c) { return c == 0; });
}

LinearExpr& LinearExpr::operator+=(const LinearExpr& o) {
  if (o.coeffs.size() != coeffs.size()) throw ContractError("LinearExpr: size mismatch");
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
  constant += o.constant;
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& o) {
  if (o.coeffs.size() != coeffs.size()) throw ContractError("LinearExpr: size mismatch");
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= o.coeffs[i];
  constant -= o.constant;
  return *this;
}

LinearExpr& LinearExpr::operator*=(const Int& k) {
  for (auto& c : coeffs) c *= k;
  constant *= k;
  return *this;
}

LinearExpr LinearExpr::operator-() const {
  LinearExpr e = *this;
  e *= -1;
  return e;
}

// --- Conjunct -----------------------------------------------------------------

namespace {
void check_size(const Conjunct& c, const LinearExpr& e) {
  if (e.size() != c.num_vars()) {
    throw ContractError("constraint has " + std::to_string(e.size()) + " columns, conjunct has " +
                        std::to_string(c.num_vars()));
  }
}
}  // namespace

void Conjunct::add_equality(LinearExpr e) {
  check_size(*this, e);
  eqs_.push_back(std::move(e));
}

void Conjunct::add_inequality(LinearExpr e) {
  check_size(*this, e);
  ineqs_.push_back(std::move(e));
}

void Conjunct::add_congruence(LinearExpr e, Int modulus) {
  check_size(*this, e);
  congs_.push_back(Congruence{std::move(e), std::move(modulus)});
}

void Conjunct::add_constraints_from(const Conjunct& other) {
  for (const auto& e : other.eqs_) add_equality(e);
  for (const auto& e : other.ineqs_) add_inequality(e);
  for (const auto& c : other.congs_) add_congruence(c.expr, c.modulus);
}

std::size_t Conjunct::add_existential() {
  auto grow = [](LinearExpr& e) { e.coeffs.emplace_back(0); };
  for (auto& e : eqs_) grow(e);
  for (auto& e : ineqs_) grow(e);
  for (auto& c : congs_) grow(c.expr);
  ++num_exists_;
  return num_vars() - 1;
}

bool Conjunct::satisfied_by(const std::vector<Int>& values) const {
  auto eval = [&](const LinearExpr& e) {
    Int v = e.constant;
    for (std::size_t i = 0; i < e.coeffs.size(); ++i) v += e.coeffs[i] * values[i];
    return v;
  };
  for (const auto& e : eqs_) {
    if (eval(e) != 0) return false;
  }
  for (const auto& e : ineqs_) {
    if (eval(e) < 0) return false;
  }
  for (const auto& c : congs_) {
    if (detail::mod_floor(eval(c.expr), c.modulus) != 0) return false;
  }
  return true;
}

// --- IntRelation --------------------------------------------------------------

IntRelation IntRelation::universe(Space in, Space out) {
  IntRelation r(std::move(in), std::move(out));
  r.conjuncts_.emplace_back(r.num_dims(), 0);
  return r;
}

IntRelation IntRelation::identity_on(const IntRelation& set) {
  if (!set.is_set()) throw ContractError("identity_on expects a set");
  const std::size_t n = set.in_arity();
  IntRelation r(set.in_space(), set.in_space());
  for (const auto& c : set.conjuncts()) {
    Conjunct out(2 * n, c.num_exists());
    std::vector<std::size_t> map(c.num_vars());
    for (std::size_t i = 0; i < n; ++i) map[i] = i;
    for (std::size_t e = 0; e < c.num_exists(); ++e) map[n + e] = 2 * n + e;
    const std::size_t total = out.num_vars();
    for (const auto& e : c.equalities()) out.add_equality(remap(e, map, total));
    for (const auto& e : c.inequalities()) out.add_inequality(remap(e, map, total));
    for (const auto& cg : c.congruences()) out.add_congruence(remap(cg.expr, map, total), cg.modulus);
    for (std::size_t i = 0; i < n; ++i) {
      out.add_equality(LinearExpr::var(total, n + i) - LinearExpr::var(total, i));
    }
    r.conjuncts_.push_back(std::move(out));
  }
  return r;
}

IntRelation& IntRelation::add_conjunct(Conjunct c) {
  if (c.num_dims() != num_dims()) {
    throw ContractError("add_conjunct: conjunct has " + std::to_string(c.num_dims()) +
                        " dims, relation has " + std::to_string(num_dims()));
  }
  conjuncts_.push_back(std::move(c));
  return *this;
}

IntRelation IntRelation::with_names(Space in, Space out) const {
  if (in.arity() != in_arity() || out.arity() != out_arity()) {
    throw ContractError("with_names: arity mismatch");
  }
  IntRelation r = *this;
  r.in_ = std::move(in);
  r.out_ = std::move(out);
  return r;
}

// --- algebra --------------------------------------------------------------------

namespace {

void require_same_spaces(const IntRelation& a, const IntRelation& b, const char* op) {
  if (a.in_arity() != b.in_arity() || a.out_arity() != b.out_arity()) {
    throw ContractError(std::string(op) + ": space mismatch ([" + std::to_string(a.in_arity()) +
                        "] -> [" + std::to_string(a.out_arity()) + "] vs [" +
                        std::to_string(b.in_arity()) + "] -> [" + std::to_string(b.out_arity()) + "])");
  }
}

// Joins two conjuncts over the same dims; existentials are concatenated.
Conjunct join(const Conjunct& a, const Conjunct& b) {
  const std::size_t d = a.num_dims();
  Conjunct out(d, a.num_exists() + b.num_exists());
  const std::size_t total = out.num_vars();
  std::vector<std::size_t> map_a(a.num_vars()), map_b(b.num_vars());
  std::iota(map_a.begin(), map_a.end(), 0);
  for (std::size_t i = 0; i < d; ++i) map_b[i] = i;
  for (std::size_t e = 0; e < b.num_exists(); ++e) map_b[d + e] = d + a.num_exists() + e;
  for (const auto& e : a.equalities()) out.add_equality(remap(e, map_a, total));
  for (const auto& e : a.inequalities()) out.add_inequality(remap(e, map_a, total));
  for (const auto& cg : a.congruences()) out.add_congruence(remap(cg.expr, map_a, total), cg.modulus);
  for (const auto& e : b.equalities()) out.add_equality(remap(e, map_b, total));
  for (const auto& e : b.inequalities()) out.add_inequality(remap(e, map_b, total));
  for (const auto& cg : b.congruences()) out.add_congruence(remap(cg.expr, map_b, total), cg.modulus);
  return out;
}

void add_mapped(Conjunct& out, const Conjunct& src, const std::vector<std::size_t>& map) {
  const std::size_t total = out.num_vars();
  for (const auto& e : src.equalities()) out.add_equality(remap(e, map, total));
  for (const auto& e : src.inequalities()) out.add_inequality(remap(e, map, total));
  for (const auto& cg : src.congruences()) out.add_congruence(remap(cg.expr, map, total), cg.modulus);
}

std::vector<Conjunct> quantifier_free(const IntRelation& r, WorkMeter& meter) {
  std::vector<Conjunct> out;
  for (const auto& c : r.conjuncts()) {
    if (c.num_exists() == 0) {
      Conjunct n = c;
      if (normalize(n)) out.push_back(std::move(n));
      continue;
    }
    for (auto& q : eliminate_existentials(c, meter)) out.push_back(std::move(q));
  }
  return out;
}

}  // namespace

IntRelation compose(const IntRelation& first, const IntRelation& second) {
  if (first.out_arity() != second.in_arity()) {
    throw ContractError("compose: first maps to arity " + std::to_string(first.out_arity()) +
                        " but second expects " + std::to_string(second.in_arity()));
  }
  const std::size_t na = first.in_arity(), nb = first.out_arity(), nc = second.out_arity();
  IntRelation out(first.in_space(), second.out_space());
  WorkMeter meter;
  for (const auto& c1 : first.conjuncts()) {
    for (const auto& c2 : second.conjuncts()) {
      // Layout: [A, C | B, e1, e2]
      Conjunct joined(na + nc, nb + c1.num_exists() + c2.num_exists());
      std::vector<std::size_t> m1(c1.num_vars()), m2(c2.num_vars());
      for (std::size_t i = 0; i < na; ++i) m1[i] = i;
      for (std::size_t j = 0; j < nb; ++j) m1[na + j] = na + nc + j;
      for (std::size_t e = 0; e < c1.num_exists(); ++e) m1[na + nb + e] = na + nc + nb + e;
      for (std::size_t j = 0; j < nb; ++j) m2[j] = na + nc + j;
      for (std::size_t l = 0; l < nc; ++l) m2[nb + l] = na + l;
      for (std::size_t e = 0; e < c2.num_exists(); ++e) {
        m2[nb + nc + e] = na + nc + nb + c1.num_exists() + e;
      }
      add_mapped(joined, c1, m1);
      add_mapped(joined, c2, m2);
      for (auto& q : eliminate_existentials(joined, meter)) out.add_conjunct(std::move(q));
    }
  }
  return out;
}

IntRelation unite(const IntRelation& a, const IntRelation& b) {
  require_same_spaces(a, b, "union");
  IntRelation out = a;
  for (const auto& c : b.conjuncts()) out.add_conjunct(c);
  return out;
}

IntRelation intersect(const IntRelation& a, const IntRelation& b) {
  require_same_spaces(a, b, "intersect");
  IntRelation out(a.in_space(), a.out_space());
  for (const auto& ca : a.conjuncts()) {
    for (const auto& cb : b.conjuncts()) {
      Conjunct j = join(ca, cb);
      if (normalize(j)) out.add_conjunct(std::move(j));
    }
  }
  return out;
}

IntRelation difference(const IntRelation& a, const IntRelation& b) {
  require_same_spaces(a, b, "difference");
  WorkMeter meter;
  std::vector<Conjunct> subtrahend = quantifier_free(b, meter);
  IntRelation out(a.in_space(), a.out_space());
  for (const auto& ca : a.conjuncts()) {
    std::vector<Conjunct> pieces{ca};
    for (const auto& cb : subtrahend) {
      std::vector<Conjunct> next;
      for (const auto& p : pieces) {
        for (auto& q : detail::subtract(p, cb, meter)) next.push_back(std::move(q));
      }
      pieces = std::move(next);
      if (pieces.empty()) break;
    }
    for (auto& p : pieces) out.add_conjunct(std::move(p));
  }
  return out;
}

IntRelation inverse(const IntRelation& r) {
  const std::size_t ni = r.in_arity(), no = r.out_arity();
  IntRelation out(r.out_space(), r.in_space());
  for (const auto& c : r.conjuncts()) {
    std::vector<std::size_t> perm(c.num_vars());
    // New layout [out, in, e]: new var i is old var perm[i].
    for (std::size_t i = 0; i < no; ++i) perm[i] = ni + i;
    for (std::size_t i = 0; i < ni; ++i) perm[no + i] = i;
    for (std::size_t e = 0; e < c.num_exists(); ++e) perm[no + ni + e] = ni + no + e;
    out.add_conjunct(detail::permute(c, perm, ni + no, c.num_exists()));
  }
  return out;
}

IntRelation domain(const IntRelation& r) {
  IntRelation out(r.in_space(), Space{});
  WorkMeter meter;
  for (const auto& c : r.conjuncts()) {
    Conjunct p = c;
    p.set_layout(r.in_arity(), r.out_arity() + c.num_exists());
    for (auto& q : eliminate_existentials(p, meter)) out.add_conjunct(std::move(q));
  }
  return out;
}

IntRelation range(const IntRelation& r) { return domain(inverse(r)).with_names(r.out_space(), Space{}); }

IntRelation restrict_domain(const IntRelation& r, const IntRelation& set) {
  if (!set.is_set() || set.in_arity() != r.in_arity()) {
    throw ContractError("restrict_domain: set arity " + std::to_string(set.in_arity()) +
                        " does not match relation input arity " + std::to_string(r.in_arity()));
  }
  IntRelation lifted(r.in_space(), r.out_space());
  const std::size_t d = r.num_dims();
  for (const auto& c : set.conjuncts()) {
    Conjunct out(d, c.num_exists());
    std::vector<std::size_t> map(c.num_vars());
    for (std::size_t i = 0; i < set.in_arity(); ++i) map[i] = i;
    for (std::size_t e = 0; e < c.num_exists(); ++e) map[set.in_arity() + e] = d + e;
    add_mapped(out, c, map);
    lifted.add_conjunct(std::move(out));
  }
  return intersect(r, lifted);
}

IntRelation restrict_range(const IntRelation& r, const IntRelation& set) {
  return inverse(restrict_domain(inverse(r), set));
}

IntRelation apply_to_set(const IntRelation& r, const IntRelation& set) {
  return range(restrict_domain(r, set));
}

IntRelation product(const IntRelation& x, const IntRelation& y) {
  if (!x.is_set() || !y.is_set()) throw ContractError("product expects two sets");
  const std::size_t nx = x.in_arity(), ny = y.in_arity();
  IntRelation out(x.in_space(), y.in_space());
  for (const auto& cx : x.conjuncts()) {
    for (const auto& cy : y.conjuncts()) {
      Conjunct c(nx + ny, cx.num_exists() + cy.num_exists());
      std::vector<std::size_t> mx(cx.num_vars()), my(cy.num_vars());
      for (std::size_t i = 0; i < nx; ++i) mx[i] = i;
      for (std::size_t e = 0; e < cx.num_exists(); ++e) mx[nx + e] = nx + ny + e;
      for (std::size_t i = 0; i < ny; ++i) my[i] = nx + i;
      for (std::size_t e = 0; e < cy.num_exists(); ++e) my[ny + e] = nx + ny + cx.num_exists() + e;
      add_mapped(c, cx, mx);
      add_mapped(c, cy, my);
      out.add_conjunct(std::move(c));
    }
  }
  return out;
}

bool is_empty(const IntRelation& r) {
  WorkMeter meter;
  for (const auto& c : r.conjuncts()) {
    if (!conjunct_is_empty(c, meter)) return false;
  }
  return true;
}

bool is_subset(const IntRelation& a, const IntRelation& b) {
  require_same_spaces(a, b, "is_subset");
  return is_empty(difference(a, b));
}

bool is_equal(const IntRelation& a, const IntRelation& b) {
  require_same_spaces(a, b, "is_equal");
  if (a.canonical() == b.canonical()) return true;
  return is_subset(a, b) && is_subset(b, a);
}

// --- sampling -------------------------------------------------------------------

namespace {

// Smallest (or any, if unbounded below) value of a single-variable conjunct.
std::optional<Int> pick_value(Conjunct c) {
  if (!normalize(c)) return std::nullopt;
  std::optional<Int> lo, hi;
  for (const auto& e : c.equalities()) {
    // x + k = 0 after normalization.
    Int v = -e.constant / e.coeffs[0];
    lo = v;
    hi = v;
  }
  for (const auto& e : c.inequalities()) {
    const Int& k = e.coeffs[0];
    if (k > 0) {
      Int b = detail::floor_div(-e.constant + k - 1, k);
      if (!lo || b > *lo) lo = b;
    } else {
      Int b = detail::floor_div(e.constant, -k);
      if (!hi || b < *hi) hi = b;
    }
  }
  Int period = 1;
  for (const auto& cg : c.congruences()) period = detail::lcm(period, cg.modulus);
  std::vector<Int> values(1);
  for (Int t = 0; t < period; ++t) {
    Int x;
    if (lo)
      x = *lo + t;
    else if (hi)
      x = *hi - t;
    else
      x = t;
    if (lo && x < *lo) continue;
    if (hi && x > *hi) return std::nullopt;
    values[0] = x;
    if (c.satisfied_by(values)) return x;
  }
  return std::nullopt;
}

std::optional<std::vector<Int>> sample_conjunct(Conjunct cur, WorkMeter& meter) {
  const std::size_t n = cur.num_dims();
  std::vector<Int> point(n);
  for (std::size_t d = 0; d < n; ++d) {
    std::vector<std::size_t> perm(n);
    perm[0] = d;
    std::size_t k = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != d) perm[k++] = i;
    }
    Conjunct projected = detail::permute(cur, perm, 1, n - 1);
    std::optional<Int> best;
    for (auto& q : eliminate_existentials(projected, meter)) {
      auto v = pick_value(q);
      if (v && (!best || *v < *best)) best = v;
    }
    if (!best) return std::nullopt;
    point[d] = *best;
    LinearExpr fix = LinearExpr::var(n, d);
    fix.constant = -*best;
    cur.add_equality(std::move(fix));
  }
  return point;
}

}  // namespace

std::optional<std::vector<Int>> sample(const IntRelation& r) {
  WorkMeter meter;
  for (const auto& q : quantifier_free(r, meter)) {
    if (conjunct_is_empty(q, meter)) continue;
    if (auto p = sample_conjunct(q, meter)) return p;
  }
  return std::nullopt;
}

// --- simplification -------------------------------------------------------------

namespace {

// Uses equalities with a unit coefficient to eliminate one dim from every
// other constraint, preferring the highest-index dim.
void substitute_equalities(Conjunct& c) {
  auto& eqs = c.mutable_equalities();
  std::vector<bool> used_pivot(c.num_vars(), false);
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    std::size_t pivot = c.num_vars();
    for (std::size_t v = c.num_vars(); v-- > 0;) {
      if (!used_pivot[v] && abs(eqs[i].coeffs[v]) == 1) {
        pivot = v;
        break;
      }
    }
    if (pivot == c.num_vars()) continue;
    used_pivot[pivot] = true;
    const LinearExpr p = eqs[i];
    const Int a = p.coeffs[pivot];
    auto subst = [&](LinearExpr& x) {
      Int k = x.coeffs[pivot];
      if (k != 0) x -= p * (k * a);
    };
    for (std::size_t j = 0; j < eqs.size(); ++j) {
      if (j != i) subst(eqs[j]);
    }
    for (auto& x : c.mutable_inequalities()) subst(x);
    for (auto& cg : c.mutable_congruences()) subst(cg.expr);
  }
}

void drop_redundant(Conjunct& c, WorkMeter& meter) {
  auto& ineqs = c.mutable_inequalities();
  for (std::size_t i = 0; i < ineqs.size();) {
    Conjunct test = c;
    auto& t = test.mutable_inequalities();
    LinearExpr neg = -t[i];
    neg.constant -= 1;
    t.erase(t.begin() + static_cast<std::ptrdiff_t>(i));
    test.add_inequality(std::move(neg));
    if (conjunct_is_empty(test, meter)) {
      ineqs.erase(ineqs.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  auto& congs = c.mutable_congruences();
  for (std::size_t i = 0; i < congs.size();) {
    Conjunct rest = c;
    auto& rc = rest.mutable_congruences();
    Congruence dropped = rc[i];
    rc.erase(rc.begin() + static_cast<std::ptrdiff_t>(i));
    bool redundant = true;
    for (Int r = 1; r < dropped.modulus && redundant; ++r) {
      Conjunct test = rest;
      LinearExpr e = dropped.expr;
      e.constant -= r;
      test.add_congruence(std::move(e), dropped.modulus);
      redundant = conjunct_is_empty(test, meter);
    }
    if (redundant) {
      congs.erase(congs.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
}

}  // namespace

IntRelation simplify(const IntRelation& r) {
  WorkMeter meter;
  std::vector<Conjunct> pieces;
  for (auto& q : quantifier_free(r, meter)) {
    if (conjunct_is_empty(q, meter)) continue;
    substitute_equalities(q);
    if (!normalize(q)) continue;
    drop_redundant(q, meter);
    pieces.push_back(std::move(q));
  }
  // Drop pieces covered by the others.
  IntRelation out(r.in_space(), r.out_space());
  std::vector<bool> keep(pieces.size(), true);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    IntRelation self(r.in_space(), r.out_space());
    self.add_conjunct(pieces[i]);
    if (!seen.insert(self.canonical()).second) keep[i] = false;
  }
  // Only overlapping pieces can cover a piece. Subtracting a large union is
  // exponential, so past a few overlaps the piece is simply kept.
  constexpr std::size_t kMaxCoverUnion = 6;
  auto single = [&](std::size_t i) {
    IntRelation s(r.in_space(), r.out_space());
    s.add_conjunct(pieces[i]);
    return s;
  };
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!keep[i]) continue;
    IntRelation self = single(i);
    IntRelation others(r.in_space(), r.out_space());
    bool covered = false;
    for (std::size_t j = 0; j < pieces.size() && !covered; ++j) {
      if (j == i || !keep[j]) continue;
      IntRelation other = single(j);
      if (is_empty(intersect(self, other))) continue;
      if (is_subset(self, other)) covered = true;
      others.add_conjunct(pieces[j]);
    }
    if (!covered && !others.conjuncts().empty() && others.conjuncts().size() <= kMaxCoverUnion)
      covered = is_subset(self, others);
    if (covered) keep[i] = false;
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (keep[i]) out.add_conjunct(std::move(pieces[i]));
  }
  return out;
}

std::optional<std::vector<LinearExpr>> as_affine_function(const IntRelation& r) {
  const std::size_t ni = r.in_arity(), no = r.out_arity();
  IntRelation s = simplify(r);
  if (s.conjuncts().empty()) return std::nullopt;
  std::optional<std::vector<LinearExpr>> result;
  for (const auto& c : s.conjuncts()) {
    std::vector<LinearExpr> fns;
    for (std::size_t j = 0; j < no; ++j) {
      const std::size_t col = ni + j;
      std::optional<LinearExpr> fn;
      for (const auto& e : c.equalities()) {
        if (abs(e.coeffs[col]) != 1) continue;
        bool clean = true;
        for (std::size_t k = ni; k < e.size(); ++k) {
          if (k != col && e.coeffs[k] != 0) clean = false;
        }
        if (!clean) continue;
        // a*y + rest = 0  =>  y = -a * rest
        const Int a = e.coeffs[col];
        LinearExpr f(ni);
        for (std::size_t k = 0; k < ni; ++k) f.coeffs[k] = -a * e.coeffs[k];
        f.constant = -a * e.constant;
        fn = std::move(f);
        break;
      }
      if (!fn) return std::nullopt;
      fns.push_back(std::move(*fn));
    }
    if (!result)
      result = std::move(fns);
    else if (*result != fns)
      return std::nullopt;
  }
  return result;
}

}  // namespace eqcheck
