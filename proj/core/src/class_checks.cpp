#include <sstream>

#include "eqcheck/frontend.hpp"

namespace eqcheck {

std::string to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::DoubleWrite: return "double-write";
    case Violation::Kind::UseBeforeDef: return "use-before-def";
    case Violation::Kind::UninitializedRead: return "uninitialized-read";
    case Violation::Kind::OutOfBounds: return "out-of-bounds";
  }
  return "?";
}

namespace {

std::string element_text(const std::string& array, const std::vector<Int>& e) {
  std::string out = array;
  for (const auto& v : e) out += "[" + v.get_str() + "]";
  return out;
}

std::vector<Int> first_element(const IntRelation& set) {
  auto s = sample(set);
  return s ? *s : std::vector<Int>{};
}

// Writes of one statement instance as an element, given a sampled iteration.
std::vector<Int> element_at(const StatementInfo& s, const std::vector<Int>& iter) {
  std::map<std::string, std::int64_t> env;
  for (std::size_t i = 0; i < s.iterators.size(); ++i) env[s.iterators[i]] = iter[i].get_si();
  std::vector<Int> out;
  for (const auto& idx : s.assign->lhs.indices) out.push_back(Int(static_cast<long>(idx.evaluate(env))));
  return out;
}

std::size_t common_loops(const StatementInfo& a, const StatementInfo& b) {
  std::size_t l = 0;
  while (l < a.loops.size() && l < b.loops.size() && a.loops[l] == b.loops[l]) ++l;
  return l;
}

// {[r-iteration] -> [w-iteration] | instance w executes strictly before r}
IntRelation precedes(const StatementInfo& w, const StatementInfo& r) {
  std::size_t nr = r.iterators.size(), nw = w.iterators.size(), n = nr + nw;
  std::size_t shared = common_loops(w, r);
  IntRelation out(Space(r.iterators), Space(w.iterators));
  auto equal_prefix = [&](Conjunct& c, std::size_t upto) {
    for (std::size_t l = 0; l < upto; ++l) c.add_equality(LinearExpr::var(n, l) - LinearExpr::var(n, nr + l));
  };
  for (std::size_t l = 0; l < shared; ++l) {
    Conjunct c(n, 0);
    equal_prefix(c, l);
    // dir * w_l < dir * r_l
    LinearExpr gap = LinearExpr::var(n, l) - LinearExpr::var(n, nr + l);
    gap *= Int(r.directions[l]);
    gap.constant -= 1;
    c.add_inequality(std::move(gap));
    out.add_conjunct(std::move(c));
  }
  if (w.positions[shared] < r.positions[shared]) {
    Conjunct c(n, 0);
    equal_prefix(c, shared);
    out.add_conjunct(std::move(c));
  }
  return out;
}

std::vector<const StatementInfo*> writers_of(const std::vector<StatementInfo>& stmts, const std::string& array) {
  std::vector<const StatementInfo*> out;
  for (const auto& s : stmts)
    if (s.assign->lhs.array == array) out.push_back(&s);
  return out;
}

}  // namespace

std::vector<Violation> check_single_assignment(const Program& p) {
  std::vector<Violation> out;
  auto stmts = collect_statements(p);
  for (std::size_t i = 0; i < stmts.size(); ++i) {
    const auto& a = stmts[i];
    const std::string& array = a.assign->lhs.array;
    IntRelation wa = a.write_access();

    IntRelation self = difference(compose(wa, inverse(wa)), IntRelation::identity_on(a.domain));
    if (auto pt = sample(self)) {
      std::vector<Int> iter(pt->begin(), pt->begin() + static_cast<long>(a.iterators.size()));
      Violation v{Violation::Kind::DoubleWrite, array, {a.label}, element_at(a, iter), ""};
      v.message = "statement " + a.label + " writes " + element_text(array, v.element) + " in more than one iteration";
      out.push_back(std::move(v));
    }
    for (std::size_t j = i + 1; j < stmts.size(); ++j) {
      const auto& b = stmts[j];
      if (b.assign->lhs.array != array) continue;
      IntRelation both = intersect(a.write_set(), b.write_set());
      if (is_empty(both)) continue;
      Violation v{Violation::Kind::DoubleWrite, array, {a.label, b.label}, first_element(both), ""};
      v.message = "statements " + a.label + " and " + b.label + " both write " + element_text(array, v.element);
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::vector<Violation> check_def_use_order(const Program& p) {
  std::vector<Violation> out;
  auto stmts = collect_statements(p);
  for (const auto& r : stmts) {
    for (const ArrayRef* ref : reads_of(r.assign->rhs)) {
      const ArrayDecl* decl = p.find_array(ref->array);
      if (!decl || decl->role == ArrayRole::Input) continue;
      IntRelation ra = r.access(*ref);
      IntRelation read_set = range(ra);
      IntRelation written = IntRelation::empty_set(read_set.in_space());
      for (const StatementInfo* w : writers_of(stmts, ref->array)) {
        written = unite(written, w->write_set());
        IntRelation dep = compose(ra, inverse(w->write_access()));
        IntRelation late = difference(dep, precedes(*w, r));
        if (is_empty(late)) continue;
        IntRelation elems = apply_to_set(ra, domain(late));
        Violation v{Violation::Kind::UseBeforeDef, ref->array, {r.label, w->label}, first_element(elems), ""};
        v.message = "statement " + r.label + " reads " + element_text(ref->array, v.element) +
                    " before statement " + w->label + " writes it";
        out.push_back(std::move(v));
      }
      IntRelation missing = difference(read_set, written);
      if (!is_empty(missing)) {
        Violation v{Violation::Kind::UninitializedRead, ref->array, {r.label}, first_element(missing), ""};
        v.message = "statement " + r.label + " reads " + element_text(ref->array, v.element) +
                    " which is never written";
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

std::vector<Violation> check_bounds(const Program& p) {
  std::vector<Violation> out;
  auto stmts = collect_statements(p);
  for (const auto& s : stmts) {
    std::vector<const ArrayRef*> refs{&s.assign->lhs};
    for (const ArrayRef* r : reads_of(s.assign->rhs)) refs.push_back(r);
    for (const ArrayRef* ref : refs) {
      const ArrayDecl* decl = p.find_array(ref->array);
      if (!decl) continue;
      std::size_t d = decl->extents.size();
      IntRelation outside = IntRelation::empty_set(Space::anonymous(d));
      for (std::size_t j = 0; j < d; ++j) {
        Conjunct lo(d, 0);
        LinearExpr e = LinearExpr::var(d, j) * Int(-1);
        e.constant = -1;  // x_j <= -1
        lo.add_inequality(std::move(e));
        outside.add_conjunct(std::move(lo));
        if (decl->extents[j]) {
          Conjunct hi(d, 0);
          LinearExpr h = LinearExpr::var(d, j);
          h.constant = -Int(static_cast<long>(*decl->extents[j]));  // x_j >= extent
          hi.add_inequality(std::move(h));
          outside.add_conjunct(std::move(hi));
        }
      }
      IntRelation bad = intersect(range(s.access(*ref)), outside);
      if (is_empty(bad)) continue;
      Violation v{Violation::Kind::OutOfBounds, ref->array, {s.label}, first_element(bad), ""};
      v.message = "statement " + s.label + " accesses " + element_text(ref->array, v.element) +
                  " outside the declared extent";
      out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace eqcheck
