#include "relation_oracle.hpp"

#include "random_relations.hpp"

namespace eqtest {

using namespace eqcheck;

namespace {

struct Case {
  RelationOracleReport& rep;
  std::string context;

  void expect(bool ok, const std::string& what) {
    ++rep.comparisons;
    if (!ok) rep.disagreements.push_back(what + " :: " + context);
  }
  void expect_points(const IntRelation& r, const std::vector<Box>& boxes, const PointSet& want,
                     const std::string& what) {
    BoxScan scan = scan_boxes(r, boxes);
    expect(scan.complete && scan.points == want, what + " (" + std::to_string(scan.points.size()) + " vs " +
                                                     std::to_string(want.size()) + " points" +
                                                     (scan.complete ? "" : ", escapes cover") + ")");
  }
};

std::vector<Box> join(std::vector<Box> a, const std::vector<Box>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

RelationOracleReport run_relation_oracle(std::uint64_t seed, std::size_t cases) {
  RelationOracleReport rep;
  RelationGenerator gen(seed);
  for (std::size_t i = 0; i < cases; ++i) {
    RelationShape s = gen.shape();
    Model ma = gen.generate(s), mb = gen.generate(s);
    // compose needs first.out == second.in and every arity <= 3
    RelationShape s1{1, 1}, s2{1, 1};
    switch (std::uniform_int_distribution<int>(0, 3)(gen.rng())) {
      case 1: s2.out = 2; break;
      case 2: s1.in = 2; break;
      case 3: s1.out = 2; s2.in = 2; break;
      default: break;
    }
    Model mf = gen.generate(s1), mg = gen.generate(s2);
    rep.relations += 4;
    ++rep.cases;

    Case c{rep, "seed " + std::to_string(seed) + " case " + std::to_string(i) + ": a=" + ma.text() +
                    " b=" + mb.text() + " f=" + mf.text() + " g=" + mg.text()};
    try {
      IntRelation a = ma.relation(), b = mb.relation(), f = mf.relation(), g = mg.relation();
      PointSet pa = ma.points(), pb = mb.points(), pf = mf.points(), pg = mg.points();

      c.expect(is_empty(a) == pa.empty(), "is_empty(a)");
      c.expect(is_empty(f) == pf.empty(), "is_empty(f)");
      c.expect_points(a, boxes_of(ma), pa, "parse(a)");
      c.expect_points(intersect(a, b), boxes_of(ma), model_intersect(pa, pb), "intersect");
      c.expect_points(unite(a, b), join(boxes_of(ma), boxes_of(mb)), model_union(pa, pb), "union");
      c.expect_points(difference(a, b), boxes_of(ma), model_difference(pa, pb), "difference");
      c.expect_points(compose(f, g), compose_boxes(mf, mg), model_compose(pf, pg, s1.in, s1.out), "compose");
      c.expect(is_equal(a, b) == (pa == pb), "is_equal(a, b)");
      c.expect(is_equal(a, unite(difference(a, b), intersect(a, b))), "is_equal(a, (a-b) u (a^b))");
      IntRelation shifted = unite(difference(a, b), b);
      c.expect(is_equal(shifted, unite(a, b)), "is_equal((a-b) u b, a u b)");
      c.expect(is_equal(simplify(unite(a, a)), a), "is_equal(simplify(a u a), a)");
    } catch (const UnsupportedError& e) {
      ++rep.unsupported;
      rep.disagreements.push_back(std::string("unsupported: ") + e.what() + " :: " + c.context);
    }
  }
  return rep;
}

}  // namespace eqtest
