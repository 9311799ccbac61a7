#include <gtest/gtest.h>

#include <chrono>

#include "enumerate.hpp"
#include "eqcheck/checker.hpp"
#include "eqcheck/frontend.hpp"
#include "eqcheck/interpreter.hpp"
#include "fixtures.hpp"

using namespace eqcheck;
using eqtest::load_fixture;

namespace {

CheckResult check_files(const std::string& a, const std::string& b, const CheckConfig& cfg = {},
                        const ConstantOverrides& ov = {}) {
  return check_equivalence(Addg::build(load_fixture(a, ov)), Addg::build(load_fixture(b, ov)), cfg);
}

CheckResult check_src(const std::string& a, const std::string& b, const CheckConfig& cfg = {}) {
  return check_equivalence(Addg::build(parse_program(a)), Addg::build(parse_program(b)), cfg);
}

const char* kFigures[] = {"fig1a.c", "fig1b.c", "fig1b_scaled.c", "fig1c.c", "fig1d.c", "shared_a.c", "shared_b.c"};

}  // namespace

TEST(Figures, TransformedVersionsAreEquivalent) {
  for (auto [a, b] : {std::pair{"fig1a.c", "fig1b.c"}, {"fig1a.c", "fig1c.c"}, {"fig1b.c", "fig1c.c"},
                      {"fig1a.c", "fig1b_scaled.c"}, {"shared_a.c", "shared_b.c"}}) {
    auto r = check_files(a, b);
    EXPECT_EQ(r.verdict.status, Status::Equivalent) << a << " " << b;
    EXPECT_TRUE(r.diagnostics.empty());
  }
}

TEST(Figures, SplitPairsFirstPathWithFirstAndFifth) {
  auto r = check_files("fig1a.c", "fig1b.c");
  ASSERT_EQ(r.outputs.size(), 1u);
  ASSERT_EQ(r.outputs[0].pieces.size(), 2u);
  EXPECT_TRUE(is_equal(r.outputs[0].pieces[0].domain_set, IntRelation::parse("{[k] | 0 <= k < 512}")));
  EXPECT_TRUE(is_equal(r.outputs[0].pieces[1].domain_set, IntRelation::parse("{[k] | 512 <= k < 1024}")));
  std::vector<std::pair<std::size_t, std::size_t>> from_first;
  for (const auto& l : r.leaves) {
    EXPECT_TRUE(l.ok);
    if (l.a.index != 1) continue;
    from_first.emplace_back(l.a.index, l.b.index);
    if (l.b.index == 1) {
      auto expect = IntRelation::parse("{[k] -> [2k] | 0 <= k < 512}");
      EXPECT_TRUE(is_equal(l.map_a, expect));
      EXPECT_TRUE(is_equal(l.map_b, expect));
    }
  }
  std::sort(from_first.begin(), from_first.end());
  EXPECT_EQ(from_first, (std::vector<std::pair<std::size_t, std::size_t>>{{1, 1}, {1, 5}}));
}

TEST(Figures, BuggyVersionFailsOnEvenPieceOnly) {
  auto r = check_files("fig1a.c", "fig1d.c");
  EXPECT_EQ(r.verdict.status, Status::Inequivalent);
  ASSERT_EQ(r.outputs[0].pieces.size(), 2u);
  const auto& even = r.outputs[0].pieces[0];
  const auto& odd = r.outputs[0].pieces[1];
  EXPECT_TRUE(is_equal(even.domain_set, IntRelation::parse("{[x] | exists j: x = 2j and 0 <= x < 1023}")));
  EXPECT_EQ(even.status, Status::Inequivalent);
  EXPECT_EQ(odd.status, Status::Equivalent);

  // Leaf paths of the original are p, q, r, s = 1..4; those of the buggy
  // version under v3 are w, x, y, z = 1..4.
  std::set<std::pair<std::size_t, std::size_t>> failing, succeeding;
  for (const auto& l : r.leaves)
    if (is_subset(l.domain, even.domain_set)) (l.ok ? succeeding : failing).insert({l.a.index, l.b.index});
  EXPECT_EQ(failing, (std::set<std::pair<std::size_t, std::size_t>>{{1, 4}, {3, 3}}));
  EXPECT_EQ(succeeding, (std::set<std::pair<std::size_t, std::size_t>>{{2, 2}, {4, 1}}));

  ASSERT_EQ(even.diagnostics.size(), 2u);
  auto expect_a = IntRelation::parse("{[x] -> [2x] | exists j: x = 2j and 0 <= x < 1023}");
  auto expect_b = IntRelation::parse("{[x] -> [x] | exists j: x = 2j and 0 <= x < 1023}");
  for (const auto& d : even.diagnostics) {
    EXPECT_EQ(d.kind, DiagnosticKind::MappingMismatch);
    EXPECT_TRUE(is_equal(IntRelation::parse(*d.mapping_a), expect_a));
    EXPECT_TRUE(is_equal(IntRelation::parse(*d.mapping_b), expect_b));
    auto has = [&](const std::string& s) {
      return std::find(d.statements_b.begin(), d.statements_b.end(), s) != d.statements_b.end();
    };
    EXPECT_TRUE(has("v3"));
    EXPECT_TRUE(has("v1"));
    ASSERT_TRUE(d.hint);
    EXPECT_EQ(d.hint->at.side, 1);
    EXPECT_EQ(d.hint->at.statement, "v3");
    EXPECT_EQ(d.hint->at.array, "buf");
    EXPECT_EQ(d.hint->at.occurrence, 2);
    EXPECT_EQ(d.hint->suggestion, "buf[2*k]");
  }
}

TEST(Figures, MatchingOfFlattenedChainsUsesMappings) {
  auto r = check_files("fig1a.c", "fig1c.c");
  ASSERT_EQ(r.verdict.status, Status::Equivalent);
  // Every leaf pairing joins paths that end in the same input with equal
  // mappings, and each original path is used once per piece.
  std::map<std::string, std::set<std::size_t>> per_piece;
  for (const auto& l : r.leaves) {
    EXPECT_EQ(l.leaf_a, l.leaf_b);
    EXPECT_TRUE(is_equal(l.map_a, l.map_b));
    EXPECT_TRUE(per_piece[l.domain.to_string()].insert(l.a.index).second);
  }
  for (const auto& [piece, used] : per_piece) EXPECT_EQ(used, (std::set<std::size_t>{1, 2, 3, 4})) << piece;
  ASSERT_FALSE(r.matches.empty());
  for (const auto& m : r.matches) {
    EXPECT_EQ(m.entries_a.size(), 4u);
    EXPECT_EQ(m.pairs.size(), 4u);
  }
}

TEST(Figures, VerdictsAreSymmetric) {
  for (const char* a : kFigures)
    for (const char* b : kFigures) {
      if (std::string(a).substr(0, 3) != std::string(b).substr(0, 3)) continue;
      EXPECT_EQ(check_files(a, b).verdict.status, check_files(b, a).verdict.status) << a << " " << b;
    }
}

TEST(Figures, ReflexiveOnEveryFixture) {
  for (const char* f : kFigures) EXPECT_EQ(check_files(f, f).verdict.status, Status::Equivalent) << f;
}

TEST(Figures, FinishQuicklyAtFullSize) {
  for (auto [a, b] : {std::pair{"fig1a.c", "fig1b.c"}, {"fig1a.c", "fig1c.c"}, {"fig1b.c", "fig1c.c"}}) {
    auto t0 = std::chrono::steady_clock::now();
    check_files(a, b);
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_LT(s, 10.0) << a << " " << b;
  }
}

TEST(Traversal, LockStepInvariantHolds) {
  for (auto [a, b] : {std::pair{"fig1a.c", "fig1b.c"}, {"fig1a.c", "fig1c.c"}, {"fig1a.c", "fig1d.c"},
                      {"shared_a.c", "shared_b.c"}}) {
    std::size_t points = 0;
    CheckConfig cfg;
    cfg.observer = [&](const SyncSide& x, const SyncSide& y) {
      ++points;
      EXPECT_TRUE(is_equal(domain(*x.map), domain(*y.map))) << a << " " << b;
      EXPECT_EQ(*x.trace, *y.trace) << a << " " << b;
    };
    check_files(a, b, cfg);
    EXPECT_GT(points, 0u);
  }
}

TEST(Flatten, OriginalChainHasFourEntries) {
  Addg g = Addg::build(load_fixture("fig1a.c"));
  std::size_t c = *g.find_array("C");
  std::size_t plus = g.edge(g.out_edges(c)[0]).to;
  auto pieces = flatten(g, plus, IntRelation::identity_on(g.defined_elements(c)));
  ASSERT_EQ(pieces.size(), 1u);
  std::vector<std::string> names;
  for (const auto& e : pieces[0].entries) names.push_back(g.node(e.node).name);
  EXPECT_EQ(names, (std::vector<std::string>{"B", "B", "A", "A"}));
  const char* maps[] = {"{[k] -> [2k] | 0 <= k < 1024}", "{[k] -> [k] | 0 <= k < 1024}",
                        "{[k] -> [2k] | 0 <= k < 1024}", "{[k] -> [k] | 0 <= k < 1024}"};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_TRUE(is_equal(pieces[0].entries[i].mapping, IntRelation::parse(maps[i]))) << i;
    EXPECT_EQ(pieces[0].entries[i].order_index, i);
  }
}

TEST(Flatten, PiecewiseChainAgreesWithEnumeration) {
  const std::int64_t n = 16;
  Program p = load_fixture("fig1c.c", {{"N", n}});
  Addg g = Addg::build(p);
  std::size_t c = *g.find_array("C");
  std::size_t plus = g.edge(g.out_edges(c)[0]).to;
  auto pieces = flatten(g, plus, IntRelation::identity_on(g.defined_elements(c)));
  // buf[2k] comes from the first loop while 2k < N and from the second after.
  ASSERT_EQ(pieces.size(), 2u);
  std::set<eqtest::Point> lo, hi;
  for (std::int64_t k = 0; k < n; ++k) (2 * k < n ? lo : hi).insert({k});
  EXPECT_EQ(eqtest::points_in_box(pieces[0].domain, -1, n + 1), lo);
  EXPECT_EQ(eqtest::points_in_box(pieces[1].domain, -1, n + 1), hi);
  for (const auto& piece : pieces) {
    std::vector<std::string> names;
    for (const auto& e : piece.entries) names.push_back(g.node(e.node).name);
    EXPECT_EQ(names, (std::vector<std::string>{"A", "B", "A", "B"}));
    std::set<eqtest::Point> m2;
    for (const auto& k : eqtest::points_in_box(piece.domain, -1, n + 1)) m2.insert({k[0], 2 * k[0]});
    EXPECT_EQ(eqtest::points_in_box(piece.entries[2].mapping, -1, 2 * n + 1), m2);
  }
}

TEST(Flatten, EvaluatingEntriesReproducesOutputs) {
  const std::int64_t n = 8;
  for (const char* f : {"fig1a.c", "fig1b_scaled.c", "fig1c.c", "fig1d.c"}) {
    Program p = load_fixture(f, {{"N", n}});
    Addg g = Addg::build(p);
    std::size_t c = *g.find_array("C");
    InputSource in(3);
    auto out = run(p, in).outputs.at("C");
    for (std::size_t def : g.out_edges(c)) {
      std::size_t plus = g.edge(def).to;
      auto ws = g.statement(g.edge(def).statement).write_set;
      for (const auto& piece : flatten(g, plus, IntRelation::identity_on(ws))) {
        std::map<std::int64_t, Int> sums;
        for (const auto& e : piece.entries) {
          std::map<std::int64_t, int> hits;
          for (const auto& pt : eqtest::points_in_box(e.mapping, -1, 2 * n + 1)) {
            sums[pt[0]] += in.value(g.node(e.node).name, {pt[1]});
            ++hits[pt[0]];
          }
          for (const auto& [k, h] : hits) EXPECT_EQ(h, 1) << f << " k=" << k;
        }
        auto dom = eqtest::points_in_box(piece.domain, -1, n + 1);
        EXPECT_EQ(sums.size(), dom.size());
        for (const auto& k : dom) EXPECT_EQ(sums[k[0]], out.at(k)) << f << " k=" << k[0];
      }
    }
  }
}

TEST(Memo, SharedSubgraphIsProvedOnce) {
  CheckConfig on, off;
  off.memo = false;
  auto with = check_files("shared_a.c", "shared_b.c", on);
  auto without = check_files("shared_a.c", "shared_b.c", off);
  EXPECT_EQ(with.verdict.status, Status::Equivalent);
  EXPECT_EQ(without.verdict.status, Status::Equivalent);
  EXPECT_EQ(with.stats.memo_hits, 1u);
  EXPECT_EQ(without.stats.memo_hits, 0u);
  EXPECT_LT(with.stats.sub_traversals, without.stats.sub_traversals);
}

TEST(Memo, DifferentCorrespondenceMisses) {
  // Both operands reach the same sum, but under shifted element mappings.
  auto r = check_src("f(int A[], int C[]) { int k, t[9];\n"
                     " for(k=0;k<9;k++) s1: t[k] = A[k] + A[k+1];\n"
                     " for(k=0;k<8;k++) s2: C[k] = t[k] - t[k+1]; }",
                     "f(int A[], int C[]) { int k, t[9];\n"
                     " for(k=0;k<9;k++) r1: t[k] = A[k+1] + A[k];\n"
                     " for(k=0;k<8;k++) r2: C[k] = t[k] - t[k+1]; }");
  EXPECT_EQ(r.verdict.status, Status::Equivalent);
  EXPECT_EQ(r.stats.memo_hits, 0u);
}

TEST(Memo, TransparentOnCorpus) {
  CheckConfig off;
  off.memo = false;
  for (const char* a : kFigures)
    for (const char* b : kFigures) {
      if (std::string(a).substr(0, 3) != std::string(b).substr(0, 3)) continue;
      EXPECT_EQ(check_files(a, b).verdict.status, check_files(a, b, off).verdict.status) << a << " " << b;
    }
}

TEST(Mismatch, OperatorSymbols) {
  auto r = check_src("f(int A[], int B[], int C[]) { int k; for(k=0;k<8;k++) s: C[k] = A[k] + B[k]; }",
                     "f(int A[], int B[], int C[]) { int k; for(k=0;k<8;k++) t: C[k] = A[k] * B[k]; }");
  EXPECT_EQ(r.verdict.status, Status::Inequivalent);
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].kind, DiagnosticKind::OperatorMismatch);
  EXPECT_EQ(r.diagnostics[0].statements_a, std::vector<std::string>{"s"});
  EXPECT_EQ(r.diagnostics[0].statements_b, std::vector<std::string>{"t"});
  EXPECT_FALSE(r.diagnostics[0].mapping_a);
}

TEST(Mismatch, NonCommutativeOperandsKeepOrder) {
  const char* a = "f(int A[], int B[], int C[]) { int k; for(k=0;k<8;k++) s: C[k] = A[k] - B[k]; }";
  const char* b = "f(int A[], int B[], int C[]) { int k; for(k=0;k<8;k++) s: C[k] = B[k] - A[k]; }";
  auto r = check_src(a, b);
  EXPECT_EQ(r.verdict.status, Status::Inequivalent);
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.diagnostics[0].kind, DiagnosticKind::LeafMismatch);
}

TEST(Mismatch, LeafAgainstOperator) {
  auto r = check_src("f(int A[], int C[]) { int k; for(k=0;k<8;k++) s: C[k] = A[k] + 1; }",
                     "f(int A[], int C[]) { int k; for(k=0;k<8;k++) s: C[k] = A[k] + (A[k] * 1); }");
  EXPECT_EQ(r.verdict.status, Status::Inequivalent);
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.diagnostics[0].kind, DiagnosticKind::LeafMismatch);
}

TEST(Mismatch, OperandCountOfFlattenedChain) {
  auto r = check_src("f(int A[], int C[]) { int k; for(k=0;k<8;k++) s: C[k] = A[k] + A[k] + A[k]; }",
                     "f(int A[], int C[]) { int k; for(k=0;k<8;k++) s: C[k] = A[k] + A[k]; }");
  EXPECT_EQ(r.verdict.status, Status::Inequivalent);
  bool count = false;
  for (const auto& d : r.diagnostics) count = count || d.kind == DiagnosticKind::OperatorMismatch;
  EXPECT_TRUE(count);
}

TEST(Interface, OutputOnOneSideOnly) {
  auto r = check_src("f(int A[], int C[], int D[]) { int k; for(k=0;k<8;k++) { s: C[k] = A[k]; t: D[k] = A[k]; } }",
                     "f(int A[], int C[], int D[]) { int k; for(k=0;k<8;k++) s: C[k] = A[k]; }");
  EXPECT_EQ(r.verdict.status, Status::Inequivalent);
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].kind, DiagnosticKind::InterfaceMismatch);
  EXPECT_EQ(r.diagnostics[0].output, "D");
}

TEST(Interface, DifferentWrittenElements) {
  auto r = check_src("f(int A[], int C[]) { int k; for(k=0;k<8;k++) s: C[k] = A[k]; }",
                     "f(int A[], int C[]) { int k; for(k=0;k<7;k++) s: C[k] = A[k]; }");
  EXPECT_EQ(r.verdict.status, Status::Inequivalent);
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.diagnostics[0].kind, DiagnosticKind::InterfaceMismatch);
  EXPECT_TRUE(is_equal(IntRelation::parse(*r.diagnostics[0].disagreement), IntRelation::parse("{[x] | x = 7}")));
}

TEST(Config, FocusRestrictsOutputs) {
  const char* a = "f(int A[], int C[], int D[]) { int k; for(k=0;k<8;k++) { s: C[k] = A[k]; t: D[k] = A[k]; } }";
  const char* b = "f(int A[], int C[], int D[]) { int k; for(k=0;k<8;k++) { s: C[k] = A[k]; t: D[k] = A[k+1]; } }";
  EXPECT_EQ(check_src(a, b).verdict.status, Status::Inequivalent);
  CheckConfig cfg;
  cfg.focus = {"C"};
  auto r = check_src(a, b, cfg);
  EXPECT_EQ(r.verdict.status, Status::Equivalent);
  ASSERT_EQ(r.outputs.size(), 1u);
  cfg.focus = {"E"};
  EXPECT_THROW(check_src(a, b, cfg), ContractError);
}

TEST(Config, CorrespondenceCutsAndVerifiesIntermediates) {
  const char* a = "f(int A[], int C[]) { int k, t[8]; for(k=0;k<8;k++) s1: t[k] = A[k] * 2;\n"
                  " for(k=0;k<8;k++) s2: C[k] = t[k] + 1; }";
  const char* b = "f(int A[], int C[]) { int k, u[8]; for(k=0;k<8;k++) r1: u[k] = 2 * A[k];\n"
                  " for(k=0;k<8;k++) r2: C[k] = u[k] + 1; }";
  CheckConfig cfg;
  cfg.correspondences = {{"t", "u"}};
  auto r = check_src(a, b, cfg);
  EXPECT_EQ(r.verdict.status, Status::Equivalent);
  ASSERT_EQ(r.outputs.size(), 2u);
  EXPECT_EQ(r.outputs[1].name, "t~u");
  bool cut_leaf = false;
  for (const auto& l : r.leaves) cut_leaf = cut_leaf || (l.leaf_a == "t" && l.leaf_b == "u");
  EXPECT_TRUE(cut_leaf);

  // A wrong correspondence is caught when the pair itself is verified.
  const char* c = "f(int A[], int C[]) { int k, u[8]; for(k=0;k<8;k++) r1: u[k] = 3 * A[k];\n"
                  " for(k=0;k<8;k++) r2: C[k] = u[k] + 1; }";
  EXPECT_EQ(check_src(a, c, cfg).verdict.status, Status::Inequivalent);
  cfg.correspondences = {{"A", "A"}};
  EXPECT_THROW(check_src(a, b, cfg), ContractError);
}

TEST(Unsupported, CyclicGraph) {
  const char* a = "f(int x[], int a[]) { int k; for(k=1;k<8;k++) s: a[k] = a[k-1] + x[k]; }";
  auto r = check_src(a, a);
  EXPECT_EQ(r.verdict.status, Status::Unsupported);
  EXPECT_NE(r.verdict.reason.find("cycle"), std::string::npos);
}

TEST(Unsupported, AmbiguousMatchingBeyondLookahead) {
  const char* a = "f(int A[], int B[], int C[]) { int k; for(k=0;k<8;k++) s: C[k] = (A[k] * B[k]) + (A[k] * A[k]); }";
  const char* b = "f(int A[], int B[], int C[]) { int k; for(k=0;k<8;k++) s: C[k] = (A[k] * A[k]) + (B[k] * A[k]); }";
  EXPECT_EQ(check_src(a, b).verdict.status, Status::Equivalent);
  CheckConfig cfg;
  cfg.lookahead = 0;
  auto r = check_src(a, b, cfg);
  EXPECT_EQ(r.verdict.status, Status::Unsupported);
  EXPECT_NE(r.verdict.reason.find("ambiguous matching"), std::string::npos);
}

TEST(Unsupported, BudgetExhaustion) {
  CheckConfig cfg;
  cfg.budget = 1;
  auto r = check_files("fig1a.c", "fig1c.c", cfg);
  EXPECT_EQ(r.verdict.status, Status::Unsupported);
  EXPECT_NE(r.verdict.reason.find("budget"), std::string::npos);
}

TEST(Limits, DiagnosticsAreCapped) {
  std::string a = "f(int A[], int C[]) { int k; for(k=0;k<8;k++) s: C[k] = A[k]";
  std::string b = a;
  for (int i = 1; i <= 30; ++i) {
    a += " - A[k+" + std::to_string(i) + "]";
    b += " - A[k+" + std::to_string(i + 1) + "]";
  }
  a += "; }";
  b += "; }";
  CheckConfig cfg;
  cfg.max_diagnostics = 20;
  auto r = check_src(a, b, cfg);
  EXPECT_EQ(r.verdict.status, Status::Inequivalent);
  EXPECT_EQ(r.diagnostics.size(), 20u);
  EXPECT_EQ(r.suppressed_diagnostics, 10u);
}
