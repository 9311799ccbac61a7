#include <gtest/gtest.h>

#include <regex>

#include "enumerate.hpp"
#include "eqcheck/checker.hpp"
#include "eqcheck/frontend.hpp"
#include "fixtures.hpp"

using namespace eqcheck;
using eqtest::load_fixture;
using eqtest::read_fixture;

namespace {

CheckResult check_programs(const Program& a, const Program& b) {
  return check_equivalence(Addg::build(a), Addg::build(b));
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  auto at = s.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  return s.replace(at, from.size(), to);
}

}  // namespace

TEST(Render, PathsShowStatementsPositionsAndReferences) {
  Addg g = Addg::build(load_fixture("fig1a.c"));
  std::size_t c = *g.find_array("C");
  auto paths = g.paths(c);
  ASSERT_EQ(paths.size(), 4u);
  PathTrace t{c, paths[2], 3};
  EXPECT_EQ(render_path(g, t), "C -s3-> + -2-> buf[2*k] -s2-> + -1-> A[2*k - 2]");
  EXPECT_EQ(statements_on(g, t), (std::vector<std::string>{"s3", "s2"}));
  auto sus = suspects_on(g, t, 0);
  ASSERT_EQ(sus.size(), 4u);
  EXPECT_EQ(sus[0].text, "C[k]");
  EXPECT_EQ(sus[1].text, "buf[2*k]");
  EXPECT_EQ(sus[2].text, "buf[2*k - 2]");
  EXPECT_EQ(sus[3].text, "A[2*k - 2]");
}

TEST(Mutation, ShiftedIndexDisagreesOnWholePiece) {
  const std::int64_t n = 16;
  std::string src = replace_once(read_fixture("fig1b_scaled.c"), "buf[k] = A[2*k]", "buf[k] = A[2*k+1]");
  auto r = check_programs(load_fixture("fig1a.c", {{"N", n}}), parse_program(src, "mut.c", {{"N", n}}));
  ASSERT_EQ(r.verdict.status, Status::Inequivalent);
  for (const auto& piece : r.outputs[0].pieces) {
    ASSERT_EQ(piece.diagnostics.size(), 1u);
    const Diagnostic& d = piece.diagnostics[0];
    EXPECT_EQ(d.kind, DiagnosticKind::MappingMismatch);
    auto ma = IntRelation::parse(*d.mapping_a);
    auto mb = IntRelation::parse(*d.mapping_b);
    EXPECT_FALSE(is_equal(ma, mb));
    auto dis = IntRelation::parse(*d.disagreement);
    EXPECT_TRUE(is_equal(dis, piece.domain_set));
    // Pointwise: every output element of the piece reads a different A element.
    auto pa = eqtest::points_in_box(ma, -1, 2 * n + 2);
    auto pb = eqtest::points_in_box(mb, -1, 2 * n + 2);
    for (const auto& k : eqtest::points_in_box(piece.domain_set, -1, n + 1)) {
      EXPECT_TRUE(pa.count({k[0], 2 * k[0]}));
      EXPECT_TRUE(pb.count({k[0], 2 * k[0] + 1}));
    }
    EXPECT_NE(std::find(d.statements_b.begin(), d.statements_b.end(), "t2"), d.statements_b.end());
    EXPECT_FALSE(d.hint);  // a single failing path gives no hint
  }
}

TEST(Heuristic, SharedPrefixWithSeveralOccurrencesGivesNoHint) {
  const char* a = "f(int A[], int B[], int C[]) { int k;\n"
                  " for(k=0;k<8;k++) s1: C[k] = A[k] + B[k]; }";
  const char* b = "f(int A[], int B[], int C[]) { int k, t[9], u[8];\n"
                  " for(k=0;k<9;k++) r1: t[k] = A[k] + B[k];\n"
                  " for(k=0;k<8;k++) r2: u[k] = t[k+1];\n"
                  " for(k=0;k<8;k++) r3: C[k] = u[k]; }";
  auto r = check_programs(parse_program(a), parse_program(b));
  ASSERT_EQ(r.verdict.status, Status::Inequivalent);
  ASSERT_EQ(r.diagnostics.size(), 2u);
  for (const auto& d : r.diagnostics) {
    EXPECT_EQ(d.kind, DiagnosticKind::MappingMismatch);
    EXPECT_FALSE(d.hint);
  }
}

TEST(Heuristic, ReadOnBothSidesIsAmbiguous) {
  const char* a = "f(int A[], int B[], int C[]) { int k, t[8];\n"
                  " for(k=0;k<8;k++) s1: t[k] = A[k] + B[k];\n"
                  " for(k=0;k<8;k++) s2: C[k] = t[k] * A[k]; }";
  const char* b = "f(int A[], int B[], int C[]) { int k, t[9];\n"
                  " for(k=0;k<9;k++) s1: t[k] = A[k] + B[k];\n"
                  " for(k=0;k<8;k++) s2: C[k] = t[k+1] * A[k]; }";
  auto r = check_programs(parse_program(a), parse_program(b));
  ASSERT_EQ(r.diagnostics.size(), 2u);
  for (const auto& d : r.diagnostics) EXPECT_FALSE(d.hint);
}

TEST(Heuristic, UniqueCommonOccurrenceIsNamedWithFix) {
  const char* a = "f(int A[], int B[], int C[]) { int k;\n"
                  " for(k=0;k<8;k++) s2: C[k] = (A[k] + B[k]) * A[k]; }";
  const char* b = "f(int A[], int B[], int C[]) { int k, t[9];\n"
                  " for(k=0;k<9;k++) s1: t[k] = A[k] + B[k];\n"
                  " for(k=0;k<8;k++) s2: C[k] = t[k+1] * A[k]; }";
  auto r = check_programs(parse_program(a), parse_program(b));
  ASSERT_EQ(r.verdict.status, Status::Inequivalent);
  ASSERT_EQ(r.diagnostics.size(), 2u);
  for (const auto& d : r.diagnostics) {
    ASSERT_TRUE(d.hint);
    EXPECT_EQ(d.hint->at.statement, "s2");
    EXPECT_EQ(d.hint->at.text, "t[k + 1]");
    EXPECT_EQ(d.hint->suggestion, "t[k]");
  }
}

TEST(Invariants, RenderedMappingsReparseAndDiffer) {
  std::vector<std::pair<std::string, std::string>> mutants = {
      {"fig1b_scaled.c", "buf[k] = A[2*k]"}, {"fig1b_scaled.c", "tmp[k] + buf[k]"}, {"fig1c.c", "buf[k] + buf[2*k]"}};
  std::vector<std::string> edits = {"buf[k] = A[2*k+2]", "tmp[k] + buf[k+1]", "buf[k] + buf[2*k+1]"};
  for (std::size_t i = 0; i < mutants.size(); ++i) {
    std::string src = replace_once(read_fixture(mutants[i].first), mutants[i].second, edits[i]);
    Program mut = parse_program(src, "mut.c", {{"N", 16}});
    auto r = check_programs(load_fixture("fig1a.c", {{"N", 16}}), mut);
    ASSERT_NE(r.verdict.status, Status::Equivalent) << edits[i];
    for (const auto& d : r.diagnostics) {
      if (d.kind != DiagnosticKind::MappingMismatch) continue;
      EXPECT_FALSE(is_equal(IntRelation::parse(*d.mapping_a), IntRelation::parse(*d.mapping_b)));
      IntRelation::parse(*d.disagreement);
    }
  }
}
