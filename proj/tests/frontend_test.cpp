#include <gtest/gtest.h>

#include "enumerate.hpp"
#include "eqcheck/frontend.hpp"
#include "fixtures.hpp"

using namespace eqcheck;
using eqtest::load_fixture;

namespace {

const StatementInfo& stmt(const std::vector<StatementInfo>& all, const std::string& label) {
  for (const auto& s : all)
    if (s.label == label) return s;
  throw std::runtime_error("no statement " + label);
}

FrontendError parse_error(const std::string& src) {
  try {
    parse_program(src, "t.c");
  } catch (const FrontendError& e) {
    return e;
  }
  throw std::runtime_error("expected a parse error for:\n" + src);
}

// Iterations of a single loop, found by stepping it literally.
std::set<eqtest::Point> literal_loop(std::int64_t init, std::function<bool(std::int64_t)> cond, std::int64_t step) {
  std::set<eqtest::Point> out;
  for (std::int64_t k = init; cond(k); k += step) out.insert({k});
  return out;
}

}  // namespace

TEST(Parse, OriginalFunctionStatementsAndDomains) {
  Program p = load_fixture("fig1a.c");
  EXPECT_EQ(p.name, "foo");
  EXPECT_EQ(p.inputs(), (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(p.outputs(), (std::vector<std::string>{"C"}));
  auto stmts = collect_statements(p);
  ASSERT_EQ(stmts.size(), 3u);
  EXPECT_EQ(stmts[0].label, "s1");
  EXPECT_EQ(stmts[1].label, "s2");
  EXPECT_EQ(stmts[2].label, "s3");
  EXPECT_TRUE(is_equal(stmts[0].domain, IntRelation::parse("{[k] | 0 <= k < 1024}")));
  EXPECT_TRUE(is_equal(stmts[1].domain, IntRelation::parse("{[k] | 1 <= k <= 1024}")));
  EXPECT_TRUE(is_equal(stmts[2].domain, IntRelation::parse("{[k] | 0 <= k < 1024}")));
  EXPECT_EQ(stmts[1].directions, std::vector<int>{-1});
}

TEST(Parse, StridedLoopDomainCarriesCongruence) {
  Program p = load_fixture("fig1c.c");
  auto stmts = collect_statements(p);
  EXPECT_TRUE(is_equal(stmt(stmts, "u2").domain,
                       IntRelation::parse("{[k] | 1024 <= k <= 2046 and k mod 2 = 0}")));
}

TEST(Parse, StridedLoopDomainMatchesLiteralExecution) {
  for (std::int64_t n : {5, 8, 13}) {
    Program p = load_fixture("fig1c.c", {{"N", n}});
    auto dom = stmt(collect_statements(p), "u2").domain;
    auto expect = literal_loop(n, [&](std::int64_t k) { return k <= 2 * n - 2; }, 2);
    EXPECT_EQ(eqtest::points_in_box(dom, -2, 3 * n), expect) << "N=" << n;
  }
}

TEST(Parse, ElseBranchConjoinsNegatedGuard) {
  auto stmts = collect_statements(load_fixture("fig1b.c"));
  EXPECT_TRUE(is_equal(stmt(stmts, "t3").domain, IntRelation::parse("{[k] | 0 <= k < 512}")));
  EXPECT_TRUE(is_equal(stmt(stmts, "t4").domain, IntRelation::parse("{[k] | 512 <= k < 1024}")));
}

TEST(Parse, EmptyBodyHasNoStatements) {
  Program p = parse_program("#define N 4\nf(int A[]) { }\n");
  EXPECT_TRUE(collect_statements(p).empty());
  EXPECT_TRUE(p.outputs().empty());
}

TEST(Parse, OverrideReplacesDefineBeforeDependentConstants) {
  Program p = parse_program("#define N 1024\n#define M (2*N)\nf(int A[], int C[]) { int k, t[M];\n"
                            "for(k=0;k<M;k++) s: C[k] = A[k]; }\n",
                            "t.c", {{"N", 4}});
  EXPECT_EQ(p.constants.at("M"), 8);
  EXPECT_EQ(*p.find_array("t")->extents[0], 8);
}

TEST(Parse, UserFunctionPragmas) {
  Program p = parse_program("/*@ assoc comm */ int add(int, int);\nint g(int, int);\n"
                            "f(int A[], int C[]) { int k; for(k=0;k<4;k++) s: C[k] = g(add(A[k], 1), A[k+1]); }\n");
  ASSERT_NE(p.operators.find("add"), nullptr);
  EXPECT_TRUE(p.operators.find("add")->associative);
  EXPECT_TRUE(p.operators.find("add")->commutative);
  EXPECT_FALSE(p.operators.find("g")->associative);
  EXPECT_FALSE(p.operators.find("g")->commutative);
  EXPECT_FALSE(p.operators.find("-")->commutative);
  EXPECT_TRUE(p.operators.find("*")->associative);
}

TEST(Parse, MultiDimensionalArrays) {
  Program p = parse_program("#define N 4\nf(int A[][N], int C[][N]) { int i, j;\n"
                            "for(i=0;i<N;i++) for(j=i;j<N;j++) s: C[i][j] = A[j][i]; }\n");
  auto stmts = collect_statements(p);
  ASSERT_EQ(stmts.size(), 1u);
  EXPECT_TRUE(is_equal(stmts[0].domain, IntRelation::parse("{[i, j] | 0 <= i <= j < 4}")));
  EXPECT_TRUE(is_equal(stmts[0].write_access(), IntRelation::parse("{[i, j] -> [i, j] | 0 <= i <= j < 4}")));
}

TEST(Parse, UnlabeledStatementsGetFreshLabels) {
  Program p = parse_program("f(int A[], int C[]) { int k; for(k=0;k<4;k++) C[k] = A[k]; S1: C[4] = A[0]; }\n");
  auto stmts = collect_statements(p);
  ASSERT_EQ(stmts.size(), 2u);
  EXPECT_NE(stmts[0].label, stmts[1].label);
  EXPECT_EQ(stmts[1].label, "S1");
}

TEST(ParseErrors, SyntaxErrorReportsLineAndColumn) {
  auto e = parse_error("f(int A[], int C[]) {\n  int k;\n  for(k=0; k<4; k++)\n    s: C[k] = A[k] +;\n}\n");
  EXPECT_EQ(e.kind(), FrontendError::Kind::Syntax);
  EXPECT_EQ(e.loc().line, 4);
  EXPECT_EQ(e.loc().col, 21);
  EXPECT_EQ(std::string(e.what()).rfind("t.c:4:21: ", 0), 0u) << e.what();
}

TEST(ParseErrors, NonAffineSubscript) {
  EXPECT_EQ(parse_error("f(int A[], int C[]) { int k; for(k=0;k<4;k++) s: C[k] = A[k*k]; }").kind(),
            FrontendError::Kind::NonAffine);
  EXPECT_EQ(parse_error("f(int A[], int C[]) { int k; for(k=0;k<4;k++) s: C[k] = A[A[k]]; }").kind(),
            FrontendError::Kind::NonAffine);
}

TEST(ParseErrors, DataDependentGuardAndBound) {
  EXPECT_EQ(parse_error("f(int A[], int C[]) { int k; for(k=0;k<4;k++) if (A[k] > 0) s: C[k] = A[k]; }").kind(),
            FrontendError::Kind::DataDependent);
  EXPECT_EQ(parse_error("f(int A[], int C[]) { int k; for(k=0;k<A[0];k++) s: C[k] = A[k]; }").kind(),
            FrontendError::Kind::DataDependent);
}

TEST(ParseErrors, PointerDereference) {
  EXPECT_EQ(parse_error("f(int *A, int C[]) { }").kind(), FrontendError::Kind::Pointer);
  EXPECT_EQ(parse_error("f(int A[], int C[]) { int k; for(k=0;k<4;k++) s: C[k] = *A; }").kind(),
            FrontendError::Kind::Pointer);
}

TEST(ParseErrors, LoopMustTerminate) {
  EXPECT_EQ(parse_error("f(int A[], int C[]) { int k; for(k=0;k>=0;k++) s: C[k] = A[k]; }").kind(),
            FrontendError::Kind::Unsupported);
  EXPECT_EQ(parse_error("f(int A[], int C[]) { int k; for(k=0;k<4;k+=0) s: C[k] = A[k]; }").kind(),
            FrontendError::Kind::Unsupported);
}

TEST(ParseErrors, UndeclaredArrayAndDuplicateLabel) {
  EXPECT_EQ(parse_error("f(int A[], int C[]) { int k; for(k=0;k<4;k++) s: C[k] = Z[k]; }").kind(),
            FrontendError::Kind::Semantic);
  EXPECT_EQ(parse_error("f(int A[], int C[]) { s: C[0] = A[0]; s: C[1] = A[1]; }").kind(),
            FrontendError::Kind::Semantic);
}

TEST(ParseErrors, WhileLoopOutsideClass) {
  EXPECT_EQ(parse_error("f(int A[], int C[]) { while (1) { } }").kind(), FrontendError::Kind::Unsupported);
}

TEST(RoundTrip, FixturesPrintAndReparseToSameAst) {
  for (const char* f : {"fig1a.c", "fig1b.c", "fig1c.c", "fig1d.c"}) {
    Program p = load_fixture(f);
    Program q = parse_program(p.to_source(), "printed.c");
    EXPECT_EQ(p, q) << f << "\n" << p.to_source();
    EXPECT_EQ(p.to_source(), q.to_source());
  }
}

TEST(RoundTrip, GuardsNegationAndUserFunctions) {
  const char* src =
      "/*@ comm */ int h(int, int);\n"
      "f(const int A[], int C[]) { int i, j; int t[64];\n"
      " for (i = 7; i >= 0; i -= 3) for (j = 0; j < 4 && j <= i; j++) {\n"
      "   if (!(i % 2 == 0) || j == 1) a: t[8*i + j] = h(A[i], -A[j]) - 3;\n"
      "   else b: t[8*i + j] = (A[i] * -2) + A[i + j];\n"
      "   if ((i + j) % 3 != 1) c: C[8*i + j] = t[8*i + j];\n"
      "   else d: C[8*i + j] = t[8*i + j] + 1;\n"
      " } }\n";
  Program p = parse_program(src);
  Program q = parse_program(p.to_source());
  EXPECT_EQ(p, q) << p.to_source();
}

TEST(SingleAssignment, FiguresAreInClass) {
  for (const char* f : {"fig1a.c", "fig1b.c", "fig1c.c", "fig1d.c"}) {
    EXPECT_TRUE(check_single_assignment(load_fixture(f)).empty()) << f;
    EXPECT_TRUE(check_bounds(load_fixture(f)).empty()) << f;
  }
}

TEST(SingleAssignment, OverlapReportsWitness) {
  Program p = parse_program("f(int A[], int C[]) { int k, tmp[8];\n"
                            " for(k=0;k<8;k++) s1: tmp[k] = A[k];\n"
                            " s2: tmp[0] = A[9];\n"
                            " for(k=0;k<8;k++) s3: C[k] = tmp[k]; }\n");
  auto v = check_single_assignment(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::DoubleWrite);
  EXPECT_EQ(v[0].statements, (std::vector<std::string>{"s1", "s2"}));
  EXPECT_EQ(v[0].element, std::vector<Int>{0});
}

TEST(SingleAssignment, SelfOverlapAcrossIterations) {
  Program p = parse_program("f(int A[], int C[]) { int i, j;\n"
                            " for(i=0;i<4;i++) for(j=0;j<4;j++) s: C[i+j] = A[i]; }\n");
  auto v = check_single_assignment(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].statements, std::vector<std::string>{"s"});
}

TEST(SingleAssignment, ParityDisjointWritesAgreeWithEnumeration) {
  Program p = parse_program("f(int A[], int C[]) { int k, tmp[16];\n"
                            " for(k=0;k<8;k++) s1: tmp[2*k] = A[k];\n"
                            " for(k=0;k<8;k++) s2: tmp[2*k+1] = A[k];\n"
                            " for(k=0;k<16;k++) s3: C[k] = tmp[k]; }\n");
  std::set<std::int64_t> even, odd;
  for (std::int64_t k = 0; k < 8; ++k) {
    even.insert(2 * k);
    odd.insert(2 * k + 1);
  }
  bool disjoint = std::none_of(even.begin(), even.end(), [&](std::int64_t e) { return odd.count(e); });
  EXPECT_EQ(check_single_assignment(p).empty(), disjoint);
  EXPECT_TRUE(disjoint);
}

TEST(DefUse, FiguresAreScheduledCorrectly) {
  for (const char* f : {"fig1a.c", "fig1b.c", "fig1c.c", "fig1d.c"}) {
    auto v = check_def_use_order(load_fixture(f));
    EXPECT_TRUE(v.empty()) << f << ": " << (v.empty() ? "" : v[0].message);
  }
}

TEST(DefUse, ConsumerLoopMovedFirstIsRejected) {
  Program p = parse_program("#define N 16\nfoo(int A[], int B[], int C[]) { int k, tmp[N], buf[2*N];\n"
                            " for(k=0; k<N; k++) s3: C[k] = tmp[k] + buf[2*k];\n"
                            " for(k=0; k<N; k++) s1: tmp[k] = B[2*k] + B[k];\n"
                            " for(k=N; k>=1; k--) s2: buf[2*k-2] = A[2*k-2] + A[k-1]; }\n");
  auto v = check_def_use_order(p);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].kind, Violation::Kind::UseBeforeDef);
  EXPECT_EQ(v[0].array, "tmp");
  EXPECT_EQ(v[0].statements[0], "s3");
}

TEST(DefUse, ReversedLoopReadsLaterIteration) {
  // Iteration k reads t[k+1], which a decreasing loop has already written.
  Program ok = parse_program("f(int A[], int C[]) { int k, t[9];\n"
                             " for(k=8;k>=0;k--) { a: t[k] = A[k]; if (k < 8) b: C[k] = t[k+1]; } }\n");
  EXPECT_TRUE(check_def_use_order(ok).empty());
  Program bad = parse_program("f(int A[], int C[]) { int k, t[9];\n"
                              " for(k=0;k<=8;k++) { a: t[k] = A[k]; if (k < 8) b: C[k] = t[k+1]; } }\n");
  EXPECT_FALSE(check_def_use_order(bad).empty());
}

TEST(DefUse, SameIterationOrderDependsOnTextualPosition) {
  Program bad = parse_program("f(int A[], int C[]) { int k, t[4];\n"
                              " for(k=0;k<4;k++) { b: C[k] = t[k]; a: t[k] = A[k]; } }\n");
  auto v = check_def_use_order(bad);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].statements, (std::vector<std::string>{"b", "a"}));
}

TEST(DefUse, UninitializedRead) {
  Program p = parse_program("f(int A[], int C[]) { int k, t[8];\n"
                            " for(k=0;k<4;k++) a: t[k] = A[k];\n"
                            " for(k=0;k<5;k++) b: C[k] = t[k]; }\n");
  auto v = check_def_use_order(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::UninitializedRead);
  EXPECT_EQ(v[0].element, std::vector<Int>{4});
}

TEST(Bounds, WriteOutsideLocalExtent) {
  Program p = parse_program("f(int A[], int C[]) { int k, t[4];\n"
                            " for(k=0;k<5;k++) a: t[k] = A[k];\n"
                            " for(k=0;k<4;k++) b: C[k] = t[k]; }\n");
  auto v = check_bounds(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::OutOfBounds);
  EXPECT_EQ(v[0].element, std::vector<Int>{4});
}
