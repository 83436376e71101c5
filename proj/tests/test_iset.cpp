#include "oracle.hpp"
#include "test_util.hpp"

#include "pbench/iset/enumerate.hpp"
#include "pbench/iset/printer.hpp"
#include "pbench/iset/schedule.hpp"
#include "pbench/iset/script.hpp"

#include <limits>

using namespace pbench;

namespace {

std::vector<Point> points(std::string_view text, const Bindings &b = {}) {
  return enumerate(normalize(parse_set(text)), b);
}

} // namespace

TEST(IsetParse, TriadDomain) {
  auto pts = points("[n] -> { S[j] : 0 <= j < n }", {{"n", 4}});
  EXPECT_EQ(pts, (std::vector<Point>{{0}, {1}, {2}, {3}}));
}

TEST(IsetParse, HeatDomainHasNSquaredPoints) {
  auto pts = points("[n] -> { S[i,j] : 1 <= i <= n and 1 <= j <= n }", {{"n", 6}});
  EXPECT_EQ(pts.size(), 36u);
  EXPECT_EQ(pts.front(), (Point{1, 1}));
  EXPECT_EQ(pts.back(), (Point{6, 6}));
}

TEST(IsetParse, ImplicitMultiplicationAndChains) {
  auto a = points("{ S[i] : 0 <= 2i <= 7 }");
  auto b = points("{ S[i] : 0 <= 2*i and 2*i <= 7 }");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, (std::vector<Point>{{0}, {1}, {2}, {3}}));
}

TEST(IsetParse, UnionPieces) {
  auto pts = enumerate(parse_set("{ A[i] : 0 <= i < 2; B[i] : 5 <= i < 7 }"), {});
  EXPECT_EQ(pts.size(), 4u);
}

TEST(IsetScript, DefinitionsAndIntersection) {
  Value v = evaluate(parse_script("D := [n] -> { S[i] : 0 <= i < n };\n"
                                  "E := [n] -> { S[i] : i >= 2 };\n"
                                  "codegen(D * E);\n"));
  ASSERT_FALSE(is_map(v));
  auto pts = enumerate(std::get<USet>(v), {{"n", 5}});
  EXPECT_EQ(pts, (std::vector<Point>{{2}, {3}, {4}}));
}

TEST(IsetScript, MapTimesSetRestrictsDomain) {
  Value v = evaluate(parse_script("D := [n] -> { S[i,j] : 0 <= i < n and 0 <= j < n };\n"
                                  "M := { S[i,j] -> S[j,i] };\n"
                                  "codegen(M * D);\n"));
  ASSERT_TRUE(is_map(v));
  const UMap &m = std::get<UMap>(v);
  ASSERT_EQ(m.pieces.size(), 1u);
  EXPECT_EQ(enumerate(m, {{"n", 3}}).size(), 9u);
}

TEST(IsetScript, CommentsAreIgnored) {
  Value v = evaluate(parse_script("# leading comment\nD := { S[i] : 0 <= i < 3 }; # trailing\n"
                                  "codegen(D);\n"));
  EXPECT_EQ(enumerate(std::get<USet>(v), {}).size(), 3u);
}

TEST(IsetNormalize, EliminatesUnitExistential) {
  USet raw = parse_set("[n] -> { S[i] : exists e : e = i + 1 and 0 <= e <= n }");
  ASSERT_EQ(raw.pieces.front().exists.size(), 1u);
  USet norm = normalize(raw);
  EXPECT_TRUE(norm.pieces.front().exists.empty());
  EXPECT_EQ(enumerate(norm, {{"n", 3}}), (std::vector<Point>{{-1}, {0}, {1}, {2}}));
}

TEST(IsetNormalize, TilingExistentials) {
  USet s = normalize(parse_set("{ S[t, i] : exists r : i = 4t + r and 0 <= r <= 3 and 0 <= i < 10 }"));
  auto pts = enumerate(s, {});
  ASSERT_EQ(pts.size(), 10u);
  for (const auto &p : pts)
    EXPECT_EQ(p[0], p[1] / 4);
}

TEST(IsetNormalize, NonUnitExistentialIsRejected) {
  EXPECT_ERRC(normalize(parse_set("{ S[i] : exists e : i = 2e and 0 <= i < 10 }")),
              Errc::NonEliminableExistential);
}

TEST(IsetNormalize, RandomEliminableAgainstOracle) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 40; ++i) {
    auto rs = oracle::random_eliminable(rng);
    Int n = 1 + i % 9, m = 1 + (i * 5) % 12;
    USet s = normalize(parse_set(rs.text()));
    std::vector<oracle::Pt> got;
    for (const auto &p : s.pieces) {
      auto pts = oracle::filter_box(p, {{"n", n}, {"m", m}}, n);
      got.insert(got.end(), pts.begin(), pts.end());
    }
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, rs.points(n, m)) << rs.text();
  }
}

TEST(IsetEnumerate, AgreesWithBoxOracle) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    auto rs = oracle::random_set(rng);
    Int n = 1 + i % 12, m = 12 - i % 12;
    EXPECT_EQ(points(rs.text(), {{"n", n}, {"m", m}}), rs.points(n, m)) << rs.text();
  }
}

TEST(IsetPrinter, RoundTripPreservesPoints) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    auto rs = oracle::random_set(rng);
    USet s = normalize(parse_set(rs.text()));
    USet again = parse_set(to_string(s));
    EXPECT_EQ(to_string(again), to_string(s));
    EXPECT_EQ(enumerate(again, {{"n", 5}, {"m", 3}}), enumerate(s, {{"n", 5}, {"m", 3}}));
  }
}

TEST(IsetPrinter, MapTextReparses) {
  UMap m = parse_map("[n] -> { S[i,j] -> S[j,i] : 0 <= i < n and 0 <= j < n }");
  std::string text = to_string(m);
  EXPECT_EQ(to_string(parse_map(text)), text);
  EXPECT_EQ(enumerate(parse_map(text), {{"n", 2}}), enumerate(m, {{"n", 2}}));
}

TEST(IsetMaps, ComposeChainsTransforms) {
  UMap swap = parse_map("{ S[i,j] -> S[j,i] }");
  UMap shift = parse_map("{ S[i,j] -> S[i + 1, j] }");
  UMap both = compose(swap, shift);
  USet d = parse_set("{ S[i,j] : 0 <= i < 2 and 0 <= j < 3 }");
  auto pts = enumerate(restrict_domain(both, d), {});
  EXPECT_EQ(pts.size(), 6u);
  // (i, j) -> (j + 1, i): the first point is (0, 0, 1, 0).
  EXPECT_EQ(pts.front(), (Point{0, 0, 1, 0}));
}

TEST(IsetSchedule, InvertsPermutation) {
  auto table = schedule_check(parse_map("{ S[i,j] -> [j, i] }"));
  ASSERT_EQ(table.size(), 1u);
  EXPECT_EQ(table.front().in_dims.size(), 2u);
}

TEST(IsetSchedule, UndeterminedInputDim) {
  EXPECT_ERRC(schedule_check(parse_map("{ S[i,j] -> [i] : 0 <= i < 4 and 0 <= j < 4 }")),
              Errc::NotInvertibleAsSchedule);
}

TEST(IsetErrors, SyntaxErrorCarriesLocation) {
  try {
    parse_script("D := { S[i] : 0 <= i < 4 };\nE := { S[i] : i >= };\n");
    FAIL() << "expected a syntax error";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), Errc::SyntaxError);
    ASSERT_TRUE(e.location());
    EXPECT_EQ(e.location()->line, 2);
    EXPECT_GT(e.location()->column, 1);
  }
}

TEST(IsetErrors, UnknownIdentifier) {
  EXPECT_ERRC(parse_set("{ S[i] : 0 <= k }"), Errc::UnknownIdentifier);
  EXPECT_ERRC(evaluate(parse_script("codegen(Missing);")), Errc::UnknownIdentifier);
}

TEST(IsetErrors, ArityMismatch) {
  EXPECT_ERRC(parse_set("{ S[i] : 0 <= i < 2; S[i,j] : 0 <= i < 2 and 0 <= j < 2 }"),
              Errc::ArityMismatch);
}

TEST(IsetErrors, SpaceMismatch) {
  EXPECT_ERRC(evaluate(parse_script("A := { S[i] : 0 <= i < 2 };\nB := { T[i] : 0 <= i < 2 };\n"
                                    "codegen(A * B);")),
              Errc::SpaceMismatch);
}

TEST(IsetErrors, UnboundedSet) {
  EXPECT_ERRC(enumerate(parse_set("{ S[i] : i >= 0 }"), {}), Errc::UnboundedSet);
}

TEST(IsetErrors, UnboundParameter) {
  EXPECT_ERRC(enumerate(parse_set("[n] -> { S[i] : 0 <= i < n }"), {}), Errc::UnboundParameter);
}

TEST(IsetErrors, Overflow) {
  constexpr Int big = std::numeric_limits<Int>::max();
  EXPECT_ERRC(checked_mul(big, 2), Errc::Overflow);
  EXPECT_ERRC(checked_add(big, 1), Errc::Overflow);
  EXPECT_ERRC(checked_neg(std::numeric_limits<Int>::min()), Errc::Overflow);
}

TEST(IsetIntMath, FloorAndCeilDivision) {
  EXPECT_EQ(floor_div(7, 2), 3);
  EXPECT_EQ(floor_div(-7, 2), -4);
  EXPECT_EQ(ceil_div(7, 2), 4);
  EXPECT_EQ(ceil_div(-7, 2), -3);
  EXPECT_EQ(lcm(4, 6), 12);
}

TEST(IsetParse, ParameterOnlySet) {
  USet ctx = parse_set("[n, h] -> { : n = 2h and n >= 2 }");
  ASSERT_EQ(ctx.pieces.size(), 1u);
  EXPECT_EQ(ctx.pieces.front().n_dims(), 0u);
  EXPECT_EQ(enumerate(ctx, {{"n", 8}, {"h", 4}}).size(), 1u);
  EXPECT_EQ(enumerate(ctx, {{"n", 8}, {"h", 3}}).size(), 0u);
}

TEST(IsetNormalize, SumExistentialMatchesBruteForce) {
  // exists r : r = i + j and 0 <= r < 5, compared with 0 <= i + j < 5 over [-10, 10]^2.
  USet s = normalize(parse_set("{ S[i,j] : exists r : r = i + j and 0 <= r < 5 and "
                               "-10 <= i <= 10 and -10 <= j <= 10 }"));
  std::vector<Point> want;
  for (Int i = -10; i <= 10; ++i)
    for (Int j = -10; j <= 10; ++j)
      if (i + j >= 0 && i + j < 5)
        want.push_back({i, j});
  EXPECT_EQ(enumerate(s, {}), want);
}

TEST(IsetScript, IntersectionOfRanges) {
  Value v = evaluate(parse_script("codegen({ S[i] : 0 <= i < 10 } * { S[i] : 5 <= i < 20 });"));
  std::vector<Point> want;
  for (Int i = 0; i < 20; ++i)
    if (i < 10 && i >= 5)
      want.push_back({i});
  EXPECT_EQ(enumerate(std::get<USet>(v), {}), want);
}
