#include "test_util.hpp"

#include "pbench/pattern/validate.hpp"

using namespace pbench;

namespace {

const char *kMiniSpec = R"(# one array, one statement family
[spaces]
X = double[n]

[mappings]
X_map(i) = X[i]

[statements]
Fill_init(i) = X_map(i) = 2.0;
Fill_run(i) = X_map(i) = X_map(i) * 1.0;
Fill_val(i) = PB_CHECK_NEAR(X_map(i), 2.0);

[clause]
schedule(static)
)";

const char *kDomain = "codegen([n] -> { Fill_%s[i] : 0 <= i < n });\n";

std::string schedule_for(const char *role) {
  char buf[128];
  std::snprintf(buf, sizeof buf, kDomain, role);
  return buf;
}

void write_mini(const std::filesystem::path &dir, const std::string &spec = kMiniSpec,
                bool with_val = true) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "kernel.spec", spec);
  write_text_file(dir / "init.pset", schedule_for("init"));
  write_text_file(dir / "run.pset", schedule_for("run"));
  if (with_val)
    write_text_file(dir / "val.pset", schedule_for("val"));
}

bool has_code(const std::vector<Diagnostic> &ds, const std::string &code) {
  for (const auto &d : ds)
    if (d.code == code)
      return true;
  return false;
}

} // namespace

class ShippedPattern : public testing::TestWithParam<const char *> {};

TEST_P(ShippedPattern, LoadsWithoutDiagnosticsAndRoundTrips) {
  PatternSpec p = load_pattern(testutil::pattern_dir(GetParam()));
  EXPECT_EQ(p.name, GetParam());
  auto diags = validate_pattern(p);
  for (const auto &d : diags)
    ADD_FAILURE() << to_string(d);
  testutil::TempDir tmp;
  write_pattern(p, tmp.path());
  PatternSpec again = load_pattern(tmp.path());
  again.name = p.name;
  EXPECT_EQ(again, p);
  EXPECT_EQ(pattern_hash(again), pattern_hash(p));
}

INSTANTIATE_TEST_SUITE_P(Patterns, ShippedPattern,
                         testing::Values("triad", "triad-nowait", "triad-interleaved", "hexad",
                                         "jacobi1d", "jacobi1d-padded", "jacobi2d", "jacobi3d",
                                         "jacobi3d-tiled"),
                         [](const auto &info) {
                           std::string s = info.param;
                           for (char &c : s)
                             if (c == '-')
                               c = '_';
                           return s;
                         });

TEST(PatternParse, TriadFields) {
  PatternSpec p = load_pattern(testutil::pattern_dir("triad"));
  ASSERT_EQ(p.spaces.size(), 3u);
  EXPECT_EQ(p.spaces[0].name, "A");
  EXPECT_EQ(p.spaces[0].extents, (std::vector<std::string>{"n"}));
  EXPECT_EQ(p.mappings[1].address, "B[i]");
  EXPECT_EQ(p.clause, "schedule(static)");
  EXPECT_EQ(p.schedules.at(Role::Run).kind, ScheduleKind::RawC);
  EXPECT_EQ(p.schedules.at(Role::Init).kind, ScheduleKind::Script);
  ASSERT_NE(p.statement_for(Role::Run), nullptr);
  EXPECT_EQ(p.statement_for(Role::Run)->family(), "Triad");
  EXPECT_EQ(p.params, (std::vector<std::pair<std::string, std::string>>{{"scalar", "3.0"}}));
  EXPECT_TRUE(supports_template(p, TemplateBase::Unified));
  EXPECT_TRUE(supports_template(p, TemplateBase::Independent));
}

TEST(PatternParse, IndependentOverridesResolve) {
  PatternSpec p = load_pattern(testutil::pattern_dir("triad"));
  PatternSpec ind = resolve_for_template(p, TemplateBase::Independent);
  EXPECT_EQ(ind.find_space("A")->layout, Layout::PerThread);
  EXPECT_EQ(ind.find_mapping("A_map")->address, "A[t_id][i]");
  EXPECT_EQ(resolve_for_template(p, TemplateBase::Unified).find_mapping("A_map")->address, "A[i]");
}

TEST(PatternParse, PaddedJacobiMapping) {
  PatternSpec p = load_pattern(testutil::pattern_dir("jacobi1d-padded"));
  EXPECT_EQ(p.measure.default_template, TemplateBase::Independent);
  EXPECT_EQ(p.find_space("A")->padding, 8);
  EXPECT_EQ(p.find_mapping("A_map")->address, "A[t_id * 8][i]");
}

TEST(PatternParse, ContinuationAndComments) {
  std::string spec = kMiniSpec;
  spec += "\n[measure]\nmin_n = 4 # trailing comment\ntransforms = tile=0:16; \\\n  interleave=2\n";
  PatternSpec p = parse_kernel_spec(spec, "mini");
  EXPECT_EQ(p.measure.min_n, 4);
  EXPECT_EQ(p.measure.transforms, (std::vector<std::string>{"tile=0:16", "interleave=2"}));
}

TEST(PatternParse, ScalarDefaultsToThree) {
  PatternSpec p = parse_kernel_spec(kMiniSpec, "mini");
  EXPECT_EQ(p.params, (std::vector<std::pair<std::string, std::string>>{{"scalar", "3.0"}}));
}

TEST(PatternParse, ErrorLocation) {
  std::string spec = "[spaces]\nX = double[n]\n[mappings]\nnot a mapping\n";
  try {
    parse_kernel_spec(spec, "bad");
    FAIL() << "expected a parse error";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), Errc::PatternParseError);
    ASSERT_TRUE(e.location());
    EXPECT_EQ(e.location()->line, 4);
  }
}

TEST(PatternParse, UnknownSection) {
  EXPECT_ERRC(parse_kernel_spec("[weird]\nx = 1\n", "bad"), Errc::PatternParseError);
}

TEST(PatternParse, DanglingMappingReference) {
  std::string spec = kMiniSpec;
  spec.replace(spec.find("X[i]"), 4, "Y[i]");
  EXPECT_ERRC(parse_kernel_spec(spec, "bad"), Errc::DanglingReference);
}

TEST(PatternLoad, MissingValidation) {
  testutil::TempDir tmp;
  write_mini(tmp.path(), kMiniSpec, false);
  EXPECT_ERRC(load_pattern(tmp.path()), Errc::MissingValidation);
}

TEST(PatternLoad, MissingSpec) {
  testutil::TempDir tmp;
  EXPECT_ERRC(load_pattern(tmp.path()), Errc::MissingFile);
}

TEST(PatternLoad, MissingRunSchedule) {
  testutil::TempDir tmp;
  write_mini(tmp.path());
  std::filesystem::remove(tmp / "run.pset");
  EXPECT_ERRC(load_pattern(tmp.path()), Errc::MissingFile);
}

TEST(PatternLoad, ScheduleNamingUndeclaredStatement) {
  testutil::TempDir tmp;
  write_mini(tmp.path());
  write_text_file(tmp / "run.pset", "codegen([n] -> { Other_run[i] : 0 <= i < n });\n");
  EXPECT_ERRC(load_pattern(tmp.path()), Errc::DanglingReference);
}

TEST(PatternLoad, WriteThenLoadIsIdentity) {
  testutil::TempDir tmp;
  write_mini(tmp / "mini");
  PatternSpec p = load_pattern(tmp / "mini");
  EXPECT_EQ(p.name, "mini");
  write_pattern(p, tmp / "copy");
  PatternSpec q = load_pattern(tmp / "copy");
  q.name = "mini";
  EXPECT_EQ(q, p);
  EXPECT_EQ(serialize_kernel_spec(q), serialize_kernel_spec(p));
}

TEST(PatternValidate, DirectArrayAccessWarns) {
  std::string spec = kMiniSpec;
  spec.replace(spec.find("X_map(i) * 1.0"), 14, "X[i] * 1.0");
  PatternSpec p = parse_kernel_spec(spec, "direct");
  auto ds = validate_pattern(p);
  ASSERT_TRUE(has_code(ds, "DirectArrayAccess"));
  EXPECT_FALSE(has_errors(ds));
}

TEST(PatternValidate, PerThreadLayoutNeedsIndependentTemplate) {
  std::string spec = kMiniSpec;
  spec.replace(spec.find("double[n]"), 9, "double[n] layout=per_thread");
  spec.replace(spec.find("X[i]"), 4, "X[t_id][i]");
  PatternSpec p = parse_kernel_spec(spec, "pt");
  auto ds = validate_pattern(p);
  EXPECT_TRUE(has_code(ds, "TemplateLayoutMismatch"));
  EXPECT_FALSE(supports_template(p, TemplateBase::Unified));
}

TEST(PatternValidate, MissingRunStatement) {
  std::string spec = kMiniSpec;
  spec.erase(spec.find("Fill_run"), spec.find("Fill_val") - spec.find("Fill_run"));
  auto ds = validate_pattern(parse_kernel_spec(spec, "norun"));
  EXPECT_TRUE(has_code(ds, "RunStatement"));
}

TEST(PatternValidate, MappingArity) {
  std::string spec = kMiniSpec;
  spec.replace(spec.find("X_map(i) = 2.0"), 14, "X_map(i, i) = 2.0");
  auto ds = validate_pattern(parse_kernel_spec(spec, "arity"));
  EXPECT_TRUE(has_code(ds, "ArityMismatch"));
}

TEST(PatternBytes, DerivedFromDistinctMappings) {
  EXPECT_EQ(bytes_per_run_instance(load_pattern(testutil::pattern_dir("triad"))), 24);
  EXPECT_EQ(bytes_per_run_instance(load_pattern(testutil::pattern_dir("hexad"))), 48);
  EXPECT_EQ(bytes_per_run_instance(load_pattern(testutil::pattern_dir("jacobi1d"))), 16);
  EXPECT_EQ(bytes_per_run_instance(parse_kernel_spec(kMiniSpec, "mini")), 8);
}

TEST(PatternBytes, OverrideWins) {
  std::string spec = kMiniSpec;
  spec += "\n[measure]\nbytes_per_instance = 40\n";
  EXPECT_EQ(bytes_per_run_instance(parse_kernel_spec(spec, "mini")), 40);
}

TEST(PatternFootprint, UnifiedAndPerThread) {
  PatternSpec p = load_pattern(testutil::pattern_dir("triad"));
  auto uni = footprint_model(p, TemplateBase::Unified);
  auto ind = footprint_model(p, TemplateBase::Independent);
  EXPECT_EQ(uni(1000, 4), 24000);
  EXPECT_EQ(ind(1000, 4), 96000);
  PatternSpec padded = load_pattern(testutil::pattern_dir("jacobi1d-padded"));
  auto pf = footprint_model(padded, TemplateBase::Independent);
  EXPECT_EQ(pf(100, 2), 2 * 2 * 100 * 8 * 8);
}

TEST(PatternHash, ChangesWithContent) {
  PatternSpec p = parse_kernel_spec(kMiniSpec, "mini");
  PatternSpec q = p;
  q.clause = "schedule(dynamic)";
  EXPECT_NE(pattern_hash(p), pattern_hash(q));
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
}
