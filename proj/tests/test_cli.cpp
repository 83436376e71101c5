#include "test_util.hpp"

#include "pbench/harness/process.hpp"
#include "pbench/harness/report.hpp"
#include "pbench/pattern/spec.hpp"

using namespace pbench;

namespace {

ProcessResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), PBENCH_CLI_PATH);
  return run_process(args, {}, {{"PBENCH_TEMPLATES", (testutil::source_dir() / "templates").string()}});
}

std::string pattern(const std::string &name) { return testutil::pattern_dir(name).string(); }

bool have_cc() { return !run_process({"cc", "--version"}).not_found; }

} // namespace

TEST(Cli, Version) {
  auto r = cli({"--version"});
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find(PBENCH_VERSION), std::string::npos);
}

TEST(Cli, CodegenTiledScript) {
  auto r = cli({"codegen", pattern("jacobi3d-tiled") + "/run.pset"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("for (int c0 = 0; c0 <= floord(n, 32); c0 += 1)"), std::string::npos);
  EXPECT_NE(r.out.find("STM_3DS_run(c3, c4, c5);"), std::string::npos);
}

TEST(Cli, CodegenWithTransformAndOutFile) {
  testutil::TempDir tmp;
  write_text_file(tmp / "d.pset", "codegen([n] -> { S[i,j] : 0 <= i < n and 0 <= j < n });\n");
  auto r = cli({"--out", (tmp / "k.c").string(), "codegen", (tmp / "d.pset").string(),
                "--transform", "interchange=1,0"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(read_text_file(tmp / "k.c"), "for (int c0 = 0; c0 <= n - 1; c0 += 1)\n"
                                         "  for (int c1 = 0; c1 <= n - 1; c1 += 1)\n"
                                         "    S(c1, c0);\n");
}

TEST(Cli, CodegenErrorNamesModule) {
  testutil::TempDir tmp;
  write_text_file(tmp / "bad.pset", "codegen({ S[i] : exists e : i = 2e and 0 <= i < 4 });\n");
  auto r = cli({"codegen", (tmp / "bad.pset").string()});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("iset"), std::string::npos);
  EXPECT_NE(r.err.find("NonEliminableExistential"), std::string::npos);
}

TEST(Cli, MissingFile) {
  auto r = cli({"codegen", "/definitely/not/here.pset"});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("MissingFile"), std::string::npos);
}

TEST(Cli, InspectShippedPattern) {
  auto r = cli({"inspect", pattern("triad")});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("pattern triad"), std::string::npos);
  EXPECT_NE(r.out.find("bytes/inst  24"), std::string::npos);
  EXPECT_NE(r.out.find("diagnostics 0"), std::string::npos);
}

TEST(Cli, GenWritesBundle) {
  testutil::TempDir tmp;
  auto r = cli({"--out", (tmp / "bundle").string(), "gen", pattern("triad"), "--template", "independent"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(tmp / "bundle/main.c"));
  EXPECT_TRUE(std::filesystem::exists(tmp / "bundle/build.sh"));
}

TEST(Cli, GenStageErrorPrefix) {
  testutil::TempDir tmp;
  auto r = cli({"--out", tmp.path().string(), "gen", pattern("jacobi1d-padded"), "--template", "unified"});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("gen stage"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("TemplateLayoutMismatch"), std::string::npos);
}

TEST(Cli, MachineFromFile) {
  testutil::TempDir tmp;
  write_text_file(tmp / "r2.machine", "L1.capacity = 32K\nL2.capacity = 256K\n"
                                      "L3.capacity = 35M\nL3.scope = domain\n");
  auto r = cli({"--machine", (tmp / "r2.machine").string(), "machine"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("L3.capacity = 35M"), std::string::npos);
}

TEST(Cli, DryRunSweepWritesSources) {
  testutil::TempDir tmp;
  auto r = cli({"bench", pattern("triad"), "--sweep", "--dry-run", "--work", (tmp / "w").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(tmp / "w/main.c"));
}

TEST(Cli, ReportConvertsJsonl) {
  testutil::TempDir tmp;
  RunRecord rec;
  rec.config.pattern = "triad";
  rec.config.n = 100;
  rec.band = "L1";
  rec.elapsed_seconds = 1;
  rec.instances_executed = 100;
  rec.bytes_per_instance = 24;
  rec.validation = "pass";
  rec.valid = true;
  derive_bandwidth(rec);
  write_text_file(tmp / "a.jsonl", to_jsonl({rec}));
  auto r = cli({"--format", "table", "report", (tmp / "a.jsonl").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("-- L1 --"), std::string::npos);
  auto j = cli({"report", (tmp / "a.jsonl").string()});
  EXPECT_EQ(j.out, to_jsonl({rec}));
}

TEST(Cli, RunTriadEndToEnd) {
  if (!have_cc())
    GTEST_SKIP() << "no C compiler";
  testutil::TempDir tmp;
  auto r = cli({"--out", (tmp / "r.jsonl").string(), "run", pattern("triad"), "--n", "4096",
                "--threads", "2", "--ntimes", "10", "--work", (tmp / "w").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto recs = parse_jsonl(read_text_file(tmp / "r.jsonl"));
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].validation, "pass");
  EXPECT_GT(recs[0].bandwidth_gbps, 0.0);
}
