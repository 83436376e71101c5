#include "test_util.hpp"

#include "pbench/harness/pipeline.hpp"
#include "pbench/harness/report.hpp"

#include <sys/stat.h>

using namespace pbench;

namespace {

MachineDesc r2_machine(Int cores_per_domain = 1) {
  MachineDesc m;
  m.levels = {{"L1", 32 * 1024, 64, Scope::Core},
              {"L2", 256 * 1024, 64, Scope::Core},
              {"L3", 35 * 1024 * 1024, 64, Scope::Domain}};
  m.cores_per_domain = cores_per_domain;
  return m;
}

FootprintModel triad_unified() {
  return [](Int n, Int) { return 24 * n; };
}

FootprintModel triad_per_thread() {
  return [](Int n, Int t) { return 24 * n * t; };
}

void write_file(const std::filesystem::path &p, const std::string &text) {
  std::filesystem::create_directories(p.parent_path());
  write_text_file(p, text);
}

std::filesystem::path fake_driver(const testutil::TempDir &tmp, const std::string &body) {
  auto p = tmp / "driver.sh";
  write_text_file(p, "#!/bin/sh\n" + body);
  ::chmod(p.c_str(), 0755);
  return p;
}

RunRecord sample_record(const std::string &pattern, Int n, const std::string &band) {
  RunRecord r;
  r.config.pattern = pattern;
  r.config.n = n;
  r.config.threads = 2;
  r.config.ntimes = 10;
  r.band = band;
  r.footprint_bytes = 24 * n;
  r.elapsed_seconds = 0.5;
  r.elapsed_min = 0.4;
  r.elapsed_max = 0.6;
  r.instances_executed = n * 10;
  r.bytes_per_instance = 24;
  r.validation = "pass";
  r.valid = true;
  r.metadata.timestamp = "2026-01-01T00:00:00Z";
  derive_bandwidth(r);
  return r;
}

} // namespace

TEST(Machine, ParseFile) {
  MachineDesc m = parse_machine("# R2\nL1.capacity = 32K\nL1.line = 64\nL1.scope = core\n"
                                "L2.capacity = 256K\nL3.capacity = 35M\nL3.scope = domain\n"
                                "cores_per_domain = 14\ndomains = 2\n",
                                "r2.machine");
  ASSERT_EQ(m.levels.size(), 3u);
  EXPECT_EQ(m.levels[0].capacity, 32768);
  EXPECT_EQ(m.levels[2].capacity, 35 * 1024 * 1024);
  EXPECT_EQ(m.levels[2].scope, Scope::Domain);
  EXPECT_EQ(m.cores_per_domain, 14);
  EXPECT_EQ(m.source, "r2.machine");
  EXPECT_EQ(parse_machine(serialize_machine(m)).levels, m.levels);
}

TEST(Machine, ParseErrors) {
  EXPECT_ERRC(parse_machine("L1.capacity 32K\n"), Errc::InvalidConfig);
  EXPECT_ERRC(parse_machine("L1.capacity = lots\n"), Errc::InvalidConfig);
  EXPECT_ERRC(parse_machine("L1.colour = red\n"), Errc::InvalidConfig);
}

TEST(Machine, Sizes) {
  EXPECT_EQ(parse_size("48K"), 48 * 1024);
  EXPECT_EQ(parse_size("2M"), 2 * 1024 * 1024);
  EXPECT_EQ(parse_size("1G"), 1024LL * 1024 * 1024);
  EXPECT_EQ(parse_size("4096"), 4096);
  EXPECT_ERRC(parse_size("12Q"), Errc::InvalidConfig);
}

TEST(Machine, DetectFromSysfsTree) {
  testutil::TempDir tmp;
  auto cache = tmp / "cpu0/cache";
  auto level = [&](const char *idx, const char *type, const char *lvl, const char *size,
                   const char *shared) {
    write_file(cache / idx / "type", std::string(type) + "\n");
    write_file(cache / idx / "level", std::string(lvl) + "\n");
    write_file(cache / idx / "size", std::string(size) + "\n");
    write_file(cache / idx / "coherency_line_size", "64\n");
    write_file(cache / idx / "shared_cpu_list", std::string(shared) + "\n");
  };
  level("index0", "Data", "1", "32K", "0,14");
  level("index1", "Instruction", "1", "32K", "0,14");
  level("index2", "Unified", "2", "256K", "0,14");
  level("index3", "Unified", "3", "35840K", "0-13,28-41");
  write_file(tmp / "online", "0-55\n");
  MachineDesc m = detect_machine(tmp.path());
  EXPECT_TRUE(m.detected);
  EXPECT_EQ(m.source, "sysfs");
  ASSERT_EQ(m.levels.size(), 3u);
  EXPECT_EQ(m.levels[0].name, "L1");
  EXPECT_EQ(m.levels[0].capacity, 32768);
  EXPECT_EQ(m.levels[1].scope, Scope::Core);
  EXPECT_EQ(m.levels[2].scope, Scope::Domain);
  EXPECT_EQ(m.cores_per_domain, 28);
  EXPECT_EQ(m.domains, 2);
}

TEST(Machine, FallsBackWithoutSysfs) {
  testutil::TempDir tmp;
  MachineDesc m = detect_machine(tmp / "nothing-here");
  EXPECT_FALSE(m.detected);
  EXPECT_EQ(m.source, "default");
  EXPECT_EQ(m.levels.size(), 3u);
}

TEST(Machine, CpuListCount) {
  EXPECT_EQ(detail::cpu_list_count("0-3,8,10-11"), 7);
  EXPECT_EQ(detail::cpu_list_count("5"), 1);
}

TEST(Sweep, R2BandsMatchHandArithmetic) {
  auto bands = plan_bands(r2_machine(), triad_unified(), 1, 1);
  ASSERT_EQ(bands.size(), 4u);
  // 16384/24 rounded up, then floor(capacity/24) for each level and 4x L3.
  EXPECT_EQ(bands[0].first_n, 683);
  EXPECT_EQ(bands[0].last_n, 32768 / 24);
  EXPECT_EQ(bands[1].last_n, 262144 / 24);
  EXPECT_EQ(bands[2].last_n, 36700160 / 24);
  EXPECT_EQ(bands[3].name, "DRAM");
  EXPECT_EQ(bands[3].last_n, 4 * 36700160 / 24);
  for (std::size_t i = 1; i < bands.size(); ++i)
    EXPECT_EQ(bands[i].first_n, bands[i - 1].last_n + 1);
}

TEST(Sweep, R2PlanHasFourPointsPerBand) {
  MachineDesc m = r2_machine();
  SweepOptions opts;
  auto plan = plan_sweep(m, triad_unified(), opts);
  std::map<std::string, int> count;
  for (const auto &c : plan)
    ++count[band_of(m, triad_unified(), c.n, 1)];
  for (const char *b : {"L1", "L2", "L3", "DRAM"})
    EXPECT_GE(count[b], 4) << b;
  for (std::size_t i = 1; i < plan.size(); ++i)
    EXPECT_LT(plan[i - 1].n, plan[i].n);
}

TEST(Sweep, PerThreadFootprintWithSharedL3) {
  // 28 threads, 14 cores per L3 domain, per-thread triad arrays:
  // private levels see 24n, the L3 sees 14 * 24n.
  MachineDesc m = r2_machine(14);
  auto bands = plan_bands(m, triad_per_thread(), 28, 1);
  EXPECT_EQ(bands[0].last_n, 1365);
  EXPECT_EQ(bands[1].last_n, 10922);
  EXPECT_EQ(bands[2].last_n, 36700160 / (24 * 14));
  EXPECT_EQ(band_of(m, triad_per_thread(), 1365, 28), "L1");
  EXPECT_EQ(band_of(m, triad_per_thread(), 1366, 28), "L2");
  EXPECT_EQ(band_of(m, triad_per_thread(), 109226, 28), "L3");
  EXPECT_EQ(band_of(m, triad_per_thread(), 109227, 28), "DRAM");
}

TEST(Sweep, MultipleOfDerivedDivisor) {
  SweepOptions opts;
  opts.n_multiple = 4;
  for (const auto &c : plan_sweep(r2_machine(), triad_unified(), opts))
    EXPECT_EQ(c.n % 4, 0) << c.n;
}

TEST(Sweep, ExplicitSizesBypassPlanning) {
  SweepOptions opts;
  opts.sizes = {10, 20, 30};
  opts.threads = 3;
  auto plan = plan_sweep(r2_machine(), triad_unified(), opts);
  ASSERT_EQ(plan.size(), 3u);
  EXPECT_EQ(plan[1].n, 20);
  EXPECT_EQ(plan[1].threads, 3);
}

TEST(Sweep, FootprintTooSmall) {
  FootprintModel huge = [](Int n, Int) { return 1000000 * n; };
  EXPECT_ERRC(plan_bands(r2_machine(), huge, 1, 1), Errc::FootprintTooSmall);
}

TEST(Sweep, RunConfigValidation) {
  RunConfig c;
  c.n = 0;
  EXPECT_ERRC(c.validate(1), Errc::InvalidConfig);
  c.n = 2;
  EXPECT_ERRC(c.validate(3), Errc::InvalidConfig);
  c.n = 3;
  c.threads = 0;
  EXPECT_ERRC(c.validate(1), Errc::InvalidConfig);
}

TEST(Protocol, ParsesAllKeys) {
  auto d = parse_driver_output("elapsed_seconds=0.25\ninstances_executed=4096\n"
                               "validation=pass\nthreads=2\ncounter.L1D_MISS=17\n"
                               "counter.CYCLES=unsupported\n");
  EXPECT_DOUBLE_EQ(d.elapsed_seconds, 0.25);
  EXPECT_EQ(d.instances_executed, 4096);
  EXPECT_EQ(d.validation, "pass");
  EXPECT_EQ(d.counters.at("L1D_MISS"), CounterValue{17u});
  EXPECT_EQ(d.counters.at("CYCLES"), CounterValue{});
}

TEST(Protocol, RejectsMalformedOutput) {
  const std::string ok = "elapsed_seconds=1\ninstances_executed=1\nvalidation=pass\nthreads=1\n";
  for (const std::string bad :
       {std::string("garbage\n"), ok + "mystery=1\n", ok + "threads=2\n",
        std::string("elapsed_seconds=1\nvalidation=pass\nthreads=1\n"),
        std::string("elapsed_seconds=x\ninstances_executed=1\nvalidation=pass\nthreads=1\n"),
        std::string("elapsed_seconds=1\ninstances_executed=1\nvalidation=maybe\nthreads=1\n"),
        ok + "counter.X=-3\n"})
    EXPECT_ERRC(parse_driver_output(bad), Errc::ProtocolParseError);
}

TEST(Execute, FakeDriverRecord) {
  testutil::TempDir tmp;
  auto exe = fake_driver(tmp, "echo elapsed_seconds=0.5\necho instances_executed=$(( $1 * $3 ))\n"
                              "echo validation=pass\necho threads=$2\n");
  RunConfig cfg;
  cfg.pattern = "triad";
  cfg.n = 1000;
  cfg.threads = 2;
  cfg.ntimes = 3;
  cfg.repeats = 3;
  ExecutionContext ctx;
  ctx.bytes_per_instance = 24;
  ctx.footprint = triad_unified();
  MachineDesc m = r2_machine();
  ctx.machine = &m;
  RunRecord r = execute(exe, cfg, ctx);
  EXPECT_TRUE(r.valid);
  EXPECT_EQ(r.instances_executed, 3000);
  EXPECT_EQ(r.bytes_counted, 72000);
  EXPECT_DOUBLE_EQ(r.bandwidth_bytes_per_second, 144000.0);
  EXPECT_DOUBLE_EQ(r.bandwidth_gbps, 144000.0 / 1e9);
  EXPECT_EQ(r.band, "L1");
  EXPECT_EQ(r.footprint_bytes, 24000);
}

TEST(Execute, ValidationFailureIsKept) {
  testutil::TempDir tmp;
  auto exe = fake_driver(tmp, "echo elapsed_seconds=0.5\necho instances_executed=1\n"
                              "echo validation=fail\necho threads=1\nexit 1\n");
  RunConfig cfg;
  RunRecord r = execute(exe, cfg, {});
  EXPECT_FALSE(r.valid);
  EXPECT_EQ(r.validation, "fail");
}

TEST(Execute, GarbageOutputIsProtocolError) {
  testutil::TempDir tmp;
  auto exe = fake_driver(tmp, "echo hello world\n");
  try {
    execute(exe, RunConfig{}, {});
    FAIL() << "expected ProtocolParseError";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), Errc::ProtocolParseError);
    EXPECT_NE(std::string(e.what()).find("hello world"), std::string::npos);
  }
}

TEST(Execute, CrashIsReported) {
  testutil::TempDir tmp;
  EXPECT_ERRC(execute(fake_driver(tmp, "kill -SEGV $$\n"), RunConfig{}, {}), Errc::DriverCrashed);
  EXPECT_ERRC(execute(fake_driver(tmp, "echo boom >&2\nexit 3\n"), RunConfig{}, {}),
              Errc::DriverCrashed);
  EXPECT_ERRC(execute(tmp / "missing-driver", RunConfig{}, {}), Errc::DriverCrashed);
}

TEST(Execute, ArgvProtocol) {
  RunConfig cfg;
  cfg.n = 64;
  cfg.threads = 4;
  cfg.ntimes = 9;
  cfg.counters = {"CYCLES", "L1D_MISS"};
  EXPECT_EQ(driver_argv("/x/driver", cfg),
            (std::vector<std::string>{"/x/driver", "64", "4", "9", "--counters", "CYCLES,L1D_MISS",
                                      "--warmup", "1"}));
}

TEST(Process, CapturesStreamsAndStatus) {
  auto p = run_process({"/bin/sh", "-c", "echo out; echo err >&2; exit 4"});
  EXPECT_EQ(p.out, "out\n");
  EXPECT_EQ(p.err, "err\n");
  EXPECT_EQ(p.exit_code, 4);
  EXPECT_FALSE(p.ok());
  EXPECT_TRUE(run_process({"pbench-definitely-not-installed"}).not_found);
  auto e = run_process({"/bin/sh", "-c", "echo $PB_X"}, {}, {{"PB_X", "42"}});
  EXPECT_EQ(e.out, "42\n");
}

TEST(Report, JsonlRoundTripIsByteIdentical) {
  std::vector<RunRecord> rs = {sample_record("triad", 1000, "L1"),
                               sample_record("jacobi1d", 50000, "L3")};
  rs[0].counters = {{"L1D_MISS", CounterValue{5u}}, {"CYCLES", CounterValue{}}};
  rs[1].config.transforms = {"tile=0:32"};
  std::string text = to_jsonl(rs);
  auto back = parse_jsonl(text);
  EXPECT_EQ(back, sorted_records(rs));
  EXPECT_EQ(to_jsonl(back), text);
  EXPECT_NE(text.find("\"schema_version\":1"), std::string::npos);
}

TEST(Report, JsonlErrors) {
  EXPECT_ERRC(parse_jsonl("{not json}\n"), Errc::ProtocolParseError);
  EXPECT_ERRC(parse_jsonl("{\"schema_version\":99}\n"), Errc::ProtocolParseError);
}

TEST(Report, CsvWritesUnsupportedCounters) {
  RunRecord r = sample_record("triad", 1000, "L1");
  r.counters = {{"L1D_MISS", CounterValue{}}};
  std::string csv = to_csv({r});
  EXPECT_NE(csv.find("counter.L1D_MISS"), std::string::npos);
  EXPECT_NE(csv.find("unsupported"), std::string::npos);
  RunRecord q = sample_record("a,b", 10, "L1");
  EXPECT_NE(to_csv({q}).find("\"a,b\""), std::string::npos);
}

TEST(Report, TableGroupsByBandInCacheOrder) {
  std::string t = to_table({sample_record("triad", 9000000, "DRAM"), sample_record("triad", 100, "L1"),
                            sample_record("triad", 5000, "L2")});
  auto l1 = t.find("-- L1 --"), l2 = t.find("-- L2 --"), dram = t.find("-- DRAM --");
  ASSERT_NE(l1, std::string::npos);
  EXPECT_LT(l1, l2);
  EXPECT_LT(l2, dram);
}

TEST(Report, WriteRejectsEmpty) {
  testutil::TempDir tmp;
  EXPECT_ERRC(write_report({}, ReportFormat::Jsonl, tmp / "x.jsonl"), Errc::IoError);
  write_report({sample_record("triad", 10, "L1")}, ReportFormat::Csv, tmp / "x.csv");
  EXPECT_TRUE(std::filesystem::exists(tmp / "x.csv"));
}

TEST(Report, FormatNames) {
  EXPECT_EQ(parse_report_format("csv"), ReportFormat::Csv);
  EXPECT_EQ(parse_report_format("table"), ReportFormat::Table);
  EXPECT_ERRC(parse_report_format("xml"), Errc::InvalidConfig);
}
