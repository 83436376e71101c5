// Acceptance checks. Prints one PASS or FAIL line per criterion and exits
// nonzero when any criterion fails. No C toolchain is used: generated loop
// nests are executed by the AST interpreter.

#include "oracle.hpp"

#include "pbench/cli/commands.hpp"
#include "pbench/codegen/interpreter.hpp"
#include "pbench/harness/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

using namespace pbench;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const char *id, const char *what, const Outcome &o) {
  std::cout << (o.pass ? "PASS " : "FAIL ") << id << " " << what;
  if (!o.detail.empty())
    std::cout << " (" << o.detail << ")";
  std::cout << std::endl;
  failures += !o.pass;
}

template <class F> void criterion(const char *id, const char *what, F &&body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception &e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  report(id, what, o);
}

std::vector<oracle::Pt> executed_points(const LoopAst &ast, const Bindings &b) {
  std::vector<oracle::Pt> out;
  AstInterpreter(ast, b).run([&](const std::string &, std::span<const Int> args) {
    out.emplace_back(args.begin(), args.end());
  });
  return out;
}

int loop_depth(const AstNode &n) {
  return std::visit(
      [](const auto &x) -> int {
        using T = std::decay_t<decltype(x)>;
        int best = 0;
        if constexpr (std::is_same_v<T, CallNode>) {
          return 0;
        } else if constexpr (std::is_same_v<T, SeqNode>) {
          for (const auto &c : x.children)
            best = std::max(best, loop_depth(c));
          return best;
        } else {
          for (const auto &c : x.body)
            best = std::max(best, loop_depth(c));
          return best + (std::is_same_v<T, LoopNode> ? 1 : 0);
        }
      },
      n.node);
}

/// Every point of [lo, hi]^d executed exactly once and nothing else.
bool exact_cover(const std::vector<oracle::Pt> &got, std::size_t d, Int lo, Int hi,
                 std::string &why) {
  Int w = hi - lo + 1;
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k)
    total *= static_cast<std::size_t>(w);
  std::vector<unsigned char> seen(total, 0);
  for (const auto &p : got) {
    if (p.size() != d) {
      why = "wrong arity";
      return false;
    }
    std::size_t idx = 0;
    for (Int v : p) {
      if (v < lo || v > hi) {
        why = "point outside the domain";
        return false;
      }
      idx = idx * static_cast<std::size_t>(w) + static_cast<std::size_t>(v - lo);
    }
    if (seen[idx]++) {
      why = "duplicated point";
      return false;
    }
  }
  if (got.size() != total) {
    why = "lost " + std::to_string(total - got.size()) + " points";
    return false;
  }
  return true;
}

const char *kListing10 = R"(Domain_run := [n] -> {
    STM_3DS_run[k,j,i] : i <= n and i >= 1 and j<=n and j >= 1 and k<=n and k >= 1;
};
Tiling := [n] -> {
    STM_3DS_run[k,j,i] -> STM_3DS_run[tk,tj,ti,k,j,i]:exists rk,rj,ri:
                    0<=rk<32 and k=tk*32+rk
                and 0<=rj<64 and j=tj*64+rj
                and 0<=ri<16 and i=ti*16+ri;
};
codegen (Tiling * Domain_run);
)";

} // namespace

int main() {
  criterion("codegen-oracle", "500 random sets scan to the lexicographic oracle", [] {
    std::mt19937_64 rng(20260101);
    auto t0 = std::chrono::steady_clock::now();
    int mismatches = 0;
    std::size_t points = 0;
    std::string first;
    for (int i = 0; i < 500; ++i) {
      oracle::RandSet rs = oracle::random_set(rng);
      Int n = std::uniform_int_distribution<Int>(1, 12)(rng);
      Int m = std::uniform_int_distribution<Int>(1, 12)(rng);
      USet s = normalize(parse_set(rs.text()));
      auto got = executed_points(codegen(Value{s}), {{"n", n}, {"m", m}});
      auto want = rs.points(n, m);
      points += want.size();
      if (got != want && mismatches++ == 0)
        first = rs.text() + " n=" + std::to_string(n) + " m=" + std::to_string(m);
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream d;
    d << "mismatches=" << mismatches << " points=" << points << " seconds=" << secs
      << " limit=60";
    if (!first.empty())
      d << " first=" << first;
    return Outcome{mismatches == 0 && secs < 60.0, d.str()};
  });

  criterion("listing10", "tiled Jacobi-3D nest: depth 6, bounds, exact points at n=70", [] {
    CodegenResult r = cmd_codegen(kListing10);
    int depth = loop_depth(r.ast.root);
    bool upper = r.c_text.find("c0 <= floord(n, 32)") != std::string::npos;
    bool lower = r.c_text.find("max(1, 32 * c0)") != std::string::npos;
    bool inner = r.c_text.find("c3 <= min(n, 32 * c0 + 31)") != std::string::npos;
    auto got = executed_points(r.ast, {{"n", 70}});
    std::sort(got.begin(), got.end());
    bool same = got == oracle::box_points(3, 1, 70);
    std::ostringstream d;
    d << "depth=" << depth << " floord_upper=" << upper << " max_lower=" << lower
      << " min_upper=" << inner << " points=" << got.size() << "/343000 multiset_equal=" << same;
    return Outcome{depth == 6 && upper && lower && inner && same, d.str()};
  });

  criterion("interchange", "swap map executes (j,i) lexicographic order on 5x5", [] {
    CodegenResult r = cmd_codegen("Domain := [n] -> { S[i,j] : 1 <= i <= n and 1 <= j <= n };\n"
                                  "Swap := { S[i,j] -> S[j,i] };\n"
                                  "codegen(Swap * Domain);\n");
    auto got = executed_points(r.ast, {{"n", 5}});
    auto want = oracle::box_points(2, 1, 5);
    std::stable_sort(want.begin(), want.end(), [](const auto &a, const auto &b) {
      return std::tie(a[1], a[0]) < std::tie(b[1], b[0]);
    });
    return Outcome{got == want, "executed=" + std::to_string(got.size()) + " expected=25"};
  });

  criterion("transform-bijection", "tile 16/32/64 full and partial, interleave 2/4", [] {
    const Value cube =
        parse_value("[n] -> { S[i,j,k] : 1 <= i <= n and 1 <= j <= n and 1 <= k <= n }");
    const Value line = parse_value("[n] -> { S[i] : 0 <= i < n }");
    std::vector<std::pair<std::vector<std::string>, Int>> cube_cases;
    for (std::string s : {"16", "32", "64"}) {
      cube_cases.push_back({{"tile=0:" + s + ",1:" + s + ",2:" + s}, 70});
      cube_cases.push_back({{"tile=1:" + s + ",2:" + s}, 70});
      cube_cases.push_back({{"tile=2:" + s}, 33});
    }
    cube_cases.push_back({{"tile=0:32,1:64,2:16"}, 70});
    cube_cases.push_back({{"tile=0:16,1:16"}, 17});
    cube_cases.push_back({{"tile=0:64,1:32,2:16"}, 1});
    cube_cases.push_back({{"tile=1:16,2:16", "interchange=1,0,2,3,4"}, 40});
    int checked = 0;
    std::string why;
    for (const auto &[ts, n] : cube_cases) {
      std::vector<TransformSpec> specs;
      for (const auto &t : ts)
        specs.push_back(parse_transform(t));
      auto sched = apply_transforms(cube, specs);
      auto got = executed_points(codegen(sched.schedule), {{"n", n}});
      if (!exact_cover(got, 3, 1, n, why))
        return Outcome{false, ts.front() + " n=" + std::to_string(n) + ": " + why};
      ++checked;
    }
    for (Int f : {2, 4}) {
      for (Int n : {f, Int{8}, Int{64}, 70 * f, Int{4096}}) {
        auto sched = apply_transforms(line, {parse_transform("interleave=" + std::to_string(f))});
        Bindings b{{"n", n}};
        for (const auto &dp : sched.derived)
          b[dp.name] = n / dp.divisor;
        auto ctx = sched.context;
        auto got = executed_points(codegen(sched.schedule, ctx ? &*ctx : nullptr), b);
        if (!exact_cover(got, 1, 0, n - 1, why))
          return Outcome{false, "interleave=" + std::to_string(f) + " n=" + std::to_string(n) +
                                    ": " + why};
        ++checked;
      }
    }
    return Outcome{true, std::to_string(checked) + " configurations, no loss or duplication"};
  });

  criterion("normalization", "existential elimination preserves 200 random point sets", [] {
    std::mt19937_64 rng(424242);
    int mismatches = 0;
    std::size_t points = 0;
    std::string first;
    for (int i = 0; i < 200; ++i) {
      oracle::RandSet rs = oracle::random_eliminable(rng);
      Int n = std::uniform_int_distribution<Int>(1, 12)(rng);
      Int m = std::uniform_int_distribution<Int>(1, 12)(rng);
      USet raw = parse_set(rs.text());
      USet norm = normalize(raw);
      std::vector<oracle::Pt> got;
      bool clean = true;
      for (const auto &p : norm.pieces) {
        clean = clean && p.exists.empty();
        auto pts = oracle::filter_box(p, {{"n", n}, {"m", m}}, n);
        got.insert(got.end(), pts.begin(), pts.end());
      }
      std::sort(got.begin(), got.end());
      auto want = rs.points(n, m);
      points += want.size();
      if ((!clean || got != want) && mismatches++ == 0)
        first = rs.text();
    }
    std::string d = "mismatches=" + std::to_string(mismatches) +
                    " points=" + std::to_string(points);
    if (!first.empty())
      d += " first=" + first;
    return Outcome{mismatches == 0, d};
  });

  criterion("report-roundtrip", "jsonl byte-identical round trip, bandwidth invariant", [] {
    std::mt19937_64 rng(77);
    std::vector<RunRecord> records;
    for (int i = 0; i < 64; ++i) {
      RunRecord r;
      r.config.pattern = i % 2 ? "triad" : "jacobi1d \"q\"";
      r.config.tmpl = parse_template_kind(i % 3 ? "unified" : "counters:independent");
      if (i % 5 == 0)
        r.config.transforms = {"tile=0:32", "interleave=2"};
      r.config.n = std::uniform_int_distribution<Int>(1, 1 << 24)(rng);
      r.config.threads = std::uniform_int_distribution<Int>(1, 64)(rng);
      r.config.ntimes = std::uniform_int_distribution<Int>(1, 1000)(rng);
      if (i % 3 == 0)
        r.config.counters = {"L1D_MISS", "CYCLES"};
      r.band = i % 4 ? "L2" : "DRAM";
      r.footprint_bytes = 24 * r.config.n;
      r.elapsed_seconds = std::uniform_real_distribution<double>(1e-7, 10.0)(rng);
      r.elapsed_min = r.elapsed_seconds * 0.9;
      r.elapsed_max = r.elapsed_seconds * 1.1;
      r.instances_executed = r.config.n * r.config.ntimes;
      r.bytes_per_instance = i % 2 ? 24 : 16;
      r.validation = i % 7 ? "pass" : "fail";
      r.valid = r.validation == "pass";
      if (i % 3 == 0)
        r.counters = {{"L1D_MISS", i % 2 ? CounterValue{} : CounterValue{123456789u}},
                      {"CYCLES", CounterValue{42u}}};
      r.metadata.timestamp = "2026-01-01T00:00:00Z";
      r.metadata.host = "node-" + std::to_string(i);
      r.metadata.toolchain = "cc -O3 -fopenmp";
      r.metadata.template_hash = "0123456789abcdef";
      r.metadata.pattern_hash = "fedcba9876543210";
      r.metadata.tool_version = PBENCH_VERSION;
      r.metadata.env = {{"OMP_PROC_BIND", "close"}};
      derive_bandwidth(r);
      records.push_back(r);
    }
    std::string first = to_jsonl(records);
    auto parsed = parse_jsonl(first);
    std::string second = to_jsonl(parsed);
    int bad = 0;
    for (const auto &r : parsed) {
      double expect = static_cast<double>(r.bytes_counted) / r.elapsed_seconds;
      bool ok = bandwidth_consistent(r) &&
                r.bytes_counted == r.instances_executed * r.bytes_per_instance &&
                std::abs(r.bandwidth_bytes_per_second - expect) <= 1e-12 * expect &&
                std::abs(r.bandwidth_gbps - expect / 1e9) <= 1e-12 * expect / 1e9;
      bad += !ok;
    }
    std::ostringstream d;
    d << "records=" << parsed.size() << " bytes=" << first.size()
      << " identical=" << (first == second) << " invariant_violations=" << bad
      << " rel_tol=1e-12";
    return Outcome{first == second && parsed.size() == records.size() && bad == 0, d.str()};
  });

  criterion("sweep-r2", "R2 machine, triad 24n: >=4 sizes per band, hand band edges", [] {
    MachineDesc r2;
    r2.levels = {{"L1", 32 * 1024, 64, Scope::Core},
                 {"L2", 256 * 1024, 64, Scope::Core},
                 {"L3", 35 * 1024 * 1024, 64, Scope::Domain}};
    PatternSpec triad = load_pattern(std::filesystem::path(PBENCH_SOURCE_DIR) / "patterns/triad");
    FootprintModel fp = footprint_model(triad, TemplateBase::Unified);
    // Hand arithmetic for 24 bytes per element, one thread:
    //   first size  ceil(16384 / 24)      = 683      (half of L1)
    //   L1 edge     floor(32768 / 24)     = 1365
    //   L2 edge     floor(262144 / 24)    = 10922
    //   L3 edge     floor(36700160 / 24)  = 1529173
    //   DRAM edge   floor(146800640 / 24) = 6116693  (four times L3)
    struct Edge {
      const char *name;
      Int first, last;
    };
    const Edge hand[] = {{"L1", 683, 1365},
                         {"L2", 1366, 10922},
                         {"L3", 10923, 1529173},
                         {"DRAM", 1529174, 6116693}};
    auto hand_band = [&](Int n) -> std::string {
      for (const auto &e : hand)
        if (n >= e.first && n <= e.last)
          return e.name;
      return "none";
    };
    bool ok = fp(1, 1) == 24 && fp(1000, 1) == 24000;
    auto bands = plan_bands(r2, fp, 1, 1);
    ok = ok && bands.size() == 4;
    for (std::size_t i = 0; ok && i < bands.size(); ++i)
      ok = bands[i].name == hand[i].name && bands[i].first_n == hand[i].first &&
           bands[i].last_n == hand[i].last;
    SweepOptions opts;
    opts.threads = 1;
    auto plan = plan_sweep(r2, fp, opts);
    std::map<std::string, int> per_band;
    int misassigned = 0;
    for (const auto &c : plan) {
      std::string b = band_of(r2, fp, c.n, c.threads);
      misassigned += b != hand_band(c.n);
      ++per_band[b];
    }
    std::ostringstream d;
    d << "edges_match=" << ok;
    for (const auto &e : hand) {
      d << " " << e.name << "=" << per_band[e.name];
      ok = ok && per_band[e.name] >= 4;
    }
    d << " misassigned=" << misassigned;
    return Outcome{ok && misassigned == 0, d.str()};
  });

  std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " failing criteria"
            << std::endl;
  return failures ? 1 : 0;
}
