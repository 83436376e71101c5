#pragma once

// Running a built driver and turning its stdout into a RunRecord.

#include "pbench/harness/record.hpp"

#include <charconv>

namespace pbench {

/// Parsed driver stdout.
struct DriverOutput {
  double elapsed_seconds = 0;
  Int instances_executed = 0;
  std::string validation;
  Int threads = 0;
  std::map<std::string, CounterValue> counters;
};

/// Every non-empty line must be `key=value` with a protocol key.
inline DriverOutput parse_driver_output(const std::string &raw) {
  DriverOutput d;
  std::set<std::string> seen;
  auto fail = [&](const std::string &why) -> void {
    throw Error(Errc::ProtocolParseError, why + "; raw output:\n" + raw);
  };
  auto to_int = [&](const std::string &v, const std::string &key) {
    Int x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
      fail("bad integer for " + key);
    return x;
  };
  std::istringstream in(raw);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      fail("line '" + line + "' is not key=value");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    if (!seen.insert(key).second)
      fail("duplicate key " + key);
    if (key == "elapsed_seconds") {
      char *end = nullptr;
      d.elapsed_seconds = std::strtod(value.c_str(), &end);
      if (value.empty() || *end != '\0' || d.elapsed_seconds < 0)
        fail("bad elapsed_seconds");
    } else if (key == "instances_executed") {
      d.instances_executed = to_int(value, key);
    } else if (key == "validation") {
      if (value != "pass" && value != "fail")
        fail("validation must be pass or fail");
      d.validation = value;
    } else if (key == "threads") {
      d.threads = to_int(value, key);
    } else if (key.starts_with("counter.") && key.size() > 8) {
      std::string name = key.substr(8);
      if (value == "unsupported") {
        d.counters[name] = std::nullopt;
      } else {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || p != value.data() + value.size())
          fail("bad counter value for " + name);
        d.counters[name] = v;
      }
    } else {
      fail("unknown key " + key);
    }
  }
  for (const char *k : {"elapsed_seconds", "instances_executed", "validation", "threads"})
    if (!seen.count(k))
      fail(std::string("missing ") + k);
  return d;
}

/// Everything execute() needs besides the config.
struct ExecutionContext {
  Int bytes_per_instance = 0;
  FootprintModel footprint;
  const MachineDesc *machine = nullptr;
  Metadata metadata; ///< toolchain, hashes, machine fields; time/host filled in here
};

inline std::vector<std::string> driver_argv(const std::filesystem::path &exe, const RunConfig &c) {
  std::vector<std::string> argv = {exe.string(), std::to_string(c.n), std::to_string(c.threads),
                                   std::to_string(c.ntimes)};
  if (!c.counters.empty()) {
    std::string list;
    for (const auto &e : c.counters)
      list += (list.empty() ? "" : ",") + e;
    argv.insert(argv.end(), {"--counters", list});
  }
  argv.insert(argv.end(), {"--warmup", std::to_string(c.warmup)});
  return argv;
}

/// Run the driver `repeats` times. A failed validation is kept in the
/// record with valid=false; a crash or unreadable output is an error.
inline RunRecord execute(const std::filesystem::path &exe, const RunConfig &cfg,
                         const ExecutionContext &ctx) {
  cfg.validate();
  RunRecord r;
  r.config = cfg;
  r.bytes_per_instance = ctx.bytes_per_instance;
  if (ctx.footprint) {
    r.footprint_bytes = ctx.footprint(cfg.n, cfg.threads);
    if (ctx.machine)
      r.band = band_of(*ctx.machine, ctx.footprint, cfg.n, cfg.threads);
  }
  std::vector<double> samples;
  bool all_pass = true;
  for (Int rep = 0; rep < cfg.repeats; ++rep) {
    ProcessResult p = run_process(driver_argv(exe, cfg));
    if (p.not_found)
      throw Error(Errc::DriverCrashed, "cannot execute " + exe.string());
    if (p.signaled)
      throw Error(Errc::DriverCrashed, exe.filename().string() + " killed by signal " +
                                           std::to_string(p.signal) + "\n" + p.err);
    if (p.exit_code != 0 && p.out.find('=') == std::string::npos)
      throw Error(Errc::DriverCrashed, exe.filename().string() + " exited with status " +
                                           std::to_string(p.exit_code) + "\n" + p.err);
    DriverOutput d = parse_driver_output(p.out);
    samples.push_back(d.elapsed_seconds);
    all_pass = all_pass && d.validation == "pass" && p.exit_code == 0;
    r.instances_executed = d.instances_executed;
    r.counters = d.counters;
  }
  std::sort(samples.begin(), samples.end());
  r.elapsed_min = samples.front();
  r.elapsed_max = samples.back();
  r.elapsed_seconds = samples[samples.size() / 2];
  r.validation = all_pass ? "pass" : "fail";
  r.valid = all_pass;
  derive_bandwidth(r);
  r.metadata = ctx.metadata;
  r.metadata.timestamp = iso_timestamp_utc();
  r.metadata.host = host_name();
  r.metadata.env = omp_environment();
  return r;
}

} // namespace pbench
