#pragma once

// Run records and their jsonl schema.

#include "pbench/harness/sweep.hpp"

#include <json.hpp>

#include <chrono>
#include <ctime>

#include <unistd.h>

namespace pbench {

inline constexpr int kSchemaVersion = 1;

struct Metadata {
  std::string timestamp; ///< ISO 8601, UTC
  std::string host;
  std::string toolchain; ///< exact compiler command line
  std::string template_hash;
  std::string pattern_hash;
  std::string tool_version;
  std::map<std::string, std::string> env; ///< OMP_* passthrough
  bool machine_detected = false;
  std::string machine_source;

  friend bool operator==(const Metadata &, const Metadata &) = default;
};

/// Counter value, or nullopt when the event was unsupported.
using CounterValue = std::optional<std::uint64_t>;

struct RunRecord {
  RunConfig config;
  std::string band;
  Int footprint_bytes = 0;
  double elapsed_seconds = 0;     ///< median over repeats
  double elapsed_min = 0;
  double elapsed_max = 0;
  Int instances_executed = 0;
  Int bytes_per_instance = 0;
  Int bytes_counted = 0;
  double bandwidth_bytes_per_second = 0;
  double bandwidth_gbps = 0;
  std::string validation;         ///< pass or fail
  bool valid = false;
  std::map<std::string, CounterValue> counters;
  Metadata metadata;

  friend bool operator==(const RunRecord &, const RunRecord &) = default;
};

/// bytes_counted and bandwidth from the stored counts and time.
inline void derive_bandwidth(RunRecord &r) {
  r.bytes_counted = checked_mul(r.bytes_per_instance, r.instances_executed);
  r.bandwidth_bytes_per_second =
      r.elapsed_seconds > 0 ? static_cast<double>(r.bytes_counted) / r.elapsed_seconds : 0.0;
  r.bandwidth_gbps = r.bandwidth_bytes_per_second / 1e9;
}

inline bool bandwidth_consistent(const RunRecord &r) {
  RunRecord c = r;
  derive_bandwidth(c);
  return c.bytes_counted == r.bytes_counted &&
         c.bandwidth_bytes_per_second == r.bandwidth_bytes_per_second &&
         c.bandwidth_gbps == r.bandwidth_gbps;
}

inline std::string iso_timestamp_utc() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string host_name() {
  char buf[256] = {};
  if (gethostname(buf, sizeof buf - 1) != 0)
    return "unknown";
  return buf;
}

inline std::map<std::string, std::string> omp_environment() {
  std::map<std::string, std::string> env;
  for (const char *k : {"OMP_NUM_THREADS", "OMP_PROC_BIND", "OMP_PLACES"})
    if (const char *v = std::getenv(k))
      env[k] = v;
  return env;
}

// ---------------------------------------------------------------------------
// JSON

using ojson = nlohmann::ordered_json;

inline ojson to_json(const RunRecord &r) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["pattern"] = r.config.pattern;
  j["template"] = to_string(r.config.tmpl);
  j["transforms"] = r.config.transforms;
  j["n"] = r.config.n;
  j["threads"] = r.config.threads;
  j["ntimes"] = r.config.ntimes;
  j["warmup"] = r.config.warmup;
  j["repeats"] = r.config.repeats;
  j["counters_requested"] = r.config.counters;
  j["band"] = r.band;
  j["footprint_bytes"] = r.footprint_bytes;
  j["elapsed_seconds"] = r.elapsed_seconds;
  j["elapsed_min"] = r.elapsed_min;
  j["elapsed_max"] = r.elapsed_max;
  j["instances_executed"] = r.instances_executed;
  j["bytes_per_instance"] = r.bytes_per_instance;
  j["bytes_counted"] = r.bytes_counted;
  j["bandwidth_bytes_per_second"] = r.bandwidth_bytes_per_second;
  j["bandwidth_gbps"] = r.bandwidth_gbps;
  j["validation"] = r.validation;
  j["valid"] = r.valid;
  ojson c = ojson::object();
  for (const auto &[k, v] : r.counters)
    c[k] = v ? ojson(*v) : ojson("unsupported");
  j["counters"] = c;
  const auto &m = r.metadata;
  ojson md;
  md["timestamp"] = m.timestamp;
  md["host"] = m.host;
  md["toolchain"] = m.toolchain;
  md["template_hash"] = m.template_hash;
  md["pattern_hash"] = m.pattern_hash;
  md["tool_version"] = m.tool_version;
  md["env"] = ojson(m.env);
  md["machine_detected"] = m.machine_detected;
  md["machine_source"] = m.machine_source;
  j["metadata"] = md;
  return j;
}

inline RunRecord record_from_json(const ojson &j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion)
      throw Error(Errc::ProtocolParseError, "unsupported schema_version " +
                                                j.at("schema_version").dump());
    RunRecord r;
    r.config.pattern = j.at("pattern").get<std::string>();
    r.config.tmpl = parse_template_kind(j.at("template").get<std::string>());
    r.config.transforms = j.at("transforms").get<std::vector<std::string>>();
    r.config.n = j.at("n").get<Int>();
    r.config.threads = j.at("threads").get<Int>();
    r.config.ntimes = j.at("ntimes").get<Int>();
    r.config.warmup = j.at("warmup").get<Int>();
    r.config.repeats = j.at("repeats").get<Int>();
    r.config.counters = j.at("counters_requested").get<std::vector<std::string>>();
    r.band = j.at("band").get<std::string>();
    r.footprint_bytes = j.at("footprint_bytes").get<Int>();
    r.elapsed_seconds = j.at("elapsed_seconds").get<double>();
    r.elapsed_min = j.at("elapsed_min").get<double>();
    r.elapsed_max = j.at("elapsed_max").get<double>();
    r.instances_executed = j.at("instances_executed").get<Int>();
    r.bytes_per_instance = j.at("bytes_per_instance").get<Int>();
    r.bytes_counted = j.at("bytes_counted").get<Int>();
    r.bandwidth_bytes_per_second = j.at("bandwidth_bytes_per_second").get<double>();
    r.bandwidth_gbps = j.at("bandwidth_gbps").get<double>();
    r.validation = j.at("validation").get<std::string>();
    r.valid = j.at("valid").get<bool>();
    for (const auto &[k, v] : j.at("counters").items())
      r.counters[k] = v.is_string() ? CounterValue{} : CounterValue{v.get<std::uint64_t>()};
    const auto &md = j.at("metadata");
    auto &m = r.metadata;
    m.timestamp = md.at("timestamp").get<std::string>();
    m.host = md.at("host").get<std::string>();
    m.toolchain = md.at("toolchain").get<std::string>();
    m.template_hash = md.at("template_hash").get<std::string>();
    m.pattern_hash = md.at("pattern_hash").get<std::string>();
    m.tool_version = md.at("tool_version").get<std::string>();
    m.env = md.at("env").get<std::map<std::string, std::string>>();
    m.machine_detected = md.at("machine_detected").get<bool>();
    m.machine_source = md.at("machine_source").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception &e) {
    throw Error(Errc::ProtocolParseError, std::string("bad record: ") + e.what());
  }
}

} // namespace pbench
