#pragma once

// Report writers: jsonl (one record per line), csv (flat), table (aligned,
// grouped by cache band).

#include "pbench/harness/record.hpp"

#include <iomanip>

namespace pbench {

enum class ReportFormat { Jsonl, Csv, Table };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "jsonl")
    return ReportFormat::Jsonl;
  if (s == "csv")
    return ReportFormat::Csv;
  if (s == "table")
    return ReportFormat::Table;
  throw Error(Errc::InvalidConfig, "unknown report format '" + std::string(s) + "'");
}

/// Stable order: pattern, template, n, threads.
inline std::vector<RunRecord> sorted_records(std::vector<RunRecord> rs) {
  std::stable_sort(rs.begin(), rs.end(), [](const RunRecord &a, const RunRecord &b) {
    auto key = [](const RunRecord &r) {
      return std::make_tuple(r.config.pattern, to_string(r.config.tmpl), r.config.n,
                             r.config.threads);
    };
    return key(a) < key(b);
  });
  return rs;
}

inline std::string to_jsonl(const std::vector<RunRecord> &records) {
  std::string out;
  for (const auto &r : sorted_records(records))
    out += to_json(r).dump() + "\n";
  return out;
}

inline std::vector<RunRecord> parse_jsonl(std::string_view text) {
  std::vector<RunRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty())
      continue;
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const nlohmann::json::exception &e) {
      throw Error(Errc::ProtocolParseError, e.what(), SourceLoc{number, 1});
    }
    out.push_back(record_from_json(j));
  }
  return out;
}

namespace detail {

inline std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s)
    out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline std::string number(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

inline std::string join(const std::vector<std::string> &v, const char *sep) {
  std::string out;
  for (const auto &s : v)
    out += (out.empty() ? "" : sep) + s;
  return out;
}

} // namespace detail

inline std::string to_csv(const std::vector<RunRecord> &records) {
  auto rs = sorted_records(records);
  std::set<std::string> counter_names;
  for (const auto &r : rs)
    for (const auto &[k, v] : r.counters)
      counter_names.insert(k);
  std::vector<std::string> header = {
      "pattern", "template", "transforms", "n", "threads", "ntimes", "band", "footprint_bytes",
      "elapsed_seconds", "instances_executed", "bytes_per_instance", "bytes_counted",
      "bandwidth_gbps", "validation", "valid"};
  for (const auto &c : counter_names)
    header.push_back("counter." + c);
  for (const char *m : {"timestamp", "host", "toolchain", "template_hash", "pattern_hash",
                        "tool_version"})
    header.push_back(m);
  std::string out = detail::join(header, ",") + "\n";
  for (const auto &r : rs) {
    std::vector<std::string> row = {
        r.config.pattern, to_string(r.config.tmpl), detail::join(r.config.transforms, ";"),
        std::to_string(r.config.n), std::to_string(r.config.threads),
        std::to_string(r.config.ntimes), r.band, std::to_string(r.footprint_bytes),
        detail::number(r.elapsed_seconds), std::to_string(r.instances_executed),
        std::to_string(r.bytes_per_instance), std::to_string(r.bytes_counted),
        detail::number(r.bandwidth_gbps), r.validation, r.valid ? "true" : "false"};
    for (const auto &c : counter_names) {
      auto it = r.counters.find(c);
      if (it == r.counters.end())
        row.push_back("");
      else
        row.push_back(it->second ? std::to_string(*it->second) : "unsupported");
    }
    const auto &m = r.metadata;
    for (const auto *s : {&m.timestamp, &m.host, &m.toolchain, &m.template_hash,
                          &m.pattern_hash, &m.tool_version})
      row.push_back(*s);
    for (auto &f : row)
      f = detail::csv_field(f);
    out += detail::join(row, ",") + "\n";
  }
  return out;
}

/// Aligned columns, one block per band in cache order (L1, L2, ..., DRAM).
inline std::string to_table(const std::vector<RunRecord> &records) {
  auto rs = sorted_records(records);
  auto band_rank = [](const std::string &b) -> Int {
    if (b.size() > 1 && b[0] == 'L' && std::isdigit(static_cast<unsigned char>(b[1])))
      return std::stoll(b.substr(1));
    return b == "DRAM" ? 1000 : 1001;
  };
  std::stable_sort(rs.begin(), rs.end(), [&](const RunRecord &a, const RunRecord &b) {
    return band_rank(a.band) < band_rank(b.band);
  });
  std::vector<std::string> header = {"pattern", "template", "n", "threads", "footprint",
                                     "seconds", "GB/s", "valid"};
  std::vector<std::vector<std::string>> rows;
  for (const auto &r : rs) {
    std::ostringstream gbps, secs;
    gbps << std::fixed << std::setprecision(3) << r.bandwidth_gbps;
    secs << std::scientific << std::setprecision(3) << r.elapsed_seconds;
    rows.push_back({r.config.pattern, to_string(r.config.tmpl), std::to_string(r.config.n),
                    std::to_string(r.config.threads), std::to_string(r.footprint_bytes),
                    secs.str(), gbps.str(), r.valid ? "yes" : "NO"});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto &row : rows)
      width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string> &cells) {
    std::string out;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      bool numeric = c >= 2 && c + 1 < cells.size();
      std::string pad(width[c] - cells[c].size(), ' ');
      out += (c ? "  " : "") + (numeric ? pad + cells[c] : cells[c] + pad);
    }
    while (!out.empty() && out.back() == ' ')
      out.pop_back();
    return out + "\n";
  };
  std::string out = line(header);
  std::string current;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    std::string band = rs[i].band.empty() ? "unassigned" : rs[i].band;
    if (i == 0 || band != current) {
      out += "-- " + band + " --\n";
      current = band;
    }
    out += line(rows[i]);
  }
  return out;
}

inline std::string format_report(const std::vector<RunRecord> &records, ReportFormat f) {
  switch (f) {
  case ReportFormat::Jsonl: return to_jsonl(records);
  case ReportFormat::Csv: return to_csv(records);
  case ReportFormat::Table: return to_table(records);
  }
  return {};
}

/// Write to `path`, or to stdout when path is empty or "-".
inline void write_report(const std::vector<RunRecord> &records, ReportFormat f,
                         const std::filesystem::path &path) {
  if (records.empty())
    throw Error(Errc::IoError, "no records to report");
  std::string text = format_report(records, f);
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  write_text_file(path, text);
}

} // namespace pbench
