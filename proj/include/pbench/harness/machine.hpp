#pragma once

// Cache hierarchy descriptions: detected from sysfs, read from a machine
// file, or the documented default.
//
// Machine file, one `key = value` per line:
//   L1.capacity = 32K
//   L1.line = 64
//   L1.scope = core          # core or domain
//   L3.capacity = 35M
//   L3.scope = domain
//   cores_per_domain = 14
//   domains = 2

#include "pbench/pattern/spec.hpp"

#include <set>

namespace pbench {

enum class Scope { Core, Domain };

struct CacheLevel {
  std::string name;
  Int capacity = 0; ///< bytes
  Int line = 64;    ///< bytes
  Scope scope = Scope::Core;

  friend bool operator==(const CacheLevel &, const CacheLevel &) = default;
};

struct MachineDesc {
  std::vector<CacheLevel> levels;
  Int cores_per_domain = 1;
  Int domains = 1;
  bool detected = false;
  std::string source = "default"; ///< sysfs, file path, or default

  void validate() const {
    if (levels.empty())
      throw Error(Errc::InvalidConfig, "machine description has no cache levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const auto &l = levels[i];
      if (l.line <= 0)
        throw Error(Errc::InvalidConfig, l.name + " line size must be positive");
      if (l.capacity <= 0)
        throw Error(Errc::InvalidConfig, l.name + " capacity must be positive");
      if (i && l.capacity <= levels[i - 1].capacity)
        throw Error(Errc::InvalidConfig, "cache capacities must increase: " + l.name +
                                             " is not larger than " + levels[i - 1].name);
    }
    if (cores_per_domain < 1 || domains < 1)
      throw Error(Errc::InvalidConfig, "cores_per_domain and domains must be positive");
  }
  const CacheLevel &llc() const { return levels.back(); }
};

/// 32 KiB / 256 KiB / 32 MiB with 64-byte lines, last level shared.
inline MachineDesc default_machine() {
  MachineDesc m;
  m.levels = {{"L1", 32 * 1024, 64, Scope::Core},
              {"L2", 256 * 1024, 64, Scope::Core},
              {"L3", 32 * 1024 * 1024, 64, Scope::Domain}};
  m.detected = false;
  m.source = "default";
  return m;
}

/// `32K`, `35M`, `1G`, or plain bytes; suffixes are binary.
inline Int parse_size(std::string_view text) {
  std::string s = trim(text);
  if (s.empty())
    throw Error(Errc::InvalidConfig, "empty size");
  Int mult = 1;
  char last = static_cast<char>(std::toupper(static_cast<unsigned char>(s.back())));
  if (last == 'B')
    s.pop_back(), last = s.empty() ? '\0' : static_cast<char>(std::toupper(
                                                static_cast<unsigned char>(s.back())));
  if (last == 'K' || last == 'M' || last == 'G') {
    mult = last == 'K' ? 1024 : last == 'M' ? 1024 * 1024 : 1024LL * 1024 * 1024;
    s.pop_back();
  }
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception &) {
    pos = std::string::npos;
  }
  if (pos != s.size() || v < 0)
    throw Error(Errc::InvalidConfig, "bad size '" + std::string(text) + "'");
  return checked_mul(v, mult);
}

inline std::string format_size(Int bytes) {
  if (bytes % (1024 * 1024) == 0)
    return std::to_string(bytes / (1024 * 1024)) + "M";
  if (bytes % 1024 == 0)
    return std::to_string(bytes / 1024) + "K";
  return std::to_string(bytes);
}

inline MachineDesc parse_machine(std::string_view text, std::string source = "file") {
  MachineDesc m;
  m.source = std::move(source);
  m.detected = true;
  std::map<std::string, CacheLevel> levels;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto h = line.find('#'); h != std::string::npos)
      line.erase(h);
    if (trim(line).empty())
      continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::InvalidConfig, "expected 'key = value'", SourceLoc{number, 1});
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    try {
      if (key == "cores_per_domain") {
        m.cores_per_domain = std::stoll(value);
      } else if (key == "domains") {
        m.domains = std::stoll(value);
      } else if (auto dot = key.find('.'); dot != std::string::npos) {
        std::string lvl = key.substr(0, dot), field = key.substr(dot + 1);
        auto &l = levels[lvl];
        l.name = lvl;
        if (field == "capacity")
          l.capacity = parse_size(value);
        else if (field == "line")
          l.line = parse_size(value);
        else if (field == "scope" && (value == "core" || value == "domain"))
          l.scope = value == "core" ? Scope::Core : Scope::Domain;
        else
          throw Error(Errc::InvalidConfig, "unknown setting '" + key + " = " + value + "'");
      } else {
        throw Error(Errc::InvalidConfig, "unknown key '" + key + "'");
      }
    } catch (const Error &e) {
      throw Error(e.code(), e.what(), SourceLoc{number, 1});
    } catch (const std::exception &) {
      throw Error(Errc::InvalidConfig, "bad value for " + key, SourceLoc{number, 1});
    }
  }
  for (auto &[name, l] : levels)
    m.levels.push_back(l);
  std::sort(m.levels.begin(), m.levels.end(),
            [](const CacheLevel &a, const CacheLevel &b) { return a.capacity < b.capacity; });
  m.validate();
  return m;
}

inline MachineDesc load_machine_file(const std::filesystem::path &path) {
  return parse_machine(read_text_file(path), path.string());
}

inline std::string serialize_machine(const MachineDesc &m) {
  std::ostringstream out;
  for (const auto &l : m.levels) {
    out << l.name << ".capacity = " << format_size(l.capacity) << "\n";
    out << l.name << ".line = " << l.line << "\n";
    out << l.name << ".scope = " << (l.scope == Scope::Core ? "core" : "domain") << "\n";
  }
  out << "cores_per_domain = " << m.cores_per_domain << "\n";
  out << "domains = " << m.domains << "\n";
  return out.str();
}

namespace detail {

/// Count of CPUs in a sysfs list such as `0-3,8,10-11`.
inline Int cpu_list_count(std::string_view text) {
  Int count = 0;
  std::stringstream ss{trim(text)};
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty())
      continue;
    auto dash = part.find('-');
    if (dash == std::string::npos)
      count += 1;
    else
      count += std::stoll(part.substr(dash + 1)) - std::stoll(part.substr(0, dash)) + 1;
  }
  return count;
}

inline std::optional<std::string> read_optional(const std::filesystem::path &p) {
  std::ifstream in(p);
  if (!in)
    return std::nullopt;
  std::string s;
  std::getline(in, s);
  return trim(s);
}

} // namespace detail

/// Read cpu0's data and unified caches from a sysfs tree rooted at
/// `root` (normally /sys/devices/system/cpu). Falls back to
/// default_machine() with detected=false.
inline MachineDesc detect_machine(const std::filesystem::path &root = "/sys/devices/system/cpu") {
  try {
    auto cache = root / "cpu0" / "cache";
    if (!std::filesystem::is_directory(cache))
      return default_machine();
    struct Raw {
      Int level, size, line, sharing;
    };
    std::vector<Raw> raws;
    for (const auto &e : std::filesystem::directory_iterator(cache)) {
      if (!e.path().filename().string().starts_with("index"))
        continue;
      auto type = detail::read_optional(e.path() / "type");
      if (!type || *type == "Instruction")
        continue;
      auto level = detail::read_optional(e.path() / "level");
      auto size = detail::read_optional(e.path() / "size");
      if (!level || !size)
        continue;
      auto line = detail::read_optional(e.path() / "coherency_line_size");
      auto shared = detail::read_optional(e.path() / "shared_cpu_list");
      raws.push_back({std::stoll(*level), parse_size(*size), line ? std::stoll(*line) : 64,
                      shared ? detail::cpu_list_count(*shared) : 1});
    }
    if (raws.empty())
      return default_machine();
    std::sort(raws.begin(), raws.end(), [](auto &a, auto &b) { return a.level < b.level; });
    MachineDesc m;
    Int per_core = raws.front().sharing;
    for (const auto &r : raws)
      m.levels.push_back({"L" + std::to_string(r.level), r.size, r.line,
                          r.sharing <= per_core ? Scope::Core : Scope::Domain});
    m.cores_per_domain = std::max<Int>(1, raws.back().sharing);
    if (auto online = detail::read_optional(root / "online"))
      m.domains = std::max<Int>(1, detail::cpu_list_count(*online) / m.cores_per_domain);
    m.detected = true;
    m.source = "sysfs";
    m.validate();
    return m;
  } catch (const std::exception &) {
    return default_machine();
  }
}

} // namespace pbench
