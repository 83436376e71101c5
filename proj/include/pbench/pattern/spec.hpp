#pragma once

// Pattern directories: `kernel.spec` plus init/run/val schedules, each a
// script (`.pset`) or raw kernel C (`.c`).
//
// kernel.spec is sectioned, one `key = value` entry per line:
//
//   [spaces]         A = double[n] layout=per_thread padding=8
//   [mappings]       A_map(i) = A[t_id * 8][i]
//   [statements]     Triad_run(i) = A_map(i) = B_map(i) + scalar * C_map(i);
//   [clause]         schedule(static)
//   [params]         scalar = 3.0
//   [measure]        template = unified
//
// `[spaces.independent]` and `[mappings.independent]` replace entries of
// the same name when the pattern is instantiated with the independent
// template. `#` starts a comment; a trailing `\` continues a line.

#include "pbench/iset/script.hpp"
#include "pbench/pattern/ctokens.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace pbench {

enum class Layout { Unified, PerThread };
enum class Role { Init, Run, Val };
enum class TemplateBase { Unified, Independent };

inline std::string_view to_string(Layout l) {
  return l == Layout::Unified ? "unified" : "per_thread";
}
inline std::string_view to_string(Role r) {
  switch (r) {
  case Role::Init: return "init";
  case Role::Run: return "run";
  case Role::Val: return "val";
  }
  return "?";
}
inline std::string_view to_string(TemplateBase t) {
  return t == TemplateBase::Unified ? "unified" : "independent";
}
inline std::optional<TemplateBase> parse_template_base(std::string_view s) {
  if (s == "unified")
    return TemplateBase::Unified;
  if (s == "independent")
    return TemplateBase::Independent;
  return std::nullopt;
}

struct DataSpace {
  std::string name;
  std::string element_type = "double";
  std::vector<std::string> extents; ///< one expression over n and t per rank
  Int padding = 1;
  Layout layout = Layout::Unified;
  int line = 0;

  std::size_t rank() const { return extents.size(); }
};

struct MemoryMapping {
  std::string name;
  std::vector<std::string> params;
  std::string address;
  int line = 0;

  std::size_t arity() const { return params.size(); }
};

struct StatementMacro {
  std::string name;
  std::vector<std::string> params;
  std::string body;
  int line = 0;

  std::size_t arity() const { return params.size(); }
  /// Init/Run/Val from the `_init`/`_run`/`_val` suffix.
  std::optional<Role> role() const {
    for (Role r : {Role::Init, Role::Run, Role::Val}) {
      std::string suffix = "_" + std::string(to_string(r));
      if (name.size() > suffix.size() && name.ends_with(suffix))
        return r;
    }
    return std::nullopt;
  }
  std::string family() const {
    auto r = role();
    return r ? name.substr(0, name.size() - to_string(*r).size() - 1) : name;
  }
};

enum class ScheduleKind { Script, RawC };

struct Schedule {
  ScheduleKind kind = ScheduleKind::Script;
  std::string text;

  std::string file_name(Role r) const {
    return std::string(to_string(r)) + (kind == ScheduleKind::Script ? ".pset" : ".c");
  }
  friend bool operator==(const Schedule &, const Schedule &) = default;
};

struct Measure {
  std::optional<Int> bytes_per_instance;
  TemplateBase default_template = TemplateBase::Unified;
  Int min_n = 1;
  std::vector<std::string> transforms; ///< default run-schedule transforms
};

struct PatternSpec {
  std::string name;
  std::vector<DataSpace> spaces;
  std::vector<MemoryMapping> mappings;
  std::vector<DataSpace> independent_spaces;        ///< overrides by name
  std::vector<MemoryMapping> independent_mappings;  ///< overrides by name
  std::vector<StatementMacro> statements;
  std::string clause;
  std::vector<std::pair<std::string, std::string>> params;
  Measure measure;
  std::map<Role, Schedule> schedules;

  const DataSpace *find_space(std::string_view n) const {
    for (const auto &s : spaces)
      if (s.name == n)
        return &s;
    return nullptr;
  }
  const MemoryMapping *find_mapping(std::string_view n) const {
    for (const auto &m : mappings)
      if (m.name == n)
        return &m;
    return nullptr;
  }
  const StatementMacro *find_statement(std::string_view n) const {
    for (const auto &s : statements)
      if (s.name == n)
        return &s;
    return nullptr;
  }
  const StatementMacro *statement_for(Role r) const {
    for (const auto &s : statements)
      if (s.role() == r)
        return &s;
    return nullptr;
  }
};

// Equality ignores source lines.
inline bool operator==(const DataSpace &a, const DataSpace &b) {
  return a.name == b.name && a.element_type == b.element_type && a.extents == b.extents &&
         a.padding == b.padding && a.layout == b.layout;
}
inline bool operator==(const MemoryMapping &a, const MemoryMapping &b) {
  return a.name == b.name && a.params == b.params && a.address == b.address;
}
inline bool operator==(const StatementMacro &a, const StatementMacro &b) {
  return a.name == b.name && a.params == b.params && a.body == b.body;
}
inline bool operator==(const Measure &a, const Measure &b) {
  return a.bytes_per_instance == b.bytes_per_instance &&
         a.default_template == b.default_template && a.min_n == b.min_n &&
         a.transforms == b.transforms;
}
inline bool operator==(const PatternSpec &a, const PatternSpec &b) {
  return a.name == b.name && a.spaces == b.spaces && a.mappings == b.mappings &&
         a.independent_spaces == b.independent_spaces &&
         a.independent_mappings == b.independent_mappings && a.statements == b.statements &&
         a.clause == b.clause && a.params == b.params && a.measure == b.measure &&
         a.schedules == b.schedules;
}

inline std::optional<Int> element_size(std::string_view type) {
  static const std::map<std::string, Int, std::less<>> sizes = {
      {"double", 8}, {"float", 4},   {"int", 4},     {"long", 8},    {"char", 1},
      {"int8_t", 1}, {"int16_t", 2}, {"int32_t", 4}, {"int64_t", 8}, {"uint8_t", 1},
      {"uint16_t", 2}, {"uint32_t", 4}, {"uint64_t", 8}};
  auto it = sizes.find(type);
  if (it == sizes.end())
    return std::nullopt;
  return it->second;
}

/// The spec as seen by one template: independent overrides applied.
inline PatternSpec resolve_for_template(PatternSpec p, TemplateBase t) {
  if (t == TemplateBase::Independent) {
    for (const auto &o : p.independent_spaces)
      for (auto &s : p.spaces)
        if (s.name == o.name)
          s = o;
    for (const auto &o : p.independent_mappings)
      for (auto &m : p.mappings)
        if (m.name == o.name)
          m = o;
  }
  p.independent_spaces.clear();
  p.independent_mappings.clear();
  return p;
}

/// Templates the pattern can be instantiated with: unified needs no
/// per-thread space, independent needs every space per-thread.
inline bool supports_template(const PatternSpec &p, TemplateBase t) {
  PatternSpec r = resolve_for_template(p, t);
  for (const auto &s : r.spaces)
    if ((s.layout == Layout::PerThread) != (t == TemplateBase::Independent))
      return false;
  return !r.spaces.empty();
}

// ---------------------------------------------------------------------------
// kernel.spec parsing

namespace pattern_detail {

struct Line {
  std::string text;
  int number;
};

inline std::vector<Line> logical_lines(std::string_view text) {
  std::vector<Line> out;
  std::string cur;
  int start = 0, number = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r')
      raw.pop_back();
    // Comments run to end of line; '#' inside statement bodies is not
    // meaningful C in this position.
    if (auto h = raw.find('#'); h != std::string::npos)
      raw.erase(h);
    if (cur.empty())
      start = number;
    std::string t = trim(raw);
    bool cont = !t.empty() && t.back() == '\\';
    if (cont)
      t.pop_back();
    if (!cur.empty() && !t.empty())
      cur += ' ';
    cur += trim(t);
    if (!cont) {
      if (!cur.empty())
        out.push_back({cur, start});
      cur.clear();
    }
  }
  if (!cur.empty())
    out.push_back({cur, start});
  return out;
}

[[noreturn]] inline void parse_fail(const std::string &msg, int line, int col = 1) {
  throw Error(Errc::PatternParseError, msg, SourceLoc{line, col});
}

inline std::pair<std::string, std::string> split_key(const Line &l) {
  auto eq = l.text.find('=');
  if (eq == std::string::npos)
    parse_fail("expected 'key = value'", l.number);
  return {trim(std::string_view(l.text).substr(0, eq)),
          trim(std::string_view(l.text).substr(eq + 1))};
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !detail::ident_start(s[0]))
    return false;
  for (char c : s)
    if (!detail::ident_char(c))
      return false;
  return true;
}

/// `Name(a, b)` heads of mappings and statements.
inline std::pair<std::string, std::vector<std::string>> parse_head(const std::string &head,
                                                                   int line) {
  auto open = head.find('(');
  if (open == std::string::npos || head.back() != ')')
    parse_fail("expected 'Name(i, ...)' before '='", line);
  std::string name = trim(std::string_view(head).substr(0, open));
  if (!is_identifier(name))
    parse_fail("'" + name + "' is not an identifier", line);
  std::vector<std::string> params;
  std::string inner = head.substr(open + 1, head.size() - open - 2);
  if (!trim(inner).empty()) {
    std::stringstream ss(inner);
    std::string p;
    while (std::getline(ss, p, ',')) {
      p = trim(p);
      if (!is_identifier(p))
        parse_fail("bad parameter '" + p + "' in " + name, line);
      params.push_back(p);
    }
  }
  return {name, params};
}

inline DataSpace parse_space(const Line &l) {
  auto [name, rhs] = split_key(l);
  if (!is_identifier(name))
    parse_fail("'" + name + "' is not a data-space name", l.number);
  DataSpace s;
  s.name = name;
  s.line = l.number;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < rhs.size() && std::isspace(static_cast<unsigned char>(rhs[i])))
      ++i;
  };
  skip();
  if (i < rhs.size() && detail::ident_start(rhs[i])) {
    std::size_t b = i;
    while (i < rhs.size() && detail::ident_char(rhs[i]))
      ++i;
    s.element_type = rhs.substr(b, i - b);
  }
  if (!element_size(s.element_type))
    parse_fail("unknown element type '" + s.element_type + "'", l.number);
  skip();
  while (i < rhs.size() && rhs[i] == '[') {
    auto close = rhs.find(']', i);
    if (close == std::string::npos)
      parse_fail("unterminated extent", l.number, static_cast<int>(i) + 1);
    s.extents.push_back(trim(std::string_view(rhs).substr(i + 1, close - i - 1)));
    i = close + 1;
    skip();
  }
  if (s.extents.empty())
    parse_fail("data space " + name + " needs at least one [extent]", l.number);
  std::stringstream attrs(rhs.substr(i));
  std::string kv;
  while (attrs >> kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      parse_fail("expected key=value attribute, got '" + kv + "'", l.number);
    std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
    if (k == "layout") {
      if (v == "unified")
        s.layout = Layout::Unified;
      else if (v == "per_thread")
        s.layout = Layout::PerThread;
      else
        parse_fail("layout must be unified or per_thread", l.number);
    } else if (k == "padding") {
      try {
        s.padding = std::stoll(v);
      } catch (const std::exception &) {
        parse_fail("padding must be an integer", l.number);
      }
    } else {
      parse_fail("unknown attribute '" + k + "'", l.number);
    }
  }
  return s;
}

inline MemoryMapping parse_mapping(const Line &l) {
  auto [head, rhs] = split_key(l);
  auto [name, params] = parse_head(head, l.number);
  if (rhs.empty())
    parse_fail("mapping " + name + " has an empty address", l.number);
  return {name, params, rhs, l.number};
}

inline StatementMacro parse_statement(const Line &l) {
  auto [head, rhs] = split_key(l);
  auto [name, params] = parse_head(head, l.number);
  StatementMacro s{name, params, rhs, l.number};
  if (!s.role())
    parse_fail("statement " + name + " needs an _init, _run, or _val suffix", l.number);
  return s;
}

inline void parse_measure(Measure &m, const Line &l) {
  auto [k, v] = split_key(l);
  auto as_int = [&](const std::string &s) {
    try {
      std::size_t pos = 0;
      Int x = std::stoll(s, &pos);
      if (pos == s.size())
        return x;
    } catch (const std::exception &) {
    }
    parse_fail(k + " must be an integer", l.number);
  };
  if (k == "bytes_per_instance") {
    m.bytes_per_instance = as_int(v);
  } else if (k == "min_n") {
    m.min_n = as_int(v);
  } else if (k == "template") {
    auto t = parse_template_base(v);
    if (!t)
      parse_fail("template must be unified or independent", l.number);
    m.default_template = *t;
  } else if (k == "transforms") {
    std::stringstream ss(v);
    std::string t;
    while (std::getline(ss, t, ';'))
      if (!trim(t).empty())
        m.transforms.push_back(trim(t));
  } else {
    parse_fail("unknown measure key '" + k + "'", l.number);
  }
}

} // namespace pattern_detail

/// Parse kernel.spec text. Schedules are attached separately.
inline PatternSpec parse_kernel_spec(std::string_view text, std::string name) {
  using namespace pattern_detail;
  PatternSpec p;
  p.name = std::move(name);
  std::string section;
  bool clause_seen = false;
  for (const auto &l : logical_lines(text)) {
    if (l.text.front() == '[' && l.text.back() == ']' &&
        l.text.find('=') == std::string::npos) {
      section = trim(std::string_view(l.text).substr(1, l.text.size() - 2));
      static const std::set<std::string> known = {
          "spaces", "spaces.independent", "mappings", "mappings.independent",
          "statements", "clause", "params", "measure"};
      if (!known.count(section))
        parse_fail("unknown section [" + section + "]", l.number);
      continue;
    }
    if (section.empty())
      parse_fail("entry outside of any section", l.number);
    if (section == "spaces") {
      p.spaces.push_back(parse_space(l));
    } else if (section == "spaces.independent") {
      p.independent_spaces.push_back(parse_space(l));
    } else if (section == "mappings") {
      p.mappings.push_back(parse_mapping(l));
    } else if (section == "mappings.independent") {
      p.independent_mappings.push_back(parse_mapping(l));
    } else if (section == "statements") {
      p.statements.push_back(parse_statement(l));
    } else if (section == "clause") {
      if (clause_seen)
        parse_fail("[clause] holds a single line", l.number);
      p.clause = l.text;
      clause_seen = true;
    } else if (section == "params") {
      auto [k, v] = split_key(l);
      if (!is_identifier(k))
        parse_fail("'" + k + "' is not a parameter name", l.number);
      p.params.emplace_back(k, v);
    } else if (section == "measure") {
      parse_measure(p.measure, l);
    }
  }
  bool has_scalar = false;
  for (const auto &kv : p.params)
    has_scalar = has_scalar || kv.first == "scalar";
  if (!has_scalar)
    p.params.emplace_back("scalar", "3.0");

  // Cross references that make the spec meaningless when broken.
  auto check_mapping = [&](const MemoryMapping &m) {
    bool any = false;
    for (const auto &u : identifier_uses(m.address)) {
      if (u.next != '[')
        continue;
      if (!p.find_space(u.name))
        throw Error(Errc::DanglingReference,
                    "mapping " + m.name + " indexes undeclared data space " + u.name,
                    SourceLoc{m.line, 1});
      any = true;
    }
    if (!any)
      throw Error(Errc::DanglingReference,
                  "mapping " + m.name + " does not index any data space", SourceLoc{m.line, 1});
  };
  for (const auto &m : p.mappings)
    check_mapping(m);
  for (const auto &m : p.independent_mappings) {
    if (!p.find_mapping(m.name))
      throw Error(Errc::DanglingReference, "independent override of undeclared mapping " + m.name,
                  SourceLoc{m.line, 1});
    check_mapping(m);
  }
  for (const auto &s : p.independent_spaces)
    if (!p.find_space(s.name))
      throw Error(Errc::DanglingReference,
                  "independent override of undeclared data space " + s.name,
                  SourceLoc{s.line, 1});
  return p;
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string serialize_kernel_spec(const PatternSpec &p) {
  std::ostringstream out;
  auto spaces = [&](const std::vector<DataSpace> &v) {
    for (const auto &s : v) {
      out << s.name << " = " << s.element_type;
      for (const auto &e : s.extents)
        out << "[" << e << "]";
      if (s.layout != Layout::Unified)
        out << " layout=" << to_string(s.layout);
      if (s.padding != 1)
        out << " padding=" << s.padding;
      out << "\n";
    }
  };
  auto heads = [&](const std::string &name, const std::vector<std::string> &params) {
    out << name << "(";
    for (std::size_t i = 0; i < params.size(); ++i)
      out << (i ? ", " : "") << params[i];
    out << ")";
  };
  auto mappings = [&](const std::vector<MemoryMapping> &v) {
    for (const auto &m : v) {
      heads(m.name, m.params);
      out << " = " << m.address << "\n";
    }
  };
  out << "[spaces]\n";
  spaces(p.spaces);
  if (!p.independent_spaces.empty()) {
    out << "\n[spaces.independent]\n";
    spaces(p.independent_spaces);
  }
  out << "\n[mappings]\n";
  mappings(p.mappings);
  if (!p.independent_mappings.empty()) {
    out << "\n[mappings.independent]\n";
    mappings(p.independent_mappings);
  }
  out << "\n[statements]\n";
  for (const auto &s : p.statements) {
    heads(s.name, s.params);
    out << " = " << s.body << "\n";
  }
  if (!p.clause.empty())
    out << "\n[clause]\n" << p.clause << "\n";
  out << "\n[params]\n";
  for (const auto &[k, v] : p.params)
    out << k << " = " << v << "\n";
  out << "\n[measure]\n";
  out << "template = " << to_string(p.measure.default_template) << "\n";
  out << "min_n = " << p.measure.min_n << "\n";
  if (p.measure.bytes_per_instance)
    out << "bytes_per_instance = " << *p.measure.bytes_per_instance << "\n";
  if (!p.measure.transforms.empty()) {
    out << "transforms = ";
    for (std::size_t i = 0; i < p.measure.transforms.size(); ++i)
      out << (i ? "; " : "") << p.measure.transforms[i];
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Directories

inline std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(Errc::MissingFile, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path &path, std::string_view text) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(Errc::IoError, "cannot write " + path.string());
  out << text;
  if (!out)
    throw Error(Errc::IoError, "write failed for " + path.string());
}

/// Locate `<role>.pset` or `<role>.c`; both present is ambiguous.
inline std::optional<Schedule> load_schedule(const std::filesystem::path &dir, Role r) {
  auto pset = dir / (std::string(to_string(r)) + ".pset");
  auto raw = dir / (std::string(to_string(r)) + ".c");
  bool has_pset = std::filesystem::exists(pset), has_raw = std::filesystem::exists(raw);
  if (has_pset && has_raw)
    throw Error(Errc::PatternParseError, "both " + pset.filename().string() + " and " +
                                             raw.filename().string() + " exist in " +
                                             dir.string());
  if (has_pset)
    return Schedule{ScheduleKind::Script, read_text_file(pset)};
  if (has_raw)
    return Schedule{ScheduleKind::RawC, read_text_file(raw)};
  return std::nullopt;
}

/// Schedule files name the statements they invoke; every name must be a
/// declared statement of the schedule's role.
inline void check_schedule_refs(const PatternSpec &p, Role r, const Schedule &s) {
  if (s.kind == ScheduleKind::Script) {
    Script script;
    try {
      script = parse_script(s.text);
    } catch (const Error &e) {
      throw Error(Errc::PatternParseError,
                  std::string(to_string(r)) + ".pset: " + e.what(), e.location());
    }
    // Statement names appear as set tuples or map domain tuples.
    Value v = evaluate(script);
    std::set<std::string> names;
    if (is_map(v)) {
      for (const auto &piece : std::get<UMap>(v).pieces)
        names.insert(piece.in_tuple().name);
    } else {
      for (const auto &piece : std::get<USet>(v).pieces)
        names.insert(piece.tuple().name);
    }
    for (const auto &n : names) {
      const auto *st = p.find_statement(n);
      if (!st || st->role() != r)
        throw Error(Errc::DanglingReference,
                    std::string(to_string(r)) + ".pset schedules undeclared " +
                        std::string(to_string(r)) + " statement " + n);
    }
    return;
  }
  for (const auto &u : identifier_uses(s.text)) {
    if (u.next != '(')
      continue;
    const auto *st = p.find_statement(u.name);
    bool looks_like_stmt = StatementMacro{u.name, {}, {}, 0}.role().has_value();
    if (looks_like_stmt && (!st || st->role() != r))
      throw Error(Errc::DanglingReference, std::string(to_string(r)) +
                                               ".c invokes undeclared statement " + u.name);
  }
}

inline PatternSpec load_pattern(const std::filesystem::path &dir) {
  auto spec_path = dir / "kernel.spec";
  if (!std::filesystem::exists(spec_path))
    throw Error(Errc::MissingFile, "no kernel.spec in " + dir.string());
  std::string name = std::filesystem::weakly_canonical(dir).filename().string();
  PatternSpec p;
  try {
    p = parse_kernel_spec(read_text_file(spec_path), name);
  } catch (const Error &e) {
    if (e.code() != Errc::PatternParseError && e.code() != Errc::DanglingReference)
      throw;
    throw Error(e.code(), "kernel.spec: " + std::string(e.what()), e.location());
  }
  for (Role r : {Role::Init, Role::Run, Role::Val})
    if (auto s = load_schedule(dir, r))
      p.schedules[r] = std::move(*s);
  if (!p.schedules.count(Role::Val) || !p.statement_for(Role::Val))
    throw Error(Errc::MissingValidation, "pattern " + name + " has no val schedule or _val "
                                         "statement; validation is mandatory");
  if (!p.schedules.count(Role::Run))
    throw Error(Errc::MissingFile, "pattern " + name + " has no run.pset or run.c");
  if (!p.schedules.count(Role::Init))
    throw Error(Errc::MissingFile, "pattern " + name + " has no init.pset or init.c");
  for (const auto &[r, s] : p.schedules)
    check_schedule_refs(p, r, s);
  return p;
}

inline void write_pattern(const PatternSpec &p, const std::filesystem::path &dir) {
  write_text_file(dir / "kernel.spec", serialize_kernel_spec(p));
  for (const auto &[r, s] : p.schedules)
    write_text_file(dir / s.file_name(r), s.text);
}

} // namespace pbench
