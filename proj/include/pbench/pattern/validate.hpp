#pragma once

#include "pbench/pattern/spec.hpp"

#include <functional>
#include <set>

namespace pbench {

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code; ///< e.g. DirectArrayAccess
  std::string message;
  std::string file = "kernel.spec";
  SourceLoc loc;
};

inline std::string to_string(const Diagnostic &d) {
  return d.file + ":" + std::to_string(d.loc.line) + ": " +
         (d.severity == Severity::Error ? "error" : "warning") + ": " + d.code + ": " +
         d.message;
}

inline bool has_errors(const std::vector<Diagnostic> &ds) {
  for (const auto &d : ds)
    if (d.severity == Severity::Error)
      return true;
  return false;
}

namespace detail {

inline void lint_body(const PatternSpec &p, const StatementMacro &s,
                      std::vector<Diagnostic> &out) {
  for (const auto &u : identifier_uses(s.body)) {
    if (p.find_space(u.name))
      out.push_back({Severity::Warning, "DirectArrayAccess",
                     "statement " + s.name + " names data space " + u.name +
                         " directly; go through a mapping",
                     "kernel.spec", {s.line, 1}});
    if (const auto *m = p.find_mapping(u.name); m && u.next == '(' && u.n_args != m->arity())
      out.push_back({Severity::Error, "ArityMismatch",
                     "statement " + s.name + " calls " + m->name + " with " +
                         std::to_string(u.n_args) + " arguments, expected " +
                         std::to_string(m->arity()),
                     "kernel.spec", {s.line, 1}});
  }
}

inline std::vector<std::pair<std::string, std::size_t>> scheduled_tuples(const Value &v) {
  std::vector<std::pair<std::string, std::size_t>> out;
  if (is_map(v)) {
    for (const auto &piece : std::get<UMap>(v).pieces)
      out.emplace_back(piece.in_tuple().name, piece.in_tuple().arity());
  } else {
    for (const auto &piece : std::get<USet>(v).pieces)
      out.emplace_back(piece.tuple().name, piece.tuple().arity());
  }
  return out;
}

} // namespace detail

/// Check every invariant of a loaded pattern. Empty iff clean.
inline std::vector<Diagnostic> validate_pattern(const PatternSpec &p) {
  std::vector<Diagnostic> out;
  auto err = [&](std::string code, std::string msg, int line = 0,
                 std::string file = "kernel.spec") {
    out.push_back({Severity::Error, std::move(code), std::move(msg), std::move(file), {line, 1}});
  };

  std::set<std::string> names;
  auto unique = [&](const std::string &n, int line) {
    if (!names.insert(n).second)
      err("DuplicateName", "'" + n + "' is declared more than once", line);
  };
  for (const auto &s : p.spaces)
    unique(s.name, s.line);
  for (const auto &m : p.mappings)
    unique(m.name, m.line);
  for (const auto &s : p.statements)
    unique(s.name, s.line);

  auto check_space = [&](const DataSpace &s) {
    if (s.rank() < 1)
      err("BadDataSpace", "data space " + s.name + " has rank 0", s.line);
    if (s.padding < 1)
      err("BadDataSpace", "data space " + s.name + " has padding " +
                              std::to_string(s.padding) + " (must be >= 1)", s.line);
    for (const auto &e : s.extents) {
      try {
        (void)ExtentExpr::eval(e, 1, 1);
      } catch (const Error &ex) {
        err("BadExtent", ex.what(), s.line);
      }
    }
  };
  for (const auto &s : p.spaces)
    check_space(s);
  for (const auto &s : p.independent_spaces)
    check_space(s);

  std::map<Role, int> per_role;
  std::set<std::string> run_families;
  for (const auto &s : p.statements) {
    auto r = s.role();
    ++per_role[*r];
    if (r == Role::Run)
      run_families.insert(s.family());
    detail::lint_body(p, s, out);
  }
  if (run_families.size() != 1)
    err("RunStatement", "expected exactly one _run statement family, found " +
                            std::to_string(run_families.size()));
  if (!per_role[Role::Val])
    err("MissingValidation", "no _val statement");

  // Layout and template agreement for the default template.
  auto tmpl = p.measure.default_template;
  PatternSpec resolved = resolve_for_template(p, tmpl);
  for (const auto &s : resolved.spaces) {
    if (s.layout == Layout::PerThread && tmpl == TemplateBase::Unified)
      err("TemplateLayoutMismatch",
          "per_thread data space " + s.name + " cannot be used with the unified template",
          s.line);
    if (s.layout == Layout::Unified && tmpl == TemplateBase::Independent)
      err("TemplateLayoutMismatch",
          "data space " + s.name + " must be per_thread for the independent template", s.line);
  }
  if (!p.independent_spaces.empty() &&
      !supports_template(p, TemplateBase::Independent))
    err("TemplateLayoutMismatch",
        "[spaces.independent] leaves some data spaces without per_thread layout");

  if (p.measure.min_n < 1)
    err("BadMeasure", "min_n must be at least 1");
  if (p.measure.bytes_per_instance && *p.measure.bytes_per_instance <= 0)
    err("BadMeasure", "bytes_per_instance must be positive");

  for (const auto &[role, sched] : p.schedules) {
    std::string file = sched.file_name(role);
    if (sched.kind != ScheduleKind::Script)
      continue;
    try {
      Value v = evaluate(parse_script(sched.text));
      for (const auto &[name, arity] : detail::scheduled_tuples(v)) {
        const auto *st = p.find_statement(name);
        if (!st)
          err("DanglingReference", "schedule names undeclared statement " + name, 0, file);
        else if (st->arity() != arity)
          err("ArityMismatch", "schedule calls " + name + " with " + std::to_string(arity) +
                                   " iterators, statement takes " +
                                   std::to_string(st->arity()), 0, file);
      }
    } catch (const Error &e) {
      out.push_back({Severity::Error, std::string(errc_name(e.code())), e.what(), file,
                     e.location().value_or(SourceLoc{})});
    }
  }
  return out;
}

/// Bytes moved per executed instance of `stmt`: the override from
/// `[measure] bytes_per_instance` if set, else the number of distinct
/// mappings the body references times their element size.
inline Int derive_bytes_per_instance(const StatementMacro &stmt, const PatternSpec &p) {
  if (p.measure.bytes_per_instance)
    return *p.measure.bytes_per_instance;
  std::set<std::string> seen;
  Int bytes = 0;
  for (const auto &u : identifier_uses(stmt.body)) {
    const auto *m = p.find_mapping(u.name);
    if (!m || !seen.insert(u.name).second)
      continue;
    Int size = 8;
    for (const auto &a : identifier_uses(m->address))
      if (a.next == '[')
        if (const auto *s = p.find_space(a.name)) {
          size = *element_size(s->element_type);
          break;
        }
    bytes += size;
  }
  return bytes;
}

inline Int bytes_per_run_instance(const PatternSpec &p) {
  const auto *run = p.statement_for(Role::Run);
  if (!run)
    throw Error(Errc::DanglingReference, "pattern " + p.name + " has no _run statement");
  return derive_bytes_per_instance(*run, p);
}

/// Total bytes allocated for problem size n on t threads: per space,
/// product of extents times element size times padding, times t for
/// per-thread spaces.
using FootprintModel = std::function<Int(Int n, Int t)>;

inline FootprintModel footprint_model(const PatternSpec &p0, TemplateBase tmpl) {
  PatternSpec p = resolve_for_template(p0, tmpl);
  return [spaces = p.spaces](Int n, Int t) {
    Int total = 0;
    for (const auto &s : spaces) {
      Int b = *element_size(s.element_type);
      for (const auto &e : s.extents)
        b = checked_mul(b, ExtentExpr::eval(e, n, t));
      b = checked_mul(b, s.padding);
      if (s.layout == Layout::PerThread)
        b = checked_mul(b, t);
      total = checked_add(total, b);
    }
    return total;
  };
}

/// FNV-1a, 64 bit, printed as 16 hex digits.
inline std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string pattern_hash(const PatternSpec &p) {
  std::string all = serialize_kernel_spec(p);
  for (const auto &[r, s] : p.schedules)
    all += "\n--" + s.file_name(r) + "--\n" + s.text;
  return fnv1a_hex(all);
}

} // namespace pbench
