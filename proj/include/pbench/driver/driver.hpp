#pragma once

// Driver instantiation: splice generated kernels and pattern declarations
// into a C template, then compile it.
//
// Run protocol of every driver:
//   argv:   <n> <threads> <ntimes> [--counters E1,E2,...] [--warmup R]
//   stdout: elapsed_seconds=, instances_executed=, validation=pass|fail,
//           threads=, counter.<NAME>=<u64>|unsupported
//   exit 0 iff validation passed

#include "pbench/codegen/codegen.hpp"
#include "pbench/harness/process.hpp"
#include "pbench/pattern/validate.hpp"
#include "pbench/transforms/transforms.hpp"

#include <cstdlib>

namespace pbench {

struct TemplateKind {
  TemplateBase base = TemplateBase::Unified;
  bool counters = false;

  friend bool operator==(const TemplateKind &, const TemplateKind &) = default;
};

inline std::string to_string(const TemplateKind &k) {
  std::string b(to_string(k.base));
  return k.counters ? "counters:" + b : b;
}

/// `unified`, `independent`, `counters:unified`, `counters:independent`.
inline TemplateKind parse_template_kind(std::string_view s) {
  TemplateKind k;
  if (s.starts_with("counters:")) {
    k.counters = true;
    s.remove_prefix(9);
  }
  auto b = parse_template_base(s);
  if (!b)
    throw Error(Errc::InvalidConfig, "unknown template '" + std::string(s) + "'");
  k.base = *b;
  return k;
}

struct Toolchain {
  std::string compiler = "cc";
  std::vector<std::string> flags = {"-O3", "-fopenmp"};

  /// Whitespace separated: compiler first, then flags.
  static Toolchain parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    Toolchain t;
    std::string w;
    if (!(in >> t.compiler))
      throw Error(Errc::InvalidConfig, "empty toolchain command");
    t.flags.clear();
    while (in >> w)
      t.flags.push_back(w);
    return t;
  }
  std::string command_line() const {
    std::string s = compiler;
    for (const auto &f : flags)
      s += " " + f;
    return s;
  }
};

struct KernelSet {
  std::string init;
  std::string run;
  std::string val;
  std::vector<DerivedParam> derived;
};

struct BuildRecipe {
  std::vector<std::string> argv;

  std::string command() const {
    std::string s;
    for (const auto &a : argv)
      s += (s.empty() ? "" : " ") + a;
    return s;
  }
};

struct DriverBundle {
  std::string pattern;
  TemplateKind kind;
  std::map<std::string, std::string> files; ///< file name to content
  BuildRecipe recipe;
  std::string template_hash;
  std::vector<DerivedParam> derived;
  std::string protocol = "argv: <n> <threads> <ntimes> [--counters E1,...] [--warmup R]; "
                         "stdout: key=value lines";
};

inline std::filesystem::path default_template_dir() {
  if (const char *env = std::getenv("PBENCH_TEMPLATES"))
    return env;
#ifdef PBENCH_SOURCE_DIR
  return std::filesystem::path(PBENCH_SOURCE_DIR) / "templates";
#else
  return "templates";
#endif
}

namespace driver_detail {

inline StmtTable statement_table(const PatternSpec &p) {
  StmtTable t;
  for (const auto &s : p.statements)
    t[s.name] = s.arity();
  return t;
}

/// Preprocessor lines (helper macros) and loop code, separated so a
/// work-sharing pragma can directly precede the loop.
inline std::pair<std::string, std::string> split_helpers(const std::string &text) {
  std::istringstream in(text);
  std::string line, helpers, code;
  while (std::getline(in, line)) {
    (trim(line).starts_with("#") ? helpers : code) += line + "\n";
  }
  return {helpers, code};
}

inline std::string c_extent(const std::string &e) { return "(" + e + ")"; }

inline std::string alloc_decl(const DataSpace &s) {
  std::vector<std::string> ext;
  if (s.layout == Layout::PerThread)
    ext.push_back("t * " + std::to_string(s.padding));
  for (const auto &e : s.extents)
    ext.push_back(e);
  std::string decl;
  if (ext.size() == 1) {
    decl = s.element_type + " *" + s.name;
  } else {
    decl = s.element_type + " (*" + s.name + ")";
    for (std::size_t i = 1; i < ext.size(); ++i)
      decl += "[" + c_extent(ext[i]) + "]";
  }
  std::string bytes = "sizeof(" + s.element_type + ")";
  for (const auto &e : ext)
    bytes += " * (size_t)" + c_extent(e);
  return decl + " = pb_alloc(" + bytes + ");";
}

inline std::string macro(const std::string &name, const std::vector<std::string> &lines) {
  std::string out = "#define " + name;
  for (const auto &l : lines)
    out += " \\\n  " + l;
  return out + "\n";
}

inline std::string read_template(const std::filesystem::path &dir, const std::string &name) {
  auto path = dir / name;
  if (!std::filesystem::exists(path))
    throw Error(Errc::MissingFile, "template " + path.string() + " not found");
  return read_text_file(path);
}

inline void replace_all(std::string &s, const std::string &from, const std::string &to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
    s.replace(pos, from.size(), to);
}

} // namespace driver_detail

/// Turn a pattern's schedules into kernel C. Transforms rewrite the run
/// schedule only, and need it to be a script.
inline KernelSet generate_kernels(const PatternSpec &p, const std::vector<TransformSpec> &transforms) {
  KernelSet k;
  auto stmts = driver_detail::statement_table(p);
  for (const auto &[role, sched] : p.schedules) {
    std::string text;
    if (sched.kind == ScheduleKind::RawC) {
      if (role == Role::Run && !transforms.empty())
        throw Error(Errc::InvalidConfig,
                    "transforms need a script run schedule; " + p.name + " uses run.c");
      text = sched.text;
    } else {
      Value v = evaluate(parse_script(sched.text));
      std::optional<BasicSet> context;
      if (role == Role::Run && !transforms.empty()) {
        auto t = apply_transforms(v, transforms);
        v = std::move(t.schedule);
        context = std::move(t.context);
        k.derived = std::move(t.derived);
      }
      LoopAst ast = codegen(v, context ? &*context : nullptr);
      text = emit_kernel_c(ast, stmts);
    }
    (role == Role::Init ? k.init : role == Role::Run ? k.run : k.val) = std::move(text);
  }
  return k;
}

inline DriverBundle instantiate(const PatternSpec &p0, TemplateKind kind, const KernelSet &kernels,
                                const Toolchain &tc = {},
                                const std::filesystem::path &template_dir = default_template_dir()) {
  using namespace driver_detail;
  if (!supports_template(p0, kind.base))
    throw Error(Errc::TemplateLayoutMismatch,
                "pattern " + p0.name + " has no data-space layout for the " +
                    std::string(to_string(kind.base)) + " template");
  PatternSpec p = resolve_for_template(p0, kind.base);
  const StatementMacro *run = p.statement_for(Role::Run);
  if (!run)
    throw Error(Errc::DanglingReference, "pattern " + p.name + " has no _run statement");

  auto [run_helpers, run_code] = split_helpers(kernels.run);
  auto [init_helpers, init_code] = split_helpers(kernels.init);
  auto [val_helpers, val_code] = split_helpers(kernels.val);
  if (trim(run_code).empty())
    throw Error(Errc::TemplateLayoutMismatch, "run schedule of " + p.name + " is empty");

  // pattern.h
  std::ostringstream h;
  h << "/* Pattern " << p.name << ", " << to_string(kind) << " template. */\n";
  h << "#ifndef PB_PATTERN_H\n#define PB_PATTERN_H\n\n";
  if (kind.counters)
    h << "#define PB_COUNTERS 1\n\n";
  h << "#ifndef floord\n#define floord(n, d) (((n) < 0) ? -((-(n) + (d) - 1) / (d)) : (n) / (d))\n#endif\n";
  h << "#ifndef ceild\n#define ceild(n, d) (((n) < 0) ? -((-(n)) / (d)) : ((n) + (d) - 1) / (d))\n#endif\n";
  h << "#ifndef max\n#define max(x, y) ((x) > (y) ? (x) : (y))\n#endif\n";
  h << "#ifndef min\n#define min(x, y) ((x) < (y) ? (x) : (y))\n#endif\n\n";
  h << "/* Memory mapping */\n";
  for (const auto &m : p.mappings) {
    h << "#define " << m.name << "(";
    for (std::size_t i = 0; i < m.params.size(); ++i)
      h << (i ? ", " : "") << m.params[i];
    h << ") " << m.address << "\n";
  }
  h << "\n/* Statements */\n";
  for (const auto &s : p.statements) {
    h << "#define " << s.name << "(";
    for (std::size_t i = 0; i < s.params.size(); ++i)
      h << (i ? ", " : "") << s.params[i];
    std::string body = trim(s.body);
    while (!body.empty() && body.back() == ';')
      body = trim(body.substr(0, body.size() - 1));
    h << ") do { " << body << "; } while (0)\n";
  }
  h << "\n/* OpenMP clause */\n#define CLAUSE " << p.clause << "\n\n";

  std::vector<std::string> derived;
  for (const auto &d : kernels.derived) {
    auto f = std::to_string(d.divisor);
    derived.push_back("if (" + d.extent_param + " % " + f + " != 0) { fprintf(stderr, \"" +
                      d.extent_param + " must be a multiple of " + f + "\\n\"); return 2; }");
    derived.push_back("const int " + d.name + " = " + d.extent_param + " / " + f + ";");
  }
  h << macro("PB_DERIVED", derived);
  std::vector<std::string> params;
  for (const auto &[k, v] : p.params)
    params.push_back("const double " + k + " = " + v + "; (void)" + k + ";");
  h << macro("PB_PARAMS", params);
  std::vector<std::string> alloc, frees, layout;
  for (const auto &s : p.spaces) {
    alloc.push_back(alloc_decl(s));
    frees.push_back("free(" + s.name + ");");
    if (s.layout == Layout::PerThread && s.padding > 1)
      layout.push_back("if (t > 1 && ((char *)(" + s.name + " + " + std::to_string(s.padding) +
                       ") - (char *)" + s.name + ") % 64 != 0) pb_fail++;");
  }
  h << macro("PB_ALLOC", alloc) << macro("PB_FREE", frees) << macro("PB_LAYOUT_CHECK", layout);
  h << "\n" << init_helpers << run_helpers << val_helpers;
  h << "\n#endif\n";

  std::string tmpl_name = kind.base == TemplateBase::Unified ? "unified.c.in" : "independent.c.in";
  std::string main = read_template(template_dir, tmpl_name);
  std::string runtime = read_template(template_dir, "pb_runtime.h");
  std::string counters = kind.counters ? read_template(template_dir, "pb_counters.h") : "";

  if (kind.base == TemplateBase::Unified) {
    auto starts_loop = [](const std::string &code) { return trim(code).starts_with("for"); };
    if (!starts_loop(run_code))
      throw Error(Errc::TemplateLayoutMismatch,
                  "the unified template work-shares the outermost loop, but the run kernel of " +
                      p.name + " does not start with one");
    std::string open, close;
    if (p.clause.find("nowait") != std::string::npos) {
      // The combined construct does not accept nowait.
      open = "#pragma omp parallel\n    {\n#pragma omp for CLAUSE";
      close = "}";
    } else {
      open = "#pragma omp parallel for CLAUSE";
    }
    replace_all(main, "@PB_RUN_OPEN@", open);
    replace_all(main, "@PB_RUN_CLOSE@", close);
    replace_all(main, "@PB_INIT_OPEN@",
                starts_loop(init_code) ? "#pragma omp parallel for schedule(static)" : "");
    replace_all(main, "@PB_INIT_CLOSE@", "");
  }

  DriverBundle b;
  b.pattern = p.name;
  b.kind = kind;
  b.derived = kernels.derived;
  b.files["main.c"] = main;
  b.files["pattern.h"] = h.str();
  b.files["kernel_init.c"] = init_code;
  b.files["kernel_run.c"] = run_code;
  b.files["kernel_val.c"] = val_code;
  b.files["count_run.h"] =
      "#undef " + run->name + "\n#define " + run->name + "(...) (pb_instances++)\n";
  b.files["pb_runtime.h"] = runtime;
  if (kind.counters)
    b.files["pb_counters.h"] = counters;
  b.template_hash = fnv1a_hex(main + runtime + counters);
  b.recipe.argv = {tc.compiler};
  b.recipe.argv.insert(b.recipe.argv.end(), tc.flags.begin(), tc.flags.end());
  b.recipe.argv.insert(b.recipe.argv.end(), {"-o", "driver", "main.c", "-lm"});
  return b;
}

inline void write_bundle(const DriverBundle &b, const std::filesystem::path &dir) {
  for (const auto &[name, text] : b.files)
    write_text_file(dir / name, text);
  write_text_file(dir / "build.sh", "#!/bin/sh\nset -e\ncd \"$(dirname \"$0\")\"\n" +
                                        b.recipe.command() + "\n");
  std::filesystem::permissions(dir / "build.sh", std::filesystem::perms::owner_exec,
                               std::filesystem::perm_options::add);
}

/// Write the sources into `dir` and compile them; returns the executable.
inline std::filesystem::path build(const DriverBundle &b, const std::filesystem::path &dir) {
  write_bundle(b, dir);
  ProcessResult r = run_process(b.recipe.argv, dir);
  if (r.not_found)
    throw Error(Errc::CompilerNotFound, "compiler '" + b.recipe.argv.front() + "' not found");
  if (!r.ok())
    throw Error(Errc::CompileFailed, "`" + b.recipe.command() + "` failed:\n" + r.err);
  return std::filesystem::absolute(dir / "driver");
}

} // namespace pbench
