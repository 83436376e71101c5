#pragma once

// Library form of the subcommands that produce text, shared by the pbench
// tool and its tests.

#include "pbench/harness/pipeline.hpp"

#include <iomanip>

namespace pbench {

struct CodegenResult {
  LoopAst ast;
  std::string c_text;
};

/// Script text to kernel C: parse, evaluate, optionally transform,
/// generate, emit. `context_text` is a parameter set such as
/// `[n, h] -> { : n = 2h }`.
inline CodegenResult cmd_codegen(std::string_view script_text,
                                 std::string_view context_text = {},
                                 const std::vector<std::string> &transforms = {}) {
  Value v = evaluate(parse_script(script_text));
  std::optional<BasicSet> context;
  if (!context_text.empty()) {
    USet c = parse_set(context_text);
    if (c.pieces.size() != 1)
      throw Error(Errc::InvalidConfig, "the context must be a single piece");
    context = c.pieces.front();
  }
  if (!transforms.empty()) {
    std::vector<TransformSpec> ts;
    for (const auto &t : transforms)
      ts.push_back(parse_transform(t));
    auto r = apply_transforms(v, ts);
    v = r.schedule;
    if (r.context)
      context = context ? intersect(*context, *r.context) : *r.context;
  }
  CodegenResult out;
  out.ast = codegen(v, context ? &*context : nullptr);
  out.c_text = emit_kernel_c(out.ast, statements_of(out.ast));
  return out;
}

struct InspectResult {
  std::string text;
  std::vector<Diagnostic> diagnostics;
};

inline InspectResult cmd_inspect(const std::filesystem::path &dir) {
  PatternSpec p = load_pattern(dir);
  InspectResult r;
  r.diagnostics = validate_pattern(p);
  std::ostringstream out;
  auto row = [&](const std::string &k) -> std::ostream & {
    return out << "  " << std::left << std::setw(12) << k;
  };
  out << "pattern " << p.name << "\n";
  row("template") << to_string(p.measure.default_template);
  std::vector<std::string> supported;
  for (auto t : {TemplateBase::Unified, TemplateBase::Independent})
    if (supports_template(p, t))
      supported.emplace_back(to_string(t));
  out << " (supports";
  for (const auto &s : supported)
    out << " " << s;
  out << ")\n";
  row("spaces");
  for (const auto &s : p.spaces)
    out << s.name << " ";
  out << "\n";
  row("mappings");
  for (const auto &m : p.mappings)
    out << m.name << " ";
  out << "\n";
  row("statements");
  for (const auto &s : p.statements)
    out << s.name << " ";
  out << "\n";
  row("clause") << p.clause << "\n";
  for (const auto &[role, s] : p.schedules)
    row(std::string(to_string(role))) << s.file_name(role) << "\n";
  row("bytes/inst") << bytes_per_run_instance(p) << "\n";
  for (const auto &t : p.measure.transforms)
    row("transform") << t << "\n";
  row("diagnostics") << r.diagnostics.size() << "\n";
  for (const auto &d : r.diagnostics)
    out << "    " << to_string(d) << "\n";
  r.text = out.str();
  return r;
}

} // namespace pbench
