#pragma once

// Pattern directory to built driver to records, with CLI flags taking
// precedence over the pattern's own defaults.

#include "pbench/harness/execute.hpp"

namespace pbench {

struct BenchRequest {
  std::filesystem::path pattern_dir;
  std::optional<std::string> template_name;            ///< overrides the pattern
  std::optional<std::vector<std::string>> transforms;  ///< overrides the pattern
  std::vector<std::string> counters;                   ///< non-empty selects counters
  Toolchain toolchain;
  std::filesystem::path template_dir = default_template_dir();
};

struct PreparedBench {
  PatternSpec spec;
  TemplateKind kind;
  std::vector<std::string> transforms;
  KernelSet kernels;
  DriverBundle bundle;
};

/// Stage name attached to errors raised while running it.
class StageError : public std::runtime_error {
public:
  StageError(std::string stage, const Error &e)
      : std::runtime_error(e.what()), stage_(std::move(stage)), code_(e.code()) {}
  const std::string &stage() const { return stage_; }
  Errc code() const { return code_; }

private:
  std::string stage_;
  Errc code_;
};

template <class F> auto stage(const std::string &name, F &&f) {
  try {
    return f();
  } catch (const Error &e) {
    throw StageError(name, e);
  }
}

inline PreparedBench prepare_bench(const BenchRequest &req) {
  PreparedBench b;
  b.spec = stage("load", [&] {
    PatternSpec p = load_pattern(req.pattern_dir);
    auto diags = validate_pattern(p);
    for (const auto &d : diags)
      if (d.severity == Severity::Error)
        throw Error(Errc::PatternParseError, to_string(d));
    return p;
  });
  b.kind = stage("gen", [&] {
    TemplateKind k;
    k.base = b.spec.measure.default_template;
    if (req.template_name)
      k = parse_template_kind(*req.template_name);
    k.counters = k.counters || !req.counters.empty();
    return k;
  });
  b.transforms = req.transforms ? *req.transforms : b.spec.measure.transforms;
  b.kernels = stage("codegen", [&] {
    std::vector<TransformSpec> ts;
    for (const auto &t : b.transforms)
      ts.push_back(parse_transform(t));
    return generate_kernels(b.spec, ts);
  });
  b.bundle = stage("gen", [&] {
    return instantiate(b.spec, b.kind, b.kernels, req.toolchain, req.template_dir);
  });
  return b;
}

inline Int n_multiple(const PreparedBench &b) {
  Int m = 1;
  for (const auto &d : b.kernels.derived)
    m = lcm(m, d.divisor);
  return m;
}

inline ExecutionContext execution_context(const PreparedBench &b, const MachineDesc &m) {
  ExecutionContext ctx;
  ctx.bytes_per_instance = bytes_per_run_instance(b.spec);
  ctx.footprint = footprint_model(b.spec, b.kind.base);
  ctx.machine = &m;
  ctx.metadata.toolchain = b.bundle.recipe.command();
  ctx.metadata.template_hash = b.bundle.template_hash;
  ctx.metadata.pattern_hash = pattern_hash(b.spec);
#ifdef PBENCH_VERSION
  ctx.metadata.tool_version = PBENCH_VERSION;
#endif
  ctx.metadata.machine_detected = m.detected;
  ctx.metadata.machine_source = m.source;
  return ctx;
}

inline RunConfig base_config(const PreparedBench &b) {
  RunConfig c;
  c.pattern = b.spec.name;
  c.tmpl = b.kind;
  c.transforms = b.transforms;
  return c;
}

} // namespace pbench
