// pbench: codegen, pattern inspection, driver generation, and benchmark
// orchestration from the command line.

#include "pbench/cli/commands.hpp"
#include "pbench/harness/report.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace fs = std::filesystem;
using namespace pbench;

namespace {

struct GlobalOptions {
  std::string machine;
  std::string toolchain = "cc -O3 -fopenmp";
  std::string out;
  std::string format = "jsonl";
  std::string templates;
};

struct PatternOptions {
  std::string pattern;
  std::string tmpl;
  std::vector<std::string> transforms;
  std::string counters;
  std::string work;
};

struct RunOptions {
  Int n = 0;
  Int threads = 1;
  Int ntimes = 1000;
  Int repeats = 1;
  Int warmup = 1;
};

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty())
      out.push_back(trim(item));
  return out;
}

MachineDesc machine_for(const GlobalOptions &g) {
  return g.machine.empty() ? detect_machine() : load_machine_file(g.machine);
}

BenchRequest request_for(const GlobalOptions &g, const PatternOptions &p) {
  BenchRequest r;
  r.pattern_dir = p.pattern;
  if (!p.tmpl.empty())
    r.template_name = p.tmpl;
  if (!p.transforms.empty())
    r.transforms = p.transforms;
  r.counters = split_list(p.counters);
  r.toolchain = Toolchain::parse(g.toolchain);
  if (!g.templates.empty())
    r.template_dir = g.templates;
  return r;
}

fs::path work_dir(const PatternOptions &p, const PreparedBench &b) {
  if (!p.work.empty())
    return p.work;
  std::string kind = to_string(b.kind);
  std::replace(kind.begin(), kind.end(), ':', '-');
  return fs::path(".pbench") / (b.spec.name + "-" + kind);
}

void emit(const std::string &text, const std::string &out) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text_file(out, text);
}

void add_pattern_options(CLI::App *cmd, PatternOptions &p, bool with_work = true) {
  cmd->add_option("pattern", p.pattern, "Pattern directory")->required();
  cmd->add_option("--template", p.tmpl,
                  "unified, independent, counters:unified, counters:independent");
  cmd->add_option("--transform", p.transforms,
                  "interchange=1,0 | tile=0:32,1:64 | interleave=2 (repeatable)");
  cmd->add_option("--counters", p.counters, "Comma separated counter events");
  if (with_work)
    cmd->add_option("--work", p.work, "Build directory (default .pbench/<pattern>-<template>)");
}

void add_run_options(CLI::App *cmd, RunOptions &r, bool need_n) {
  auto *n = cmd->add_option("--n", r.n, "Problem size");
  if (need_n)
    n->required();
  cmd->add_option("--threads", r.threads, "Thread count")->capture_default_str();
  cmd->add_option("--ntimes", r.ntimes, "Timed repetitions of the kernel")->capture_default_str();
  cmd->add_option("--repeats", r.repeats, "Driver runs per configuration (median reported)")
      ->capture_default_str();
  cmd->add_option("--warmup", r.warmup, "Untimed repetitions before timing")
      ->capture_default_str();
}

std::vector<RunRecord> run_all(const PreparedBench &b, const fs::path &exe,
                               const std::vector<RunConfig> &configs, const MachineDesc &m) {
  auto ctx = execution_context(b, m);
  std::vector<RunRecord> out;
  for (const auto &c : configs) {
    std::cerr << "pbench: running " << b.spec.name << " n=" << c.n << " threads=" << c.threads
              << "\n";
    out.push_back(stage("run", [&] { return execute(exe, c, ctx); }));
  }
  return out;
}

RunConfig config_for(const PreparedBench &b, const RunOptions &r, const PatternOptions &p) {
  RunConfig c = base_config(b);
  c.n = r.n;
  c.threads = r.threads;
  c.ntimes = r.ntimes;
  c.repeats = r.repeats;
  c.warmup = r.warmup;
  c.counters = split_list(p.counters);
  stage("run", [&] {
    c.validate(b.spec.measure.min_n);
    return 0;
  });
  return c;
}

std::vector<RunConfig> sweep_configs(const PreparedBench &b, const RunOptions &r,
                                     const PatternOptions &p, const MachineDesc &m,
                                     const std::string &sizes, Int points) {
  return stage("sweep", [&] {
    SweepOptions o;
    o.points_per_level = points;
    o.threads = r.threads;
    o.ntimes = r.ntimes;
    o.min_n = b.spec.measure.min_n;
    o.n_multiple = n_multiple(b);
    o.base = base_config(b);
    o.base.repeats = r.repeats;
    o.base.warmup = r.warmup;
    o.base.counters = split_list(p.counters);
    if (!sizes.empty() && sizes != "auto")
      for (const auto &s : split_list(sizes))
        o.sizes.push_back(detail::parse_int(s, "--sizes"));
    return plan_sweep(m, footprint_model(b.spec, b.kind.base), o);
  });
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Memory-subsystem benchmark generator and harness"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--machine", g.machine, "Machine description file (overrides detection)");
  app.add_option("--toolchain", g.toolchain, "Compiler command and flags")->capture_default_str();
  app.add_option("--out", g.out, "Output file or directory");
  app.add_option("--format", g.format, "Report format: jsonl, csv, table")->capture_default_str();
  app.add_option("--templates", g.templates, "Driver template directory");
  app.set_version_flag("--version", PBENCH_VERSION);

  // codegen
  auto *codegen_cmd = app.add_subcommand("codegen", "Generate kernel C from a script");
  std::string script_path, context_text;
  std::vector<std::string> cg_transforms;
  codegen_cmd->add_option("script", script_path, "Script file")->required();
  codegen_cmd->add_option("--context", context_text, "Parameter facts, e.g. '[n,h] -> { : n = 2h }'");
  codegen_cmd->add_option("--transform", cg_transforms, "Transform applied to the result");

  // inspect
  auto *inspect_cmd = app.add_subcommand("inspect", "Load, validate, and summarize a pattern");
  std::string inspect_dir;
  inspect_cmd->add_option("pattern", inspect_dir, "Pattern directory")->required();

  // gen / build
  PatternOptions pat;
  auto *gen_cmd = app.add_subcommand("gen", "Write driver sources for a pattern");
  add_pattern_options(gen_cmd, pat, false);
  auto *build_cmd = app.add_subcommand("build", "Generate and compile a driver");
  add_pattern_options(build_cmd, pat);

  // run / sweep / bench
  RunOptions ro;
  auto *run_cmd = app.add_subcommand("run", "Build and run one configuration");
  add_pattern_options(run_cmd, pat);
  add_run_options(run_cmd, ro, true);

  std::string sizes = "auto";
  Int points = 4;
  auto *sweep_cmd = app.add_subcommand("sweep", "Build and run a working-set sweep");
  add_pattern_options(sweep_cmd, pat);
  add_run_options(sweep_cmd, ro, false);
  sweep_cmd->add_option("--sizes", sizes, "auto, or a comma separated list of n")
      ->capture_default_str();
  sweep_cmd->add_option("--points-per-level", points, "Sizes per cache band")
      ->capture_default_str();

  bool dry_run = false;
  auto *bench_cmd = app.add_subcommand("bench", "Generate, build, run, and report");
  add_pattern_options(bench_cmd, pat);
  add_run_options(bench_cmd, ro, false);
  bench_cmd->add_option("--sweep", sizes, "auto, or a comma separated list of n")
      ->expected(0, 1)
      ->default_str("auto");
  bench_cmd->add_option("--points-per-level", points, "Sizes per cache band")
      ->capture_default_str();
  bench_cmd->add_flag("--dry-run", dry_run, "Stop after writing driver sources");

  // report / machine
  std::vector<std::string> report_inputs;
  auto *report_cmd = app.add_subcommand("report", "Reformat jsonl records");
  report_cmd->add_option("inputs", report_inputs, "jsonl files")->required();
  auto *machine_cmd = app.add_subcommand("machine", "Print the machine description in use");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*codegen_cmd) {
      auto r = cmd_codegen(read_text_file(script_path), context_text, cg_transforms);
      emit(r.c_text, g.out);
      return 0;
    }
    if (*inspect_cmd) {
      auto r = cmd_inspect(inspect_dir);
      emit(r.text, g.out);
      return has_errors(r.diagnostics) ? 2 : 0;
    }
    if (*gen_cmd) {
      auto b = prepare_bench(request_for(g, pat));
      fs::path dir = g.out.empty() ? work_dir(pat, b) : fs::path(g.out);
      stage("gen", [&] {
        write_bundle(b.bundle, dir);
        return 0;
      });
      std::cout << dir.string() << "\n";
      return 0;
    }
    if (*build_cmd) {
      auto b = prepare_bench(request_for(g, pat));
      auto exe = stage("build", [&] { return build(b.bundle, work_dir(pat, b)); });
      std::cout << exe.string() << "\n";
      return 0;
    }
    if (*run_cmd || *sweep_cmd || *bench_cmd) {
      auto b = prepare_bench(request_for(g, pat));
      fs::path dir = work_dir(pat, b);
      if (*bench_cmd && dry_run) {
        stage("gen", [&] {
          write_bundle(b.bundle, dir);
          return 0;
        });
        std::cout << dir.string() << "\n";
        return 0;
      }
      MachineDesc m = stage("machine", [&] { return machine_for(g); });
      std::vector<RunConfig> configs =
          *run_cmd ? std::vector<RunConfig>{config_for(b, ro, pat)}
                   : sweep_configs(b, ro, pat, m, sizes, points);
      auto exe = stage("build", [&] { return build(b.bundle, dir); });
      auto records = run_all(b, exe, configs, m);
      stage("report", [&] {
        write_report(records, parse_report_format(g.format), g.out);
        return 0;
      });
      bool all_valid = std::all_of(records.begin(), records.end(),
                                   [](const RunRecord &r) { return r.valid; });
      return all_valid ? 0 : 3;
    }
    if (*report_cmd) {
      std::vector<RunRecord> all;
      for (const auto &f : report_inputs) {
        auto rs = parse_jsonl(read_text_file(f));
        all.insert(all.end(), rs.begin(), rs.end());
      }
      write_report(all, parse_report_format(g.format), g.out);
      return 0;
    }
    if (*machine_cmd) {
      MachineDesc m = machine_for(g);
      emit(serialize_machine(m) + "# source: " + m.source +
               (m.detected ? "" : " (not detected)") + "\n",
           g.out);
      return 0;
    }
  } catch (const StageError &e) {
    std::cerr << "pbench: " << e.stage() << " stage: " << errc_module(e.code()) << ": "
              << e.what() << "\n";
    return 2;
  } catch (const Error &e) {
    std::cerr << "pbench: " << errc_module(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "pbench: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
