#pragma once

#include "pbench/codegen/fm_bounds.hpp"
#include "pbench/iset/enumerate.hpp"

#include <functional>

namespace pbench {

/// One executed statement instance.
struct Execution {
  std::string stmt;
  Point args;
  friend bool operator==(const Execution &, const Execution &) = default;
  friend auto operator<=>(const Execution &, const Execution &) = default;
};

/// Walk a LoopAst with concrete parameter values, invoking `visit` for each
/// statement instance in execution order. This is the C-free reference
/// semantics of the generated kernels.
class AstInterpreter {
public:
  using Visitor = std::function<void(const std::string &stmt, std::span<const Int> args)>;

  AstInterpreter(const LoopAst &ast, const Bindings &bindings) : ast_(ast) {
    values_.assign(ast.n_cols(), 0);
    for (std::size_t i = 0; i < ast.params.size(); ++i) {
      auto it = bindings.find(ast.params[i]);
      if (it == bindings.end())
        throw Error(Errc::UnboundParameter, "parameter '" + ast.params[i] + "' is not bound");
      values_[i] = it->second;
    }
  }

  void run(const Visitor &visit) { exec(ast_.root, visit); }

  std::vector<Execution> trace() {
    std::vector<Execution> out;
    run([&](const std::string &s, std::span<const Int> a) {
      out.push_back({s, Point(a.begin(), a.end())});
    });
    return out;
  }

private:
  void exec(const AstNode &n, const Visitor &visit) {
    std::visit([&](const auto &node) { exec_node(node, visit); }, n.node);
  }

  void exec_node(const SeqNode &s, const Visitor &visit) {
    for (const auto &c : s.children)
      exec(c, visit);
  }

  void exec_node(const GuardNode &g, const Visitor &visit) {
    for (const auto &c : g.conds)
      if (!c.holds(values_))
        return;
    for (const auto &c : g.body)
      exec(c, visit);
  }

  void exec_node(const LoopNode &l, const Visitor &visit) {
    Int lo = evaluate(l.lowers.front(), values_);
    for (std::size_t i = 1; i < l.lowers.size(); ++i)
      lo = std::max(lo, evaluate(l.lowers[i], values_));
    Int hi = evaluate(l.uppers.front(), values_);
    for (std::size_t i = 1; i < l.uppers.size(); ++i)
      hi = std::min(hi, evaluate(l.uppers[i], values_));
    std::size_t col = ast_.params.size() + l.iter;
    for (Int v = lo; v <= hi; ++v) {
      values_[col] = v;
      for (const auto &c : l.body)
        exec(c, visit);
    }
  }

  void exec_node(const CallNode &c, const Visitor &visit) {
    args_.resize(c.args.size());
    for (std::size_t i = 0; i < c.args.size(); ++i)
      args_[i] = c.args[i].evaluate(values_);
    visit(c.stmt, args_);
  }

  const LoopAst &ast_;
  std::vector<Int> values_;
  std::vector<Int> args_;
};

inline std::vector<Execution> interpret(const LoopAst &ast, const Bindings &bindings) {
  return AstInterpreter(ast, bindings).trace();
}

/// Number of statement instances executed, without materializing them.
inline std::uint64_t count_instances(const LoopAst &ast, const Bindings &bindings) {
  std::uint64_t n = 0;
  AstInterpreter(ast, bindings).run([&](const std::string &, std::span<const Int>) { ++n; });
  return n;
}

} // namespace pbench
