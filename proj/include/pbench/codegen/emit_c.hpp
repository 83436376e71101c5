#pragma once

#include "pbench/codegen/loop_ast.hpp"

#include <map>
#include <sstream>

namespace pbench {

/// Statement macro name -> iterator arity.
using StmtTable = std::map<std::string, std::size_t>;

namespace detail {

class CEmitter {
public:
  CEmitter(const LoopAst &ast, const StmtTable &stmts)
      : ast_(ast), stmts_(stmts), names_(ast.column_names()) {}

  std::string run() {
    emit(ast_.root, 0);
    if (body_.str().empty())
      return {};
    std::string out;
    if (use_floord_)
      out += "#ifndef floord\n#define floord(n, d) (((n) < 0) ? -((-(n) + (d) - 1) / (d)) : (n) / (d))\n#endif\n";
    if (use_ceild_)
      out += "#ifndef ceild\n#define ceild(n, d) (((n) < 0) ? -((-(n)) / (d)) : ((n) + (d) - 1) / (d))\n#endif\n";
    if (use_max_)
      out += "#ifndef max\n#define max(x, y) ((x) > (y) ? (x) : (y))\n#endif\n";
    if (use_min_)
      out += "#ifndef min\n#define min(x, y) ((x) < (y) ? (x) : (y))\n#endif\n";
    return out + body_.str();
  }

private:
  void indent(int depth) { body_ << std::string(static_cast<std::size_t>(depth) * 2, ' '); }

  std::string bound(const BoundExpr &b) {
    std::string num = to_string(b.numerator, names_);
    switch (b.rounding) {
    case BoundExpr::Rounding::FloorDiv:
      use_floord_ = true;
      return "floord(" + num + ", " + std::to_string(b.denominator) + ")";
    case BoundExpr::Rounding::CeilDiv:
      use_ceild_ = true;
      return "ceild(" + num + ", " + std::to_string(b.denominator) + ")";
    case BoundExpr::Rounding::None:
      break;
    }
    return num;
  }

  std::string fold(const std::vector<BoundExpr> &bs, const char *fn, bool &flag) {
    std::string acc = bound(bs.front());
    for (std::size_t i = 1; i < bs.size(); ++i) {
      flag = true;
      acc = std::string(fn) + "(" + acc + ", " + bound(bs[i]) + ")";
    }
    return acc;
  }

  std::string condition(const Constraint &c) {
    // Split into positive and negative parts: `lhs >= rhs` / `lhs == rhs`.
    AffExpr pos(c.size()), neg(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
      (c[i] > 0 ? pos : neg)[i] = c[i] > 0 ? c[i] : -c[i];
    if (c.expr.constant > 0)
      pos.constant = c.expr.constant;
    else
      neg.constant = -c.expr.constant;
    return to_string(pos, names_) + (c.is_eq() ? " == " : " >= ") + to_string(neg, names_);
  }

  /// Statement arguments read better as `c0 + h` than `h + c0`.
  std::string iters_first(const AffExpr &e) {
    std::size_t np = ast_.params.size();
    std::vector<std::size_t> order(e.size());
    std::vector<std::string> names(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      order[i] = i < np ? e.size() - np + i : i - np;
      names[order[i]] = names_[i];
    }
    return to_string(e.remap(order, e.size()), names);
  }

  void emit_block(const std::vector<AstNode> &body, int depth) {
    std::vector<const AstNode *> flat;
    for (const auto &n : body) {
      if (auto *s = std::get_if<SeqNode>(&n.node))
        for (const auto &c : s->children)
          flat.push_back(&c);
      else
        flat.push_back(&n);
    }
    if (flat.size() == 1) {
      emit(*flat[0], depth + 1);
      return;
    }
    body_ << " {\n";
    for (const auto *n : flat)
      emit(*n, depth + 1);
    indent(depth);
    body_ << "}\n";
  }

  void emit(const AstNode &n, int depth) {
    if (auto *s = std::get_if<SeqNode>(&n.node)) {
      for (const auto &c : s->children)
        emit(c, depth);
    } else if (auto *l = std::get_if<LoopNode>(&n.node)) {
      const std::string &it = ast_.iters[l->iter];
      indent(depth);
      body_ << "for (int " << it << " = " << fold(l->lowers, "max", use_max_) << "; " << it
            << " <= " << fold(l->uppers, "min", use_min_) << "; " << it << " += 1)";
      if (l->body.size() == 1 && !std::holds_alternative<SeqNode>(l->body[0].node))
        body_ << "\n";
      emit_block(l->body, depth);
    } else if (auto *g = std::get_if<GuardNode>(&n.node)) {
      indent(depth);
      body_ << "if (";
      for (std::size_t i = 0; i < g->conds.size(); ++i)
        body_ << (i ? " && " : "") << condition(g->conds[i]);
      body_ << ")";
      if (g->body.size() == 1 && !std::holds_alternative<SeqNode>(g->body[0].node))
        body_ << "\n";
      emit_block(g->body, depth);
    } else {
      const auto &c = std::get<CallNode>(n.node);
      auto it = stmts_.find(c.stmt);
      if (it == stmts_.end())
        throw Error(Errc::UnknownStatement, "statement '" + c.stmt + "' has no macro");
      if (it->second != c.args.size())
        throw Error(Errc::UnknownStatement,
                    "statement '" + c.stmt + "' takes " + std::to_string(it->second) +
                        " iterators, called with " + std::to_string(c.args.size()));
      indent(depth);
      body_ << c.stmt << "(";
      for (std::size_t i = 0; i < c.args.size(); ++i)
        body_ << (i ? ", " : "") << iters_first(c.args[i]);
      body_ << ");\n";
    }
  }

  const LoopAst &ast_;
  const StmtTable &stmts_;
  std::vector<std::string> names_;
  std::ostringstream body_;
  bool use_floord_ = false, use_ceild_ = false, use_max_ = false, use_min_ = false;
};

} // namespace detail

/// C99 text for the nest: `for (int cK = ...; cK <= ...; cK += 1)` loops,
/// statement macro calls, and floord/ceild/max/min helpers defined once
/// when used. Deterministic for identical input.
inline std::string emit_kernel_c(const LoopAst &ast, const StmtTable &stmts) {
  return detail::CEmitter(ast, stmts).run();
}

/// Table accepting every statement the AST calls, at the arity it uses.
inline StmtTable statements_of(const LoopAst &ast) {
  StmtTable out;
  auto walk = [&](auto &self, const AstNode &n) -> void {
    std::visit(
        [&](const auto &node) {
          using N = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<N, CallNode>)
            out.emplace(node.stmt, node.args.size());
          else if constexpr (std::is_same_v<N, SeqNode>)
            for (const auto &c : node.children)
              self(self, c);
          else
            for (const auto &c : node.body)
              self(self, c);
        },
        n.node);
  };
  walk(walk, ast.root);
  return out;
}

} // namespace pbench
