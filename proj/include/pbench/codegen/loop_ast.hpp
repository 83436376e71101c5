#pragma once

#include "pbench/iset/constraint.hpp"

#include <string>
#include <variant>
#include <vector>

namespace pbench {

/// `numerator / denominator`, rounded per `rounding`. A denominator of 1
/// always carries Rounding::None.
struct BoundExpr {
  enum class Rounding { None, FloorDiv, CeilDiv };

  AffExpr numerator;
  Int denominator = 1;
  Rounding rounding = Rounding::None;

  friend bool operator==(const BoundExpr &, const BoundExpr &) = default;
};

struct AstNode;

struct LoopNode {
  std::size_t iter = 0; ///< index into LoopAst::iters
  std::vector<BoundExpr> lowers; ///< loop starts at the max of these
  std::vector<BoundExpr> uppers; ///< and ends (inclusive) at the min
  std::vector<AstNode> body;
};

struct CallNode {
  std::string stmt;
  std::vector<AffExpr> args;
};

struct SeqNode {
  std::vector<AstNode> children;
};

struct GuardNode {
  ConstraintList conds;
  std::vector<AstNode> body;
};

struct AstNode {
  std::variant<LoopNode, CallNode, SeqNode, GuardNode> node;
};

/// Loop nest over a column layout of parameters followed by iterators.
/// Every AffExpr in the tree uses that layout.
struct LoopAst {
  std::vector<std::string> params;
  std::vector<std::string> iters;
  AstNode root{SeqNode{}};

  std::size_t n_cols() const { return params.size() + iters.size(); }
  std::vector<std::string> column_names() const {
    auto names = params;
    names.insert(names.end(), iters.begin(), iters.end());
    return names;
  }
};

inline bool is_empty_seq(const AstNode &n) {
  auto *s = std::get_if<SeqNode>(&n.node);
  return s && s->children.empty();
}

} // namespace pbench
