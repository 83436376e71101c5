#pragma once

// Polyhedral scanning: loop nests that visit the integer points of a set,
// or the image points of a schedule map, in lexicographic order.

#include "pbench/codegen/fm_bounds.hpp"
#include "pbench/iset/schedule.hpp"

#include <numeric>

namespace pbench {

namespace detail {

/// One statement family to scan: constraints over `params + iters` and the
/// call emitted at each point.
struct ScheduledPiece {
  ConstraintList cs;
  CallNode call;
};

inline bool involves_iters(const AffExpr &e, std::size_t np) {
  return e.involves_any(np, e.size());
}

/// Constraints of `cs` not implied by `context`.
inline ConstraintList not_implied(const ConstraintList &cs, const ConstraintList &context) {
  ConstraintList out;
  for (const auto &c : cs)
    if (std::find(context.begin(), context.end(), c) == context.end() &&
        !implies(context, c))
      out.push_back(c);
  return out;
}

struct ScanLayout {
  std::size_t np;    ///< parameter count
  std::size_t nd;    ///< iterator count
  std::vector<std::string> iter_names;
};

/// Loop nest over iterators [0, depth) wrapping `body`. Constraints must
/// not involve iterators >= depth. Parameter-only constraints become a
/// guard unless the context implies them.
inline AstNode scan_nest(const ConstraintList &cs0, const ScanLayout &lay, std::size_t depth,
                         AstNode body, const ConstraintList &context) {
  auto cs = simplify(cs0);
  if (!cs)
    return AstNode{SeqNode{}};
  ConstraintList param_only;
  for (const auto &c : *cs)
    if (!involves_iters(c.expr, lay.np))
      param_only.push_back(c);
  param_only = not_implied(param_only, context);

  std::vector<ConstraintList> levels(depth);
  if (depth > 0) {
    levels[depth - 1] = *cs;
    for (std::size_t k = depth - 1; k > 0; --k) {
      auto proj = fm_eliminate(levels[k], lay.np + k);
      if (!proj)
        return AstNode{SeqNode{}};
      levels[k - 1] = std::move(*proj);
    }
  }

  AstNode node = std::move(body);
  for (std::size_t k = depth; k-- > 0;) {
    DimBounds b = fm_bounds(levels[k], lay.np + k, lay.np);
    if (b.lowers.empty() || b.uppers.empty())
      throw Error(Errc::UnboundedDimension,
                  "dimension '" + lay.iter_names[k] + "' has no " +
                      (b.lowers.empty() ? "lower" : "upper") + " bound");
    LoopNode loop;
    loop.iter = k;
    loop.lowers = std::move(b.lowers);
    loop.uppers = std::move(b.uppers);
    loop.body.push_back(std::move(node));
    node = AstNode{std::move(loop)};
  }
  if (!param_only.empty()) {
    GuardNode g;
    g.conds = std::move(param_only);
    g.body.push_back(std::move(node));
    node = AstNode{std::move(g)};
  }
  return node;
}

/// Constraint system with two copies of the iterators, used to compare
/// the first iterator of two pieces.
inline bool strictly_precedes(const ScheduledPiece &a, const ScheduledPiece &b,
                              const ScanLayout &lay, const ConstraintList &context) {
  std::size_t ncols = lay.np + 2 * lay.nd;
  std::vector<std::size_t> map_a(lay.np + lay.nd), map_b(lay.np + lay.nd);
  std::iota(map_a.begin(), map_a.end(), 0);
  for (std::size_t i = 0; i < lay.np; ++i)
    map_b[i] = i;
  for (std::size_t i = 0; i < lay.nd; ++i)
    map_b[lay.np + i] = lay.np + lay.nd + i;
  ConstraintList sys;
  for (const auto &c : a.cs)
    sys.push_back({c.expr.remap(map_a, ncols), c.kind});
  for (const auto &c : b.cs)
    sys.push_back({c.expr.remap(map_b, ncols), c.kind});
  for (const auto &c : context)
    sys.push_back({c.expr.remap(map_a, ncols), c.kind});
  // a.first >= b.first must be infeasible.
  AffExpr probe(ncols);
  probe[lay.np] = 1;
  probe[lay.np + lay.nd] = -1;
  sys.push_back(Constraint::geq(std::move(probe)));
  return rationally_empty(sys);
}

/// Constant value of iterator `k` if some equality pins it, else nullopt.
inline std::optional<Int> pinned_value(const ConstraintList &cs, std::size_t col) {
  for (const auto &c : cs) {
    if (!c.is_eq() || c[col] == 0)
      continue;
    bool only = true;
    for (std::size_t j = 0; j < c.size() && only; ++j)
      only = j == col || c[j] == 0;
    if (only && c.expr.constant % c[col] == 0)
      return -c.expr.constant / c[col];
  }
  return std::nullopt;
}

inline AstNode build_union(std::vector<ScheduledPiece> pieces, const ScanLayout &lay,
                           const ConstraintList &context) {
  std::size_t nd = lay.nd;
  if (pieces.empty())
    return AstNode{SeqNode{}};
  if (pieces.size() == 1)
    return scan_nest(pieces[0].cs, lay, nd, AstNode{pieces[0].call}, context);

  // Shape 1: pieces ordered strictly by the first iterator -> sequential nests.
  if (nd > 0) {
    std::vector<ScheduledPiece> order;
    bool total = true;
    for (auto &p : pieces) {
      auto pos = order.begin();
      while (pos != order.end() && strictly_precedes(*pos, p, lay, context))
        ++pos;
      for (auto it = pos; it != order.end() && total; ++it)
        total = strictly_precedes(p, *it, lay, context);
      if (!total)
        break;
      order.insert(pos, p);
    }
    if (total) {
      std::vector<AstNode> nests;
      for (auto &p : order) {
        AstNode n = scan_nest(p.cs, lay, nd, AstNode{p.call}, context);
        if (!is_empty_seq(n))
          nests.push_back(std::move(n));
      }
      return AstNode{SeqNode{std::move(nests)}};
    }
  }

  // Shape 2: pieces share leading iterators and pin the trailing ones to
  // constants -> one nest with an ordered statement sequence.
  std::size_t shared = nd;
  std::vector<std::vector<Int>> pins(pieces.size());
  while (shared > 0) {
    std::size_t col = lay.np + shared - 1;
    bool all = std::all_of(pieces.begin(), pieces.end(),
                           [&](const ScheduledPiece &p) { return pinned_value(p.cs, col).has_value(); });
    if (!all)
      break;
    --shared;
  }
  std::vector<std::size_t> idx(pieces.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    auto &p = pieces[i];
    for (std::size_t k = shared; k < nd; ++k) {
      std::size_t col = lay.np + k;
      Int v = *pinned_value(p.cs, col);
      pins[i].push_back(v);
      AffExpr value(lay.np + nd, v);
      for (auto &c : p.cs)
        c.expr = c.expr.substitute(col, value);
      for (auto &a : p.call.args)
        a = a.substitute(col, value);
    }
    auto s = simplify(std::move(p.cs));
    p.cs = s ? std::move(*s) : ConstraintList{Constraint::falsum(lay.np + nd)};
  }
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return pins[a] < pins[b]; });

  ConstraintList common = pieces[0].cs;
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    ConstraintList keep;
    for (const auto &c : common)
      if (std::find(pieces[i].cs.begin(), pieces[i].cs.end(), c) != pieces[i].cs.end())
        keep.push_back(c);
    common = std::move(keep);
  }
  ConstraintList known = common;
  known.insert(known.end(), context.begin(), context.end());

  std::vector<AstNode> calls;
  for (std::size_t i : idx) {
    ConstraintList extra;
    for (const auto &c : pieces[i].cs)
      if (std::find(common.begin(), common.end(), c) == common.end())
        extra.push_back(c);
    extra = not_implied(extra, known);
    if (extra.empty()) {
      calls.push_back(AstNode{pieces[i].call});
    } else {
      GuardNode g;
      g.conds = std::move(extra);
      g.body.push_back(AstNode{pieces[i].call});
      calls.push_back(AstNode{std::move(g)});
    }
  }
  try {
    return scan_nest(common, lay, shared, AstNode{SeqNode{std::move(calls)}}, context);
  } catch (const Error &e) {
    if (e.code() != Errc::UnboundedDimension)
      throw;
    throw Error(Errc::UnsupportedUnionShape,
                "union pieces neither follow one another nor share bounded "
                "leading dimensions: " + std::string(e.what()));
  }
}

inline ConstraintList context_constraints(const BasicSet *context,
                                          const std::vector<std::string> &params,
                                          std::size_t nd) {
  ConstraintList out;
  if (!context)
    return out;
  BasicSet c = align_params(normalize(*context), params);
  if (c.n_dims() != 0)
    throw Error(Errc::SpaceMismatch, "codegen context must be a parameter set");
  for (const auto &k : c.constraints)
    out.push_back({k.expr.insert_columns(params.size(), nd), k.kind});
  return out;
}

inline std::vector<std::string> iterator_names(std::size_t nd) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < nd; ++i)
    names.push_back("c" + std::to_string(i));
  return names;
}

} // namespace detail

/// Scan a set: the nest calls `Tuple(c0, ..., ck)` at every point, in
/// lexicographic order. `context` (a parameter-only set) lists facts about
/// the parameters that need no runtime check.
inline LoopAst codegen_set(const USet &s0, const BasicSet *context = nullptr) {
  USet s = normalize(s0);
  LoopAst ast;
  ast.params = s.params();
  if (context)
    ast.params = merge_params(ast.params, context->space.params);
  std::size_t nd = s.empty() ? 0 : s.pieces[0].n_dims();
  for (const auto &p : s.pieces)
    if (p.n_dims() != nd)
      throw Error(Errc::UnsupportedUnionShape, "set pieces differ in dimensionality");
  ast.iters = detail::iterator_names(nd);
  std::size_t np = ast.params.size();
  std::vector<detail::ScheduledPiece> pieces;
  for (const auto &p0 : s.pieces) {
    BasicSet p = align_params(p0, ast.params);
    detail::ScheduledPiece sp;
    sp.cs = p.constraints;
    sp.call.stmt = p.tuple().name;
    for (std::size_t d = 0; d < nd; ++d)
      sp.call.args.push_back(AffExpr::var(np + nd, np + d));
    pieces.push_back(std::move(sp));
  }
  detail::ScanLayout lay{np, nd, s.empty() ? ast.iters : s.pieces[0].tuple().dims};
  ast.root = detail::build_union(std::move(pieces), lay,
                                 detail::context_constraints(context, ast.params, nd));
  return ast;
}

/// Scan the image of a schedule map; each call passes the map's input dims
/// rebuilt from the output dims.
inline LoopAst codegen_map(const UMap &m0, const BasicSet *context = nullptr) {
  UMap m = normalize(m0);
  InverseTable inv = schedule_check(m);
  LoopAst ast;
  ast.params = m.params();
  if (context)
    ast.params = merge_params(ast.params, context->space.params);
  std::size_t nd = m.empty() ? 0 : m.pieces[0].out_tuple().arity();
  for (const auto &p : m.pieces)
    if (p.out_tuple().arity() != nd)
      throw Error(Errc::UnsupportedUnionShape, "schedule pieces differ in output arity");
  ast.iters = detail::iterator_names(nd);
  std::size_t np = ast.params.size();
  std::vector<detail::ScheduledPiece> pieces;
  for (std::size_t i = 0; i < m.pieces.size(); ++i) {
    BasicMap p = align_params(m.pieces[i], ast.params);
    std::size_t own_np = m.pieces[i].space.n_params();
    // Column mapping from the piece's own [params, out] layout.
    std::vector<std::size_t> from_own(own_np + nd);
    for (std::size_t k = 0; k < own_np; ++k)
      from_own[k] = *p.space.find_param(m.pieces[i].space.params[k]);
    for (std::size_t k = 0; k < nd; ++k)
      from_own[own_np + k] = np + k;

    detail::ScheduledPiece sp;
    sp.call.stmt = p.in_tuple().name;
    std::vector<AffExpr> values;
    for (const auto &e : inv[i].in_dims)
      values.push_back(e.remap(from_own, np + nd));
    sp.call.args = values;
    // Substitute the inputs away: constraints over [params, out].
    std::size_t n_in = p.space.n_in();
    for (const auto &c : p.constraints) {
      AffExpr e(np + nd, c.expr.constant);
      for (std::size_t k = 0; k < np; ++k)
        e[k] = c.expr[k];
      for (std::size_t k = 0; k < nd; ++k)
        e[np + k] = c.expr[p.space.out_col(k)];
      for (std::size_t k = 0; k < n_in; ++k) {
        Int a = c.expr[p.space.in_col(k)];
        if (a != 0)
          e += values[k] * a;
      }
      sp.cs.push_back({std::move(e), c.kind});
    }
    pieces.push_back(std::move(sp));
  }
  detail::ScanLayout lay{np, nd, ast.iters};
  ast.root = detail::build_union(std::move(pieces), lay,
                                 detail::context_constraints(context, ast.params, nd));
  return ast;
}

} // namespace pbench
