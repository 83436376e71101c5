#pragma once

#include "pbench/iset/basic.hpp"

#include <algorithm>

namespace pbench {

using Point = std::vector<Int>;
using Bindings = std::map<std::string, Int>;

/// Bind every parameter of `b`; the result has no parameters.
template <BasicKind B> B bind_params(const B &b, const Bindings &bindings) {
  B out;
  out.space = b.space;
  out.space.params.clear();
  out.exists = b.exists;
  std::size_t np = b.space.n_params();
  std::vector<Int> values(np);
  for (std::size_t i = 0; i < np; ++i) {
    auto it = bindings.find(b.space.params[i]);
    if (it == bindings.end())
      throw Error(Errc::UnboundParameter,
                  "parameter '" + b.space.params[i] + "' is not bound");
    values[i] = it->second;
  }
  for (const auto &c : b.constraints) {
    AffExpr e(b.n_cols() - np, c.expr.constant);
    for (std::size_t i = 0; i < np; ++i)
      e.constant = checked_add(e.constant, checked_mul(c.expr[i], values[i]));
    for (std::size_t i = np; i < b.n_cols(); ++i)
      e[i - np] = c.expr[i];
    out.constraints.push_back({std::move(e), c.kind});
  }
  return detail::finish(std::move(out));
}

struct Box {
  std::vector<Int> lower, upper;
};

/// Integer bounding box of a parameter-free, existential-free piece, by
/// projecting onto each dimension. nullopt when rationally empty.
inline std::optional<Box> bounding_box(const ConstraintList &cs, std::size_t ndims,
                                       const std::vector<std::string> &names) {
  Box box;
  for (std::size_t k = 0; k < ndims; ++k) {
    std::optional<ConstraintList> proj = simplify(cs);
    for (std::size_t j = 0; j < ndims && proj; ++j)
      if (j != k)
        proj = fm_eliminate(*proj, j);
    if (!proj)
      return std::nullopt;
    std::optional<Int> lo, hi;
    for (const auto &c : *proj) {
      Int a = c[k];
      if (a == 0)
        continue;
      Int rest = c.expr.constant;
      // a * x + rest (>= | =) 0
      if (a > 0 || c.is_eq()) {
        Int mag = a < 0 ? -a : a;
        Int r = a < 0 ? rest : -rest;
        Int l = ceil_div(r, mag);
        lo = lo ? std::max(*lo, l) : l;
      }
      if (a < 0 || c.is_eq()) {
        Int mag = a < 0 ? -a : a;
        Int r = a < 0 ? rest : -rest;
        Int u = floor_div(r, mag);
        hi = hi ? std::min(*hi, u) : u;
      }
    }
    if (!lo || !hi)
      throw Error(Errc::UnboundedSet, "dimension '" + names[k] + "' is unbounded");
    if (*lo > *hi)
      return std::nullopt;
    box.lower.push_back(*lo);
    box.upper.push_back(*hi);
  }
  return box;
}

namespace detail {

inline void scan_box(const Box &box, const ConstraintList &cs, Point &cur,
                     std::size_t depth, std::vector<Point> &out) {
  if (depth == box.lower.size()) {
    for (const auto &c : cs)
      if (!c.holds(cur))
        return;
    out.push_back(cur);
    return;
  }
  for (Int v = box.lower[depth]; v <= box.upper[depth]; ++v) {
    cur[depth] = v;
    scan_box(box, cs, cur, depth + 1, out);
  }
}

} // namespace detail

/// All integer points of `piece` under `bindings`, lexicographically sorted.
inline std::vector<Point> enumerate(const BasicSet &piece, const Bindings &bindings) {
  BasicSet b = bind_params(normalize(piece), bindings);
  std::vector<Point> out;
  if (b.is_marked_empty())
    return out;
  std::size_t nd = b.n_dims();
  if (nd == 0) {
    if (!rationally_empty(b.constraints))
      out.emplace_back();
    return out;
  }
  auto box = bounding_box(b.constraints, nd, b.tuple().dims);
  if (!box)
    return out;
  Point cur(nd);
  detail::scan_box(*box, b.constraints, cur, 0, out);
  return out;
}

/// Enumeration oracle over a union: points of all pieces, sorted
/// lexicographically (duplicates are kept, exposing overlapping pieces).
inline std::vector<Point> enumerate(const USet &s, const Bindings &bindings) {
  std::vector<Point> out;
  for (const auto &p : s.pieces) {
    auto pts = enumerate(p, bindings);
    out.insert(out.end(), pts.begin(), pts.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Map enumeration: points are `[in..., out...]` pairs.
inline std::vector<Point> enumerate(const UMap &m, const Bindings &bindings) {
  USet wrapped;
  for (const auto &p : m.pieces)
    wrapped.pieces.push_back(wrap(p));
  return enumerate(wrapped, bindings);
}

} // namespace pbench
