#pragma once

#include "pbench/iset/fourier_motzkin.hpp"
#include "pbench/iset/space.hpp"

#include <concepts>
#include <map>
#include <numeric>

namespace pbench {

/// Conjunction of affine constraints over a space, plus existential columns
/// appended after the space columns.
struct Polyhedron {
  Space space;
  ConstraintList constraints;
  std::vector<std::string> exists;

  std::size_t n_cols() const { return space.n_cols() + exists.size(); }
  std::size_t exists_col(std::size_t i) const { return space.n_cols() + i; }

  std::vector<std::string> column_names() const {
    auto names = space.column_names();
    names.insert(names.end(), exists.begin(), exists.end());
    return names;
  }

  /// Empty by construction (holds the canonical false constraint).
  bool is_marked_empty() const {
    return constraints.size() == 1 && !constraints[0].is_eq() &&
           constraints[0].expr.is_constant() && constraints[0].expr.constant < 0;
  }

  bool is_normalized() const { return exists.empty(); }

  friend bool operator==(const Polyhedron &, const Polyhedron &) = default;
};

struct BasicSet : Polyhedron {
  BasicSet() = default;
  explicit BasicSet(Polyhedron p) : Polyhedron(std::move(p)) {}
  const Tuple &tuple() const { return space.out; }
  std::size_t n_dims() const { return space.n_out(); }
};

struct BasicMap : Polyhedron {
  BasicMap() = default;
  explicit BasicMap(Polyhedron p) : Polyhedron(std::move(p)) {}
  const Tuple &in_tuple() const { return *space.in; }
  const Tuple &out_tuple() const { return space.out; }
};

template <class B>
concept BasicKind = std::same_as<B, BasicSet> || std::same_as<B, BasicMap>;

/// Disjoint union of basic pieces sharing parameters.
template <BasicKind B> struct Union {
  std::vector<B> pieces;

  bool empty() const { return pieces.empty(); }
  std::vector<std::string> params() const {
    std::vector<std::string> out;
    for (const auto &p : pieces)
      out = merge_params(out, p.space.params);
    return out;
  }
  friend bool operator==(const Union &, const Union &) = default;
};

using USet = Union<BasicSet>;
using UMap = Union<BasicMap>;

template <BasicKind B> B universe(Space space) {
  B b;
  b.space = std::move(space);
  return b;
}

template <BasicKind B> B empty_of(Space space) {
  B b;
  std::size_t n = space.n_cols();
  b.space = std::move(space);
  b.constraints = {Constraint::falsum(n)};
  return b;
}

namespace detail {

inline ConstraintList erase_column(const ConstraintList &cs, std::size_t col) {
  ConstraintList out;
  out.reserve(cs.size());
  for (const auto &c : cs)
    out.push_back({c.expr.erase_column(col), c.kind});
  return out;
}

/// Solve `c` (an equality with a unit coefficient on `col`) for `col`.
inline AffExpr solve_unit(const Constraint &c, std::size_t col) {
  AffExpr rest = c.expr;
  Int a = rest[col];
  rest[col] = 0;
  // a * x + rest = 0  =>  x = -rest / a, a = +-1
  return a == 1 ? -rest : rest;
}

template <BasicKind B> B finish(B b) {
  auto s = simplify(std::move(b.constraints));
  if (!s)
    return empty_of<B>(std::move(b.space));
  b.constraints = std::move(*s);
  return b;
}

} // namespace detail

/// Substitute out every existential through a defining equality with a
/// +-1 coefficient, then integer-tighten. The point set is unchanged.
template <BasicKind B> B normalize(B b) {
  while (!b.exists.empty()) {
    bool progress = false;
    for (std::size_t j = 0; j < b.exists.size() && !progress; ++j) {
      std::size_t col = b.exists_col(j);
      bool referenced = false;
      const Constraint *def = nullptr;
      for (const auto &c : b.constraints) {
        if (c[col] == 0)
          continue;
        referenced = true;
        if (c.is_eq() && (c[col] == 1 || c[col] == -1)) {
          def = &c;
          break;
        }
      }
      if (referenced && !def)
        continue;
      ConstraintList next;
      if (def) {
        AffExpr value = detail::solve_unit(*def, col);
        for (const auto &c : b.constraints) {
          if (&c == def)
            continue;
          next.push_back({c.expr.substitute(col, value), c.kind});
        }
      } else {
        next = b.constraints;
      }
      b.constraints = detail::erase_column(next, col);
      b.exists.erase(b.exists.begin() + static_cast<std::ptrdiff_t>(j));
      progress = true;
    }
    if (!progress)
      throw Error(Errc::NonEliminableExistential,
                  "existential '" + b.exists.front() +
                      "' has no defining equality with a unit coefficient");
  }
  return detail::finish(std::move(b));
}

/// Re-express `b` over `params`, which must contain every parameter of b.
template <BasicKind B> B align_params(const B &b, const std::vector<std::string> &params) {
  if (b.space.params == params)
    return b;
  std::size_t old_p = b.space.n_params();
  std::size_t new_p = params.size();
  std::vector<std::size_t> mapping(b.n_cols());
  for (std::size_t i = 0; i < old_p; ++i) {
    auto it = std::find(params.begin(), params.end(), b.space.params[i]);
    if (it == params.end())
      throw Error(Errc::SpaceMismatch, "parameter '" + b.space.params[i] +
                                           "' missing from aligned space");
    mapping[i] = static_cast<std::size_t>(it - params.begin());
  }
  for (std::size_t c = old_p; c < b.n_cols(); ++c)
    mapping[c] = c - old_p + new_p;
  B out = b;
  out.space.params = params;
  std::size_t ncols = out.n_cols();
  for (auto &c : out.constraints)
    c.expr = c.expr.remap(mapping, ncols);
  return out;
}

/// Conjoin constraints written over `src_cols` columns of another object
/// into `dst`. `mapping[i]` is the destination column of source column i.
inline void conjoin(Polyhedron &dst, const ConstraintList &src,
                    std::span<const std::size_t> mapping) {
  std::size_t ncols = dst.n_cols();
  for (const auto &c : src)
    dst.constraints.push_back({c.expr.remap(mapping, ncols), c.kind});
}

inline BasicSet intersect(const BasicSet &a0, const BasicSet &b0) {
  if (!a0.tuple().same_shape(b0.tuple()))
    throw Error(Errc::SpaceMismatch, "cannot intersect " + a0.tuple().name +
                                         " with " + b0.tuple().name);
  auto params = merge_params(a0.space.params, b0.space.params);
  BasicSet a = align_params(normalize(a0), params);
  BasicSet b = align_params(normalize(b0), params);
  std::vector<std::size_t> mapping(b.n_cols());
  std::iota(mapping.begin(), mapping.end(), 0);
  conjoin(a, b.constraints, mapping);
  return detail::finish(std::move(a));
}

inline BasicMap restrict_domain(const BasicMap &m0, const BasicSet &s0) {
  if (!m0.in_tuple().same_shape(s0.tuple()))
    throw Error(Errc::SpaceMismatch, "map domain " + m0.in_tuple().name +
                                         " does not match set " + s0.tuple().name);
  auto params = merge_params(m0.space.params, s0.space.params);
  BasicMap m = align_params(normalize(m0), params);
  BasicSet s = align_params(normalize(s0), params);
  std::vector<std::size_t> mapping(s.n_cols());
  for (std::size_t i = 0; i < params.size(); ++i)
    mapping[i] = i;
  for (std::size_t d = 0; d < s.n_dims(); ++d)
    mapping[s.space.out_col(d)] = m.space.in_col(d);
  conjoin(m, s.constraints, mapping);
  return detail::finish(std::move(m));
}

/// Relational composition: apply `first`, then `second`.
inline BasicMap compose(const BasicMap &first0, const BasicMap &second0) {
  if (!first0.out_tuple().same_shape(second0.in_tuple()))
    throw Error(Errc::SpaceMismatch, "cannot compose: range of first map does "
                                     "not match domain of second");
  auto params = merge_params(first0.space.params, second0.space.params);
  BasicMap first = align_params(normalize(first0), params);
  BasicMap second = align_params(normalize(second0), params);

  BasicMap out;
  out.space = Space::map(params, first.in_tuple(), second.out_tuple());
  std::size_t mid = first.out_tuple().arity();
  for (std::size_t i = 0; i < mid; ++i)
    out.exists.push_back("_mid" + std::to_string(i));
  std::size_t np = params.size();
  std::size_t n_a = first.in_tuple().arity();
  std::size_t n_c = second.out_tuple().arity();
  std::size_t mid_base = np + n_a + n_c;

  std::vector<std::size_t> map_first(first.n_cols());
  for (std::size_t i = 0; i < np; ++i)
    map_first[i] = i;
  for (std::size_t i = 0; i < n_a; ++i)
    map_first[first.space.in_col(i)] = np + i;
  for (std::size_t i = 0; i < mid; ++i)
    map_first[first.space.out_col(i)] = mid_base + i;
  conjoin(out, first.constraints, map_first);

  std::vector<std::size_t> map_second(second.n_cols());
  for (std::size_t i = 0; i < np; ++i)
    map_second[i] = i;
  for (std::size_t i = 0; i < mid; ++i)
    map_second[second.space.in_col(i)] = mid_base + i;
  for (std::size_t i = 0; i < n_c; ++i)
    map_second[second.space.out_col(i)] = np + n_a + i;
  conjoin(out, second.constraints, map_second);
  return normalize(std::move(out));
}

/// Flatten a map into a set over `[in..., out...]`, for enumeration.
inline BasicSet wrap(const BasicMap &m) {
  BasicSet s;
  s.space = Space::set(m.space.params, Tuple{m.in_tuple().name, {}});
  auto &dims = s.space.out.dims;
  dims = m.in_tuple().dims;
  dims.insert(dims.end(), m.out_tuple().dims.begin(), m.out_tuple().dims.end());
  s.constraints = m.constraints;
  s.exists = m.exists;
  return s;
}

// ---------------------------------------------------------------------------
// Union-level operations

namespace detail {

template <BasicKind A, BasicKind Bk>
void check_arity_agreement(const Union<A> &a, const Union<Bk> &b,
                           const Tuple &(*tuple_a)(const A &),
                           const Tuple &(*tuple_b)(const Bk &)) {
  for (const auto &pa : a.pieces)
    for (const auto &pb : b.pieces)
      if (tuple_a(pa).name == tuple_b(pb).name &&
          tuple_a(pa).arity() != tuple_b(pb).arity())
        throw Error(Errc::SpaceMismatch,
                    "tuple " + tuple_a(pa).name + " used with arity " +
                        std::to_string(tuple_a(pa).arity()) + " and " +
                        std::to_string(tuple_b(pb).arity()));
}

inline const Tuple &set_tuple(const BasicSet &s) { return s.tuple(); }
inline const Tuple &map_domain(const BasicMap &m) { return m.in_tuple(); }

} // namespace detail

/// Pointwise intersection of two unions; pieces pair up by tuple name.
inline USet intersect(const USet &a, const USet &b) {
  detail::check_arity_agreement(a, b, &detail::set_tuple, &detail::set_tuple);
  USet out;
  bool any_match = a.empty() || b.empty();
  for (const auto &pa : a.pieces)
    for (const auto &pb : b.pieces) {
      if (!pa.tuple().same_shape(pb.tuple()))
        continue;
      any_match = true;
      BasicSet r = intersect(pa, pb);
      if (!r.is_marked_empty() && !rationally_empty(r.constraints))
        out.pieces.push_back(std::move(r));
    }
  if (!any_match)
    throw Error(Errc::SpaceMismatch, "operands share no tuple space");
  return out;
}

/// Restrict each map piece to the set pieces living in its domain space.
inline UMap restrict_domain(const UMap &m, const USet &s) {
  detail::check_arity_agreement(m, s, &detail::map_domain, &detail::set_tuple);
  for (const auto &ps : s.pieces) {
    bool found = std::any_of(m.pieces.begin(), m.pieces.end(), [&](const auto &pm) {
      return pm.in_tuple().same_shape(ps.tuple());
    });
    if (!found && !m.empty())
      throw Error(Errc::SpaceMismatch,
                  "no map piece accepts domain tuple " + ps.tuple().name);
  }
  UMap out;
  for (const auto &pm : m.pieces)
    for (const auto &ps : s.pieces) {
      if (!pm.in_tuple().same_shape(ps.tuple()))
        continue;
      BasicMap r = restrict_domain(pm, ps);
      if (!r.is_marked_empty() && !rationally_empty(r.constraints))
        out.pieces.push_back(std::move(r));
    }
  return out;
}

inline UMap compose(const UMap &first, const UMap &second) {
  UMap out;
  for (const auto &a : first.pieces)
    for (const auto &b : second.pieces) {
      if (!a.out_tuple().same_shape(b.in_tuple()))
        continue;
      BasicMap r = compose(a, b);
      if (!r.is_marked_empty() && !rationally_empty(r.constraints))
        out.pieces.push_back(std::move(r));
    }
  return out;
}

template <BasicKind B> Union<B> normalize(const Union<B> &u) {
  Union<B> out;
  for (const auto &p : u.pieces) {
    B n = normalize(p);
    if (!n.is_marked_empty())
      out.pieces.push_back(std::move(n));
  }
  return out;
}

} // namespace pbench
