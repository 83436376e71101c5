#pragma once

#include "pbench/codegen/loop_ast.hpp"

#include <algorithm>

namespace pbench {

namespace detail {

/// Fold common factors and exact divisions into the numerator.
inline BoundExpr make_bound(AffExpr num, Int den, BoundExpr::Rounding r) {
  Int g = gcd(gcd(num.content(), num.constant), den);
  if (g > 1) {
    for (Int &v : num.coeffs)
      v /= g;
    num.constant /= g;
    den /= g;
  }
  if (den == 1)
    return {std::move(num), 1, BoundExpr::Rounding::None};
  // floor((den*q + c) / den) = q + floor(c / den) when all variable
  // coefficients are multiples of den.
  if (num.content() % den == 0) {
    for (Int &v : num.coeffs)
      v /= den;
    num.constant = r == BoundExpr::Rounding::FloorDiv ? floor_div(num.constant, den)
                                                      : ceil_div(num.constant, den);
    return {std::move(num), 1, BoundExpr::Rounding::None};
  }
  return {std::move(num), den, r};
}

inline std::size_t iterator_terms(const BoundExpr &b, std::size_t first_iter_col) {
  std::size_t n = 0;
  for (std::size_t c = first_iter_col; c < b.numerator.size(); ++c)
    n += b.numerator[c] != 0;
  return n;
}

inline void sort_unique(std::vector<BoundExpr> &bs, std::size_t first_iter_col) {
  std::vector<BoundExpr> out;
  for (auto &b : bs)
    if (std::find(out.begin(), out.end(), b) == out.end())
      out.push_back(std::move(b));
  std::stable_sort(out.begin(), out.end(), [&](const BoundExpr &a, const BoundExpr &b) {
    auto ka = iterator_terms(a, first_iter_col), kb = iterator_terms(b, first_iter_col);
    if (ka != kb)
      return ka < kb;
    if (a.denominator != b.denominator)
      return a.denominator < b.denominator;
    // Parameter-heavy terms first; reversed coefficient order keeps
    // `n` ahead of constants and outer iterators ahead of inner ones.
    return std::lexicographical_compare(
        a.numerator.coeffs.begin(), a.numerator.coeffs.end(),
        b.numerator.coeffs.begin(), b.numerator.coeffs.end(),
        [](Int x, Int y) { return (x != 0) > (y != 0); });
  });
  bs = std::move(out);
}

} // namespace detail

struct DimBounds {
  std::vector<BoundExpr> lowers;
  std::vector<BoundExpr> uppers;
};

/// Bounds on column `col` implied by the constraints that involve it:
/// `a*x + rest >= 0` gives `x >= ceild(-rest, a)` for a > 0 and
/// `x <= floord(rest, -a)` for a < 0; equalities give both. Only syntactic
/// duplicates are removed. `first_iter_col` is the first iterator column
/// (it orders the output; constant and parameter bounds come first).
inline DimBounds fm_bounds(const ConstraintList &cs, std::size_t col,
                           std::size_t first_iter_col = 0) {
  using R = BoundExpr::Rounding;
  DimBounds out;
  for (const auto &c : cs) {
    Int a = c[col];
    if (a == 0)
      continue;
    AffExpr rest = c.expr;
    rest[col] = 0;
    if (a > 0 || c.is_eq()) {
      // a*x >= -rest
      AffExpr num = a > 0 ? -rest : rest;
      out.lowers.push_back(detail::make_bound(num, a > 0 ? a : -a, R::CeilDiv));
    }
    if (a < 0 || c.is_eq()) {
      AffExpr num = a < 0 ? rest : -rest;
      out.uppers.push_back(detail::make_bound(num, a < 0 ? -a : a, R::FloorDiv));
    }
  }
  detail::sort_unique(out.lowers, first_iter_col);
  detail::sort_unique(out.uppers, first_iter_col);
  return out;
}

inline Int evaluate(const BoundExpr &b, std::span<const Int> values) {
  Int v = b.numerator.evaluate(values);
  switch (b.rounding) {
  case BoundExpr::Rounding::FloorDiv: return floor_div(v, b.denominator);
  case BoundExpr::Rounding::CeilDiv: return ceil_div(v, b.denominator);
  case BoundExpr::Rounding::None: break;
  }
  return v;
}

} // namespace pbench
