#pragma once

#include "pbench/iset/int_math.hpp"

#include <cassert>
#include <compare>
#include <span>
#include <string>
#include <vector>

namespace pbench {

/// Affine expression `sum(coeffs[c] * col_c) + constant` over a positional
/// column layout owned by the enclosing space.
struct AffExpr {
  std::vector<Int> coeffs;
  Int constant = 0;

  AffExpr() = default;
  explicit AffExpr(std::size_t ncols, Int c = 0) : coeffs(ncols, 0), constant(c) {}

  static AffExpr var(std::size_t ncols, std::size_t col, Int coeff = 1) {
    AffExpr e(ncols);
    e.coeffs[col] = coeff;
    return e;
  }

  std::size_t size() const { return coeffs.size(); }
  Int operator[](std::size_t c) const { return coeffs[c]; }
  Int &operator[](std::size_t c) { return coeffs[c]; }

  bool is_constant() const {
    for (Int c : coeffs)
      if (c != 0)
        return false;
    return true;
  }

  bool involves(std::size_t col) const { return coeffs[col] != 0; }

  bool involves_any(std::size_t begin, std::size_t end) const {
    for (std::size_t c = begin; c < end && c < coeffs.size(); ++c)
      if (coeffs[c] != 0)
        return true;
    return false;
  }

  /// gcd of the variable coefficients (0 when constant).
  Int content() const {
    Int g = 0;
    for (Int c : coeffs)
      g = gcd(g, c);
    return g;
  }

  AffExpr &operator+=(const AffExpr &o) {
    assert(o.size() == size());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      coeffs[i] = checked_add(coeffs[i], o.coeffs[i]);
    constant = checked_add(constant, o.constant);
    return *this;
  }

  AffExpr &operator-=(const AffExpr &o) {
    assert(o.size() == size());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      coeffs[i] = checked_sub(coeffs[i], o.coeffs[i]);
    constant = checked_sub(constant, o.constant);
    return *this;
  }

  AffExpr &operator*=(Int k) {
    for (Int &c : coeffs)
      c = checked_mul(c, k);
    constant = checked_mul(constant, k);
    return *this;
  }

  friend AffExpr operator+(AffExpr a, const AffExpr &b) { return a += b; }
  friend AffExpr operator-(AffExpr a, const AffExpr &b) { return a -= b; }
  friend AffExpr operator*(AffExpr a, Int k) { return a *= k; }
  friend AffExpr operator*(Int k, AffExpr a) { return a *= k; }
  AffExpr operator-() const { return *this * Int{-1}; }

  /// Replace column `col` by `value` (which must not itself involve `col`).
  AffExpr substitute(std::size_t col, const AffExpr &value) const {
    assert(!value.involves(col));
    Int k = coeffs[col];
    if (k == 0)
      return *this;
    AffExpr out = *this;
    out.coeffs[col] = 0;
    out += value * k;
    return out;
  }

  Int evaluate(std::span<const Int> values) const {
    assert(values.size() >= coeffs.size());
    Int r = constant;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      if (coeffs[i] != 0)
        r = checked_add(r, checked_mul(coeffs[i], values[i]));
    return r;
  }

  /// New layout: column i of this expression moves to `mapping[i]` in a
  /// layout of `ncols` columns.
  AffExpr remap(std::span<const std::size_t> mapping, std::size_t ncols) const {
    AffExpr out(ncols, constant);
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      if (coeffs[i] != 0)
        out.coeffs[mapping[i]] = checked_add(out.coeffs[mapping[i]], coeffs[i]);
    return out;
  }

  /// Drop column `col`, which must have a zero coefficient.
  AffExpr erase_column(std::size_t col) const {
    assert(coeffs[col] == 0);
    AffExpr out = *this;
    out.coeffs.erase(out.coeffs.begin() + static_cast<std::ptrdiff_t>(col));
    return out;
  }

  AffExpr insert_columns(std::size_t at, std::size_t count) const {
    AffExpr out = *this;
    out.coeffs.insert(out.coeffs.begin() + static_cast<std::ptrdiff_t>(at),
                      count, 0);
    return out;
  }

  friend bool operator==(const AffExpr &, const AffExpr &) = default;
  friend auto operator<=>(const AffExpr &, const AffExpr &) = default;
};

/// Render `expr` with the given column names, ISL style: `32 * c0 + 31`,
/// `-n + 5`, `0`.
inline std::string to_string(const AffExpr &expr,
                             std::span<const std::string> names) {
  std::string out;
  auto term = [&](Int c, const std::string &name) {
    if (c == 0)
      return;
    bool neg = c < 0;
    Int mag = neg ? -c : c;
    if (out.empty())
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    if (mag != 1)
      out += std::to_string(mag) + " * ";
    out += name;
  };
  for (std::size_t i = 0; i < expr.coeffs.size(); ++i)
    term(expr.coeffs[i], names[i]);
  if (expr.constant != 0 || out.empty()) {
    if (out.empty())
      out = std::to_string(expr.constant);
    else if (expr.constant < 0)
      out += " - " + std::to_string(-expr.constant);
    else
      out += " + " + std::to_string(expr.constant);
  }
  return out;
}

} // namespace pbench
