#pragma once

#include "pbench/iset/aff_expr.hpp"

#include <algorithm>
#include <optional>

namespace pbench {

struct Constraint {
  enum class Kind { EqZero, GeqZero };

  AffExpr expr;
  Kind kind = Kind::GeqZero;

  static Constraint geq(AffExpr e) { return {std::move(e), Kind::GeqZero}; }
  static Constraint eq(AffExpr e) { return {std::move(e), Kind::EqZero}; }
  /// The canonical unsatisfiable constraint `-1 >= 0`.
  static Constraint falsum(std::size_t ncols) {
    return geq(AffExpr(ncols, -1));
  }

  bool is_eq() const { return kind == Kind::EqZero; }
  std::size_t size() const { return expr.size(); }
  Int operator[](std::size_t c) const { return expr[c]; }

  bool holds(std::span<const Int> values) const {
    Int v = expr.evaluate(values);
    return is_eq() ? v == 0 : v >= 0;
  }

  friend bool operator==(const Constraint &, const Constraint &) = default;
  friend auto operator<=>(const Constraint &a, const Constraint &b) {
    if (auto c = a.kind <=> b.kind; c != 0)
      return c;
    return a.expr <=> b.expr;
  }
};

enum class Tightened { Kept, AlwaysTrue, Infeasible };

/// Divide out the coefficient gcd. Inequalities round the constant down
/// (integer tightening); equalities whose gcd does not divide the constant
/// are infeasible. Equalities get a positive leading coefficient.
inline Tightened tighten(Constraint &c) {
  Int g = c.expr.content();
  if (g == 0) {
    Int k = c.expr.constant;
    bool ok = c.is_eq() ? k == 0 : k >= 0;
    return ok ? Tightened::AlwaysTrue : Tightened::Infeasible;
  }
  if (c.is_eq()) {
    if (c.expr.constant % g != 0)
      return Tightened::Infeasible;
    for (Int &v : c.expr.coeffs)
      v /= g;
    c.expr.constant /= g;
    auto lead = std::find_if(c.expr.coeffs.begin(), c.expr.coeffs.end(),
                             [](Int v) { return v != 0; });
    if (*lead < 0)
      c.expr *= -1;
  } else if (g != 1) {
    for (Int &v : c.expr.coeffs)
      v /= g;
    c.expr.constant = floor_div(c.expr.constant, g);
  }
  return Tightened::Kept;
}

using ConstraintList = std::vector<Constraint>;

/// Tighten every constraint, drop tautologies, sort, deduplicate and keep
/// only the tightest of parallel inequalities. Returns nullopt when a
/// constraint is trivially infeasible.
inline std::optional<ConstraintList> simplify(ConstraintList cs) {
  ConstraintList out;
  out.reserve(cs.size());
  for (auto &c : cs) {
    switch (tighten(c)) {
    case Tightened::Infeasible:
      return std::nullopt;
    case Tightened::AlwaysTrue:
      break;
    case Tightened::Kept:
      out.push_back(std::move(c));
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  // Parallel inequalities: same coefficients, keep the smallest constant
  // (sorted ascending by constant, so the first of a run wins).
  ConstraintList pruned;
  pruned.reserve(out.size());
  for (auto &c : out) {
    if (!pruned.empty() && !c.is_eq() && !pruned.back().is_eq() &&
        pruned.back().expr.coeffs == c.expr.coeffs)
      continue;
    pruned.push_back(std::move(c));
  }
  // e >= 0 and -e >= 0 on the same coefficients: check for contradiction
  // (e >= a and e <= b with a > b).
  for (std::size_t i = 0; i < pruned.size(); ++i) {
    if (pruned[i].is_eq())
      continue;
    AffExpr neg = -pruned[i].expr;
    for (std::size_t j = i + 1; j < pruned.size(); ++j) {
      if (pruned[j].is_eq() || pruned[j].expr.coeffs != neg.coeffs)
        continue;
      if (checked_add(pruned[i].expr.constant, pruned[j].expr.constant) < 0)
        return std::nullopt;
    }
  }
  return pruned;
}

} // namespace pbench
