#pragma once

#include "pbench/iset/constraint.hpp"

#include <cstdlib>

namespace pbench {

/// Rational Fourier-Motzkin elimination of column `col`. The column is kept
/// in the layout with a zero coefficient everywhere. Integer tightening of
/// the combined constraints is applied, which is sound for integer points.
/// Returns nullopt when the projection is (trivially) empty.
inline std::optional<ConstraintList> fm_eliminate(const ConstraintList &cs,
                                                  std::size_t col) {
  // Prefer an equality: substitution is exact on rationals.
  const Constraint *pivot = nullptr;
  for (const auto &c : cs) {
    if (!c.is_eq() || c[col] == 0)
      continue;
    if (!pivot || std::abs(c[col]) < std::abs((*pivot)[col]))
      pivot = &c;
  }
  ConstraintList out;
  if (pivot) {
    Int a = (*pivot)[col];
    Int mag = a < 0 ? -a : a;
    Int sgn = a < 0 ? -1 : 1;
    for (const auto &c : cs) {
      if (&c == pivot)
        continue;
      Int b = c[col];
      if (b == 0) {
        out.push_back(c);
        continue;
      }
      Constraint r = c;
      r.expr *= mag;
      r.expr -= pivot->expr * checked_mul(sgn, b);
      out.push_back(std::move(r));
    }
    return simplify(std::move(out));
  }

  std::vector<const Constraint *> lower, upper;
  for (const auto &c : cs) {
    if (c[col] > 0)
      lower.push_back(&c);
    else if (c[col] < 0)
      upper.push_back(&c);
    else
      out.push_back(c);
  }
  for (const auto *lo : lower) {
    for (const auto *up : upper) {
      Int a = (*lo)[col];
      Int b = -(*up)[col];
      Int g = gcd(a, b);
      Constraint r = Constraint::geq(lo->expr * (b / g) + up->expr * (a / g));
      out.push_back(std::move(r));
    }
  }
  return simplify(std::move(out));
}

/// True when the constraints have no rational solution (hence no integer
/// one). A false result does not prove integer non-emptiness.
inline bool rationally_empty(const ConstraintList &cs) {
  auto cur = simplify(cs);
  if (!cur)
    return true;
  if (cur->empty())
    return false;
  std::size_t ncols = cur->front().size();
  for (std::size_t col = 0; col < ncols; ++col) {
    cur = fm_eliminate(*cur, col);
    if (!cur)
      return true;
  }
  return false;
}

/// Sound implication test: true only if every rational solution of `cs`
/// satisfies `c`.
inline bool implies(const ConstraintList &cs, const Constraint &c) {
  auto refutes = [&](AffExpr e) {
    // cs and e <= -1
    ConstraintList probe = cs;
    AffExpr neg = -e;
    neg.constant = checked_sub(neg.constant, 1);
    probe.push_back(Constraint::geq(std::move(neg)));
    return rationally_empty(probe);
  };
  if (c.is_eq())
    return refutes(c.expr) && refutes(-c.expr);
  return refutes(c.expr);
}

} // namespace pbench
