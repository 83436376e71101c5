#pragma once

#include "pbench/iset/basic.hpp"

namespace pbench {

/// For one schedule piece: each input dim as an affine expression over the
/// piece's parameters followed by its output dims.
struct PieceInverse {
  std::vector<AffExpr> in_dims;
};

using InverseTable = std::vector<PieceInverse>;

namespace detail {

inline void reduce_row(AffExpr &row) {
  Int g = gcd(row.content(), row.constant);
  if (g > 1) {
    for (Int &v : row.coeffs)
      v /= g;
    row.constant /= g;
  }
}

} // namespace detail

/// Recover every input dim of a normalized map piece from its equalities.
/// Throws NotInvertibleAsSchedule when some input dim is underdetermined or
/// only determined up to a non-unit divisor.
inline PieceInverse invert_piece(const BasicMap &m0) {
  BasicMap m = normalize(m0);
  const Space &sp = m.space;
  std::size_t np = sp.n_params(), n_in = sp.n_in(), n_out = sp.n_out();

  std::vector<AffExpr> rows;
  for (const auto &c : m.constraints)
    if (c.is_eq())
      rows.push_back(c.expr);

  // Gauss-Jordan on the input columns with fraction-free row operations.
  std::vector<std::optional<std::size_t>> pivot_of(n_in);
  std::vector<bool> used(rows.size(), false);
  for (std::size_t k = 0; k < n_in; ++k) {
    std::size_t col = sp.in_col(k);
    std::optional<std::size_t> best;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (used[r] || rows[r][col] == 0)
        continue;
      if (!best || std::abs(rows[r][col]) < std::abs(rows[*best][col]))
        best = r;
    }
    if (!best)
      continue;
    used[*best] = true;
    pivot_of[k] = *best;
    const AffExpr &piv = rows[*best];
    Int p = piv[col];
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == *best || rows[r][col] == 0)
        continue;
      Int b = rows[r][col];
      Int g = gcd(p, b);
      rows[r] = rows[r] * (p / g) - piv * (b / g);
      detail::reduce_row(rows[r]);
    }
  }

  PieceInverse inv;
  for (std::size_t k = 0; k < n_in; ++k) {
    const std::string &name = sp.in->dims[k];
    if (!pivot_of[k])
      throw Error(Errc::NotInvertibleAsSchedule,
                  "input dim '" + name + "' of " + sp.in->name +
                      " is not determined by the schedule");
    const AffExpr &row = rows[*pivot_of[k]];
    std::size_t col = sp.in_col(k);
    Int p = row[col];
    for (std::size_t j = 0; j < n_in; ++j)
      if (j != k && row[sp.in_col(j)] != 0)
        throw Error(Errc::NotInvertibleAsSchedule,
                    "input dim '" + name + "' is coupled to another input dim");
    // p * x + rest = 0, rest over params and output dims.
    AffExpr value(np + n_out, 0);
    value.constant = row.constant;
    for (std::size_t i = 0; i < np; ++i)
      value[i] = row[i];
    for (std::size_t i = 0; i < n_out; ++i)
      value[np + i] = row[sp.out_col(i)];
    Int g = gcd(value.content(), value.constant);
    if (g % p != 0)
      throw Error(Errc::NotInvertibleAsSchedule,
                  "input dim '" + name + "' is not an integral function of the "
                  "schedule dims");
    Int scale = -p;
    for (Int &v : value.coeffs)
      v /= scale;
    value.constant /= scale;
    inv.in_dims.push_back(std::move(value));
  }
  return inv;
}

inline InverseTable schedule_check(const UMap &m) {
  InverseTable table;
  table.reserve(m.pieces.size());
  for (const auto &piece : m.pieces)
    table.push_back(invert_piece(piece));
  return table;
}

} // namespace pbench
