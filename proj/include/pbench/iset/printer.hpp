#pragma once

#include "pbench/iset/basic.hpp"

#include <set>
#include <sstream>

namespace pbench {

namespace detail {

/// Column names with collisions resolved, so the text reparses to the same
/// column layout.
inline std::vector<std::string> printable_names(const Polyhedron &p) {
  auto names = p.column_names();
  std::set<std::string> seen;
  for (auto &n : names) {
    std::string base = n.empty() ? std::string("_d") : n;
    std::string cand = base;
    for (int k = 1; seen.count(cand); ++k)
      cand = base + "_" + std::to_string(k);
    n = cand;
    seen.insert(n);
  }
  return names;
}

inline std::string tuple_text(const std::string &name,
                              std::span<const std::string> dims) {
  std::string out = name + "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i)
      out += ", ";
    out += dims[i];
  }
  return out + "]";
}

inline std::string piece_text(const Polyhedron &p) {
  auto names = printable_names(p);
  std::span<const std::string> all(names);
  const Space &sp = p.space;
  std::string out;
  std::size_t np = sp.n_params();
  if (sp.is_map()) {
    out += tuple_text(sp.in->name, all.subspan(np, sp.n_in()));
    out += " -> ";
  }
  out += tuple_text(sp.out.name, all.subspan(np + sp.n_in(), sp.n_out()));
  if (p.constraints.empty() && p.exists.empty())
    return out;
  out += " : ";
  if (!p.exists.empty()) {
    out += "exists ";
    auto ex = all.subspan(sp.n_cols());
    for (std::size_t i = 0; i < ex.size(); ++i)
      out += (i ? ", " : "") + ex[i];
    out += " : ";
  }
  if (p.constraints.empty()) {
    out += "0 = 0";
    return out;
  }
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    if (i)
      out += " and ";
    const auto &c = p.constraints[i];
    out += to_string(c.expr, names);
    out += c.is_eq() ? " = 0" : " >= 0";
  }
  return out;
}

template <class Range> std::string union_text(const Range &pieces) {
  std::vector<std::string> params;
  for (const auto &p : pieces)
    params = merge_params(params, p.space.params);
  std::string out;
  if (!params.empty()) {
    out += "[";
    for (std::size_t i = 0; i < params.size(); ++i)
      out += (i ? ", " : "") + params[i];
    out += "] -> ";
  }
  out += "{ ";
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (i)
      out += "; ";
    out += piece_text(pieces[i]);
  }
  out += " }";
  return out;
}

} // namespace detail

/// Script-syntax rendering, e.g. `[n] -> { S[i] : i >= 0 and -i + n - 1 >= 0 }`.
inline std::string to_string(const BasicSet &s) {
  return detail::union_text(std::vector<BasicSet>{s});
}
inline std::string to_string(const BasicMap &m) {
  return detail::union_text(std::vector<BasicMap>{m});
}
inline std::string to_string(const USet &s) { return detail::union_text(s.pieces); }
inline std::string to_string(const UMap &m) { return detail::union_text(m.pieces); }

} // namespace pbench
