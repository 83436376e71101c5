#pragma once

// Loop transformations expressed as schedule maps. Each map is applied to
// a domain with restrict_domain (or composed after an existing schedule)
// and handed to codegen_map.

#include "pbench/iset/schedule.hpp"
#include "pbench/iset/script.hpp"

#include <set>

namespace pbench {

namespace detail {

inline std::vector<std::string> indexed(const char *prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(prefix + std::to_string(i));
  return out;
}

} // namespace detail

/// `{ S[i0, ..., ik] -> S[i_perm(0), ..., i_perm(k)] }`.
inline BasicMap interchange(const std::string &stmt, std::size_t arity,
                            const std::vector<std::size_t> &perm) {
  std::vector<bool> seen(arity, false);
  bool ok = perm.size() == arity;
  for (std::size_t p : perm) {
    ok = ok && p < arity && !seen[p];
    if (p < arity)
      seen[p] = true;
  }
  if (!ok)
    throw Error(Errc::NotAPermutation, "permutation does not reorder all " +
                                           std::to_string(arity) + " dims exactly once");
  BasicMap m;
  m.space = Space::map({}, Tuple{stmt, detail::indexed("i", arity)},
                       Tuple{stmt, detail::indexed("o", arity)});
  std::size_t n = m.space.n_cols();
  for (std::size_t k = 0; k < arity; ++k) {
    AffExpr e = AffExpr::var(n, m.space.out_col(k));
    e[m.space.in_col(perm[k])] = -1;
    m.constraints.push_back(Constraint::eq(std::move(e)));
  }
  return normalize(std::move(m));
}

/// Rectangular tiling of `dims` with `sizes`: one tile iterator per tiled
/// dim (in dim order), followed by all point dims. Tiling a subset of the
/// dims gives partial blocking.
inline BasicMap tile(const std::string &stmt, std::size_t arity, std::vector<std::size_t> dims,
                     std::vector<Int> sizes) {
  if (dims.size() != sizes.size() || dims.empty())
    throw Error(Errc::BadTileSize, "tile dims and sizes must pair up");
  std::set<std::size_t> distinct(dims.begin(), dims.end());
  if (distinct.size() != dims.size())
    throw Error(Errc::BadTileSize, "tiled dims must be distinct");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (sizes[i] <= 0)
      throw Error(Errc::BadTileSize, "tile size " + std::to_string(sizes[i]) + " is not positive");
    if (dims[i] >= arity)
      throw Error(Errc::BadTileSize, "dim " + std::to_string(dims[i]) + " out of range");
  }
  std::vector<std::size_t> order(dims.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return dims[a] < dims[b]; });

  std::size_t nt = dims.size();
  std::vector<std::string> out = detail::indexed("t", nt);
  auto points = detail::indexed("o", arity);
  out.insert(out.end(), points.begin(), points.end());
  BasicMap m;
  m.space = Space::map({}, Tuple{stmt, detail::indexed("i", arity)}, Tuple{stmt, out});
  m.exists = detail::indexed("r", nt);
  std::size_t n = m.n_cols();
  for (std::size_t k = 0; k < arity; ++k) {
    AffExpr e = AffExpr::var(n, m.space.out_col(nt + k));
    e[m.space.in_col(k)] = -1;
    m.constraints.push_back(Constraint::eq(std::move(e)));
  }
  for (std::size_t t = 0; t < nt; ++t) {
    std::size_t d = dims[order[t]];
    Int size = sizes[order[t]];
    std::size_t r = m.exists_col(t);
    // i_d = size * t + r, 0 <= r < size
    AffExpr def = AffExpr::var(n, m.space.in_col(d));
    def[m.space.out_col(t)] = -size;
    def[r] = -1;
    m.constraints.push_back(Constraint::eq(std::move(def)));
    m.constraints.push_back(Constraint::geq(AffExpr::var(n, r)));
    AffExpr hi = AffExpr::var(n, r, -1);
    hi.constant = size - 1;
    m.constraints.push_back(Constraint::geq(std::move(hi)));
  }
  return normalize(std::move(m));
}

/// Split a one-dimensional domain into `factor` blocks of `block_param`
/// elements and fuse them: S[i] in block b goes to [i - b*h, b]. With
/// factor 1 this is the identity schedule.
inline UMap interleave(const std::string &stmt, std::size_t arity, Int factor,
                       const std::string &block_param = "h") {
  if (arity != 1)
    throw Error(Errc::UnsupportedArity, "interleaving needs a one-dimensional domain, got " +
                                            std::to_string(arity) + " dims");
  if (factor < 1)
    throw Error(Errc::InvalidConfig, "interleave factor must be positive");
  if (factor == 1)
    return UMap{{interchange(stmt, 1, {0})}};
  UMap u;
  for (Int b = 0; b < factor; ++b) {
    BasicMap m;
    m.space = Space::map({block_param}, Tuple{stmt, {"i"}}, Tuple{stmt, {"o0", "o1"}});
    std::size_t n = m.space.n_cols();
    std::size_t h = m.space.param_col(0), i = m.space.in_col(0);
    // o0 = i - b*h
    AffExpr o0 = AffExpr::var(n, m.space.out_col(0));
    o0[i] = -1;
    o0[h] = b;
    m.constraints.push_back(Constraint::eq(std::move(o0)));
    AffExpr o1 = AffExpr::var(n, m.space.out_col(1));
    o1.constant = -b;
    m.constraints.push_back(Constraint::eq(std::move(o1)));
    // b*h <= i <= (b+1)*h - 1
    AffExpr lo = AffExpr::var(n, i);
    lo[h] = -b;
    m.constraints.push_back(Constraint::geq(std::move(lo)));
    AffExpr hi = AffExpr::var(n, i, -1);
    hi[h] = b + 1;
    hi.constant = -1;
    m.constraints.push_back(Constraint::geq(std::move(hi)));
    u.pieces.push_back(normalize(std::move(m)));
  }
  return u;
}

/// Parameter facts that hold whenever an interleaving is run:
/// `extent = factor * block`.
inline BasicSet interleave_context(Int factor, const std::string &extent_param = "n",
                                   const std::string &block_param = "h") {
  BasicSet s;
  s.space = Space::set({extent_param, block_param}, Tuple{});
  AffExpr e(2);
  e[0] = 1;
  e[1] = -factor;
  s.constraints.push_back(Constraint::eq(std::move(e)));
  return s;
}

// ---------------------------------------------------------------------------
// Command-line transform specs: `interchange=1,0`, `tile=0:32,1:64,2:16`,
// `interleave=2`.

struct TransformSpec {
  enum class Kind { Interchange, Tile, Interleave };
  Kind kind;
  std::vector<std::size_t> dims;  ///< permutation, or tiled dims
  std::vector<Int> sizes;         ///< tile sizes
  Int factor = 1;                 ///< interleave factor
  std::string text;               ///< original spelling
};

namespace detail {

inline Int parse_int(const std::string &s, const std::string &ctx) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception &) {
    pos = std::string::npos;
  }
  if (pos != s.size() || s.empty())
    throw Error(Errc::InvalidConfig, "bad integer '" + s + "' in '" + ctx + "'");
  return v;
}

inline std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

} // namespace detail

inline TransformSpec parse_transform(const std::string &text) {
  auto eq = text.find('=');
  if (eq == std::string::npos)
    throw Error(Errc::InvalidConfig, "transform '" + text + "' needs the form kind=args");
  std::string kind = text.substr(0, eq), args = text.substr(eq + 1);
  TransformSpec t;
  t.text = text;
  if (kind == "interchange") {
    t.kind = TransformSpec::Kind::Interchange;
    for (const auto &a : detail::split(args, ','))
      t.dims.push_back(static_cast<std::size_t>(detail::parse_int(a, text)));
  } else if (kind == "tile") {
    t.kind = TransformSpec::Kind::Tile;
    for (const auto &a : detail::split(args, ',')) {
      auto parts = detail::split(a, ':');
      if (parts.size() != 2)
        throw Error(Errc::InvalidConfig, "tile entries are dim:size, got '" + a + "'");
      t.dims.push_back(static_cast<std::size_t>(detail::parse_int(parts[0], text)));
      t.sizes.push_back(detail::parse_int(parts[1], text));
    }
  } else if (kind == "interleave") {
    t.kind = TransformSpec::Kind::Interleave;
    t.factor = detail::parse_int(args, text);
  } else {
    throw Error(Errc::InvalidConfig, "unknown transform '" + kind + "'");
  }
  return t;
}

/// A derived runtime parameter, e.g. `h = n / 2` for an interleaving.
struct DerivedParam {
  std::string name;
  std::string extent_param;
  Int divisor;
  friend bool operator==(const DerivedParam &, const DerivedParam &) = default;
};

struct TransformedSchedule {
  Value schedule;
  std::optional<BasicSet> context;
  std::vector<DerivedParam> derived;
};

/// Apply `specs` in order to a run schedule (a domain set, or a schedule map
/// whose image is rescheduled).
inline TransformedSchedule apply_transforms(const Value &run,
                                            const std::vector<TransformSpec> &specs,
                                            const std::string &extent_param = "n") {
  TransformedSchedule out{run, std::nullopt, {}};
  if (specs.empty())
    return out;

  // Current image tuple that the next transform acts on.
  Tuple image;
  std::optional<UMap> acc;
  if (is_map(run)) {
    const UMap &m = std::get<UMap>(run);
    if (m.empty())
      return out;
    image = m.pieces[0].out_tuple();
    acc = m;
  } else {
    const USet &s = std::get<USet>(run);
    if (s.empty())
      return out;
    image = s.pieces[0].tuple();
    for (const auto &p : s.pieces)
      if (!p.tuple().same_shape(image))
        throw Error(Errc::UnsupportedArity, "transforms need a single-statement run schedule");
  }

  for (const auto &t : specs) {
    UMap step;
    switch (t.kind) {
    case TransformSpec::Kind::Interchange:
      step.pieces.push_back(interchange(image.name, image.arity(), t.dims));
      break;
    case TransformSpec::Kind::Tile:
      step.pieces.push_back(tile(image.name, image.arity(), t.dims, t.sizes));
      break;
    case TransformSpec::Kind::Interleave: {
      if (t.factor > 1) {
        std::string h = "h";
        if (!out.derived.empty())
          h += std::to_string(out.derived.size());
        step = interleave(image.name, image.arity(), t.factor, h);
        out.derived.push_back({h, extent_param, t.factor});
        BasicSet ctx = interleave_context(t.factor, extent_param, h);
        out.context = out.context ? intersect(*out.context, ctx) : ctx;
      } else {
        step = interleave(image.name, image.arity(), 1);
      }
      break;
    }
    }
    acc = acc ? compose(*acc, step) : step;
    image = step.pieces.front().out_tuple();
  }
  if (is_map(run))
    out.schedule = *acc;
  else
    out.schedule = restrict_domain(*acc, std::get<USet>(run));
  return out;
}

} // namespace pbench
