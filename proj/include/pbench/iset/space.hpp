#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace pbench {

/// A named tuple such as `STM_3DS_run[k,j,i]`. Unnamed tuples have an empty
/// name.
struct Tuple {
  std::string name;
  std::vector<std::string> dims;

  std::size_t arity() const { return dims.size(); }
  /// Name and arity agree; dimension names are positional placeholders.
  bool same_shape(const Tuple &o) const {
    return name == o.name && dims.size() == o.dims.size();
  }
  friend bool operator==(const Tuple &, const Tuple &) = default;
};

/// Column layout shared by sets and maps: parameters, then input dims (maps
/// only), then output dims. Sets keep their tuple in `out`.
struct Space {
  std::vector<std::string> params;
  std::optional<Tuple> in;
  Tuple out;

  static Space set(std::vector<std::string> params, Tuple tuple) {
    return {std::move(params), std::nullopt, std::move(tuple)};
  }
  static Space map(std::vector<std::string> params, Tuple in, Tuple out) {
    return {std::move(params), std::move(in), std::move(out)};
  }

  bool is_map() const { return in.has_value(); }
  std::size_t n_params() const { return params.size(); }
  std::size_t n_in() const { return in ? in->arity() : 0; }
  std::size_t n_out() const { return out.arity(); }
  std::size_t n_cols() const { return n_params() + n_in() + n_out(); }

  std::size_t param_col(std::size_t i) const { return i; }
  std::size_t in_col(std::size_t i) const { return n_params() + i; }
  std::size_t out_col(std::size_t i) const { return n_params() + n_in() + i; }

  /// The tuple a domain restriction or intersection is matched against.
  const Tuple &domain() const { return in ? *in : out; }

  std::optional<std::size_t> find_param(const std::string &p) const {
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i] == p)
        return i;
    return std::nullopt;
  }

  std::vector<std::string> column_names() const {
    std::vector<std::string> names = params;
    if (in)
      names.insert(names.end(), in->dims.begin(), in->dims.end());
    names.insert(names.end(), out.dims.begin(), out.dims.end());
    return names;
  }

  friend bool operator==(const Space &, const Space &) = default;
};

/// Ordered union of two parameter lists (first list's order, then new
/// names from the second).
inline std::vector<std::string> merge_params(const std::vector<std::string> &a,
                                             const std::vector<std::string> &b) {
  std::vector<std::string> out = a;
  for (const auto &p : b)
    if (std::find(out.begin(), out.end(), p) == out.end())
      out.push_back(p);
  return out;
}

} // namespace pbench
