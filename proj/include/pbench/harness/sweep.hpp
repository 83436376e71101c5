#pragma once

// Working-set sweeps: problem sizes laid out geometrically from half of
// L1 to four times the last-level cache, with a minimum number of sizes in
// every capacity band.

#include "pbench/driver/driver.hpp"
#include "pbench/harness/machine.hpp"

#include <cmath>

namespace pbench {

struct RunConfig {
  std::string pattern;
  TemplateKind tmpl;
  std::vector<std::string> transforms;
  Int n = 1;
  Int threads = 1;
  Int ntimes = 1;
  std::vector<std::string> counters;
  Int warmup = 1;
  Int repeats = 1;

  void validate(Int min_n = 1) const {
    if (n < min_n)
      throw Error(Errc::InvalidConfig, "n = " + std::to_string(n) + " is below the pattern's "
                                       "smallest extent " + std::to_string(min_n));
    if (threads < 1 || ntimes < 1 || repeats < 1 || warmup < 0)
      throw Error(Errc::InvalidConfig, "threads, ntimes, and repeats must be positive");
  }
  friend bool operator==(const RunConfig &, const RunConfig &) = default;
};

/// Bytes of `total` that compete for one instance of `level`: a core's
/// share for private levels, the share of all threads on one domain for
/// shared levels.
inline Int level_bytes(const CacheLevel &level, const MachineDesc &m, Int total, Int threads) {
  Int per_thread = total / threads;
  if (level.scope == Scope::Core)
    return per_thread;
  return checked_mul(per_thread, std::min(threads, m.cores_per_domain));
}

/// Smallest level that holds footprint(n), or "DRAM".
inline std::string band_of(const MachineDesc &m, const FootprintModel &fp, Int n, Int threads) {
  Int total = fp(n, threads);
  for (const auto &l : m.levels)
    if (level_bytes(l, m, total, threads) <= l.capacity)
      return l.name;
  return "DRAM";
}

struct Band {
  std::string name;
  Int first_n = 0; ///< inclusive
  Int last_n = 0;  ///< inclusive; last_n < first_n means empty
  Int capacity = 0;

  bool empty() const { return last_n < first_n; }
};

struct SweepOptions {
  Int points_per_level = 4;
  std::vector<Int> sizes; ///< explicit sizes bypass planning
  Int threads = 1;
  Int ntimes = 1000;
  Int min_n = 1;
  Int n_multiple = 1; ///< every planned n is a multiple of this
  RunConfig base;     ///< pattern, template, transforms, counters, ...
};

namespace detail {

/// Largest n in [lo, hi] with pred(n) true, for a pred that holds on a
/// prefix; lo - 1 if none.
template <class Pred> Int last_true(Int lo, Int hi, Pred pred) {
  if (lo > hi || !pred(lo))
    return lo - 1;
  while (lo < hi) {
    Int mid = lo + (hi - lo + 1) / 2;
    if (pred(mid))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

inline Int round_up(Int v, Int m) { return ceil_div(v, m) * m; }
inline Int round_down(Int v, Int m) { return floor_div(v, m) * m; }

/// `count` sizes spread geometrically over [a, b], multiples of `m`.
inline std::vector<Int> ladder(Int a, Int b, Int count, Int m) {
  a = round_up(a, m);
  b = round_down(b, m);
  std::vector<Int> out;
  if (a > b)
    return out;
  if ((b - a) / m + 1 <= count) {
    for (Int v = a; v <= b; v += m)
      out.push_back(v);
    return out;
  }
  double ratio = static_cast<double>(b) / static_cast<double>(a);
  std::set<Int> picks;
  for (Int j = 0; j < count; ++j) {
    double x = static_cast<double>(a) * std::pow(ratio, static_cast<double>(j) /
                                                            static_cast<double>(count - 1));
    picks.insert(std::clamp(round_down(static_cast<Int>(std::llround(x)), m), a, b));
  }
  // Rounding can merge neighbours at the low end; fill from the gaps.
  while (static_cast<Int>(picks.size()) < count) {
    std::vector<Int> v(picks.begin(), picks.end());
    Int best = 0, gap = -1;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      if (v[i + 1] - v[i] > gap)
        gap = v[i + 1] - v[i], best = v[i];
    if (gap <= m)
      break;
    picks.insert(best + round_down(gap / 2, m));
  }
  return {picks.begin(), picks.end()};
}

} // namespace detail

/// n ranges per band: levels in order, then DRAM up to 4x the LLC. The
/// first band starts where the footprint reaches half of L1.
inline std::vector<Band> plan_bands(const MachineDesc &m, const FootprintModel &fp, Int threads,
                                    Int min_n) {
  m.validate();
  auto fits = [&](const CacheLevel &l, Int factor) {
    return [&, factor](Int n) {
      return level_bytes(l, m, fp(n, threads), threads) <= checked_mul(l.capacity, factor);
    };
  };
  const CacheLevel &l1 = m.levels.front();
  if (!fits(l1, 1)(min_n))
    throw Error(Errc::FootprintTooSmall,
                "the footprint at the smallest n (" + std::to_string(min_n) + ") already exceeds " +
                    l1.name + " (" + std::to_string(l1.capacity) + " bytes)");
  // Search bound: grow until 4x LLC is exceeded.
  Int hi = std::max<Int>(min_n, 1);
  while (fits(m.llc(), 4)(hi))
    hi = checked_mul(hi, 2);

  // First n whose L1 share reaches half of L1.
  Int start = detail::last_true(min_n, hi, [&](Int n) {
                return 2 * level_bytes(l1, m, fp(n, threads), threads) < l1.capacity;
              }) + 1;
  start = std::max(start, min_n);

  std::vector<Band> bands;
  Int prev_last = start - 1;
  for (const auto &l : m.levels) {
    Int last = detail::last_true(min_n, hi, fits(l, 1));
    bands.push_back({l.name, prev_last + 1, last, l.capacity});
    prev_last = std::max(prev_last, last);
  }
  Int dram_last = detail::last_true(min_n, hi, fits(m.llc(), 4));
  bands.push_back({"DRAM", prev_last + 1, dram_last, checked_mul(m.llc().capacity, 4)});
  return bands;
}

/// One RunConfig per planned size, n strictly increasing.
inline std::vector<RunConfig> plan_sweep(const MachineDesc &m, const FootprintModel &fp,
                                         const SweepOptions &opts) {
  std::vector<Int> sizes;
  if (!opts.sizes.empty()) {
    sizes = opts.sizes;
  } else {
    if (opts.points_per_level < 1)
      throw Error(Errc::InvalidConfig, "points_per_level must be positive");
    std::set<Int> all;
    for (const auto &b : plan_bands(m, fp, opts.threads, opts.min_n)) {
      if (b.empty())
        continue;
      for (Int n : detail::ladder(b.first_n, b.last_n, opts.points_per_level, opts.n_multiple))
        all.insert(n);
    }
    sizes.assign(all.begin(), all.end());
  }
  std::vector<RunConfig> out;
  for (Int n : sizes) {
    RunConfig c = opts.base;
    c.n = n;
    c.threads = opts.threads;
    c.ntimes = opts.ntimes;
    out.push_back(std::move(c));
  }
  return out;
}

} // namespace pbench
