#pragma once

#include "pbench/error.hpp"

#include <cstdint>
#include <numeric>

namespace pbench {

using Int = std::int64_t;

// Checked arithmetic: every overflow is reported, never wrapped.
inline Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r))
    throw Error(Errc::Overflow, "integer overflow in addition");
  return r;
}

inline Int checked_sub(Int a, Int b) {
  Int r;
  if (__builtin_sub_overflow(a, b, &r))
    throw Error(Errc::Overflow, "integer overflow in subtraction");
  return r;
}

inline Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r))
    throw Error(Errc::Overflow, "integer overflow in multiplication");
  return r;
}

inline Int checked_neg(Int a) { return checked_sub(0, a); }

inline Int gcd(Int a, Int b) {
  if (a == INT64_MIN || b == INT64_MIN)
    throw Error(Errc::Overflow, "gcd of INT64_MIN");
  return std::gcd(a, b);
}

inline Int lcm(Int a, Int b) {
  if (a == 0 || b == 0)
    return 0;
  Int g = gcd(a, b);
  return checked_mul(a / g < 0 ? -(a / g) : a / g, b < 0 ? -b : b);
}

/// Floor division for d > 0, exact for negative numerators.
inline Int floor_div(Int n, Int d) {
  Int q = n / d;
  if ((n % d != 0) && ((n < 0) != (d < 0)))
    --q;
  return q;
}

inline Int ceil_div(Int n, Int d) {
  Int q = n / d;
  if ((n % d != 0) && ((n < 0) == (d < 0)))
    ++q;
  return q;
}

} // namespace pbench
