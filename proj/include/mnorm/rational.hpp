#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mn {

// Exact arithmetic everywhere except the Lp norm, which is documented as
// floating point. All counting bounds and certificates are checked in Rat.
using Rat = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

// Number of bits needed to write n in binary; bit_length(0) == 0.
inline int bit_length(std::uint64_t n) {
  int b = 0;
  while (n) {
    ++b;
    n >>= 1;
  }
  return b;
}

// Smallest t >= 0 with 2^t >= n. Requires n >= 1.
inline int ceil_log2(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("ceil_log2: n must be positive");
  return bit_length(n - 1);
}

inline int floor_log2(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("floor_log2: n must be positive");
  return bit_length(n) - 1;
}

// 2^e as an exact rational; e may be negative.
inline Rat pow2(int e) {
  BigInt p = BigInt(1) << (e >= 0 ? e : -e);
  return e >= 0 ? Rat(p) : Rat(1, p);
}

// Smallest t >= 0 with 2^t >= x. Requires x > 0.
inline int ceil_log2(const Rat& x) {
  if (x <= 0) throw std::invalid_argument("ceil_log2: x must be positive");
  int t = 0;
  while (pow2(t) < x) ++t;
  return t;
}

// Largest e >= 0 with 2^e <= x. Requires x >= 1.
inline int floor_log2(const Rat& x) {
  if (x < 1) throw std::invalid_argument("floor_log2: x must be at least 1");
  int e = 0;
  while (pow2(e + 1) <= x) ++e;
  return e;
}

// b^e with integral e (negative allowed; b != 0 then).
inline Rat rat_pow(const Rat& b, long e) {
  if (e < 0) {
    if (b == 0) throw std::invalid_argument("rat_pow: 0 to negative power");
    return 1 / rat_pow(b, -e);
  }
  Rat r = 1, base = b;
  while (e) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

inline std::string rat_to_string(const Rat& q) { return q.str(); }

// Accepts "a", "-a", "a/b". Throws on anything else or on zero denominator.
inline Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("rat_from_string: empty string");
  try {
    Rat q(s);
    return q;
  } catch (const std::exception&) {
    throw std::invalid_argument("rat_from_string: cannot parse '" + s + "'");
  }
}

}  // namespace mn
