#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "perco/errors.hpp"

namespace perco {

// Vertex weights are exact integers in units of q^-H (1 for the unit-weight
// family). Per-cluster sums fit 128 bits because window construction rejects
// configurations with total weight above 2^100 units.
using u128 = unsigned __int128;
using bigz = boost::multiprecision::cpp_int;
using bigq = boost::multiprecision::cpp_rational;

inline bigz to_bigz(u128 v) {
  bigz hi = static_cast<std::uint64_t>(v >> 64);
  return (hi << 64) | static_cast<std::uint64_t>(v);
}

inline std::string u128_str(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<unsigned>(v % 10)));
    v /= 10;
  }
  return std::string(s.rbegin(), s.rend());
}

inline u128 ipow128(std::uint64_t base, std::uint32_t exp) {
  u128 r = 1;
  for (std::uint32_t i = 0; i < exp; ++i) {
    u128 next = r * base;
    if (base != 0 && next / base != r)
      throw BudgetError("weight precision budget exceeded (128-bit overflow)");
    r = next;
  }
  return r;
}

// exact nonnegative fraction of 128-bit unit counts
struct UnitRatio {
  u128 num = 0;
  u128 den = 1;
};

// -1 / 0 / +1; exact via arbitrary-precision cross multiplication
inline int cmp(const UnitRatio& a, const UnitRatio& b) {
  bigz lhs = to_bigz(a.num) * to_bigz(b.den);
  bigz rhs = to_bigz(b.num) * to_bigz(a.den);
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}

inline bool operator==(const UnitRatio& a, const UnitRatio& b) { return cmp(a, b) == 0; }
inline bool operator<(const UnitRatio& a, const UnitRatio& b) { return cmp(a, b) < 0; }
inline bool operator<=(const UnitRatio& a, const UnitRatio& b) { return cmp(a, b) <= 0; }

inline double to_double(const UnitRatio& r) {
  return static_cast<double>(static_cast<long double>(r.num) /
                             static_cast<long double>(r.den));
}

inline bigq to_bigq(const UnitRatio& r) {
  return bigq(to_bigz(r.num), to_bigz(r.den));
}

}  // namespace perco
