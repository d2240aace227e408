#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>

namespace hyperenum {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;
using BigFloat = boost::multiprecision::cpp_bin_float_50;

inline BigInt factorial(std::uint64_t n) {
  BigInt out = 1;
  for (std::uint64_t i = 2; i <= n; ++i) out *= i;
  return out;
}

/// (a)_b = a (a-1) ... (a-b+1); 1 when b = 0, 0 as soon as a factor hits zero.
inline BigInt falling_factorial(const BigInt& a, std::uint64_t b) {
  if (b > a) return 0;
  BigInt out = 1;
  for (std::uint64_t i = 0; i < b; ++i) out *= a - i;
  return out;
}

inline BigInt falling_factorial(std::uint64_t a, std::uint64_t b) {
  return falling_factorial(BigInt(a), b);
}

inline BigInt ipow(const BigInt& base, std::uint64_t e) {
  BigInt out = 1;
  for (std::uint64_t i = 0; i < e; ++i) out *= base;
  return out;
}

/// Natural log of a positive rational, evaluated through 50-digit floats so
/// that desk-scale factorials (hundreds of digits) lose nothing that matters.
inline long double log_rational(const BigRat& q) {
  const BigFloat num(boost::multiprecision::numerator(q));
  const BigFloat den(boost::multiprecision::denominator(q));
  const BigFloat r = boost::multiprecision::log(num) - boost::multiprecision::log(den);
  return r.convert_to<long double>();
}

inline bool fits_double_exactly(const BigInt& v) {
  static const BigInt limit = BigInt(1) << 53;
  return v >= -limit && v <= limit;
}

}  // namespace hyperenum
