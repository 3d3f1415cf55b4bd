#ifndef SLOG_BIGINT_HPP_
#define SLOG_BIGINT_HPP_

#include <boost/multiprecision/cpp_int.hpp>

namespace slog {

// All solver arithmetic is exact. Terms and the integer engine share these
// types; no floating point appears anywhere in the solver.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int int_gcd(const Int& a, const Int& b) {
  return boost::multiprecision::gcd(a, b);
}

inline Int floor_div(const Int& a, const Int& b) {
  // b > 0 expected
  Int q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Int ceil_div(const Int& a, const Int& b) {
  Int q = a / b;
  if (a % b != 0 && ((a < 0) == (b < 0))) ++q;
  return q;
}

inline Int rat_floor(const Rat& r) {
  return floor_div(boost::multiprecision::numerator(r),
                   boost::multiprecision::denominator(r));
}

inline Int rat_ceil(const Rat& r) {
  return ceil_div(boost::multiprecision::numerator(r),
                  boost::multiprecision::denominator(r));
}

}  // namespace slog

#endif  // SLOG_BIGINT_HPP_
