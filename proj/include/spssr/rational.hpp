#pragma once

// Exact rational arithmetic for rates and ratios. Every metric equality the
// suite decides goes through these; no floating point in pass/fail paths.

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

namespace spssr {

using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline double to_double(const Rational& r) {
  return boost::rational_cast<double>(r);
}

}  // namespace spssr
