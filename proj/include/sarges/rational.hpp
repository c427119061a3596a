#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace sarges {

using Rational = boost::rational<std::int64_t>;

/// Accepts "n", "n/d" and plain decimals such as "0.00003".
Rational parse_rational(std::string_view s);
/// "n/d", or "n" when the denominator is 1.
std::string to_string(const Rational& r);
double to_double(const Rational& r);
/// Fixed-point rendering rounded half away from zero, computed exactly.
std::string to_decimal(const Rational& r, int places);

}  // namespace sarges
