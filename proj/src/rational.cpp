#include "sarges/rational.hpp"

#include <charconv>
#include <cstdlib>

#include "sarges/error.hpp"

namespace sarges {
namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) {
    throw Error("invalid rational '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

Rational parse_rational(std::string_view s) {
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    const auto den = parse_int(s.substr(slash + 1), s);
    if (den == 0) throw Error("invalid rational '" + std::string(s) + "': zero denominator");
    return Rational(parse_int(s.substr(0, slash), s), den);
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    const auto frac = s.substr(dot + 1);
    if (frac.size() > 15) throw Error("too many decimals in '" + std::string(s) + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const auto int_part = s.substr(0, dot);
    const bool negative = !int_part.empty() && int_part[0] == '-';
    const std::int64_t whole =
        int_part.empty() || int_part == "-" ? 0 : parse_int(int_part, s);
    const std::int64_t f = frac.empty() ? 0 : parse_int(frac, s);
    const std::int64_t mag = std::llabs(whole) * scale + f;
    return Rational(negative ? -mag : mag, scale);
  }
  return Rational(parse_int(s, s));
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::string to_decimal(const Rational& r, int places) {
  __int128 scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const bool negative = r.numerator() < 0;
  const __int128 n = static_cast<__int128>(negative ? -r.numerator() : r.numerator()) * scale;
  const __int128 d = r.denominator();
  __int128 q = n / d;
  if ((n % d) * 2 >= d) ++q;
  const auto whole = static_cast<long long>(q / scale);
  auto frac = static_cast<long long>(q % scale);
  std::string out = (negative && q != 0 ? "-" : "") + std::to_string(whole);
  if (places > 0) {
    std::string digits = std::to_string(frac);
    out += "." + std::string(static_cast<std::size_t>(places) - digits.size(), '0') + digits;
  }
  return out;
}

}  // namespace sarges
