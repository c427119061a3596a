#include "sarges/utf8.hpp"

#include <algorithm>
#include <array>

#include "sarges/error.hpp"

namespace sarges::utf8 {
namespace {

// Returns the code point at `i` and advances `i`; throws on malformed input.
char32_t next(std::string_view s, std::size_t& i) {
  const auto start = i;
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int extra = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    extra = 1, cp = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    extra = 2, cp = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    extra = 3, cp = b0 & 0x07, min = 0x10000;
  } else {
    throw EncodingError("invalid UTF-8 lead byte", start);
  }
  if (s.size() - i <= static_cast<std::size_t>(extra)) {
    throw EncodingError("truncated UTF-8 sequence", start);
  }
  for (int k = 1; k <= extra; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) throw EncodingError("invalid UTF-8 continuation byte", start);
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min) throw EncodingError("overlong UTF-8 sequence", start);
  if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    throw EncodingError("invalid code point", start);
  }
  i += extra + 1;
  return cp;
}

}  // namespace

std::u32string decode(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) out.push_back(next(bytes, i));
  return out;
}

std::string encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::string encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t c : cps) out += encode(c);
  return out;
}

bool is_valid(std::string_view bytes) {
  try {
    std::size_t i = 0;
    while (i < bytes.size()) next(bytes, i);
    return true;
  } catch (const EncodingError&) {
    return false;
  }
}

std::size_t length(std::string_view bytes) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < bytes.size()) {
    next(bytes, i);
    ++n;
  }
  return n;
}

std::size_t byte_offset(std::string_view bytes, std::size_t index) {
  std::size_t i = 0;
  for (std::size_t n = 0; n < index && i < bytes.size(); ++n) next(bytes, i);
  return i;
}

bool is_space(char32_t c) {
  switch (c) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
           (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
  }
  // General punctuation, CJK symbols, full-width forms.
  static constexpr std::array<char32_t, 14> kExtra = {
      0xA1, 0xAB, 0xBB, 0xBF, 0x2026, 0x2014, 0x2013, 0x2018, 0x2019, 0x201C, 0x201D,
      0xFF01, 0xFF1F, 0xFF0C};
  if (std::find(kExtra.begin(), kExtra.end(), c) != kExtra.end()) return true;
  if (c >= 0x3000 && c <= 0x303F) return c != 0x3000;
  if (c >= 0xFF01 && c <= 0xFF0F) return true;
  if (c >= 0xFF1A && c <= 0xFF20) return true;
  return false;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  std::size_t b = 0, e = s.size();
  while (b < e && ws(s[b])) ++b;
  while (e > b && ws(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace sarges::utf8
