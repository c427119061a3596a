#pragma once

#include <string>
#include <string_view>

namespace sarges::utf8 {

/// Decodes UTF-8 into code points. Throws EncodingError on malformed input
/// (overlongs, surrogates and truncated sequences included).
std::u32string decode(std::string_view bytes);
std::string encode(std::u32string_view cps);
std::string encode(char32_t cp);

bool is_valid(std::string_view bytes);

/// Number of code points; throws EncodingError like decode().
std::size_t length(std::string_view bytes);

/// Byte offset of code point `index` (index == length gives bytes.size()).
std::size_t byte_offset(std::string_view bytes, std::size_t index);

bool is_space(char32_t c);
bool is_punct(char32_t c);

/// Characters that may continue a word token: anything that is neither
/// whitespace nor punctuation.
inline bool is_word(char32_t c) { return !is_space(c) && !is_punct(c); }

/// ASCII-only lowercase; other code points pass through.
std::string ascii_lower(std::string_view s);
std::string trim(std::string_view s);

}  // namespace sarges::utf8
