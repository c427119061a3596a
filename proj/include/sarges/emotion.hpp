#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace sarges {

/// The five evaluation clusters. `Special` holds gestures with a meaning of
/// their own (bunny ears, thumbs down) that do not read as an emotion.
enum class EmotionCategory : std::uint8_t { Joy, Anger, Sorrow, Fear, Special };

inline constexpr std::array<EmotionCategory, 5> kAllEmotions = {
    EmotionCategory::Joy, EmotionCategory::Anger, EmotionCategory::Sorrow,
    EmotionCategory::Fear, EmotionCategory::Special};

std::string_view to_string(EmotionCategory c);
std::optional<EmotionCategory> parse_emotion(std::string_view s);

/// Bitset over the five categories.
class CategorySet {
 public:
  constexpr CategorySet() = default;

  constexpr void insert(EmotionCategory c) { bits_ |= bit(c); }
  constexpr bool contains(EmotionCategory c) const { return (bits_ & bit(c)) != 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }

  static constexpr CategorySet from_bits(std::uint8_t b) {
    CategorySet s;
    s.bits_ = b & 0x1f;
    return s;
  }

  friend constexpr CategorySet operator&(CategorySet a, CategorySet b) {
    return from_bits(a.bits_ & b.bits_);
  }
  friend constexpr bool operator==(CategorySet, CategorySet) = default;

  std::vector<EmotionCategory> members() const;

 private:
  static constexpr std::uint8_t bit(EmotionCategory c) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(c));
  }
  std::uint8_t bits_ = 0;
};

}  // namespace sarges
