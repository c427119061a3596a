#include "sarges/emotion.hpp"

namespace sarges {

std::string_view to_string(EmotionCategory c) {
  switch (c) {
    case EmotionCategory::Joy: return "joy";
    case EmotionCategory::Anger: return "anger";
    case EmotionCategory::Sorrow: return "sorrow";
    case EmotionCategory::Fear: return "fear";
    case EmotionCategory::Special: return "special";
  }
  return "special";
}

std::optional<EmotionCategory> parse_emotion(std::string_view s) {
  for (auto c : kAllEmotions) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::vector<EmotionCategory> CategorySet::members() const {
  std::vector<EmotionCategory> out;
  for (auto c : kAllEmotions) {
    if (contains(c)) out.push_back(c);
  }
  return out;
}

}  // namespace sarges
