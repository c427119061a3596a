#include "sarges/batch.hpp"

#include <algorithm>
#include <cstddef>

#include <omp.h>

namespace sarges {
namespace {

ChainOutcome run_one(const std::string& text, const CharacterProfile& profile, const Ethogram& e,
                     ChatBackend& backend, const ChainConfig& cfg) {
  try {
    return {run_intent_chain(text, profile, e, backend, cfg), {}};
  } catch (const std::exception& ex) {
    return {std::nullopt, ex.what()};
  }
}

}  // namespace

std::vector<ChainOutcome> run_batch(std::span<const std::string> texts,
                                    const CharacterProfile& profile, const Ethogram& e,
                                    ChatBackend& backend, const ChainConfig& cfg,
                                    int parallelism) {
  std::vector<ChainOutcome> out(texts.size());
  const auto n = static_cast<std::ptrdiff_t>(texts.size());
  const int threads = std::max(1, parallelism);
  // Each slot is written by exactly one iteration, so output order is input
  // order whatever the completion order.
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        run_one(texts[static_cast<std::size_t>(i)], profile, e, backend, cfg);
  }
  return out;
}

std::vector<ChainOutcome> run_batch_serial(std::span<const std::string> texts,
                                           const CharacterProfile& profile, const Ethogram& e,
                                           ChatBackend& backend, const ChainConfig& cfg) {
  std::vector<ChainOutcome> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(run_one(t, profile, e, backend, cfg));
  return out;
}

}  // namespace sarges
