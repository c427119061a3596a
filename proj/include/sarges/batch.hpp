#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sarges/intent_chain.hpp"

namespace sarges {

struct ChainOutcome {
  std::optional<ChainResult> result;
  std::string error;  // set when result is empty
  bool ok() const { return result.has_value(); }
};

/// Runs one intent chain per text over an OpenMP team of at most
/// `parallelism` threads. Outcomes are in input order; per-text failures are
/// captured, not thrown.
std::vector<ChainOutcome> run_batch(std::span<const std::string> texts,
                                    const CharacterProfile& profile, const Ethogram& e,
                                    ChatBackend& backend, const ChainConfig& cfg,
                                    int parallelism);

/// Single-threaded reference for run_batch.
std::vector<ChainOutcome> run_batch_serial(std::span<const std::string> texts,
                                           const CharacterProfile& profile, const Ethogram& e,
                                           ChatBackend& backend, const ChainConfig& cfg);

}  // namespace sarges
