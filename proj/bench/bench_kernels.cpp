#include <benchmark/benchmark.h>

#include <chrono>
#include <random>
#include <thread>

#include "sarges/batch.hpp"
#include "sarges/ethogram.hpp"
#include "sarges/eval.hpp"

#ifndef SARGES_DATA_DIR
#define SARGES_DATA_DIR "data"
#endif

using namespace sarges;

namespace {

// Answers every request after a fixed delay, standing in for network latency.
// Label requests get a single marker on the first word; keyword requests get
// that word.
class DelayBackend final : public ChatBackend {
 public:
  explicit DelayBackend(std::chrono::microseconds delay) : delay_(delay) {}

  ChatReply send(const ChatRequest& r) override {
    std::this_thread::sleep_for(delay_);
    const auto& user = r.messages.back().content;
    const auto at = user.rfind("## Text\n");
    const auto text = user.substr(at + 8);
    if (user.find("## Task\n") != std::string::npos) return {text.substr(0, text.find(' ')), 400, 10};
    return {"(id: A-6, description: Clap Hands) " + text, 1200, 60};
  }
  const BackendCapability& capability() const override { return cap_; }

 private:
  std::chrono::microseconds delay_;
  BackendCapability cap_;
};

const Ethogram& ethogram() {
  static const Ethogram e = load_ethogram_file(SARGES_DATA_DIR "/ethogram.json");
  return e;
}

std::vector<std::string> batch_texts(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("Welcome guest number " + std::to_string(i) + ", nice to see you.");
  return out;
}

ChainConfig no_reflection() {
  ChainConfig c;
  c.max_reflection_rounds = 0;
  return c;
}

std::vector<CategoryCase> random_cases(std::size_t n) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> bits(0, 31);
  std::vector<CategoryCase> out(n);
  for (auto& c : out) {
    c.gold = CategorySet::from_bits(static_cast<std::uint8_t>(bits(rng) | 1));
    c.predicted = CategorySet::from_bits(static_cast<std::uint8_t>(bits(rng)));
  }
  return out;
}

void BM_run_batch(benchmark::State& st) {
  const auto texts = batch_texts(64);
  DelayBackend backend(std::chrono::microseconds(500));
  for (auto _ : st) {
    benchmark::DoNotOptimize(run_batch(texts, CharacterProfile::default_host(), ethogram(), backend,
                                       no_reflection(), static_cast<int>(st.range(0))));
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(texts.size()));
}
BENCHMARK(BM_run_batch)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_run_batch_serial(benchmark::State& st) {
  const auto texts = batch_texts(64);
  DelayBackend backend(std::chrono::microseconds(500));
  for (auto _ : st) {
    benchmark::DoNotOptimize(
        run_batch_serial(texts, CharacterProfile::default_host(), ethogram(), backend, no_reflection()));
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(texts.size()));
}
BENCHMARK(BM_run_batch_serial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_partial_overlap(benchmark::State& st) {
  const auto cases = random_cases(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(partial_overlap(cases));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_partial_overlap)->Arg(1 << 12)->Arg(1 << 20)->UseRealTime();

void BM_partial_overlap_serial(benchmark::State& st) {
  const auto cases = random_cases(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(partial_overlap_serial(cases));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_partial_overlap_serial)->Arg(1 << 12)->Arg(1 << 20)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
