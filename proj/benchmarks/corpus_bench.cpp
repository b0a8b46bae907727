#include <benchmark/benchmark.h>

#include <sstream>

#include "sidkit/corpus.hpp"
#include "sidkit/lexicon.hpp"
#include "sidkit/text_util.hpp"
#include "util.hpp"

namespace {

using namespace sidkit;

void BM_ParseSidFile(benchmark::State& state) {
  auto corpus = sidkit::bench::synthetic_corpus(state.range(0));
  std::string text = write_sid_string(corpus);
  for (auto _ : state) {
    auto parsed = parse_sid_string(text);
    benchmark::DoNotOptimize(parsed);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_ParseSidFile)->Arg(100)->Arg(1000);

void BM_WriteSidFile(benchmark::State& state) {
  auto corpus = sidkit::bench::synthetic_corpus(state.range(0));
  for (auto _ : state) {
    auto text = write_sid_string(corpus);
    benchmark::DoNotOptimize(text);
  }
}
BENCHMARK(BM_WriteSidFile)->Arg(100)->Arg(1000);

void BM_Deduplicate(benchmark::State& state) {
  auto corpus = sidkit::bench::synthetic_corpus(state.range(0));
  // Make a third of the instances duplicates.
  for (int i = 0; i < state.range(0) / 3; ++i) corpus.push_back(corpus[i]);
  for (auto _ : state) {
    auto kept = deduplicate(corpus);
    benchmark::DoNotOptimize(kept);
  }
}
BENCHMARK(BM_Deduplicate)->Arg(1000);

void BM_SplitByOrigin(benchmark::State& state) {
  auto corpus = sidkit::bench::synthetic_corpus(state.range(0));
  for (auto _ : state) {
    auto splits = split_by_origin(corpus, SplitRatios{0.7, 0.15, 0.15}, 42);
    benchmark::DoNotOptimize(splits);
  }
}
BENCHMARK(BM_SplitByOrigin)->Arg(1000);

void BM_GenerateSilver(benchmark::State& state) {
  auto corpus = sidkit::bench::synthetic_corpus(state.range(0));
  for (auto& inst : corpus) inst.dialect.reset();  // silver wants Bokmål input
  auto lexicon = Lexicon::load_string(
      "jeg\tV\teg|ej\njeg\tT\tæ|e\njeg\tN\tæ|å\n"
      "hva\tV\tka\nhva\tT\tka\nhva\tN\tka\n"
      "ikke\tV\tikkje\nikke\tT\titj\nikke\tN\tikkje\n");
  for (auto _ : state) {
    auto silver = generate_silver(corpus, lexicon, VariantPolicy::First, 7);
    benchmark::DoNotOptimize(silver);
  }
}
BENCHMARK(BM_GenerateSilver)->Arg(500);

}  // namespace
