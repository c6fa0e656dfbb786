#include <benchmark/benchmark.h>

#include "prev/codec.hpp"
#include "prev/corpus.hpp"
#include "prev/parallel.hpp"

namespace {

const std::vector<prev::Pianoroll>& corpus() {
  static const std::vector<prev::Pianoroll> kCorpus = [] {
    prev::SynthParams p;
    p.seed = 7;
    p.pieces = 400;
    p.bars = 16;
    return prev::generate_synthetic(p);
  }();
  return kCorpus;
}

const prev::Vocabulary& vocab() {
  static const prev::Vocabulary kVocab{prev::EncodingConfig{}};
  return kVocab;
}

void BM_EncodeSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(prev::serial::encode_corpus(corpus(), vocab()));
}

void BM_EncodeParallel(benchmark::State& state) {
  prev::set_worker_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(prev::parallel::encode_corpus(corpus(), vocab()));
  prev::set_worker_count(0);
}

void BM_RoundtripSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(prev::serial::roundtrip_failures(corpus(), vocab()));
}

void BM_RoundtripParallel(benchmark::State& state) {
  prev::set_worker_count(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(prev::parallel::roundtrip_failures(corpus(), vocab()));
  }
  prev::set_worker_count(0);
}

void BM_MetricsSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(prev::serial::corpus_metrics(corpus()));
}

void BM_MetricsParallel(benchmark::State& state) {
  prev::set_worker_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(prev::parallel::corpus_metrics(corpus()));
  prev::set_worker_count(0);
}

}  // namespace

BENCHMARK(BM_EncodeSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EncodeParallel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RoundtripSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RoundtripParallel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MetricsSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MetricsParallel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
