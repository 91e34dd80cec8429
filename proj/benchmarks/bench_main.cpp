#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "guide/pipeline.hpp"

using namespace guide;

namespace {

PcmSignal tone(double freq, std::size_t n, uint32_t rate = 44100) {
  std::vector<int16_t> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = static_cast<int16_t>(std::lround(16000.0 * std::sin(2.0 * std::numbers::pi * freq * i / rate)));
  }
  return PcmSignal(std::move(s), rate);
}

}  // namespace

static void BM_Fft(benchmark::State& state) {
  const auto signal = tone(440.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fft(signal));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Fft)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oNLogN);

static void BM_PeakFeatureOneSecond(benchmark::State& state) {
  const auto signal = tone(623.0, 44100);
  for (auto _ : state) benchmark::DoNotOptimize(peak_feature(signal));
}
BENCHMARK(BM_PeakFeatureOneSecond)->Unit(benchmark::kMillisecond);

static void BM_WavRoundTrip(benchmark::State& state) {
  const auto signal = tone(300.0, 44100);
  for (auto _ : state) benchmark::DoNotOptimize(parse_wav(write_wav(signal)));
}
BENCHMARK(BM_WavRoundTrip);

static void BM_Respond(benchmark::State& state) {
  const auto& rules = default_rules();
  for (auto _ : state) benchmark::DoNotOptimize(respond(rules, "Can you tell me what kind of stand is this?"));
}
BENCHMARK(BM_Respond);

static void BM_DialogueAdvance(benchmark::State& state) {
  const DialogueEngine engine;
  SessionContext ctx;
  ctx.state = DialogueState::AskingRequest;
  for (auto _ : state) benchmark::DoNotOptimize(engine.advance(ctx, Condition::H, "what is your name"));
}
BENCHMARK(BM_DialogueAdvance);

static void BM_Synthesize(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(synthesize("hello my friend"));
}
BENCHMARK(BM_Synthesize);
BENCHMARK_MAIN();
