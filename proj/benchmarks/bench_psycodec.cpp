#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "psycodec/codec.hpp"
#include "psycodec/container.hpp"
#include "psycodec/dense_oracle.hpp"
#include "psycodec/key_codebook.hpp"
#include "psycodec/phase_space.hpp"
#include "psycodec/psychoacoustics.hpp"
#include "psycodec/verify.hpp"

using namespace psycodec;

namespace {

constexpr double kRate = 44100.0;

// Decaying harmonic notes, rounded to 16 bits.
std::vector<double> music(double seconds) {
  std::vector<double> x(static_cast<std::size_t>(seconds * kRate));
  const double notes[] = {220.0, 261.6, 329.6, 392.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / kRate;
    const double f0 = notes[static_cast<std::size_t>(t / 0.5) % 4];
    const double local = std::fmod(t, 0.5);
    double v = 0.0;
    for (int k = 1; k <= 8; ++k) v += std::sin(2.0 * std::numbers::pi * f0 * k * t) / k;
    x[i] = std::nearbyint(6000.0 * std::exp(-local / 0.3) * v);
  }
  return x;
}

const psycho::MaskingParams kParams{};

void BM_CoherentState(benchmark::State& state) {
  const auto x = music(static_cast<double>(state.range(0)));
  const auto grid = TFGrid::for_signal(kRate, x.size(), kParams.window_a);
  for (auto _ : state) benchmark::DoNotOptimize(phase_space::coherent_state(x, grid));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}

void BM_SechSmooth(benchmark::State& state) {
  const auto x = music(static_cast<double>(state.range(0)));
  const auto grid = TFGrid::for_signal(kRate, x.size(), kParams.window_a);
  const auto c = phase_space::coherent_state(x, grid);
  for (auto _ : state) benchmark::DoNotOptimize(phase_space::sech_smooth(c, kParams.a_t, kParams.a_f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.cells()));
}

void BM_ApplySymbol(benchmark::State& state) {
  const auto x = music(static_cast<double>(state.range(0)));
  const auto m = psycho::build_masking(x, kRate, kParams);
  const auto kl = codec::build_key_lock(m, codec::LockVariant::Wiener);
  for (auto _ : state) benchmark::DoNotOptimize(phase_space::apply_symbol(kl.lock, x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}

void BM_BuildMasking(benchmark::State& state) {
  const auto x = music(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(psycho::build_masking(x, kRate, kParams));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}

void BM_PackKey(benchmark::State& state) {
  const auto x = music(static_cast<double>(state.range(0)));
  const auto m = psycho::build_masking(x, kRate, kParams);
  const auto kl = codec::build_key_lock(m, codec::LockVariant::Wiener);
  for (auto _ : state) benchmark::DoNotOptimize(codec::pack_key(kl.key));
}

void BM_Encode(benchmark::State& state) {
  const auto x = music(static_cast<double>(state.range(0)));
  codec::CodecConfig cfg;
  cfg.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(container::write_stream(codec::encode(x, kRate, cfg)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}

void BM_Decode(benchmark::State& state) {
  const auto x = music(static_cast<double>(state.range(0)));
  const auto bytes = container::write_stream(codec::encode(x, kRate, codec::CodecConfig{}));
  for (auto _ : state) benchmark::DoNotOptimize(codec::decode(container::read_stream(bytes)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}

void BM_InverseWeyl(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto sym = verify::bv_test_symbol(n, 40.0);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::inverse_weyl(sym));
}

}  // namespace

BENCHMARK(BM_CoherentState)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SechSmooth)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplySymbol)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildMasking)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PackKey)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Encode)->Args({10, 1})->Args({10, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Decode)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InverseWeyl)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
