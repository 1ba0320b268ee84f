#include <benchmark/benchmark.h>

#include "freqwarm/autoencoder.hpp"
#include "freqwarm/denoiser.hpp"
#include "freqwarm/random.hpp"
#include "freqwarm/spectral.hpp"

using namespace freqwarm;

namespace {

Tensor3 noise(std::size_t c, std::size_t h, std::size_t w) {
  RandomStream rng(1, 0);
  Tensor3 t(c, h, w);
  for (auto& v : t.values) v = rng.normal();
  return t;
}

void BM_ToSpectrum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor3 x = noise(3, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(spectral::to_spectrum(x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_ToSpectrum)->Arg(16)->Arg(32)->Arg(64)->Arg(256);

void BM_Lowpass(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor3 x = noise(3, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(spectral::lowpass(x, 0.2));
}
BENCHMARK(BM_Lowpass)->Arg(32)->Arg(64)->Arg(256);

void BM_RadialSpectrum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto s = spectral::to_spectrum(noise(32, n, n));
  for (auto _ : state) benchmark::DoNotOptimize(spectral::radial_spectrum(s));
}
BENCHMARK(BM_RadialSpectrum)->Arg(8)->Arg(32);

void BM_Encode(benchmark::State& state) {
  const auto ae = autoencoder::init({4, 32, autoencoder::Variant::kTrainableLinear, 0});
  const Tensor3 x = noise(3, 32, 32);
  for (auto _ : state) benchmark::DoNotOptimize(autoencoder::encode(ae, x));
}
BENCHMARK(BM_Encode);

flow::FlowBatch flow_batch(std::size_t n, std::size_t d) {
  RandomStream rng(2, 0);
  flow::Batch z0{n, d, std::vector<double>(n * d)}, z1{n, d, std::vector<double>(n * d)};
  for (auto& v : z0.values) v = rng.normal();
  for (auto& v : z1.values) v = rng.normal();
  std::vector<double> t(n);
  for (auto& v : t) v = rng.uniform();
  return flow::make_flow_batch(z0, z1, t);
}

void BM_DenoiserForward(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  const auto p = flow::make_denoiser(512, hidden, 0);
  const auto b = flow_batch(32, 512);
  for (auto _ : state) benchmark::DoNotOptimize(flow::forward(p, b.zt, b.t));
}
BENCHMARK(BM_DenoiserForward)->Arg(128)->Arg(256);

void BM_DenoiserLossAndGrad(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  const auto p = flow::make_denoiser(512, hidden, 0);
  const auto b = flow_batch(32, 512);
  for (auto _ : state) benchmark::DoNotOptimize(flow::loss_and_grad(p, b));
}
BENCHMARK(BM_DenoiserLossAndGrad)->Arg(128)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
