// Microbenchmarks for the per-session hot paths: EMG conditioning, source
// separation, factorization, and the lag scan. Sized like one typical
// session (90 s at 1 kHz, 4 channels) unless the kernel cost forces less.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <vector>

#include "ausyn/dsp.hpp"
#include "ausyn/ica.hpp"
#include "ausyn/nnmf.hpp"
#include "ausyn/rng.hpp"
#include "ausyn/signal.hpp"
#include "ausyn/synth.hpp"
#include "ausyn/xcorr.hpp"

namespace {

ausyn::SyntheticSession session(double duration_s, std::uint64_t seed) {
  ausyn::SynthConfig cfg;
  cfg.duration_s = duration_s;
  cfg.n_events = static_cast<int>(duration_s / 9.0);
  cfg.seed = seed;
  return ausyn::generate_session(cfg);
}

void BM_preprocess(benchmark::State& state) {
  const ausyn::SyntheticSession sess = session(90.0, 1);
  for (auto _ : state) {
    const ausyn::Recording env = ausyn::preprocess_emg(sess.block.emg);
    benchmark::DoNotOptimize(env.samples().data());
  }
}
BENCHMARK(BM_preprocess)->Unit(benchmark::kMillisecond);

void BM_fastica(benchmark::State& state) {
  const ausyn::SyntheticSession sess = session(90.0, 2);
  const ausyn::Recording banded = ausyn::bandpass_emg(sess.block.emg);
  for (auto _ : state) {
    const ausyn::IcaResult res = ausyn::fastica(banded, 3, 42);
    benchmark::DoNotOptimize(res.sources.data());
  }
}
BENCHMARK(BM_fastica)->Unit(benchmark::kMillisecond);

void BM_nnmf(benchmark::State& state) {
  ausyn::Rng rng(7);
  Eigen::MatrixXd w(16, 4), h(4, 900);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform();
  for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = rng.uniform();
  const Eigen::MatrixXd x = w * h;
  for (auto _ : state) {
    const ausyn::NnmfResult res = ausyn::nnmf_factorize(x, 4, 42);
    benchmark::DoNotOptimize(res.vaf);
  }
}
BENCHMARK(BM_nnmf)->Unit(benchmark::kMillisecond);

void BM_xcorr(benchmark::State& state) {
  ausyn::Rng rng(9);
  std::vector<double> a(90000), b(90000);
  for (auto& v : a) v = rng.normal();
  for (std::size_t i = 0; i < b.size(); ++i)
    b[i] = 0.7 * a[i] + 0.3 * rng.normal();
  for (auto _ : state) {
    const ausyn::LagPeak peak = ausyn::max_lag_pearson(a, b, 1000, true);
    benchmark::DoNotOptimize(peak.correlation);
  }
}
BENCHMARK(BM_xcorr)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
