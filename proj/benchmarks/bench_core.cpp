#include "tnp/calibration.hpp"
#include "tnp/classifiers.hpp"
#include "tnp/estimation.hpp"
#include "tnp/rng.hpp"
#include "tnp/tensor.hpp"
#include "tnp/tgmm.hpp"

#include <benchmark/benchmark.h>

namespace {

tnp::DenseTensor random_tensor(const tnp::Shape& shape, tnp::RandomSource& rng) {
    tnp::DenseTensor t(shape);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.standard_normal();
    return t;
}

void BM_ModeProduct(benchmark::State& state) {
    tnp::RandomSource rng(1);
    const tnp::Shape shape{15, 15, 15};
    const tnp::DenseTensor x = random_tensor(shape, rng);
    tnp::Matrix a(8, 15);
    for (std::size_t j = 0; j < 15; ++j)
        for (std::size_t i = 0; i < 8; ++i) a(i, j) = rng.standard_normal();
    const std::size_t mode = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(tnp::mode_product(x, a, mode));
    }
}
BENCHMARK(BM_ModeProduct)->Arg(0)->Arg(1)->Arg(2);

void BM_Unfold(benchmark::State& state) {
    tnp::RandomSource rng(2);
    const tnp::DenseTensor x = random_tensor(tnp::Shape{15, 15, 15}, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tnp::unfold(x, static_cast<std::size_t>(state.range(0))));
    }
}
BENCHMARK(BM_Unfold)->Arg(0)->Arg(2);

void BM_Dtip(benchmark::State& state) {
    tnp::RandomSource rng(3);
    const tnp::Shape shape{15, 15, 15};
    tnp::DenseTensor noisy = tnp::random_tucker_signal(shape, {4, 6, 3}, 7.0, rng);
    for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] += 0.1 * rng.standard_normal();
    for (auto _ : state) {
        benchmark::DoNotOptimize(tnp::dtip(noisy, {4, 6, 3}, 1e-6, 50));
    }
}
BENCHMARK(BM_Dtip);

void BM_SampleClass(benchmark::State& state) {
    const tnp::Shape shape{15, 15, 15};
    std::vector<tnp::SpdMatrix> covs(3, tnp::SpdMatrix::identity(15));
    tnp::RandomSource mean_rng(4);
    tnp::TgmmParams params(tnp::DenseTensor(shape), random_tensor(shape, mean_rng), covs, 0.5);
    tnp::RandomSource rng(5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tnp::sample_class(params, 1, 100, rng));
    }
}
BENCHMARK(BM_SampleClass);

void BM_BinomialTail(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(tnp::binomial_tail(n, n * 19 / 20, 0.05));
    }
}
BENCHMARK(BM_BinomialTail)->Arg(100)->Arg(10000)->Arg(1000000);

void BM_TnnGradient(benchmark::State& state) {
    const tnp::Shape shape{15, 15, 15};
    tnp::TnnArchitecture arch = tnp::TnnArchitecture::defaults_for(shape);
    tnp::RandomSource rng(6);
    tnp::TclNetwork net = tnp::TclNetwork::glorot_init(shape, arch, rng);
    std::vector<tnp::LabeledSample> batch;
    for (int i = 0; i < 32; ++i) batch.push_back({random_tensor(shape, rng), i % 2});
    for (auto _ : state) {
        benchmark::DoNotOptimize(tnp::tnn_gradient(net, batch));
    }
}
BENCHMARK(BM_TnnGradient);

}  // namespace

BENCHMARK_MAIN();
