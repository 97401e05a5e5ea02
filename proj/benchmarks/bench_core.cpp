#include "hopls/decomp.hpp"
#include "hopls/regression.hpp"
#include "hopls/synth.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

hopls::DenseTensor gaussian(const hopls::Shape& shape, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    hopls::DenseTensor t(shape);
    for (double& v : t.data()) v = n01(rng);
    return t;
}

void BM_TruncatedSvd(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n01;
    hopls::Matrix m(n, n / 2);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(rng);
    for (auto _ : state) benchmark::DoNotOptimize(hopls::truncated_svd(m, 5));
}
BENCHMARK(BM_TruncatedSvd)->Arg(20)->Arg(100)->Arg(400);

void BM_Hooi(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const hopls::DenseTensor t = gaussian(hopls::Shape{d, d, d}, 2);
    const hopls::MlRank rank{{5, 5, 5}};
    for (auto _ : state) benchmark::DoNotOptimize(hopls::hooi(t, rank));
}
BENCHMARK(BM_Hooi)->Arg(10)->Arg(30);

void BM_HooiCrossCovariance(benchmark::State& state) {
    const hopls::DenseTensor x = gaussian(hopls::Shape{20, 10, 10}, 3);
    const hopls::DenseTensor y = gaussian(hopls::Shape{20, 10, 10}, 4);
    const hopls::MlRank rank{{4, 4, 4, 4}};
    for (auto _ : state) benchmark::DoNotOptimize(hopls::hooi_cross_covariance(x, y, rank));
}
BENCHMARK(BM_HooiCrossCovariance);

void BM_FitHopls(benchmark::State& state) {
    const auto data = hopls::generate(hopls::SynthSpec::for_case("2t", 5.0, 1));
    const auto& cal = data.calibration;
    const auto cfg = hopls::FitConfig::with_lambda(static_cast<std::size_t>(state.range(0)), 4,
                                                   cal.x.shape(), cal.y.shape());
    for (auto _ : state) benchmark::DoNotOptimize(hopls::fit_hopls(cal.x, cal.y, cfg));
}
BENCHMARK(BM_FitHopls)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_FitHopls2(benchmark::State& state) {
    const auto data = hopls::generate(hopls::SynthSpec::for_case("mr", 5.0, 1));
    const auto& cal = data.calibration;
    const auto cfg = hopls::FitConfig::with_lambda(5, 5, cal.x.shape(), cal.y.shape());
    const hopls::Matrix y = hopls::matricize(cal.y, 0);
    for (auto _ : state) benchmark::DoNotOptimize(hopls::fit_hopls2(cal.x, y, cfg));
}
BENCHMARK(BM_FitHopls2)->Unit(benchmark::kMillisecond);

void BM_FitPls(benchmark::State& state) {
    const auto data = hopls::generate(hopls::SynthSpec::for_case("2m", 5.0, 1));
    const auto& cal = data.calibration;
    const hopls::Matrix x = hopls::matricize(cal.x, 0), y = hopls::matricize(cal.y, 0);
    for (auto _ : state) benchmark::DoNotOptimize(hopls::fit_pls_nipals(x, y, 5));
}
BENCHMARK(BM_FitPls)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
