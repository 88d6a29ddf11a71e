#include <benchmark/benchmark.h>

#include <vector>

#include "stressmodel/estimators.hpp"
#include "stressmodel/normal.hpp"
#include "stressmodel/normality.hpp"
#include "stressmodel/riskmodel.hpp"
#include "stressmodel/rng.hpp"
#include "stressmodel/simulate.hpp"

namespace sm = stressmodel;

namespace {

sm::EstimateTable spx_style_table() {
    const double p[] = {0.008, 0.523, 0.349, 0.085, 0.025, 0.002, 0.004, 0.003};
    const double mu[] = {0.00288, 0.00097, 0.00052, 0.0001, -0.00495, -0.03426, 0.00598, -0.03952};
    const double sg[] = {0.0031, 0.00679, 0.01163, 0.01761, 0.02634, 0.04302, 0.05707, 0.04146};
    sm::EstimateTable t;
    for (int i = 0; i < 8; ++i) {
        sm::EstimateTable::Bucket b;
        b.lower = 10.0 * i;
        if (i < 7) b.upper = 10.0 * (i + 1);
        b.probability = p[i] / 0.999;
        b.mu = mu[i];
        b.sigma = sg[i];
        t.buckets.push_back(b);
    }
    return t;
}

void BM_NormalCdf(benchmark::State& state) {
    double z = -19.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sm::normal_cdf(z));
        z = z < 19.0 ? z + 1e-6 : -19.0;
    }
}
BENCHMARK(BM_NormalCdf);

void BM_MixtureCdf(benchmark::State& state) {
    const auto table = spx_style_table();
    for (auto _ : state) benchmark::DoNotOptimize(sm::mixture_cdf(table, -0.09));
}
BENCHMARK(BM_MixtureCdf);

void BM_ShapiroWilk(benchmark::State& state) {
    sm::Rng rng(7);
    std::vector<double> sample(static_cast<std::size_t>(state.range(0)));
    for (auto& x : sample) x = rng.next_normal();
    for (auto _ : state) benchmark::DoNotOptimize(sm::shapiro_wilk(sample));
}
BENCHMARK(BM_ShapiroWilk)->Arg(75)->Arg(1000)->Arg(5000);

void BM_SimulateMarket(benchmark::State& state) {
    sm::SimConfig config;
    config.n = static_cast<std::size_t>(state.range(0));
    config.seed = 11;
    config.kappa = {25.0, 0.97, 0.08};
    config.mu_fn = sm::constant_fn(0.0003);
    config.sigma_fn = sm::linear_fn(0.002, 0.0004);
    for (auto _ : state) benchmark::DoNotOptimize(sm::simulate_market(config));
}
BENCHMARK(BM_SimulateMarket)->Arg(10000)->Arg(100000);

void BM_BucketTable(benchmark::State& state) {
    sm::SimConfig config;
    config.n = 100000;
    config.seed = 11;
    config.kappa = {25.0, 0.97, 0.08};
    config.mu_fn = sm::constant_fn(0.0003);
    config.sigma_fn = sm::linear_fn(0.002, 0.0004);
    const auto market = sm::simulate_market(config);
    const std::vector<double> edges = {0, 10, 20, 30, 40, 50, 60, 70};
    for (auto _ : state)
        benchmark::DoNotOptimize(sm::bucket_table(market.observations, edges));
}
BENCHMARK(BM_BucketTable);

}  // namespace

BENCHMARK_MAIN();
