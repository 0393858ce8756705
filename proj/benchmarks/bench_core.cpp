#include <random>

#include <benchmark/benchmark.h>

#include "modea/dea.hpp"
#include "modea/evaluation.hpp"
#include "modea/rm_classifier.hpp"
#include "modea/som.hpp"
#include "modea/synthetic.hpp"
#include "modea/varclus.hpp"

namespace {

modea::Dataset branches(std::size_t n) {
    return modea::generate_synthetic(n, 3, 3, modea::default_cluster_specs(3, 3), 42).data;
}

}  // namespace

static void BM_DeaEvaluateAll(benchmark::State& state) {
    const auto data = branches(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(modea::evaluate_all(data));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DeaEvaluateAll)->Arg(50)->Arg(150)->Arg(589)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_Agglomerate(benchmark::State& state) {
    const auto corr = modea::correlation_matrix(modea::generate_block_correlated(1000, 1).data);
    for (auto _ : state) {
        benchmark::DoNotOptimize(modea::agglomerate(corr));
    }
}
BENCHMARK(BM_Agglomerate);

static void BM_SomTrain(benchmark::State& state) {
    const auto z = modea::normalize(branches(589)).values;
    modea::SomConfig cfg;
    cfg.k = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(modea::train_som(z, cfg));
    }
}
BENCHMARK(BM_SomTrain)->Arg(2)->Arg(3)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_RmFit(benchmark::State& state) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd x(589, 6);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    std::vector<int> labels(589);
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 3);
    modea::RmConfig cfg;
    cfg.order = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(modea::fit(x, labels, cfg));
    }
}
BENCHMARK(BM_RmFit)->DenseRange(1, 5)->Unit(benchmark::kMicrosecond);

static void BM_WeightedCv(benchmark::State& state) {
    auto synth = modea::generate_piecewise(589, 3);
    const auto z = modea::normalize(synth.data).values;
    const auto plan = modea::make_folds(synth.labels, 10, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(modea::weighted_cv(z, synth.labels, modea::RmConfig{}, plan));
    }
}
BENCHMARK(BM_WeightedCv)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
