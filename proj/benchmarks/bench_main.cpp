#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "wordpost/dynamic.hpp"
#include "wordpost/evaluation.hpp"
#include "wordpost/postprocess.hpp"
#include "wordpost/spectral.hpp"

using namespace wordpost;

namespace {

EmbeddingMatrix random_rows(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    EmbeddingMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double scale = 10.0 * std::pow(0.9, static_cast<double>(j));
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = scale * g(rng);
    }
    return m;
}

void BM_FitPca(benchmark::State& state) {
    const auto data = remove_mean(random_rows(state.range(0), state.range(1), 1)).rows;
    for (auto _ : state) benchmark::DoNotOptimize(fit_pca(data, 11));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitPca)->Args({10000, 50})->Args({10000, 300})->Unit(benchmark::kMillisecond);

void BM_Pvn(benchmark::State& state) {
    const auto data = random_rows(state.range(0), state.range(1), 2);
    for (auto _ : state) benchmark::DoNotOptimize(pvn(data, PvnConfig{11}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Pvn)->Args({10000, 50})->Args({10000, 300})->Unit(benchmark::kMillisecond);

void BM_GradientStep(benchmark::State& state) {
    const std::size_t D = state.range(0), k = 10, c = 5, N = 5, words = 5000, batch = 64;
    const auto emb = random_rows(words, D, 3);
    std::mt19937_64 rng(4);
    DynamicSubspace s = initialize_subspace(D, k, c, 0.5, rng);
    std::uniform_int_distribution<Index> pick(0, words - 1);
    SampleBuffer buffer(c);
    std::vector<Index> ctx(2 * c), negatives;
    for (std::size_t i = 0; i < batch; ++i) {
        for (auto& w : ctx) w = pick(rng);
        buffer.push(pick(rng), ctx);
        for (std::size_t n = 0; n < N; ++n) negatives.push_back(pick(rng));
    }
    std::vector<ContextSample> samples;
    for (std::size_t i = 0; i < buffer.size(); ++i) samples.push_back(buffer[i]);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gradient_step(s, samples, negatives, emb, 1e-4));
        s.b = renormalize_b(s.b);
        s.A = reorthogonalize_A(s.A, 0.5);
    }
    state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_GradientStep)->Arg(50)->Arg(300);

void BM_Analogy(benchmark::State& state) {
    const std::size_t words = state.range(0);
    Vocabulary vocab;
    for (std::size_t i = 0; i < words; ++i) vocab.add("w" + std::to_string(i));
    const auto emb = random_rows(words, 50, 5);
    const AnalogySolver solver(vocab, emb);
    Index q = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solver.predict(AnalogyMode::mul, q % words, (q + 1) % words, (q + 2) % words));
        ++q;
    }
}
BENCHMARK(BM_Analogy)->Arg(10000)->Arg(50000);

}  // namespace
BENCHMARK_MAIN();
