#include <benchmark/benchmark.h>

#include "statsim/char_features.hpp"
#include "statsim/clipworld.hpp"
#include "statsim/glyphs.hpp"
#include "statsim/mlp.hpp"
#include "statsim/proto_knn.hpp"
#include "statsim/rng.hpp"
#include "statsim/similarity.hpp"

using namespace statsim;

namespace {

Mlp net_of(std::size_t in, std::size_t hidden) {
    TrainConfig cfg;
    cfg.seed = 1;
    const std::size_t sizes[] = {in, hidden, 1};
    return mlp_init(sizes, cfg);
}

std::vector<double> random_input(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform01();
    return v;
}

void BM_Forward(benchmark::State& state) {
    const auto in = static_cast<std::size_t>(state.range(0));
    const Mlp net = net_of(in, 50);
    const auto x = random_input(in, 2);
    for (auto _ : state) benchmark::DoNotOptimize(forward(net, x));
}
BENCHMARK(BM_Forward)->Arg(20)->Arg(2000)->Arg(3200);

void BM_Gradient(benchmark::State& state) {
    const auto in = static_cast<std::size_t>(state.range(0));
    const Mlp net = net_of(in, 50);
    const PairSample s{random_input(in, 3), 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(gradient(net, s));
}
BENCHMARK(BM_Gradient)->Arg(20)->Arg(2000);

void BM_TrainStep(benchmark::State& state) {
    const Mlp net = net_of(2000, 50);
    const PairSample s{random_input(2000, 4), 1.0};
    TrainConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(train(net, std::span<const PairSample>(&s, 1), cfg));
}
BENCHMARK(BM_TrainStep);

void BM_Extract(benchmark::State& state) {
    Rng rng(5);
    const glyphs::WriterStyle w = glyphs::random_writer({}, rng);
    const GrayImage img = glyphs::render(8, w.digits[8]);
    for (auto _ : state) benchmark::DoNotOptimize(extract(img));
}
BENCHMARK(BM_Extract);

void BM_ClassifyDirect(benchmark::State& state) {
    const SimilarityModel m = LearnedSimilarity{net_of(2000, 50), true};
    PrototypeSet protos;
    for (int i = 0; i < 200; ++i) protos.prototypes.push_back({random_input(1000, 10 + i), i % 10});
    const auto x = random_input(1000, 6);
    for (auto _ : state) benchmark::DoNotOptimize(classify(x, protos, m));
}
BENCHMARK(BM_ClassifyDirect);

void BM_ClassifyIndexed(benchmark::State& state) {
    const SimilarityModel m = LearnedSimilarity{net_of(2000, 50), true};
    PrototypeSet protos;
    for (int i = 0; i < 200; ++i) protos.prototypes.push_back({random_input(1000, 10 + i), i % 10});
    const PrototypeIndex index(m, protos);
    const auto x = random_input(1000, 6);
    for (auto _ : state) benchmark::DoNotOptimize(index.classify(x));
}
BENCHMARK(BM_ClassifyIndexed);

void BM_PairScore(benchmark::State& state) {
    const SimilarityModel m = LearnedSimilarity{net_of(2000, 50), true};
    const PairScorer scorer(m);
    const PreparedVector a = scorer.prepare(random_input(1000, 7));
    const PreparedVector b = scorer.prepare(random_input(1000, 8));
    for (auto _ : state) benchmark::DoNotOptimize(scorer.score(a, b));
}
BENCHMARK(BM_PairScore);

void BM_LineupTrial(benchmark::State& state) {
    clip::TrialSpec spec;
    spec.repr = static_cast<clip::ReprKind>(state.range(0));
    Rng rng(9);
    for (auto _ : state) benchmark::DoNotOptimize(clip::make_lineup_trial(spec, rng));
}
BENCHMARK(BM_LineupTrial)->Arg(0)->Arg(1)->Arg(2);

}  // namespace
BENCHMARK_MAIN();
