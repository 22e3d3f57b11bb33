#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "kbfresh/predictor.hpp"
#include "kbfresh/random.hpp"
#include "kbfresh/text.hpp"
#include "kbfresh/topic.hpp"

namespace {

std::vector<std::vector<double>> blob_points(std::size_t n, std::size_t dim, kbfresh::Rng& rng) {
    std::vector<std::vector<double>> points(n, std::vector<double>(dim));
    for (auto& p : points) {
        for (auto& x : p) x = kbfresh::uniform01(rng);
    }
    return points;
}

// Star graph: one hub plus n_values leaves, random unit-ish features.
kbfresh::PropertyGraph star_graph(std::size_t n_values, std::size_t f, kbfresh::Rng& rng) {
    kbfresh::PropertyGraph g;
    g.entity_id = "bench";
    g.label = 1;
    const std::size_t n = n_values + 1;
    g.roles.assign(n, kbfresh::NodeRole::Value);
    g.roles[0] = kbfresh::NodeRole::Center;
    g.adjacency.assign(n * n, 0);
    g.features.assign(n, std::vector<double>(f));
    for (auto& row : g.features) {
        for (auto& x : row) x = kbfresh::uniform01(rng) - 0.5;
    }
    for (std::size_t i = 1; i < n; ++i) g.set_edge(0, i);
    return g;
}

void BM_EditDistance(benchmark::State& state) {
    const std::string a = "independence day celebrations";
    const std::string b = "indepndence day celebratoin";
    for (auto _ : state) benchmark::DoNotOptimize(kbfresh::edit_distance(a, b));
}
BENCHMARK(BM_EditDistance);

void BM_Embed(benchmark::State& state) {
    std::vector<std::pair<std::string, std::string>> corpus;
    kbfresh::Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        std::string text;
        for (int w = 0; w < 30; ++w) {
            text += "tok" + std::to_string(rng() % 400) + " ";
        }
        corpus.emplace_back("e" + std::to_string(i), text);
    }
    auto [points, vocab] = kbfresh::embed_corpus(corpus);
    benchmark::DoNotOptimize(points);
    const std::string query = "tok1 tok2 tok3 tok4 tok5 tok6 tok7 tok8";
    for (auto _ : state) benchmark::DoNotOptimize(vocab.embed(query));
}
BENCHMARK(BM_Embed);

void BM_Kmeans(benchmark::State& state) {
    kbfresh::Rng rng(11);
    const auto points = blob_points(200, 16, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kbfresh::kmeans(points, 5, 3));
    }
}
BENCHMARK(BM_Kmeans);

void BM_GcnForward(benchmark::State& state) {
    kbfresh::Rng rng(5);
    const auto g = star_graph(8, 32, rng);
    const auto params = kbfresh::init_params(32, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kbfresh::gcn_forward(g, params));
    }
}
BENCHMARK(BM_GcnForward);

void BM_GcnForwardBackward(benchmark::State& state) {
    kbfresh::Rng rng(5);
    const auto g = star_graph(8, 32, rng);
    const auto params = kbfresh::init_params(32, 1);
    for (auto _ : state) {
        auto cache = kbfresh::gcn_forward(g, params);
        benchmark::DoNotOptimize(kbfresh::gcn_backward(params, cache, 1));
    }
}
BENCHMARK(BM_GcnForwardBackward);

}  // namespace

BENCHMARK_MAIN();
