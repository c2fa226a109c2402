#include <benchmark/benchmark.h>

#include <random>

#include "gadaboost/boost.hpp"
#include "gadaboost/haar.hpp"
#include "gadaboost/stump.hpp"
#include "gadaboost/synth.hpp"

using namespace gadaboost;

namespace {

GrayImage noise_image(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> px(0, 255);
    GrayImage img(w, h);
    for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(px(rng));
    return img;
}

TrainingSet make_set(int n) {
    std::mt19937_64 rng(3);
    std::vector<Sample> samples;
    for (int i = 0; i < n; ++i) {
        samples.push_back(make_sample(i % 2 ? synth::render_face(19, 19, rng) : synth::render_background(19, 19, rng),
                                      i % 2 ? 1 : -1));
    }
    return TrainingSet({19, 19}, std::move(samples));
}

}  // namespace

static void BM_IntegralImage(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const GrayImage img = noise_image(side, side, 1);
    for (auto _ : state) {
        IntegralImage ii(img);
        benchmark::DoNotOptimize(ii.sum_at(side, side));
    }
    state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_IntegralImage)->Arg(64)->Arg(256)->Arg(1024);

static void BM_EvalFeature(benchmark::State& state) {
    const IntegralImage ii(noise_image(24, 24, 2));
    const auto features = enumerate_features({24, 24});
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval_feature(ii, features[i]));
        i = (i + 7919) % features.size();
    }
}
BENCHMARK(BM_EvalFeature);

static void BM_WindowViewScaled(benchmark::State& state) {
    const IntegralImage ii(noise_image(96, 96, 4));
    const auto features = enumerate_features({19, 19});
    const WindowView view(ii, {19, 19}, 5, 7, 2.44);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(view.value(features[i]));
        i = (i + 7919) % features.size();
    }
}
BENCHMARK(BM_WindowViewScaled);

static void BM_MakeColumn(benchmark::State& state) {
    const TrainingSet set = make_set(static_cast<int>(state.range(0)));
    const HaarFeature f{2, 3, 14, 11, HaarType::X2};
    for (auto _ : state) {
        benchmark::DoNotOptimize(make_column(f, set));
    }
}
BENCHMARK(BM_MakeColumn)->Arg(400)->Arg(1000);

static void BM_FitColumn(benchmark::State& state) {
    const TrainingSet set = make_set(static_cast<int>(state.range(0)));
    const FeatureColumn col = make_column({2, 3, 14, 11, HaarType::X2}, set);
    const WeightVector w = WeightVector::uniform(set.size());
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_column(col, set.labels(), w.values()));
    }
}
BENCHMARK(BM_FitColumn)->Arg(400)->Arg(1000);

static void BM_BoostRound(benchmark::State& state) {
    const TrainingSet set = make_set(400);
    auto all = enumerate_features({19, 19});
    std::vector<HaarFeature> candidates;
    for (std::size_t i = 0; i < all.size() && candidates.size() < static_cast<std::size_t>(state.range(0)); i += 61) {
        candidates.push_back(all[i]);
    }
    FeatureEvaluator evaluator(set);
    const WeightVector w = WeightVector::uniform(set.size());
    for (auto _ : state) {
        benchmark::DoNotOptimize(boost_round(candidates, w, evaluator));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(candidates.size()));
}
BENCHMARK(BM_BoostRound)->Arg(100)->Arg(1000);

BENCHMARK_MAIN();
