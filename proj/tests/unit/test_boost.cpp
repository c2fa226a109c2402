#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "gadaboost/boost.hpp"
#include "oracles.hpp"

using namespace gadaboost;

namespace {

// Positives bright on the left half, negatives bright on the right half;
// the bottom rows are constant so features there carry no information.
TrainingSet split_set(int n, std::mt19937_64& rng) {
    std::vector<Sample> samples;
    for (int i = 0; i < n; ++i) {
        const int label = i % 2 ? -1 : 1;
        GrayImage img = oracle::random_image(8, 8, rng);
        for (int y = 0; y < 8; ++y) {
            for (int x = 0; x < 8; ++x) {
                if (y >= 6) {
                    img.at(x, y) = 100;
                } else if ((x < 4) == (label == 1)) {
                    img.at(x, y) = static_cast<std::uint8_t>(180 + img.at(x, y) % 60);
                } else {
                    img.at(x, y) = static_cast<std::uint8_t>(img.at(x, y) % 60);
                }
            }
        }
        samples.push_back(make_sample(img, label));
    }
    return TrainingSet({8, 8}, std::move(samples));
}

std::vector<double> oracle_values(const TrainingSet& set, const HaarFeature& f) {
    std::vector<double> v;
    for (const auto& s : set.samples()) {
        v.push_back(s.feature_value(f));
    }
    return v;
}

std::vector<int> labels_of(const TrainingSet& set) { return {set.labels().begin(), set.labels().end()}; }

}  // namespace

TEST_CASE("single candidate is always chosen") {
    std::mt19937_64 rng(31);
    const TrainingSet set = oracle::random_set(20, {6, 6}, rng);
    const std::vector<HaarFeature> one{{0, 0, 2, 1, HaarType::X2}};
    const BoostRound r = boost_round(one, set, WeightVector::uniform(set.size()));
    CHECK(r.best.feature == one[0]);
    CHECK(r.best_index == 0);
    CHECK_THROWS_AS(boost_round(std::vector<HaarFeature>{}, set, WeightVector::uniform(set.size())),
                    std::invalid_argument);
}

TEST_CASE("perfect separator is selected and the update shrinks every weight by 1/e") {
    std::mt19937_64 rng(32);
    const TrainingSet set = split_set(24, rng);
    const std::vector<HaarFeature> candidates{{0, 0, 8, 6, HaarType::Y2},
                                              {0, 0, 8, 8, HaarType::X2},
                                              {1, 1, 4, 4, HaarType::X3}};
    std::vector<double> raw(set.size());
    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (auto& x : raw) x = u(rng);
    WeightVector w(raw);
    w.normalize();
    const BoostRound r = boost_round(candidates, set, w);
    CHECK(r.best.feature == candidates[1]);
    // Zero error left, so the gain is the constant predictor's error 1 - m^2.
    double m = 0;
    for (std::size_t i = 0; i < set.size(); ++i) m += w[i] * set[i].label;
    CHECK(r.quality == doctest::Approx(1.0 - m * m));
    // Every sample is classified with margin 1, so w_i * e^{-1} renormalizes back to w.
    double total = 0;
    for (std::size_t i = 0; i < set.size(); ++i) total += w[i] * std::exp(-1.0);
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK(r.weights[i] == doctest::Approx(w[i] * std::exp(-1.0) / total));
    }
}

TEST_CASE("weight update follows exp(-y f(x)) on random data") {
    std::mt19937_64 rng(33);
    const TrainingSet set = oracle::random_set(30, {6, 6}, rng);
    std::vector<HaarFeature> candidates;
    for (int k = 0; k < 20; ++k) candidates.push_back(oracle::random_feature({6, 6}, rng));
    const WeightVector w = WeightVector::uniform(set.size());
    const BoostRound r = boost_round(candidates, set, w);
    std::vector<double> expect(set.size());
    double total = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double v = set[i].feature_value(r.best.feature);
        const double f = v < r.best.threshold ? r.best.left_value : r.best.right_value;
        expect[i] = w[i] * std::exp(-set[i].label * f);
        total += expect[i];
    }
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK(r.weights[i] == doctest::Approx(expect[i] / total));
    }
    CHECK(r.weights.total() == doctest::Approx(1.0));
}

TEST_CASE("quality ties go to the lowest canonical id") {
    std::mt19937_64 rng(34);
    const TrainingSet set = split_set(16, rng);
    // Both live in the constant bottom rows: quality 0 each.
    const std::vector<HaarFeature> candidates{{4, 6, 8, 8, HaarType::X2}, {0, 6, 2, 8, HaarType::Y2}};
    const BoostRound r = boost_round(candidates, set, WeightVector::uniform(set.size()));
    CHECK(r.qualities[0] == r.qualities[1]);
    const auto lower = std::min_element(r.ids.begin(), r.ids.end()) - r.ids.begin();
    CHECK(r.best_index == static_cast<std::size_t>(lower));
    CHECK(r.best_id == r.ids[static_cast<std::size_t>(lower)]);
}

TEST_CASE("selected quality equals the brute-force maximum in every round") {
    std::mt19937_64 rng(35);
    const TrainingSet set = oracle::random_set(64, {10, 10}, rng);
    std::vector<HaarFeature> candidates;
    for (int k = 0; k < 200; ++k) candidates.push_back(oracle::random_feature({10, 10}, rng));
    FeatureEvaluator ev(set);
    WeightVector w = WeightVector::uniform(set.size());
    for (int round = 0; round < 5; ++round) {
        const BoostRound r = boost_round(candidates, w, ev);
        double best = 0;
        const std::vector<double> wv(w.values().begin(), w.values().end());
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            const double q = oracle::brute_force_stump(oracle_values(set, candidates[c]), labels_of(set), wv).best_quality;
            CHECK(std::abs(r.qualities[c] - q) <= 1e-9);
            best = std::max(best, q);
        }
        CHECK(std::abs(r.quality - best) <= 1e-9);
        w = r.weights;
    }
}

TEST_CASE("evaluator computes each distinct column once while it fits the budget") {
    std::mt19937_64 rng(36);
    const TrainingSet set = oracle::random_set(16, {6, 6}, rng);
    std::vector<HaarFeature> candidates{{0, 0, 2, 2, HaarType::X2}, {0, 0, 2, 2, HaarType::X2}, {0, 0, 6, 6, HaarType::Y2}};
    FeatureEvaluator ev(set);
    WeightVector w = WeightVector::uniform(set.size());
    for (int k = 0; k < 3; ++k) w = boost_round(candidates, w, ev).weights;
    CHECK(ev.counters().feature_evaluations == 2);
    CHECK(ev.counters().stump_fits == 6);

    FeatureEvaluator no_cache(set, 1, 0);
    w = WeightVector::uniform(set.size());
    for (int k = 0; k < 3; ++k) w = boost_round(candidates, w, no_cache).weights;
    CHECK(no_cache.counters().feature_evaluations == 6);
}

TEST_CASE("threads do not change the result") {
    std::mt19937_64 rng(37);
    const TrainingSet set = oracle::random_set(40, {8, 8}, rng);
    std::vector<HaarFeature> candidates;
    for (int k = 0; k < 100; ++k) candidates.push_back(oracle::random_feature({8, 8}, rng));
    FeatureEvaluator one(set, 1), four(set, 4);
    const auto a = boost_round(candidates, WeightVector::uniform(set.size()), one);
    const auto b = boost_round(candidates, WeightVector::uniform(set.size()), four);
    CHECK(a.best == b.best);
    CHECK(a.qualities == b.qualities);
    CHECK(a.weights == b.weights);
}

TEST_CASE("hit-rate threshold keeps the required fraction of positives") {
    const std::vector<double> scores{5, 1, 9, 3, 7, 2, 10, 4, 8, 6};
    CHECK(hit_rate_threshold(scores, 0.9) == 2);
    CHECK(hit_rate_threshold(scores, 1.0) == 1);
    CHECK(hit_rate_threshold(scores, 0.5) == 6);
    CHECK(hit_rate_threshold(scores, 0.01) == 10);
}

TEST_CASE("stage goal validation") {
    CHECK_NOTHROW(StageGoal{}.validate());
    CHECK_THROWS_AS((StageGoal{0.0, 0.5, 10}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((StageGoal{0.9, 1.0, 10}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((StageGoal{0.9, 0.5, 0}.validate()), std::invalid_argument);
}

TEST_CASE("separable stage needs one stump") {
    std::mt19937_64 rng(38);
    const TrainingSet set = split_set(40, rng);
    const std::vector<HaarFeature> candidates{{0, 0, 8, 6, HaarType::Y2}, {0, 0, 8, 8, HaarType::X2}};
    const StageTraining st = train_stage(candidates, set, StageGoal{}, WeightVector::uniform(set.size()));
    CHECK(st.stage.stumps.size() == 1);
    CHECK(st.hit_rate == 1.0);
    CHECK(st.false_alarm == 0.0);
    CHECK(st.goal_met);
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK(st.stage.accepts(set[i]) == (set[i].label == 1));
    }
}

TEST_CASE("weak-count cap bounds the stage") {
    std::mt19937_64 rng(39);
    const TrainingSet set = oracle::random_set(60, {6, 6}, rng);
    std::vector<HaarFeature> candidates;
    for (int k = 0; k < 30; ++k) candidates.push_back(oracle::random_feature({6, 6}, rng));
    const StageTraining st = train_stage(candidates, set, StageGoal{0.9, 0.01, 3}, WeightVector::uniform(set.size()));
    CHECK(st.stage.stumps.size() <= 3);
    CHECK_FALSE(st.goal_met);
    CHECK(st.hit_rate >= 0.9);
}

TEST_CASE("uninformative features reach the false-alarm goal only by fitting noise") {
    std::mt19937_64 rng(40);
    const TrainingSet set = oracle::random_set(200, {6, 6}, rng);
    std::vector<HaarFeature> candidates;
    for (int k = 0; k < 40; ++k) candidates.push_back(oracle::random_feature({6, 6}, rng));
    // One stump on noise leaves most negatives above the 90% hit threshold.
    const StageTraining one = train_stage(candidates, set, StageGoal{0.9, 0.5, 1}, WeightVector::uniform(set.size()));
    CHECK_FALSE(one.goal_met);
    CHECK(one.false_alarm > 0.5);
    // Given room, boosting overfits until the goal holds, landing near it.
    const StageTraining many = train_stage(candidates, set, StageGoal{0.9, 0.5, 100}, WeightVector::uniform(set.size()));
    CHECK(many.hit_rate >= 0.9);
    CHECK(many.false_alarm <= 0.5);
    CHECK(many.false_alarm == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("stage score is the sum of stump outputs and ties accept") {
    Stage s;
    s.stumps.push_back({{0, 0, 2, 1, HaarType::X2}, 0.0, -0.5, 0.5});
    s.stumps.push_back({{0, 0, 2, 1, HaarType::X2}, 10.0, 0.25, 1.0});
    GrayImage img(2, 1);
    img.at(0, 0) = 100;
    img.at(1, 0) = 0;
    const Sample smp = make_sample(img, 1);
    // value = 100 / stddev 50 = 2: right of 0, left of 10.
    CHECK(s.score(smp) == doctest::Approx(0.75));
    s.threshold = s.score(smp);
    CHECK(s.accepts(smp));
}
