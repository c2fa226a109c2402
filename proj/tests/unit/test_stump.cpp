#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "gadaboost/stump.hpp"
#include "oracles.hpp"

using namespace gadaboost;

namespace {

FeatureColumn column_of(const std::vector<double>& values) {
    FeatureColumn c;
    c.order.resize(values.size());
    std::iota(c.order.begin(), c.order.end(), 0u);
    std::stable_sort(c.order.begin(), c.order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    for (auto i : c.order) c.values.push_back(values[i]);
    return c;
}

double pixel_stddev(const GrayImage& img) {
    double s = 0, s2 = 0;
    for (auto p : img.pixels()) {
        s += p;
        s2 += static_cast<double>(p) * p;
    }
    const double n = static_cast<double>(img.pixels().size());
    const double var = s2 / n - (s / n) * (s / n);
    return std::max(1.0, std::sqrt(std::max(var, 0.0)));
}

}  // namespace

TEST_CASE("separable four-sample fixture") {
    // Negatives at 0 and 1, positives at 2 and 3.
    const std::vector<double> values{2, 0, 3, 1};
    const std::vector<int> labels{1, -1, 1, -1};
    const std::vector<double> w(4, 0.25);
    const StumpFit fit = fit_column(column_of(values), labels, w);
    CHECK(fit.threshold > 1.0);
    CHECK(fit.threshold < 2.0);
    CHECK(fit.left_value == -1.0);
    CHECK(fit.right_value == 1.0);
    CHECK(fit.quality == doctest::Approx(1.0));
    const auto scan = oracle::brute_force_stump(values, labels, w);
    CHECK(fit.quality == doctest::Approx(scan.best_quality));
    // Zero residual: every sample predicted exactly.
    DecisionStump s;
    s.threshold = fit.threshold;
    s.left_value = fit.left_value;
    s.right_value = fit.right_value;
    for (std::size_t i = 0; i < 4; ++i) CHECK(s.predict(values[i]) == labels[i]);
}

TEST_CASE("constant feature has no split") {
    const std::vector<double> values(6, 4.5);
    const std::vector<int> labels{1, -1, 1, -1, 1, 1};
    const std::vector<double> w(6, 1.0 / 6);
    const StumpFit fit = fit_column(column_of(values), labels, w);
    CHECK(fit.quality == 0.0);
    CHECK(std::isinf(fit.threshold));
    // Degenerate stump always answers left with the weighted mean label.
    CHECK(fit.left_value == doctest::Approx(2.0 / 6));
}

TEST_CASE("degenerate stump predicts left everywhere") {
    DecisionStump s;
    s.left_value = 0.3;
    s.right_value = -0.7;
    CHECK(s.predict(1e300) == 0.3);
    CHECK(s.predict(-1e300) == 0.3);
}

TEST_CASE("values equal to the threshold go right") {
    DecisionStump s;
    s.threshold = 1.5;
    s.left_value = -1;
    s.right_value = 1;
    CHECK(s.predict(1.5) == 1);
    CHECK(s.predict(std::nextafter(1.5, 0.0)) == -1);
}

TEST_CASE("fit_column agrees with the brute-force scan on random instances") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> small(0, 9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int inst = 0; inst < 200; ++inst) {
        std::vector<double> values(64);
        std::vector<int> labels(64);
        std::vector<double> w(64);
        for (int i = 0; i < 64; ++i) {
            // Small integer values force plenty of ties.
            values[i] = inst % 2 ? small(rng) : u(rng) * 100 - 50;
            labels[i] = u(rng) < 0.5 ? 1 : -1;
            w[i] = u(rng);
        }
        labels[0] = 1;
        labels[1] = -1;
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        for (auto& x : w) x /= total;
        const StumpFit fit = fit_column(column_of(values), labels, w);
        const auto scan = oracle::brute_force_stump(values, labels, w);
        REQUIRE(std::abs(fit.quality - scan.best_quality) <= 1e-9);
        CHECK(fit.left_value >= -1.0);
        CHECK(fit.left_value <= 1.0);
        CHECK(fit.right_value >= -1.0);
        CHECK(fit.right_value <= 1.0);
    }
}

TEST_CASE("train_stump on images matches the oracle and separates a separable set") {
    std::mt19937_64 rng(22);
    const WindowSize win{8, 8};
    const HaarFeature f{0, 0, 8, 8, HaarType::X2};
    // Positives are bright on the left, negatives bright on the right.
    std::vector<Sample> samples;
    std::vector<double> values;
    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) {
        GrayImage img = oracle::random_image(8, 8, rng);
        const int label = i % 2 ? -1 : 1;
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x)
                if ((x < 4) == (label == 1)) img.at(x, y) = static_cast<std::uint8_t>(200 + img.at(x, y) % 50);
                else img.at(x, y) = static_cast<std::uint8_t>(img.at(x, y) % 50);
        values.push_back(static_cast<double>(oracle::feature_response(img, f)) / pixel_stddev(img));
        labels.push_back(label);
        samples.push_back(make_sample(img, label));
    }
    const TrainingSet set(win, std::move(samples));
    const WeightVector w = WeightVector::uniform(set.size());
    const TrainedStump ts = train_stump(f, set, w);
    const auto scan = oracle::brute_force_stump(values, labels, std::vector<double>(w.values().begin(), w.values().end()));
    CHECK(std::abs(ts.quality - scan.best_quality) <= 1e-9);
    CHECK(ts.quality == doctest::Approx(1.0));
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK(stump_predict(ts.stump, set[i]) == doctest::Approx(set[i].label));
    }
}

TEST_CASE("train_stump input validation") {
    std::mt19937_64 rng(23);
    const TrainingSet set = oracle::random_set(6, {4, 4}, rng);
    const HaarFeature f{0, 0, 4, 4, HaarType::X2};
    CHECK_THROWS_AS(train_stump(f, set, WeightVector::uniform(5)), std::invalid_argument);
    std::vector<Sample> pos_only{set[0], set[2]};
    const TrainingSet one_label({4, 4}, pos_only);
    CHECK_THROWS_AS(train_stump(f, one_label, WeightVector::uniform(2)), std::invalid_argument);
}

TEST_CASE("weights normalize to one and reject a zero total") {
    WeightVector w(std::vector<double>{1, 3});
    w.normalize();
    CHECK(w[0] == doctest::Approx(0.25));
    CHECK(w.total() == doctest::Approx(1.0));
    WeightVector z(std::vector<double>{0, 0});
    CHECK_THROWS_AS(z.normalize(), std::domain_error);
}

TEST_CASE("sample feature value is raw response over pixel stddev") {
    std::mt19937_64 rng(24);
    const GrayImage img = oracle::random_image(6, 6, rng);
    const Sample s = make_sample(img, 1);
    const HaarFeature f{0, 0, 6, 6, HaarType::X2Y2};
    CHECK(s.feature_value(f) == doctest::Approx(oracle::feature_response(img, f) / pixel_stddev(img)));
    CHECK_THROWS_AS(make_sample(img, 0), std::invalid_argument);
}
