#include "gadaboost/stump.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gadaboost {

Sample make_sample(const GrayImage& window, int label) {
    if (label != 1 && label != -1) {
        throw std::invalid_argument("make_sample: label must be +1 or -1");
    }
    Sample s{IntegralImage(window), label, 1.0};
    s.inv_stddev = 1.0 / s.integral.rect_stddev({0, 0, window.width(), window.height()});
    return s;
}

TrainingSet::TrainingSet(WindowSize window, std::vector<Sample> samples)
    : window_(window), samples_(std::move(samples)) {
    labels_.reserve(samples_.size());
    for (const auto& s : samples_) {
        if (s.integral.width() != window.width || s.integral.height() != window.height) {
            throw std::invalid_argument("TrainingSet: sample size differs from the training window");
        }
        if (s.label != 1 && s.label != -1) {
            throw std::invalid_argument("TrainingSet: label must be +1 or -1");
        }
        labels_.push_back(s.label);
        if (s.label > 0) {
            ++positives_;
        }
    }
}

WeightVector WeightVector::uniform(std::size_t n) {
    if (n == 0) {
        return {};
    }
    return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double WeightVector::total() const noexcept { return std::accumulate(w_.begin(), w_.end(), 0.0); }

void WeightVector::normalize() {
    const double t = total();
    if (!(t > 0.0)) {
        throw std::domain_error("WeightVector::normalize: total weight is not positive");
    }
    for (auto& v : w_) {
        v /= t;
    }
}

double stump_predict(const DecisionStump& s, const Sample& sample) {
    return s.predict(sample.feature_value(s.feature));
}

double stump_predict(const DecisionStump& s, const WindowView& window) {
    return s.predict(window.value(s.feature));
}

FeatureColumn make_column(const HaarFeature& f, const TrainingSet& set) {
    const std::size_t n = set.size();
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        raw[i] = set[i].feature_value(f);
    }
    FeatureColumn col;
    col.order.resize(n);
    std::iota(col.order.begin(), col.order.end(), 0u);
    std::sort(col.order.begin(), col.order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return raw[a] < raw[b] || (raw[a] == raw[b] && a < b);
    });
    col.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        col.values[k] = raw[col.order[k]];
    }
    return col;
}

namespace {

double mean_or_zero(double weighted_sum, double weight) {
    return weight > 0.0 ? weighted_sum / weight : 0.0;
}

double explained(double weighted_sum, double weight) {
    return weight > 0.0 ? weighted_sum * weighted_sum / weight : 0.0;
}

// Midpoint that keeps lo strictly on the left and hi on the right.
double split_point(double lo, double hi) {
    const double mid = lo + (hi - lo) / 2.0;
    return mid > lo ? mid : hi;
}

}  // namespace

StumpFit fit_column(const FeatureColumn& column, std::span<const int> labels,
                    std::span<const double> weights) {
    const std::size_t n = column.values.size();
    double w_total = 0.0;
    double wy_total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto i = column.order[k];
        w_total += weights[i];
        wy_total += weights[i] * labels[i];
    }
    const double parent = explained(wy_total, w_total);

    StumpFit fit;
    fit.left_value = fit.right_value = mean_or_zero(wy_total, w_total);

    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_k = n;
    double best_lw = 0.0;
    double best_lwy = 0.0;
    double lw = 0.0;
    double lwy = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const auto i = column.order[k];
        lw += weights[i];
        lwy += weights[i] * labels[i];
        if (column.values[k] == column.values[k + 1]) {
            continue;
        }
        const double score = explained(lwy, lw) + explained(wy_total - lwy, w_total - lw);
        if (score > best) {
            best = score;
            best_k = k;
            best_lw = lw;
            best_lwy = lwy;
        }
    }
    if (best_k == n) {
        return fit;
    }
    fit.threshold = split_point(column.values[best_k], column.values[best_k + 1]);
    fit.left_value = std::clamp(mean_or_zero(best_lwy, best_lw), -1.0, 1.0);
    fit.right_value = std::clamp(mean_or_zero(wy_total - best_lwy, w_total - best_lw), -1.0, 1.0);
    fit.quality = std::max(best - parent, 0.0);
    return fit;
}

TrainedStump train_stump(const HaarFeature& f, const TrainingSet& set, const WeightVector& w) {
    if (set.size() < 2) {
        throw std::invalid_argument("train_stump: need at least two samples");
    }
    if (set.positives() == 0 || set.negatives() == 0) {
        throw std::invalid_argument("train_stump: both labels must be present");
    }
    if (w.size() != set.size()) {
        throw std::invalid_argument("train_stump: weight count differs from sample count");
    }
    const FeatureColumn col = make_column(f, set);
    const StumpFit fit = fit_column(col, set.labels(), w.values());
    return {{f, fit.threshold, fit.left_value, fit.right_value}, fit.quality};
}

}  // namespace gadaboost
