#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "gadaboost/haar.hpp"

namespace gadaboost {

/// A training window with its ground-truth label (+1 face, -1 non-face).
/// inv_stddev is the window's variance normalization, fixed at ingestion.
struct Sample {
    IntegralImage integral;
    int label = 1;
    double inv_stddev = 1.0;

    /// Normalized feature response; identical to WindowView::value at scale 1.
    double feature_value(const HaarFeature& f) const {
        return static_cast<double>(eval_feature(integral, f)) * inv_stddev;
    }
};

Sample make_sample(const GrayImage& window, int label);

/// Ordered sample set sharing one window geometry.
class TrainingSet {
public:
    TrainingSet() = default;
    TrainingSet(WindowSize window, std::vector<Sample> samples);

    WindowSize window() const noexcept { return window_; }
    std::size_t size() const noexcept { return samples_.size(); }
    const Sample& operator[](std::size_t i) const { return samples_[i]; }
    std::span<const Sample> samples() const noexcept { return samples_; }
    std::span<const int> labels() const noexcept { return labels_; }

    std::size_t positives() const noexcept { return positives_; }
    std::size_t negatives() const noexcept { return samples_.size() - positives_; }

private:
    WindowSize window_;
    std::vector<Sample> samples_;
    std::vector<int> labels_;
    std::size_t positives_ = 0;
};

/// Non-negative per-sample weights.
class WeightVector {
public:
    WeightVector() = default;
    explicit WeightVector(std::vector<double> weights) : w_(std::move(weights)) {}

    static WeightVector uniform(std::size_t n);

    std::size_t size() const noexcept { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }
    double& operator[](std::size_t i) { return w_[i]; }
    std::span<const double> values() const noexcept { return w_; }

    double total() const noexcept;
    /// Rescales to sum 1. Throws std::domain_error if the total is not positive.
    void normalize();

    friend bool operator==(const WeightVector&, const WeightVector&) = default;

private:
    std::vector<double> w_;
};

/// Depth-1 regression tree over one feature: left_value when the
/// feature value is below threshold, right_value otherwise.
struct DecisionStump {
    HaarFeature feature;
    double threshold = std::numeric_limits<double>::infinity();
    double left_value = 0.0;
    double right_value = 0.0;

    double predict(double value) const noexcept { return value < threshold ? left_value : right_value; }

    friend bool operator==(const DecisionStump&, const DecisionStump&) = default;
};

double stump_predict(const DecisionStump& s, const Sample& sample);
double stump_predict(const DecisionStump& s, const WindowView& window);

/// One feature's responses over a sample set, sorted ascending
/// (ties ordered by sample index).
struct FeatureColumn {
    std::vector<double> values;
    std::vector<std::uint32_t> order;
};

FeatureColumn make_column(const HaarFeature& f, const TrainingSet& set);

struct StumpFit {
    double threshold = std::numeric_limits<double>::infinity();
    double left_value = 0.0;
    double right_value = 0.0;
    /// Reduction in weighted squared error against the constant predictor.
    double quality = 0.0;
};

/// Best midpoint split of a sorted column under the given weights.
StumpFit fit_column(const FeatureColumn& column, std::span<const int> labels,
                    std::span<const double> weights);

struct TrainedStump {
    DecisionStump stump;
    double quality = 0.0;
};

/// Fits a stump for f minimizing sum_i w_i (y_i - prediction_i)^2.
/// Requires at least two samples, both labels and one weight per sample.
TrainedStump train_stump(const HaarFeature& f, const TrainingSet& set, const WeightVector& w);

}  // namespace gadaboost
