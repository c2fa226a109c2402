#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "gadaboost/haar.hpp"
#include "gadaboost/stump.hpp"

namespace gadaboost {

/// Boosted sum of stumps; a window is accepted when the summed response
/// reaches the threshold.
struct Stage {
    std::vector<DecisionStump> stumps;
    double threshold = 0.0;

    double score(const WindowView& window) const;
    double score(const Sample& sample) const;
    bool accepts(const WindowView& window) const { return score(window) >= threshold; }
    bool accepts(const Sample& sample) const { return score(sample) >= threshold; }

    friend bool operator==(const Stage&, const Stage&) = default;
};

struct StageGoal {
    double min_hit_rate = 0.9;
    double max_false_alarm = 0.5;
    int max_weak_count = 100;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Running totals of training work.
struct WorkCounters {
    /// Feature response columns computed over a sample set.
    std::int64_t feature_evaluations = 0;
    /// Stump fits, one per (distinct candidate, boosting round).
    std::int64_t stump_fits = 0;

    WorkCounters& operator+=(const WorkCounters& o) {
        feature_evaluations += o.feature_evaluations;
        stump_fits += o.stump_fits;
        return *this;
    }
};

/// Computes and caches sorted feature columns for one training set.
/// Columns are cached up to a memory budget; beyond it they are recomputed
/// on every request. Not thread-safe; internal work fans out over `threads`.
class FeatureEvaluator {
public:
    explicit FeatureEvaluator(const TrainingSet& set, int threads = 1,
                              std::size_t cache_budget_bytes = std::size_t{1} << 30);

    const TrainingSet& set() const noexcept { return *set_; }
    int threads() const noexcept { return threads_; }

    /// Columns for the given canonical ids, computing any that are missing.
    /// The returned pointers stay valid until the next call.
    std::vector<const FeatureColumn*> columns(std::span<const HaarFeature> features,
                                              std::span<const std::int64_t> ids);

    const WorkCounters& counters() const noexcept { return counters_; }
    WorkCounters& counters() noexcept { return counters_; }

private:
    const TrainingSet* set_;
    int threads_;
    std::size_t budget_;
    std::size_t used_ = 0;
    std::unordered_map<std::int64_t, std::unique_ptr<FeatureColumn>> cache_;
    std::vector<std::unique_ptr<FeatureColumn>> scratch_;
    WorkCounters counters_;
};

struct BoostRound {
    DecisionStump best;
    double quality = 0.0;
    std::int64_t best_id = 0;
    std::size_t best_index = 0;
    /// Quality of every candidate, parallel to the candidate list.
    std::vector<double> qualities;
    /// Candidate canonical ids, parallel to the candidate list.
    std::vector<std::int64_t> ids;
    /// Weights after the Gentle AdaBoost update, normalized.
    WeightVector weights;
};

/// Picks the max-quality stump over candidates (ties: lowest canonical id)
/// and applies w_i <- w_i * exp(-y_i * f(x_i)), renormalized.
/// Throws std::invalid_argument for an empty candidate list.
BoostRound boost_round(std::span<const HaarFeature> candidates, const WeightVector& w,
                       FeatureEvaluator& evaluator);

BoostRound boost_round(std::span<const HaarFeature> candidates, const TrainingSet& set,
                       const WeightVector& w);

struct StageTraining {
    Stage stage;
    WeightVector weights;
    double hit_rate = 0.0;
    double false_alarm = 0.0;
    /// False when max_weak_count was reached before the false-alarm goal.
    bool goal_met = false;
};

/// Adds stumps until the false-alarm goal holds at a threshold keeping
/// min_hit_rate of the positives, or max_weak_count stumps exist.
StageTraining train_stage(std::span<const HaarFeature> candidates, const StageGoal& goal,
                          const WeightVector& w0, FeatureEvaluator& evaluator);

StageTraining train_stage(std::span<const HaarFeature> candidates, const TrainingSet& set,
                          const StageGoal& goal, const WeightVector& w0);

/// Largest threshold at which at least min_hit_rate of `positive_scores`
/// are >= threshold.
double hit_rate_threshold(std::span<const double> positive_scores, double min_hit_rate);

}  // namespace gadaboost
