#include "gadaboost/boost.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gadaboost/parallel.hpp"

namespace gadaboost {

double Stage::score(const WindowView& window) const {
    double s = 0.0;
    for (const auto& stump : stumps) {
        s += stump_predict(stump, window);
    }
    return s;
}

double Stage::score(const Sample& sample) const {
    double s = 0.0;
    for (const auto& stump : stumps) {
        s += stump_predict(stump, sample);
    }
    return s;
}

void StageGoal::validate() const {
    if (!(min_hit_rate > 0.0 && min_hit_rate <= 1.0)) {
        throw std::invalid_argument("StageGoal: min_hit_rate must be in (0, 1]");
    }
    if (!(max_false_alarm > 0.0 && max_false_alarm < 1.0)) {
        throw std::invalid_argument("StageGoal: max_false_alarm must be in (0, 1)");
    }
    if (max_weak_count < 1) {
        throw std::invalid_argument("StageGoal: max_weak_count must be >= 1");
    }
}

FeatureEvaluator::FeatureEvaluator(const TrainingSet& set, int threads, std::size_t cache_budget_bytes)
    : set_(&set), threads_(std::max(threads, 1)), budget_(cache_budget_bytes) {}

std::vector<const FeatureColumn*> FeatureEvaluator::columns(std::span<const HaarFeature> features,
                                                            std::span<const std::int64_t> ids) {
    scratch_.clear();
    std::vector<const FeatureColumn*> out(features.size(), nullptr);
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (auto it = cache_.find(ids[i]); it != cache_.end()) {
            out[i] = it->second.get();
        } else {
            missing.push_back(i);
        }
    }
    std::vector<std::unique_ptr<FeatureColumn>> fresh(missing.size());
    parallel_for(missing.size(), threads_, [&](std::size_t k) {
        fresh[k] = std::make_unique<FeatureColumn>(make_column(features[missing[k]], *set_));
    });
    counters_.feature_evaluations += static_cast<std::int64_t>(missing.size());

    const std::size_t column_bytes =
        set_->size() * (sizeof(double) + sizeof(std::uint32_t)) + sizeof(FeatureColumn);
    for (std::size_t k = 0; k < missing.size(); ++k) {
        out[missing[k]] = fresh[k].get();
        if (used_ + column_bytes <= budget_) {
            used_ += column_bytes;
            cache_.emplace(ids[missing[k]], std::move(fresh[k]));
        } else {
            scratch_.push_back(std::move(fresh[k]));
        }
    }
    return out;
}

BoostRound boost_round(std::span<const HaarFeature> candidates, const WeightVector& w,
                       FeatureEvaluator& evaluator) {
    if (candidates.empty()) {
        throw std::invalid_argument("boost_round: empty candidate set");
    }
    const TrainingSet& set = evaluator.set();
    if (w.size() != set.size()) {
        throw std::invalid_argument("boost_round: weight count differs from sample count");
    }
    const WindowSize window = set.window();

    BoostRound round;
    round.ids.resize(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        round.ids[i] = canonical_id(candidates[i], window);
    }

    // Fit each distinct feature once.
    std::vector<std::size_t> unique;
    {
        std::unordered_map<std::int64_t, std::size_t> seen;
        seen.reserve(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (seen.emplace(round.ids[i], i).second) {
                unique.push_back(i);
            }
        }
    }
    std::vector<HaarFeature> features(unique.size());
    std::vector<std::int64_t> ids(unique.size());
    for (std::size_t k = 0; k < unique.size(); ++k) {
        features[k] = candidates[unique[k]];
        ids[k] = round.ids[unique[k]];
    }
    const auto cols = evaluator.columns(features, ids);
    std::vector<StumpFit> fits(unique.size());
    parallel_for(unique.size(), evaluator.threads(), [&](std::size_t k) {
        fits[k] = fit_column(*cols[k], set.labels(), w.values());
    });
    evaluator.counters().stump_fits += static_cast<std::int64_t>(unique.size());

    std::size_t best = 0;
    for (std::size_t k = 1; k < unique.size(); ++k) {
        if (fits[k].quality > fits[best].quality ||
            (fits[k].quality == fits[best].quality && ids[k] < ids[best])) {
            best = k;
        }
    }

    std::unordered_map<std::int64_t, double> quality_by_id;
    quality_by_id.reserve(unique.size());
    for (std::size_t k = 0; k < unique.size(); ++k) {
        quality_by_id.emplace(ids[k], fits[k].quality);
    }
    round.qualities.resize(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        round.qualities[i] = quality_by_id[round.ids[i]];
    }

    const StumpFit& fit = fits[best];
    round.best = {features[best], fit.threshold, fit.left_value, fit.right_value};
    round.quality = fit.quality;
    round.best_id = ids[best];
    round.best_index = unique[best];

    std::vector<double> next(w.values().begin(), w.values().end());
    const FeatureColumn& col = *cols[best];
    for (std::size_t k = 0; k < col.values.size(); ++k) {
        const auto i = col.order[k];
        next[i] *= std::exp(-set.labels()[i] * round.best.predict(col.values[k]));
    }
    round.weights = WeightVector(std::move(next));
    round.weights.normalize();
    return round;
}

BoostRound boost_round(std::span<const HaarFeature> candidates, const TrainingSet& set,
                       const WeightVector& w) {
    FeatureEvaluator evaluator(set);
    return boost_round(candidates, w, evaluator);
}

double hit_rate_threshold(std::span<const double> positive_scores, double min_hit_rate) {
    if (positive_scores.empty()) {
        throw std::invalid_argument("hit_rate_threshold: no positive scores");
    }
    std::vector<double> sorted(positive_scores.begin(), positive_scores.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double needed = std::ceil(min_hit_rate * static_cast<double>(sorted.size()) - 1e-9);
    const auto keep = std::clamp<std::size_t>(static_cast<std::size_t>(needed), 1, sorted.size());
    return sorted[keep - 1];
}

StageTraining train_stage(std::span<const HaarFeature> candidates, const StageGoal& goal,
                          const WeightVector& w0, FeatureEvaluator& evaluator) {
    goal.validate();
    const TrainingSet& set = evaluator.set();
    if (set.positives() == 0 || set.negatives() == 0) {
        throw std::invalid_argument("train_stage: both classes must be non-empty");
    }
    if (candidates.empty()) {
        throw std::invalid_argument("train_stage: empty candidate set");
    }

    StageTraining out;
    out.weights = w0;
    std::vector<double> scores(set.size(), 0.0);
    std::vector<double> positive_scores;
    positive_scores.reserve(set.positives());

    while (static_cast<int>(out.stage.stumps.size()) < goal.max_weak_count) {
        BoostRound round = boost_round(candidates, out.weights, evaluator);
        for (std::size_t i = 0; i < set.size(); ++i) {
            scores[i] += stump_predict(round.best, set[i]);
        }
        out.stage.stumps.push_back(round.best);
        out.weights = std::move(round.weights);

        positive_scores.clear();
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (set.labels()[i] > 0) {
                positive_scores.push_back(scores[i]);
            }
        }
        out.stage.threshold = hit_rate_threshold(positive_scores, goal.min_hit_rate);

        std::size_t hits = 0;
        std::size_t false_alarms = 0;
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (scores[i] >= out.stage.threshold) {
                (set.labels()[i] > 0 ? hits : false_alarms) += 1;
            }
        }
        out.hit_rate = static_cast<double>(hits) / static_cast<double>(set.positives());
        out.false_alarm = static_cast<double>(false_alarms) / static_cast<double>(set.negatives());
        if (out.false_alarm <= goal.max_false_alarm) {
            out.goal_met = true;
            break;
        }
    }
    return out;
}

StageTraining train_stage(std::span<const HaarFeature> candidates, const TrainingSet& set,
                          const StageGoal& goal, const WeightVector& w0) {
    FeatureEvaluator evaluator(set);
    return train_stage(candidates, goal, w0, evaluator);
}

}  // namespace gadaboost
