#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "gadaboost/box.hpp"

namespace gadaboost {

/// Intersection over union. Throws std::invalid_argument for a zero-area box.
double iou(const Box& a, const Box& b);

inline constexpr double kPascalThreshold = 0.4;

struct GroundTruthBox {
    std::string image;
    Box box;
};

struct ScoredDetection {
    std::string image;
    Box box;
    double score = 0.0;
};

struct MatchResult {
    int true_positives = 0;
    int false_positives = 0;
    /// (detection index, ground-truth index) pairs.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

/// Greedy one-to-one matching in descending score order: each detection
/// takes the unmatched ground truth of the same image with highest IoU,
/// provided that IoU exceeds the threshold.
MatchResult match_detections(const std::vector<ScoredDetection>& detections,
                             const std::vector<GroundTruthBox>& truths,
                             double iou_threshold = kPascalThreshold);

struct RocPoint {
    int false_positives = 0;
    double true_positive_rate = 0.0;
    double threshold = 0.0;

    friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

/// Sweeps the score threshold over the distinct detection scores, highest
/// first, keeping the best-TPR point for every false-positive count.
/// Throws std::invalid_argument when there is no ground truth.
std::vector<RocPoint> roc_points(const std::vector<ScoredDetection>& detections,
                                 const std::vector<GroundTruthBox>& truths,
                                 double iou_threshold = kPascalThreshold);

struct EnvelopePoint {
    int false_positives = 0;
    double min_tpr = 0.0;
    double mean_tpr = 0.0;
    double max_tpr = 0.0;
};

/// TPR of a curve at a false-positive budget: the last point with
/// fp <= budget, or 0 when none exists.
double tpr_at(const std::vector<RocPoint>& curve, int false_positives);

/// Per-grid-point min/mean/max TPR across runs.
std::vector<EnvelopePoint> aggregate_runs(const std::vector<std::vector<RocPoint>>& runs,
                                          const std::vector<int>& fp_grid);

}  // namespace gadaboost
