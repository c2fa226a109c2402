#include "gadaboost/eval.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace gadaboost {

double iou(const Box& a, const Box& b) {
    if (a.width <= 0 || a.height <= 0 || b.width <= 0 || b.height <= 0) {
        throw std::invalid_argument("iou: zero-area box");
    }
    const int ix = std::max(0, std::min(a.x + a.width, b.x + b.width) - std::max(a.x, b.x));
    const int iy = std::max(0, std::min(a.y + a.height, b.y + b.height) - std::max(a.y, b.y));
    const auto inter = static_cast<std::int64_t>(ix) * iy;
    return static_cast<double>(inter) / static_cast<double>(a.area() + b.area() - inter);
}

namespace {

// Score descending, then a total order on content so equal-score
// detections are processed identically regardless of input order.
std::vector<std::size_t> processing_order(const std::vector<ScoredDetection>& dets) {
    std::vector<std::size_t> idx(dets.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const auto& da = dets[a];
        const auto& db = dets[b];
        if (da.score != db.score) {
            return da.score > db.score;
        }
        if (da.image != db.image) {
            return da.image < db.image;
        }
        if (da.box != db.box) {
            return da.box < db.box;
        }
        return a < b;
    });
    return idx;
}

class GreedyMatcher {
public:
    GreedyMatcher(const std::vector<GroundTruthBox>& truths, double threshold)
        : truths_(truths), threshold_(threshold), used_(truths.size(), false) {
        for (std::size_t g = 0; g < truths.size(); ++g) {
            by_image_[truths[g].image].push_back(g);
        }
    }

    /// Ground-truth index matched by det, or npos.
    std::size_t match(const ScoredDetection& det) {
        auto it = by_image_.find(det.image);
        if (it == by_image_.end()) {
            return npos;
        }
        std::size_t best = npos;
        double best_iou = threshold_;
        for (std::size_t g : it->second) {
            if (used_[g]) {
                continue;
            }
            const double o = iou(det.box, truths_[g].box);
            if (o > best_iou) {
                best_iou = o;
                best = g;
            }
        }
        if (best != npos) {
            used_[best] = true;
        }
        return best;
    }

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

private:
    const std::vector<GroundTruthBox>& truths_;
    double threshold_;
    std::vector<bool> used_;
    std::map<std::string, std::vector<std::size_t>> by_image_;
};

}  // namespace

MatchResult match_detections(const std::vector<ScoredDetection>& detections,
                             const std::vector<GroundTruthBox>& truths, double iou_threshold) {
    MatchResult out;
    GreedyMatcher matcher(truths, iou_threshold);
    for (std::size_t d : processing_order(detections)) {
        const std::size_t g = matcher.match(detections[d]);
        if (g == GreedyMatcher::npos) {
            ++out.false_positives;
        } else {
            ++out.true_positives;
            out.pairs.emplace_back(d, g);
        }
    }
    return out;
}

std::vector<RocPoint> roc_points(const std::vector<ScoredDetection>& detections,
                                 const std::vector<GroundTruthBox>& truths, double iou_threshold) {
    if (truths.empty()) {
        throw std::invalid_argument("roc_points: no ground-truth boxes");
    }
    // Greedy matching in score order is prefix-stable: the decisions for
    // the top-k detections do not depend on the rest, so one pass suffices.
    const auto order = processing_order(detections);
    GreedyMatcher matcher(truths, iou_threshold);
    const double total = static_cast<double>(truths.size());
    std::vector<RocPoint> points;
    int tp = 0;
    int fp = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& det = detections[order[k]];
        (matcher.match(det) == GreedyMatcher::npos ? fp : tp) += 1;
        const bool last_at_score = k + 1 == order.size() || detections[order[k + 1]].score != det.score;
        if (!last_at_score) {
            continue;
        }
        const RocPoint p{fp, tp / total, det.score};
        if (!points.empty() && points.back().false_positives == fp) {
            points.back() = p;
        } else {
            points.push_back(p);
        }
    }
    return points;
}

double tpr_at(const std::vector<RocPoint>& curve, int false_positives) {
    double tpr = 0.0;
    for (const auto& p : curve) {
        if (p.false_positives > false_positives) {
            break;
        }
        tpr = p.true_positive_rate;
    }
    return tpr;
}

std::vector<EnvelopePoint> aggregate_runs(const std::vector<std::vector<RocPoint>>& runs,
                                          const std::vector<int>& fp_grid) {
    if (runs.empty()) {
        throw std::invalid_argument("aggregate_runs: no runs");
    }
    if (fp_grid.empty()) {
        throw std::invalid_argument("aggregate_runs: empty false-positive grid");
    }
    std::vector<EnvelopePoint> out;
    out.reserve(fp_grid.size());
    for (int fp : fp_grid) {
        EnvelopePoint e;
        e.false_positives = fp;
        e.min_tpr = std::numeric_limits<double>::infinity();
        e.max_tpr = -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (const auto& run : runs) {
            const double t = tpr_at(run, fp);
            e.min_tpr = std::min(e.min_tpr, t);
            e.max_tpr = std::max(e.max_tpr, t);
            sum += t;
        }
        e.mean_tpr = sum / static_cast<double>(runs.size());
        out.push_back(e);
    }
    return out;
}

}  // namespace gadaboost
