#pragma once

#include <vector>

#include "gadaboost/box.hpp"
#include "gadaboost/cascade.hpp"
#include "gadaboost/haar.hpp"

namespace gadaboost {

struct Detection {
    Box box;
    /// Last-stage margin; larger is more confident.
    double score = 0.0;
    double scale = 1.0;

    friend bool operator==(const Detection&, const Detection&) = default;
};

struct DetectParams {
    double scale_factor = 1.25;
    int step = 2;
};

/// Scans every window position at scales scale_factor^k while the scaled
/// window fits, with stride round(step * scale). Results are ordered by
/// (y, x, scale). An image smaller than the window yields no detections.
std::vector<Detection> detect(const GrayImage& img, const Cascade& cascade, const DetectParams& params = {});

/// Single-link clustering on IoU > 0.4; each cluster of at least
/// min_neighbors detections becomes its average box. Its score ranks by
/// cluster size first, then by the best margin: n + m / (1 + m) with m the
/// largest member margin clamped at 0. Margins alone take only a handful
/// of values on short stages, so most clusters would tie.
std::vector<Detection> group_detections(const std::vector<Detection>& detections, int min_neighbors = 2);

}  // namespace gadaboost
