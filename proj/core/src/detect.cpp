#include "gadaboost/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gadaboost/eval.hpp"

namespace gadaboost {

std::vector<Detection> detect(const GrayImage& img, const Cascade& cascade, const DetectParams& params) {
    if (!(params.scale_factor > 1.0)) {
        throw std::invalid_argument("detect: scale_factor must be > 1");
    }
    if (params.step < 1) {
        throw std::invalid_argument("detect: step must be >= 1");
    }
    std::vector<Detection> out;
    const WindowSize win = cascade.window;
    if (img.width() < win.width || img.height() < win.height) {
        return out;
    }
    const IntegralImage ii(img);
    for (double scale = 1.0;; scale *= params.scale_factor) {
        const int sw = scale_coord(win.width, scale);
        const int sh = scale_coord(win.height, scale);
        if (sw > img.width() || sh > img.height()) {
            break;
        }
        const int stride = std::max(1, static_cast<int>(std::lround(params.step * scale)));
        for (int y = 0; y + sh <= img.height(); y += stride) {
            for (int x = 0; x + sw <= img.width(); x += stride) {
                const CascadeScore s = cascade_score(cascade, WindowView(ii, win, x, y, scale));
                if (s.accepted) {
                    out.push_back({{x, y, sw, sh}, s.margin, scale});
                }
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
        if (a.box.y != b.box.y) return a.box.y < b.box.y;
        if (a.box.x != b.box.x) return a.box.x < b.box.x;
        return a.scale < b.scale;
    });
    return out;
}

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

}  // namespace

std::vector<Detection> group_detections(const std::vector<Detection>& detections, int min_neighbors) {
    const std::size_t n = detections.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (iou(detections[i].box, detections[j].box) > kPascalThreshold) {
                parent[find_root(parent, i)] = find_root(parent, j);
            }
        }
    }
    std::vector<std::vector<std::size_t>> clusters(n);
    for (std::size_t i = 0; i < n; ++i) {
        clusters[find_root(parent, i)].push_back(i);
    }

    std::vector<Detection> out;
    for (const auto& members : clusters) {
        if (members.empty() || static_cast<int>(members.size()) < min_neighbors) {
            continue;
        }
        double sx = 0, sy = 0, sw = 0, sh = 0;
        const Detection* best = &detections[members.front()];
        for (std::size_t i : members) {
            const Detection& d = detections[i];
            sx += d.box.x;
            sy += d.box.y;
            sw += d.box.width;
            sh += d.box.height;
            if (d.score > best->score) {
                best = &d;
            }
        }
        const double m = static_cast<double>(members.size());
        auto avg = [m](double total) { return static_cast<int>(std::lround(total / m)); };
        const double margin = std::max(0.0, best->score);
        out.push_back({{avg(sx), avg(sy), avg(sw), avg(sh)}, m + margin / (1.0 + margin), best->scale});
    }
    std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
        if (a.box.y != b.box.y) return a.box.y < b.box.y;
        if (a.box.x != b.box.x) return a.box.x < b.box.x;
        return a.scale < b.scale;
    });
    return out;
}

}  // namespace gadaboost
