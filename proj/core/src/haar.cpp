#include "gadaboost/haar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gadaboost {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("GrayImage: dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("GrayImage: dimensions must be positive");
    }
    if (data_.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument("GrayImage: data length does not match width x height");
    }
}

IntegralImage::IntegralImage(const GrayImage& img)
    : width_(img.width()), height_(img.height()) {
    const auto stride = static_cast<std::size_t>(width_) + 1;
    sums_.assign(stride * (static_cast<std::size_t>(height_) + 1), 0);
    squared_sums_.assign(sums_.size(), 0);
    for (int y = 0; y < height_; ++y) {
        std::int64_t row = 0;
        std::int64_t row_sq = 0;
        for (int x = 0; x < width_; ++x) {
            const std::int64_t p = img.at(x, y);
            row += p;
            row_sq += p * p;
            sums_[index(x + 1, y + 1)] = sums_[index(x + 1, y)] + row;
            squared_sums_[index(x + 1, y + 1)] = squared_sums_[index(x + 1, y)] + row_sq;
        }
    }
}

std::int64_t IntegralImage::rect_sum(const Rect& r) const {
    return sum_at(r.x1, r.y1) - sum_at(r.x, r.y1) - sum_at(r.x1, r.y) + sum_at(r.x, r.y);
}

std::int64_t IntegralImage::rect_squared_sum(const Rect& r) const {
    return squared_sum_at(r.x1, r.y1) - squared_sum_at(r.x, r.y1) - squared_sum_at(r.x1, r.y) +
           squared_sum_at(r.x, r.y);
}

double IntegralImage::rect_stddev(const Rect& r) const {
    const std::int64_t n = r.area();
    if (n <= 0) {
        return 1.0;
    }
    const std::int64_t s = rect_sum(r);
    const std::int64_t sq = rect_squared_sum(r);
    // n*sq - s*s stays exact in 64 bits for windows up to about 1e7 pixels.
    const double spread = static_cast<double>(n * sq - s * s);
    const double sd = std::sqrt(std::max(spread, 0.0)) / static_cast<double>(n);
    return sd < 1.0 ? 1.0 : sd;
}

IntegralImage compute_integral(const GrayImage& img) { return IntegralImage(img); }

std::string_view to_string(HaarType t) noexcept {
    switch (t) {
        case HaarType::X2: return "haar_x2";
        case HaarType::Y2: return "haar_y2";
        case HaarType::X3: return "haar_x3";
        case HaarType::Y3: return "haar_y3";
        case HaarType::X2Y2: return "haar_x2y2";
    }
    return "unknown";
}

int type_code(HaarType t) noexcept { return static_cast<int>(t); }

HaarType haar_type_from_code(int code) {
    if (code < 0 || code > 4) {
        throw std::invalid_argument("haar type code out of range: " + std::to_string(code));
    }
    return static_cast<HaarType>(code);
}

int width_divisor(HaarType t) noexcept {
    switch (t) {
        case HaarType::X2:
        case HaarType::X2Y2: return 2;
        case HaarType::X3: return 3;
        default: return 1;
    }
}

int height_divisor(HaarType t) noexcept {
    switch (t) {
        case HaarType::Y2:
        case HaarType::X2Y2: return 2;
        case HaarType::Y3: return 3;
        default: return 1;
    }
}

bool is_valid(const HaarFeature& f, WindowSize window) noexcept {
    if (type_code(f.type) < 0 || type_code(f.type) > 4) {
        return false;
    }
    if (f.x < 0 || f.y < 0 || f.x >= f.x1 || f.y >= f.y1) {
        return false;
    }
    if (f.x1 > window.width || f.y1 > window.height) {
        return false;
    }
    return f.width() % width_divisor(f.type) == 0 && f.height() % height_divisor(f.type) == 0;
}

FeatureLayout layout(const HaarFeature& f) {
    FeatureLayout out;
    const int w = f.width();
    const int h = f.height();
    switch (f.type) {
        case HaarType::X2: {
            const int mx = f.x + w / 2;
            out.parts[0] = {{f.x, f.y, mx, f.y1}, +1};
            out.parts[1] = {{mx, f.y, f.x1, f.y1}, -1};
            out.count = 2;
            break;
        }
        case HaarType::Y2: {
            const int my = f.y + h / 2;
            out.parts[0] = {{f.x, f.y, f.x1, my}, +1};
            out.parts[1] = {{f.x, my, f.x1, f.y1}, -1};
            out.count = 2;
            break;
        }
        case HaarType::X3: {
            const int a = f.x + w / 3;
            const int b = f.x + 2 * (w / 3);
            out.parts[0] = {{f.x, f.y, a, f.y1}, +1};
            out.parts[1] = {{a, f.y, b, f.y1}, -2};
            out.parts[2] = {{b, f.y, f.x1, f.y1}, +1};
            out.count = 3;
            break;
        }
        case HaarType::Y3: {
            const int a = f.y + h / 3;
            const int b = f.y + 2 * (h / 3);
            out.parts[0] = {{f.x, f.y, f.x1, a}, +1};
            out.parts[1] = {{f.x, a, f.x1, b}, -2};
            out.parts[2] = {{f.x, b, f.x1, f.y1}, +1};
            out.count = 3;
            break;
        }
        case HaarType::X2Y2: {
            const int mx = f.x + w / 2;
            const int my = f.y + h / 2;
            out.parts[0] = {{f.x, f.y, mx, my}, +1};
            out.parts[1] = {{mx, f.y, f.x1, my}, -1};
            out.parts[2] = {{f.x, my, mx, f.y1}, -1};
            out.parts[3] = {{mx, my, f.x1, f.y1}, +1};
            out.count = 4;
            break;
        }
    }
    return out;
}

std::int64_t eval_feature(const IntegralImage& ii, const HaarFeature& f, int ox, int oy) {
    if (ox < 0 || oy < 0 || f.x < 0 || f.y < 0 || f.x >= f.x1 || f.y >= f.y1 ||
        ox + f.x1 > ii.width() || oy + f.y1 > ii.height()) {
        throw std::out_of_range("eval_feature: feature placement leaves the image");
    }
    std::int64_t total = 0;
    for (const auto& part : layout(f).rects()) {
        const Rect r{part.rect.x + ox, part.rect.y + oy, part.rect.x1 + ox, part.rect.y1 + oy};
        total += part.weight * ii.rect_sum(r);
    }
    return total;
}

int scale_coord(int v, double scale) noexcept {
    return static_cast<int>(std::floor(v * scale + 0.5));
}

WindowView::WindowView(const IntegralImage& ii, WindowSize base, int ox, int oy, double scale)
    : ii_(&ii), ox_(ox), oy_(oy), scale_(scale) {
    bounds_ = {ox, oy, ox + scale_coord(base.width, scale), oy + scale_coord(base.height, scale)};
    if (ox < 0 || oy < 0 || bounds_.x1 > ii.width() || bounds_.y1 > ii.height()) {
        throw std::out_of_range("WindowView: scaled window leaves the image");
    }
    inv_stddev_ = 1.0 / ii.rect_stddev(bounds_);
}

double WindowView::value(const HaarFeature& f) const {
    if (scale_ == 1.0) {
        return static_cast<double>(eval_feature(*ii_, f, ox_, oy_)) * inv_stddev_;
    }
    double total = 0.0;
    for (const auto& part : layout(f).rects()) {
        const Rect& r = part.rect;
        const Rect s{ox_ + scale_coord(r.x, scale_), oy_ + scale_coord(r.y, scale_),
                     ox_ + scale_coord(r.x1, scale_), oy_ + scale_coord(r.y1, scale_)};
        const double ratio = static_cast<double>(r.area()) / static_cast<double>(s.area());
        total += part.weight * static_cast<double>(ii_->rect_sum(s)) * ratio;
    }
    return total * inv_stddev_;
}

std::vector<HaarFeature> enumerate_features(WindowSize window) {
    std::vector<HaarFeature> out;
    out.reserve(static_cast<std::size_t>(feature_space_size(window)));
    for (HaarType t : kAllHaarTypes) {
        const int wd = width_divisor(t);
        const int hd = height_divisor(t);
        for (int y = 0; y < window.height; ++y) {
            for (int x = 0; x < window.width; ++x) {
                for (int y1 = y + hd; y1 <= window.height; y1 += hd) {
                    for (int x1 = x + wd; x1 <= window.width; x1 += wd) {
                        out.push_back({x, y, x1, y1, t});
                    }
                }
            }
        }
    }
    return out;
}

std::int64_t feature_space_size(WindowSize window) noexcept {
    auto placements = [](int extent, int divisor) {
        std::int64_t n = 0;
        for (int len = divisor; len <= extent; len += divisor) {
            n += extent - len + 1;
        }
        return n;
    };
    std::int64_t total = 0;
    for (HaarType t : kAllHaarTypes) {
        total += placements(window.width, width_divisor(t)) *
                 placements(window.height, height_divisor(t));
    }
    return total;
}

std::int64_t canonical_id(const HaarFeature& f, WindowSize window) {
    if (!is_valid(f, window)) {
        throw std::invalid_argument("canonical_id: feature is not valid for the window");
    }
    const std::int64_t w = window.width + 1;
    const std::int64_t h = window.height + 1;
    return (((type_code(f.type) * w + f.x) * h + f.y) * w + f.x1) * h + f.y1;
}

HaarFeature feature_from_id(std::int64_t id, WindowSize window) {
    const std::int64_t w = window.width + 1;
    const std::int64_t h = window.height + 1;
    HaarFeature f;
    f.y1 = static_cast<int>(id % h);
    id /= h;
    f.x1 = static_cast<int>(id % w);
    id /= w;
    f.y = static_cast<int>(id % h);
    id /= h;
    f.x = static_cast<int>(id % w);
    id /= w;
    f.type = haar_type_from_code(static_cast<int>(id));
    if (!is_valid(f, window)) {
        throw std::invalid_argument("feature_from_id: id does not name a valid feature");
    }
    return f;
}

}  // namespace gadaboost
