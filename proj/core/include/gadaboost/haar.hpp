#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace gadaboost {

/// 8-bit grayscale image, row-major.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, std::uint8_t fill = 0);
    GrayImage(int width, int height, std::vector<std::uint8_t> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return data_.empty(); }

    std::uint8_t at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    std::uint8_t& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<const std::uint8_t> pixels() const noexcept { return data_; }
    std::span<std::uint8_t> pixels() noexcept { return data_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Half-open pixel rectangle [x, x1) x [y, y1).
struct Rect {
    int x = 0;
    int y = 0;
    int x1 = 0;
    int y1 = 0;

    int width() const noexcept { return x1 - x; }
    int height() const noexcept { return y1 - y; }
    std::int64_t area() const noexcept { return static_cast<std::int64_t>(width()) * height(); }

    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Summed-area tables of pixel values and squared pixel values, padded with
/// a zero row and column so that sums(0, *) = sums(*, 0) = 0.
class IntegralImage {
public:
    IntegralImage() = default;
    explicit IntegralImage(const GrayImage& img);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    /// Table entry at padded coordinates, 0 <= x <= width, 0 <= y <= height.
    std::int64_t sum_at(int x, int y) const { return sums_[index(x, y)]; }
    std::int64_t squared_sum_at(int x, int y) const { return squared_sums_[index(x, y)]; }

    /// Exact pixel sum over r. An empty rectangle sums to zero.
    std::int64_t rect_sum(const Rect& r) const;
    std::int64_t rect_squared_sum(const Rect& r) const;

    /// Standard deviation of the pixels in r, floored at 1 so flat windows
    /// normalize to finite feature values.
    double rect_stddev(const Rect& r) const;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * (width_ + 1) + x;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::int64_t> sums_;
    std::vector<std::int64_t> squared_sums_;
};

IntegralImage compute_integral(const GrayImage& img);

/// Feature types in chromosome order: codes 0..4.
enum class HaarType : std::uint8_t { X2 = 0, Y2 = 1, X3 = 2, Y3 = 3, X2Y2 = 4 };

inline constexpr std::array<HaarType, 5> kAllHaarTypes = {
    HaarType::X2, HaarType::Y2, HaarType::X3, HaarType::Y3, HaarType::X2Y2};

std::string_view to_string(HaarType t) noexcept;
int type_code(HaarType t) noexcept;
HaarType haar_type_from_code(int code);

/// Width and height must be multiples of these for the type to be valid.
int width_divisor(HaarType t) noexcept;
int height_divisor(HaarType t) noexcept;

struct WindowSize {
    int width = 0;
    int height = 0;
    friend bool operator==(const WindowSize&, const WindowSize&) = default;
};

/// A typed rectangle filter. (x, y) is inclusive, (x1, y1) exclusive.
/// This is also the GA chromosome.
struct HaarFeature {
    int x = 0;
    int y = 0;
    int x1 = 0;
    int y1 = 0;
    HaarType type = HaarType::X2;

    Rect rect() const noexcept { return {x, y, x1, y1}; }
    int width() const noexcept { return x1 - x; }
    int height() const noexcept { return y1 - y; }

    friend bool operator==(const HaarFeature&, const HaarFeature&) = default;
};

bool is_valid(const HaarFeature& f, WindowSize window) noexcept;

/// Weighted sub-rectangles making up a feature. Weights sum to zero
/// area-wise so a constant image evaluates to 0.
struct WeightedRect {
    Rect rect;
    int weight = 0;
};

struct FeatureLayout {
    std::array<WeightedRect, 4> parts{};
    int count = 0;

    std::span<const WeightedRect> rects() const noexcept {
        return {parts.data(), static_cast<std::size_t>(count)};
    }
};

FeatureLayout layout(const HaarFeature& f);

/// Raw white-minus-black response of f placed at (ox, oy).
/// Throws std::out_of_range when the placement leaves the image.
std::int64_t eval_feature(const IntegralImage& ii, const HaarFeature& f, int ox = 0, int oy = 0);

/// A detection window: an integral image, an offset and a scale. Feature
/// values read through it are area-compensated at non-unit scales and
/// divided by the window's pixel standard deviation.
class WindowView {
public:
    WindowView(const IntegralImage& ii, WindowSize base, int ox = 0, int oy = 0, double scale = 1.0);

    /// Normalized response. At scale 1 this is eval_feature / stddev exactly.
    double value(const HaarFeature& f) const;

    double inv_stddev() const noexcept { return inv_stddev_; }
    Rect bounds() const noexcept { return bounds_; }

private:
    const IntegralImage* ii_;
    int ox_;
    int oy_;
    double scale_;
    Rect bounds_;
    double inv_stddev_;
};

/// Nearest-integer scaling of a base-window coordinate.
int scale_coord(int v, double scale) noexcept;

/// Every valid feature in the window, type-major then y, x, y1, x1.
std::vector<HaarFeature> enumerate_features(WindowSize window);

/// Closed-form size of enumerate_features(window).
std::int64_t feature_space_size(WindowSize window) noexcept;

/// Stable injective id of a valid feature for the given window.
/// Throws std::invalid_argument for an invalid feature.
std::int64_t canonical_id(const HaarFeature& f, WindowSize window);

/// Inverse of canonical_id.
HaarFeature feature_from_id(std::int64_t id, WindowSize window);

}  // namespace gadaboost
