#pragma once

#include <cstdint>

namespace gadaboost {

/// Axis-aligned image box: top-left corner plus size, in pixels.
struct Box {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    std::int64_t area() const noexcept { return static_cast<std::int64_t>(width) * height; }

    friend bool operator==(const Box&, const Box&) = default;
    friend auto operator<=>(const Box&, const Box&) = default;
};

}  // namespace gadaboost
