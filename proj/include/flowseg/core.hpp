#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace flowseg {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MagicMismatch : Error { using Error::Error; };
struct TruncatedFile : Error { using Error::Error; };
struct NonFiniteValue : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };
struct DepthMismatch : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct RingNotFull : Error { using Error::Error; };
struct ZeroInterval : Error { using Error::Error; };
struct NonPositiveBalance : Error { using Error::Error; };
struct NonPositiveCutoff : Error { using Error::Error; };
struct TooFewPoints : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct NegativeTau : Error { using Error::Error; };
struct ZeroPeaks : Error { using Error::Error; };
struct EmptySegment : Error { using Error::Error; };
struct MissingRoiFile : Error { using Error::Error; };
struct FrameGap : Error { using Error::Error; };
struct ConfigInvalid : Error { using Error::Error; };
struct FrameCountMismatch : Error { using Error::Error; };

// Dense per-pixel displacement field, (u,v) interleaved row-major.
struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<float> data;  // size 2*width*height

    FlowField() = default;
    FlowField(int w, int h) : width(w), height(h), data(2u * w * h, 0.0f) {}

    float u(int x, int y) const { return data[2u * (static_cast<size_t>(y) * width + x)]; }
    float v(int x, int y) const { return data[2u * (static_cast<size_t>(y) * width + x) + 1]; }
    float& u(int x, int y) { return data[2u * (static_cast<size_t>(y) * width + x)]; }
    float& v(int x, int y) { return data[2u * (static_cast<size_t>(y) * width + x) + 1]; }

    bool same_dims(const FlowField& o) const { return width == o.width && height == o.height; }
};

// 8-bit label image plus the set of label values counted as foreground.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> labels;
    std::vector<uint8_t> fg_policy{255};

    Mask() = default;
    Mask(int w, int h, uint8_t fill = 0) : width(w), height(h), labels(static_cast<size_t>(w) * h, fill) {}

    uint8_t label(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }
    uint8_t& label(int x, int y) { return labels[static_cast<size_t>(y) * width + x]; }

    bool is_foreground(int x, int y) const {
        uint8_t l = label(x, y);
        return std::find(fg_policy.begin(), fg_policy.end(), l) != fg_policy.end();
    }

    size_t foreground_count() const {
        size_t n = 0;
        for (uint8_t l : labels)
            if (std::find(fg_policy.begin(), fg_policy.end(), l) != fg_policy.end()) ++n;
        return n;
    }
};

// Axis-aligned box, [x_min, x_max) x [y_min, y_max). Empty boxes are not representable.
struct BBox {
    int x_min = 0, y_min = 0, x_max = 0, y_max = 0;

    BBox() = default;
    BBox(int x0, int y0, int x1, int y1) : x_min(x0), y_min(y0), x_max(x1), y_max(y1) {
        if (x_min >= x_max || y_min >= y_max)
            throw Error("BBox: degenerate extent [" + std::to_string(x0) + "," + std::to_string(x1) +
                        ")x[" + std::to_string(y0) + "," + std::to_string(y1) + ")");
    }

    long long area() const {
        return static_cast<long long>(x_max - x_min) * (y_max - y_min);
    }

    bool operator==(const BBox& o) const = default;
};

inline double iou(const BBox& a, const BBox& b) {
    int ix0 = std::max(a.x_min, b.x_min);
    int iy0 = std::max(a.y_min, b.y_min);
    int ix1 = std::min(a.x_max, b.x_max);
    int iy1 = std::min(a.y_max, b.y_max);
    if (ix0 >= ix1 || iy0 >= iy1) return 0.0;
    double inter = static_cast<double>(ix1 - ix0) * (iy1 - iy0);
    double uni = static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter;
    return inter / uni;
}

}  // namespace flowseg
