#pragma once

#include <cmath>
#include <deque>
#include <numbers>

#include "flowseg/core.hpp"
#include "flowseg/pgm_io.hpp"

namespace flowseg {

// Holds the last k per-step flow fields, newest last. push() drops the
// oldest field once capacity is reached.
class FlowRing {
public:
    explicit FlowRing(int capacity) : capacity_(capacity) {
        if (capacity < 1) throw ConfigInvalid("FlowRing: capacity must be >= 1");
    }

    void push(FlowField field) {
        if (!buffer_.empty() && !buffer_.front().same_dims(field))
            throw DimensionMismatch("FlowRing: field dimensions changed");
        buffer_.push_back(std::move(field));
        if (static_cast<int>(buffer_.size()) > capacity_) buffer_.pop_front();
    }

    int capacity() const { return capacity_; }
    int occupancy() const { return static_cast<int>(buffer_.size()); }
    bool full() const { return occupancy() == capacity_; }

    // index 0 = oldest buffered field
    const FlowField& field(int i) const { return buffer_[i]; }
    // newest first: field_from_newest(0) is f_{t,t-1}
    const FlowField& field_from_newest(int i) const { return buffer_[buffer_.size() - 1 - i]; }

private:
    int capacity_;
    std::deque<FlowField> buffer_;
};

// Per-pixel sum of all buffered fields at the same location.
inline FlowField compound_pixelwise(const FlowRing& ring) {
    if (!ring.full())
        throw RingNotFull("compound_pixelwise: ring holds " + std::to_string(ring.occupancy()) +
                          " of " + std::to_string(ring.capacity()) + " fields");
    FlowField out(ring.field(0).width, ring.field(0).height);
    for (int i = 0; i < ring.capacity(); ++i) {
        const FlowField& f = ring.field(i);
        for (size_t j = 0; j < out.data.size(); ++j) out.data[j] += f.data[j];
    }
    return out;
}

namespace detail {

// Bilinear sample with border clamp.
inline std::pair<float, float> sample_flow(const FlowField& f, float x, float y) {
    auto clampf = [](float v, float lo, float hi) { return v < lo ? lo : (v > hi ? hi : v); };
    x = clampf(x, 0.0f, static_cast<float>(f.width - 1));
    y = clampf(y, 0.0f, static_cast<float>(f.height - 1));
    int x0 = static_cast<int>(x);
    int y0 = static_cast<int>(y);
    int x1 = std::min(x0 + 1, f.width - 1);
    int y1 = std::min(y0 + 1, f.height - 1);
    float fx = x - x0, fy = y - y0;
    float u = (1 - fy) * ((1 - fx) * f.u(x0, y0) + fx * f.u(x1, y0)) +
              fy * ((1 - fx) * f.u(x0, y1) + fx * f.u(x1, y1));
    float v = (1 - fy) * ((1 - fx) * f.v(x0, y0) + fx * f.v(x1, y0)) +
              fy * ((1 - fx) * f.v(x0, y1) + fx * f.v(x1, y1));
    return {u, v};
}

}  // namespace detail

// Accumulates vectors along the warped trajectory: the newest field is read
// at the pixel itself, each earlier field at the location displaced so far.
inline FlowField compound_trajectory(const FlowRing& ring) {
    if (!ring.full())
        throw RingNotFull("compound_trajectory: ring holds " + std::to_string(ring.occupancy()) +
                          " of " + std::to_string(ring.capacity()) + " fields");
    const FlowField& newest = ring.field_from_newest(0);
    FlowField out(newest.width, newest.height);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            float du = newest.u(x, y);
            float dv = newest.v(x, y);
            for (int i = 1; i < ring.capacity(); ++i) {
                auto [su, sv] = detail::sample_flow(ring.field_from_newest(i), x + du, y + dv);
                du += su;
                dv += sv;
            }
            out.u(x, y) = du;
            out.v(x, y) = dv;
        }
    }
    return out;
}

// Hue encodes direction, saturation encodes magnitude relative to the frame
// maximum. Zero flow renders white.
inline RgbImage flow_to_color(const FlowField& field) {
    float max_mag = 0.0f;
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x)
            max_mag = std::max(max_mag, std::hypot(field.u(x, y), field.v(x, y)));

    RgbImage img(field.width, field.height);
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            float u = field.u(x, y), v = field.v(x, y);
            float mag = std::hypot(u, v);
            float sat = max_mag > 0.0f ? std::min(1.0f, mag / max_mag) : 0.0f;
            float hue = std::atan2(v, u) * 180.0f / std::numbers::pi_v<float>;
            if (hue < 0.0f) hue += 360.0f;
            // HSV -> RGB with V=1
            float c = sat;
            float hp = hue / 60.0f;
            float xx = c * (1.0f - std::fabs(std::fmod(hp, 2.0f) - 1.0f));
            float r = 0, g = 0, b = 0;
            if (hp < 1) { r = c; g = xx; }
            else if (hp < 2) { r = xx; g = c; }
            else if (hp < 3) { g = c; b = xx; }
            else if (hp < 4) { g = xx; b = c; }
            else if (hp < 5) { r = xx; b = c; }
            else { r = c; b = xx; }
            float m = 1.0f - c;
            img.set(x, y, static_cast<uint8_t>(std::lround((r + m) * 255.0f)),
                    static_cast<uint8_t>(std::lround((g + m) * 255.0f)),
                    static_cast<uint8_t>(std::lround((b + m) * 255.0f)));
        }
    }
    return img;
}

}  // namespace flowseg
