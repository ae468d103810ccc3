#pragma once

#include <vector>

#include "flowseg/core.hpp"

namespace flowseg {

struct SamplePoint {
    int x = 0;
    int y = 0;
    float u = 0.0f;
    float v = 0.0f;
    int id = 0;
};

enum class SampleProvenance { all, foreground };

// Sparse lattice of sample points, sorted by (y, x) with dense ids.
struct SamplePointSet {
    int interval = 1;
    std::vector<SamplePoint> points;
    SampleProvenance provenance = SampleProvenance::all;

    size_t size() const { return points.size(); }
};

// Lattice at offset (s/2, s/2), stepping s in both axes. Flow not yet attached.
inline SamplePointSet sample_grid(int width, int height, int s) {
    if (s < 1) throw ZeroInterval("sample_grid: interval must be >= 1");
    SamplePointSet set;
    set.interval = s;
    int offset = s / 2;
    int id = 0;
    for (int y = offset; y < height; y += s)
        for (int x = offset; x < width; x += s)
            set.points.push_back({x, y, 0.0f, 0.0f, id++});
    return set;
}

// Keeps samples on foreground pixels, attaches the compounded flow at each
// kept point and reassigns dense ids.
inline SamplePointSet restrict_to_foreground(const SamplePointSet& samples, const Mask& mask,
                                             const FlowField& flow) {
    if (mask.width != flow.width || mask.height != flow.height)
        throw DimensionMismatch("restrict_to_foreground: mask/flow dimensions differ");
    SamplePointSet out;
    out.interval = samples.interval;
    out.provenance = SampleProvenance::foreground;
    int id = 0;
    for (const SamplePoint& p : samples.points) {
        if (p.x >= mask.width || p.y >= mask.height)
            throw DimensionMismatch("restrict_to_foreground: sample outside mask");
        if (!mask.is_foreground(p.x, p.y)) continue;
        out.points.push_back({p.x, p.y, flow.u(p.x, p.y), flow.v(p.x, p.y), id++});
    }
    return out;
}

}  // namespace flowseg
