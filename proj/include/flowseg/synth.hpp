#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "flowseg/core.hpp"

namespace flowseg {

struct ObjectSpec {
    double x0 = 0.0, y0 = 0.0;  // top-left at frame 0
    int w = 0, h = 0;
    double vx = 0.0, vy = 0.0;  // pixels per frame
};

struct SynthConfig {
    int width = 320;
    int height = 240;
    int frame_count = 200;
    int n_objects = 2;
    uint64_t seed = 0;

    // spawn-rule ranges used when `objects` is empty
    int min_w = 24, max_w = 56;
    int min_h = 12, max_h = 24;
    double speed = 1.0;  // lane speed magnitude, sign alternates per lane

    double flow_noise_sigma = 0.0;  // gaussian noise on true flow, pixels
    double mask_noise = 0.0;        // per-pixel label flip probability

    int sample_interval = 3;        // s, for the 2s spatial-separation rule
    double min_velocity_sep = 2.0;  // px/frame, per-component

    std::vector<ObjectSpec> objects;  // explicit scene; generated when empty
};

struct SynthSequence {
    int width = 0, height = 0, frame_count = 0;
    std::vector<ObjectSpec> objects;
    std::vector<Mask> masks;                    // per frame, 0-based
    std::vector<FlowField> step_flows;          // step_flows[t] = flow from frame t to t-1; t >= 1
    std::vector<std::vector<BBox>> gt_boxes;    // per frame
};

namespace detail {

inline int object_x(const ObjectSpec& o, int t) { return static_cast<int>(std::lround(o.x0 + t * o.vx)); }
inline int object_y(const ObjectSpec& o, int t) { return static_cast<int>(std::lround(o.y0 + t * o.vy)); }

inline bool rects_within(const ObjectSpec& o, int frames, int width, int height) {
    for (int t = 0; t < frames; ++t) {
        int x = object_x(o, t), y = object_y(o, t);
        if (x < 0 || y < 0 || x + o.w > width || y + o.h > height) return false;
    }
    return true;
}

inline bool spatially_disjoint(const ObjectSpec& a, const ObjectSpec& b, int frames, int margin) {
    for (int t = 0; t < frames; ++t) {
        int ax = object_x(a, t), ay = object_y(a, t);
        int bx = object_x(b, t), by = object_y(b, t);
        bool x_apart = ax + a.w + margin <= bx || bx + b.w + margin <= ax;
        bool y_apart = ay + a.h + margin <= by || by + b.h + margin <= ay;
        if (!x_apart && !y_apart) return false;
    }
    return true;
}

inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace detail

// Lane-based spawn rule: each object gets its own horizontal lane with a
// vertical gap of at least 2s between lane rectangles. Lane speeds are n
// evenly spaced values in [-speed, speed] (shuffled across lanes), so any two
// objects differ by at least 2*speed/(n-1) px/frame in horizontal velocity.
inline std::vector<ObjectSpec> spawn_objects(const SynthConfig& cfg) {
    if (cfg.n_objects < 0 || cfg.n_objects > 8)
        throw ConfigInvalid("spawn_objects: n_objects must be in 0..8");
    std::vector<ObjectSpec> objects;
    if (cfg.n_objects == 0) return objects;

    int gap = 2 * cfg.sample_interval;
    int lane_h = cfg.height / cfg.n_objects;
    if (lane_h < cfg.min_h + gap)
        throw ConfigInvalid("spawn_objects: lanes too small for the object height range");
    std::mt19937_64 rng(cfg.seed);
    auto draw = [&](int lo, int hi) {  // inclusive
        return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
    };

    std::vector<double> speeds;
    if (cfg.n_objects == 1) {
        speeds.push_back(cfg.speed / 2.0);
    } else {
        for (int i = 0; i < cfg.n_objects; ++i)
            speeds.push_back(-cfg.speed + 2.0 * cfg.speed * i / (cfg.n_objects - 1));
    }
    std::shuffle(speeds.begin(), speeds.end(), rng);

    for (int i = 0; i < cfg.n_objects; ++i) {
        ObjectSpec o;
        o.vx = speeds[i];
        o.vy = 0.0;
        int travel = static_cast<int>(std::ceil(std::fabs(o.vx) * (cfg.frame_count - 1)));
        int max_w = std::min(cfg.max_w, cfg.width - travel - 6);
        if (max_w < cfg.min_w)
            throw ConfigInvalid("spawn_objects: frame too narrow for the configured travel");
        o.w = draw(cfg.min_w, max_w);
        o.h = draw(cfg.min_h, std::min(cfg.max_h, lane_h - gap));
        int slack = cfg.width - o.w - travel - 4;
        int start = draw(2, 1 + std::max(0, slack - 1));
        o.x0 = o.vx >= 0.0 ? start : cfg.width - o.w - start;
        int lane_top = i * lane_h;
        int half_gap = (gap + 1) / 2;
        o.y0 = lane_top + half_gap + draw(0, lane_h - o.h - 2 * half_gap);
        objects.push_back(o);
    }
    return objects;
}

inline void validate_objects(const std::vector<ObjectSpec>& objects, const SynthConfig& cfg) {
    for (const ObjectSpec& o : objects) {
        if (o.w < 1 || o.h < 1) throw ConfigInvalid("synth_scene: empty object rectangle");
        if (!detail::rects_within(o, cfg.frame_count, cfg.width, cfg.height))
            throw ConfigInvalid("synth_scene: object leaves the frame");
    }
    for (size_t i = 0; i < objects.size(); ++i) {
        for (size_t j = i + 1; j < objects.size(); ++j) {
            const ObjectSpec& a = objects[i];
            const ObjectSpec& b = objects[j];
            bool vel_sep = std::fabs(a.vx - b.vx) >= cfg.min_velocity_sep ||
                           std::fabs(a.vy - b.vy) >= cfg.min_velocity_sep;
            bool spatial_sep =
                detail::spatially_disjoint(a, b, cfg.frame_count, 2 * cfg.sample_interval);
            if (!vel_sep && !spatial_sep)
                throw ConfigInvalid("synth_scene: objects " + std::to_string(i) + " and " +
                                    std::to_string(j) +
                                    " separable neither by velocity nor spatially");
        }
    }
}

// Rigid rectangles translating at constant velocity. True per-step flow maps
// frame t to frame t-1 (the exact rasterized displacement, negated velocity);
// background flow is zero. Fully determined by the seed.
inline SynthSequence synth_scene(const SynthConfig& cfg) {
    if (cfg.width < 1 || cfg.height < 1 || cfg.frame_count < 1)
        throw ConfigInvalid("synth_scene: bad dimensions");
    SynthSequence seq;
    seq.width = cfg.width;
    seq.height = cfg.height;
    seq.frame_count = cfg.frame_count;
    seq.objects = cfg.objects.empty() ? spawn_objects(cfg) : cfg.objects;
    validate_objects(seq.objects, cfg);

    seq.masks.reserve(cfg.frame_count);
    seq.step_flows.resize(cfg.frame_count);
    seq.gt_boxes.resize(cfg.frame_count);

    for (int t = 0; t < cfg.frame_count; ++t) {
        Mask mask(cfg.width, cfg.height, 0);
        FlowField flow(cfg.width, cfg.height);
        for (const ObjectSpec& o : seq.objects) {
            int x = detail::object_x(o, t), y = detail::object_y(o, t);
            float du = 0.0f, dv = 0.0f;
            if (t >= 1) {
                du = static_cast<float>(detail::object_x(o, t - 1) - x);
                dv = static_cast<float>(detail::object_y(o, t - 1) - y);
            }
            for (int yy = y; yy < y + o.h; ++yy) {
                for (int xx = x; xx < x + o.w; ++xx) {
                    mask.label(xx, yy) = 255;
                    flow.u(xx, yy) = du;
                    flow.v(xx, yy) = dv;
                }
            }
            seq.gt_boxes[t].push_back(BBox(x, y, x + o.w, y + o.h));
        }

        if (cfg.flow_noise_sigma > 0.0 && t >= 1) {
            std::mt19937_64 rng(detail::mix_seed(cfg.seed, 2u * t));
            std::normal_distribution<float> noise(0.0f, static_cast<float>(cfg.flow_noise_sigma));
            for (float& f : flow.data) f += noise(rng);
        }
        if (cfg.mask_noise > 0.0) {
            std::mt19937_64 rng(detail::mix_seed(cfg.seed, 2u * t + 1));
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (uint8_t& l : mask.labels)
                if (unif(rng) < cfg.mask_noise) l = l == 0 ? 255 : 0;
        }
        seq.masks.push_back(std::move(mask));
        if (t >= 1) seq.step_flows[t] = std::move(flow);
    }
    return seq;
}

}  // namespace flowseg
