#pragma once

#include <chrono>
#include <map>
#include <vector>

#include "flowseg/cfsfdp.hpp"
#include "flowseg/core.hpp"
#include "flowseg/flow_compound.hpp"
#include "flowseg/gbis.hpp"
#include "flowseg/params.hpp"
#include "flowseg/sampler.hpp"

namespace flowseg {

struct Instance {
    SamplePoint rep_peak;
    double rep_rho = 0.0;
    std::vector<int> member_ids;  // ids into the foreground sample set
    BBox bbox;
    double mean_u = 0.0;
    double mean_v = 0.0;
};

struct StageTimings {
    double compound_ms = 0.0;
    double sample_ms = 0.0;
    double composition_ms = 0.0;
    double segmentation_ms = 0.0;
    double postprocess_ms = 0.0;
};

struct Diagnostics {
    int n_fg_samples = 0;
    int n_analyzed = 0;
    int n_peaks_raw = 0;
    int n_segments_raw = 0;
    StageTimings timing;
};

struct FrameResult {
    int frame_index = 0;
    std::vector<Instance> instances;
    Diagnostics diagnostics;
};

// Distinct segments (by root) containing at least one peak, roots ascending.
inline std::vector<int> select_segments(SegmentForest& forest, const PeakSet& peaks) {
    std::vector<int> roots;
    for (int id : peaks.ids) roots.push_back(forest.find(id));
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

// Per selected segment, the contained peak with maximum rho (ties by lower id).
inline std::vector<int> representative_peaks(const std::vector<int>& segment_roots,
                                             const PeakSet& peaks, SegmentForest& forest,
                                             const std::map<int, double>& rho_by_id) {
    std::vector<int> reps;
    for (int root : segment_roots) {
        int best = -1;
        double best_rho = 0.0;
        for (int id : peaks.ids) {
            if (forest.find(id) != root) continue;
            double r = rho_by_id.at(id);
            if (best < 0 || r > best_rho || (r == best_rho && id < best)) {
                best = id;
                best_rho = r;
            }
        }
        reps.push_back(best);
    }
    return reps;
}

// Minimum box over the member points, expanded by ceil(s/2) per side and
// clamped to the image.
inline BBox bbox_for_segment(const std::vector<SamplePoint>& members, int s, int width,
                             int height) {
    if (members.empty()) throw EmptySegment("bbox_for_segment: no members");
    int x0 = members[0].x, x1 = members[0].x, y0 = members[0].y, y1 = members[0].y;
    for (const SamplePoint& m : members) {
        x0 = std::min(x0, m.x);
        x1 = std::max(x1, m.x);
        y0 = std::min(y0, m.y);
        y1 = std::max(y1, m.y);
    }
    int e = (s + 1) / 2;
    return BBox(std::max(0, x0 - e), std::max(0, y0 - e), std::min(width, x1 + 1 + e),
                std::min(height, y1 + 1 + e));
}

namespace detail {

class StageClock {
public:
    StageClock() : last_(std::chrono::steady_clock::now()) {}
    double lap_ms() {
        auto now = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point last_;
};

}  // namespace detail

// Optional capture of intermediate state for debug dumps.
struct FrameDebug {
    SamplePointSet fg;
    PeakAnalysis composition;
    std::vector<int> segment_root_per_point;
};

// Full per-frame analysis: compound flow, lattice sampling, foreground
// restriction, density-peak composition analysis, graph segmentation, and
// instance postprocessing. Empty foreground or zero peaks yield an empty
// result, not an error.
inline FrameResult analyze_frame(const Mask& mask, const FlowRing& ring,
                                 const PipelineParams& params, int frame_index = 0,
                                 FrameDebug* debug = nullptr) {
    FrameResult result;
    result.frame_index = frame_index;
    if (!ring.full())
        throw RingNotFull("analyze_frame: ring holds " + std::to_string(ring.occupancy()) +
                          " of " + std::to_string(ring.capacity()) + " fields");
    if (ring.field(0).width != mask.width || ring.field(0).height != mask.height)
        throw DimensionMismatch("analyze_frame: mask/flow dimensions differ");

    detail::StageClock clock;
    FlowField flow = params.compound_mode == CompoundMode::pixelwise ? compound_pixelwise(ring)
                                                                     : compound_trajectory(ring);
    result.diagnostics.timing.compound_ms = clock.lap_ms();

    SamplePointSet grid = sample_grid(mask.width, mask.height, params.s);
    Mask m = mask;
    m.fg_policy = params.fg_policy;
    SamplePointSet fg = restrict_to_foreground(grid, m, flow);
    result.diagnostics.n_fg_samples = static_cast<int>(fg.size());
    result.diagnostics.timing.sample_ms = clock.lap_ms();
    if (debug) debug->fg = fg;
    if (fg.points.empty()) return result;

    PeakSet peaks;
    std::map<int, double> rho_by_id;
    double tau = params.fixed_tau;
    if (!params.gbis_only) {
        PeakAnalysis analysis = analyze_composition(
            fg, {params.n_c, params.seed, params.p, params.d_c, params.dc_fraction,
                 {params.c1, params.c2, params.k, params.t_d2}});
        result.diagnostics.n_analyzed = static_cast<int>(analysis.subsample_ids.size());
        peaks = analysis.peaks;
        for (size_t i = 0; i < analysis.subsample_ids.size(); ++i)
            rho_by_id[analysis.subsample_ids[i]] = analysis.rho[i];
        result.diagnostics.n_peaks_raw = static_cast<int>(peaks.ids.size());
        result.diagnostics.timing.composition_ms = clock.lap_ms();
        if (debug) debug->composition = analysis;
        if (peaks.ids.empty()) return result;
        tau = adaptive_tau(fg.size(), peaks.ids.size());
    }

    Graph graph = build_graph(fg);
    SegmentForest forest = segment(graph, tau);
    result.diagnostics.timing.segmentation_ms = clock.lap_ms();
    if (debug) {
        debug->segment_root_per_point.resize(fg.size());
        for (const SamplePoint& pt : fg.points)
            debug->segment_root_per_point[pt.id] = forest.find(pt.id);
    }

    std::map<int, std::vector<int>> members_by_root;
    for (const SamplePoint& pt : fg.points) members_by_root[forest.find(pt.id)].push_back(pt.id);
    result.diagnostics.n_segments_raw = static_cast<int>(members_by_root.size());

    std::vector<int> roots;
    std::vector<int> reps;
    if (params.gbis_only) {
        for (const auto& [root, members] : members_by_root) {
            roots.push_back(root);
            reps.push_back(members.front());
        }
    } else {
        roots = select_segments(forest, peaks);
        reps = representative_peaks(roots, peaks, forest, rho_by_id);
    }

    for (size_t i = 0; i < roots.size(); ++i) {
        const std::vector<int>& member_ids = members_by_root.at(roots[i]);
        Instance inst;
        inst.rep_peak = fg.points[reps[i]];
        inst.rep_rho = params.gbis_only ? 0.0 : rho_by_id.count(reps[i]) ? rho_by_id.at(reps[i]) : 0.0;
        inst.member_ids = member_ids;
        std::vector<SamplePoint> members;
        members.reserve(member_ids.size());
        double su = 0.0, sv = 0.0;
        for (int id : member_ids) {
            members.push_back(fg.points[id]);
            su += fg.points[id].u;
            sv += fg.points[id].v;
        }
        inst.bbox = bbox_for_segment(members, params.s, mask.width, mask.height);
        inst.mean_u = su / static_cast<double>(member_ids.size());
        inst.mean_v = sv / static_cast<double>(member_ids.size());
        result.instances.push_back(std::move(inst));
    }
    result.diagnostics.timing.postprocess_ms = clock.lap_ms();
    return result;
}

}  // namespace flowseg
