#pragma once

#include <future>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "flowseg/pipeline.hpp"

namespace flowseg {

// Analyzes every frame of a sequence. `step_flows[t-1]` holds the flow from
// frame t to t-1 (frames 1-indexed, entry for t=1 unused). Frames before the
// ring fills produce empty results. Frames are processed in parallel when
// threads > 1; output order is frame order either way.
inline std::vector<FrameResult> analyze_sequence(const std::vector<Mask>& masks,
                                                 const std::vector<FlowField>& step_flows,
                                                 const PipelineParams& params, int threads = 1) {
    int n = static_cast<int>(masks.size());
    if (static_cast<int>(step_flows.size()) != n)
        throw FrameCountMismatch("analyze_sequence: " + std::to_string(n) + " masks vs " +
                                 std::to_string(step_flows.size()) + " flow slots");
    std::vector<FrameResult> results(n);

    auto work = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            int t = i + 1;
            if (t < params.k + 1) {
                results[i].frame_index = t;
                continue;
            }
            FlowRing ring(params.k);
            for (int j = t - params.k + 1; j <= t; ++j) ring.push(step_flows[j - 1]);
            results[i] = analyze_frame(masks[i], ring, params, t);
        }
    };

    if (threads <= 1) {
        work(0, n);
    } else {
        int chunks = std::min(threads, n);
        std::vector<std::future<void>> futs;
        for (int c = 0; c < chunks; ++c) {
            int begin = n * c / chunks;
            int end = n * (c + 1) / chunks;
            futs.push_back(std::async(std::launch::async, work, begin, end));
        }
        for (auto& f : futs) f.get();
    }
    return results;
}

inline nlohmann::ordered_json frame_result_to_json(const FrameResult& r,
                                                   bool include_timing = true) {
    nlohmann::ordered_json j;
    j["frame"] = r.frame_index;
    j["instances"] = nlohmann::ordered_json::array();
    for (const Instance& inst : r.instances) {
        nlohmann::ordered_json ji;
        ji["peak"] = {{"x", inst.rep_peak.x},
                      {"y", inst.rep_peak.y},
                      {"u", inst.rep_peak.u},
                      {"v", inst.rep_peak.v},
                      {"rho", inst.rep_rho}};
        ji["bbox"] = {inst.bbox.x_min, inst.bbox.y_min, inst.bbox.x_max, inst.bbox.y_max};
        ji["size"] = inst.member_ids.size();
        ji["mean_flow"] = {inst.mean_u, inst.mean_v};
        j["instances"].push_back(std::move(ji));
    }
    nlohmann::ordered_json diag;
    diag["n_fg_samples"] = r.diagnostics.n_fg_samples;
    diag["n_analyzed"] = r.diagnostics.n_analyzed;
    diag["n_peaks_raw"] = r.diagnostics.n_peaks_raw;
    diag["n_segments_raw"] = r.diagnostics.n_segments_raw;
    if (include_timing) {
        diag["timing_ms"] = {{"compound", r.diagnostics.timing.compound_ms},
                             {"sample", r.diagnostics.timing.sample_ms},
                             {"composition", r.diagnostics.timing.composition_ms},
                             {"segmentation", r.diagnostics.timing.segmentation_ms},
                             {"postprocess", r.diagnostics.timing.postprocess_ms}};
    }
    j["diagnostics"] = std::move(diag);
    return j;
}

inline std::string results_to_jsonl(const std::vector<FrameResult>& results,
                                    bool include_timing = true) {
    std::string out;
    for (const FrameResult& r : results) {
        out += frame_result_to_json(r, include_timing).dump();
        out += "\n";
    }
    return out;
}

inline std::vector<std::vector<BBox>> boxes_from_results(const std::vector<FrameResult>& results) {
    std::vector<std::vector<BBox>> boxes;
    boxes.reserve(results.size());
    for (const FrameResult& r : results) {
        std::vector<BBox> frame;
        for (const Instance& inst : r.instances) frame.push_back(inst.bbox);
        boxes.push_back(std::move(frame));
    }
    return boxes;
}

}  // namespace flowseg
