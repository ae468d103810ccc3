#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "flowseg/core.hpp"
#include "flowseg/flo_io.hpp"
#include "flowseg/pgm_io.hpp"
#include "flowseg/synth.hpp"

namespace flowseg {

namespace detail {

inline std::string zero6(int n) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06d", n);
    return buf;
}

}  // namespace detail

// CDnet-style directory layout. Frames are 1-indexed on disk:
// groundtruth/gt%06d.pgm, flow/%06d.flo where file t holds the flow from
// frame t to frame t-1 (so flows exist for t >= 2), temporalROI.txt with the
// 1-indexed inclusive evaluation range.
struct SequenceSource {
    int width = 0;
    int height = 0;
    int frame_count = 0;
    int roi_first = 1;
    int roi_last = 0;
    std::vector<std::string> mask_paths;  // [t-1] for frame t
    std::vector<std::string> flow_paths;  // [t-1] for frame t; empty string for t = 1

    bool in_roi(int frame) const { return frame >= roi_first && frame <= roi_last; }
};

inline SequenceSource load_cdnet_sequence(const std::string& dir, const std::string& flow_dir) {
    namespace fs = std::filesystem;
    SequenceSource src;

    fs::path roi_path = fs::path(dir) / "temporalROI.txt";
    std::ifstream roi(roi_path);
    if (!roi) throw MissingRoiFile("load_cdnet_sequence: missing " + roi_path.string());
    if (!(roi >> src.roi_first >> src.roi_last))
        throw MissingRoiFile("load_cdnet_sequence: malformed " + roi_path.string());

    fs::path gt_dir = fs::path(dir) / "groundtruth";
    for (int t = 1;; ++t) {
        fs::path p = gt_dir / ("gt" + detail::zero6(t) + ".pgm");
        if (!fs::exists(p)) {
            if (fs::exists(gt_dir / ("gt" + detail::zero6(t) + ".png")))
                throw UnsupportedFormat("load_cdnet_sequence: PNG masks are not supported, "
                                        "convert to PGM: " + p.string());
            src.frame_count = t - 1;
            break;
        }
        src.mask_paths.push_back(p.string());
    }
    if (src.frame_count == 0)
        throw FrameGap("load_cdnet_sequence: no groundtruth frames under " + gt_dir.string());
    if (src.roi_first < 1 || src.roi_last > src.frame_count || src.roi_first > src.roi_last)
        throw MissingRoiFile("load_cdnet_sequence: temporal ROI outside sequence bounds");

    src.flow_paths.assign(src.frame_count, "");
    for (int t = 2; t <= src.frame_count; ++t) {
        fs::path p = fs::path(flow_dir) / (detail::zero6(t) + ".flo");
        if (!fs::exists(p))
            throw FrameGap("load_cdnet_sequence: missing flow for frame " + std::to_string(t) +
                           ": " + p.string());
        src.flow_paths[t - 1] = p.string();
    }

    Mask first = read_mask(src.mask_paths[0]);
    src.width = first.width;
    src.height = first.height;
    if (src.frame_count >= 2) {
        FlowField f = read_flo(src.flow_paths[1]);
        if (f.width != src.width || f.height != src.height)
            throw DimensionMismatch("load_cdnet_sequence: mask/flow dimensions differ");
    }
    return src;
}

// Writes a synthetic sequence in the CDnet layout plus gtboxes.csv and a
// config echo. The temporal ROI starts at k+1 so evaluation skips ring warmup.
inline void export_sequence(const SynthSequence& seq, const std::string& out_dir, int k = 5) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "groundtruth");
    fs::create_directories(fs::path(out_dir) / "flow");

    for (int t = 1; t <= seq.frame_count; ++t) {
        write_mask(seq.masks[t - 1],
                   (fs::path(out_dir) / "groundtruth" / ("gt" + detail::zero6(t) + ".pgm")).string());
        if (t >= 2)
            write_flo(seq.step_flows[t - 1],
                      (fs::path(out_dir) / "flow" / (detail::zero6(t) + ".flo")).string());
    }

    std::ofstream roi((fs::path(out_dir) / "temporalROI.txt"));
    roi << std::min(k + 1, seq.frame_count) << " " << seq.frame_count << "\n";

    std::ofstream boxes((fs::path(out_dir) / "gtboxes.csv"));
    boxes << "frame,x_min,y_min,x_max,y_max\n";
    for (int t = 1; t <= seq.frame_count; ++t)
        for (const BBox& b : seq.gt_boxes[t - 1])
            boxes << t << "," << b.x_min << "," << b.y_min << "," << b.x_max << "," << b.y_max
                  << "\n";

    std::ofstream cfg((fs::path(out_dir) / "config.txt"));
    cfg << "width = " << seq.width << "\nheight = " << seq.height
        << "\nframe_count = " << seq.frame_count << "\nn_objects = " << seq.objects.size() << "\n";
    for (size_t i = 0; i < seq.objects.size(); ++i) {
        const ObjectSpec& o = seq.objects[i];
        cfg << "object" << i << " = " << o.x0 << " " << o.y0 << " " << o.w << " " << o.h << " "
            << o.vx << " " << o.vy << "\n";
    }
}

// gtboxes.csv -> per-frame box lists (index 0 = frame 1).
inline std::vector<std::vector<BBox>> read_gt_boxes(const std::string& path, int frame_count) {
    std::ifstream in(path);
    if (!in) throw IoFailure("read_gt_boxes: cannot open " + path);
    std::vector<std::vector<BBox>> boxes(frame_count);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        int frame, x0, y0, x1, y1;
        char c;
        if (!(ss >> frame >> c >> x0 >> c >> y0 >> c >> x1 >> c >> y1))
            throw IoFailure("read_gt_boxes: malformed line in " + path);
        if (frame < 1 || frame > frame_count)
            throw FrameCountMismatch("read_gt_boxes: frame " + std::to_string(frame) +
                                     " outside 1.." + std::to_string(frame_count));
        boxes[frame - 1].push_back(BBox(x0, y0, x1, y1));
    }
    return boxes;
}

}  // namespace flowseg
