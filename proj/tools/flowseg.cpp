#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flowseg/bench.hpp"
#include "flowseg/cdnet.hpp"
#include "flowseg/cfsfdp.hpp"
#include "flowseg/core.hpp"
#include "flowseg/eval.hpp"
#include "flowseg/flo_io.hpp"
#include "flowseg/flow_compound.hpp"
#include "flowseg/params.hpp"
#include "flowseg/pgm_io.hpp"
#include "flowseg/run.hpp"
#include "flowseg/synth.hpp"

namespace fs = std::filesystem;
using namespace flowseg;

namespace {

int env_threads() {
    const char* v = std::getenv("FLOWSEG_THREADS");
    if (!v) return 1;
    int n = std::atoi(v);
    return n >= 1 ? n : 1;
}

void add_pipeline_flags(CLI::App* cmd, PipelineParams& params, std::string& compound_mode) {
    cmd->add_option("-k,--k", params.k, "Compounded frame count")->capture_default_str();
    cmd->add_option("-s,--interval", params.s, "Sample interval in pixels")->capture_default_str();
    cmd->add_option("-p,--balance", params.p, "Flow/coordinate balance parameter")
        ->capture_default_str();
    cmd->add_option("--c1", params.c1, "Density threshold divisor (T_r = rho_max/c1)")
        ->capture_default_str();
    cmd->add_option("--c2", params.c2, "Flow separation factor (T_d1 = c2*k)")
        ->capture_default_str();
    cmd->add_option("--t-d2", params.t_d2, "Coordinate separation threshold in pixels")
        ->capture_default_str();
    cmd->add_option("--n-c", params.n_c, "Max analyzed points for composition analysis")
        ->capture_default_str();
    cmd->add_option("--d-c", params.d_c, "Density cutoff (0 = auto quantile)")
        ->capture_default_str();
    cmd->add_option("--dc-fraction", params.dc_fraction, "Quantile for the auto density cutoff")
        ->capture_default_str();
    cmd->add_option("--compound-mode", compound_mode, "pixelwise or trajectory")
        ->capture_default_str();
    cmd->add_option("--seed", params.seed, "Subsampling seed")->capture_default_str();
    cmd->add_option("--fg-label", "Mask label value counted as foreground (repeatable)")
        ->take_all();
    cmd->callback([&params, cmd]() {
        std::vector<int> labels = cmd->get_option("--fg-label")->as<std::vector<int>>();
        if (!labels.empty()) {
            params.fg_policy.clear();
            for (int l : labels) params.fg_policy.push_back(static_cast<uint8_t>(l));
        }
    });
    cmd->add_flag("--gbis-only", params.gbis_only,
                  "Skip composition analysis; emit every segment (ablation mode)");
    cmd->add_option("--fixed-tau", params.fixed_tau, "Aggregation parameter for --gbis-only")
        ->capture_default_str();
}

RgbImage overlay_image(const Mask& mask, const FrameResult& result) {
    RgbImage img(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            uint8_t g = mask.label(x, y);
            img.set(x, y, g, g, g);
        }
    for (const Instance& inst : result.instances) {
        const BBox& b = inst.bbox;
        for (int x = b.x_min; x < b.x_max; ++x) {
            img.set(x, b.y_min, 255, 0, 0);
            img.set(x, b.y_max - 1, 255, 0, 0);
        }
        for (int y = b.y_min; y < b.y_max; ++y) {
            img.set(b.x_min, y, 255, 0, 0);
            img.set(b.x_max - 1, y, 255, 0, 0);
        }
    }
    return img;
}

int cmd_analyze(const std::string& seq_dir, const std::string& flow_dir,
                const std::string& output, const PipelineParams& params,
                const std::string& overlay_dir, const std::string& debug_dir,
                bool include_timing) {
    SequenceSource src = load_cdnet_sequence(seq_dir, flow_dir.empty() ? seq_dir + "/flow" : flow_dir);

    std::vector<Mask> masks;
    std::vector<FlowField> flows(src.frame_count);
    masks.reserve(src.frame_count);
    for (int t = 1; t <= src.frame_count; ++t) {
        masks.push_back(read_mask(src.mask_paths[t - 1], params.fg_policy));
        if (t >= 2) flows[t - 1] = read_flo(src.flow_paths[t - 1]);
    }

    std::vector<FrameResult> results = analyze_sequence(masks, flows, params, env_threads());

    std::ofstream out(output);
    if (!out) throw IoFailure("analyze: cannot open output " + output);
    out << results_to_jsonl(results, include_timing);

    if (!overlay_dir.empty()) {
        fs::create_directories(overlay_dir);
        for (int t = 1; t <= src.frame_count; ++t)
            write_ppm(overlay_image(masks[t - 1], results[t - 1]),
                      (fs::path(overlay_dir) / ("overlay" + detail::zero6(t) + ".ppm")).string());
    }
    if (!debug_dir.empty()) {
        fs::create_directories(debug_dir);
        for (int t = params.k + 1; t <= src.frame_count; ++t) {
            FlowRing ring(params.k);
            for (int j = t - params.k + 1; j <= t; ++j) ring.push(flows[j - 1]);
            FrameDebug dbg;
            analyze_frame(masks[t - 1], ring, params, t, &dbg);
            std::ofstream comp((fs::path(debug_dir) / ("composition" + detail::zero6(t) + ".csv")));
            comp << composition_csv(dbg.fg, dbg.composition);
            std::ofstream segs((fs::path(debug_dir) / ("segments" + detail::zero6(t) + ".csv")));
            segs << "id,x,y,segment\n";
            for (const SamplePoint& p : dbg.fg.points)
                if (!dbg.segment_root_per_point.empty())
                    segs << p.id << "," << p.x << "," << p.y << ","
                         << dbg.segment_root_per_point[p.id] << "\n";
        }
    }
    std::cerr << "analyze: wrote " << results.size() << " frame results to " << output << "\n";
    return 0;
}

std::vector<std::vector<BBox>> boxes_from_jsonl(const std::string& path, int& frame_count) {
    std::ifstream in(path);
    if (!in) throw IoFailure("eval: cannot open results " + path);
    std::vector<std::vector<BBox>> boxes;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        std::vector<BBox> frame;
        for (const auto& inst : j.at("instances"))
            frame.push_back(BBox(inst.at("bbox")[0], inst.at("bbox")[1], inst.at("bbox")[2],
                                 inst.at("bbox")[3]));
        boxes.push_back(std::move(frame));
    }
    frame_count = static_cast<int>(boxes.size());
    return boxes;
}

int cmd_eval(const std::vector<std::string>& results_paths,
             const std::vector<std::string>& seq_dirs, std::vector<std::string> names,
             const std::string& out_dir, const std::vector<double>& thresholds) {
    if (results_paths.size() != seq_dirs.size())
        throw ConfigInvalid("eval: need one --seq-dir per --results");
    while (names.size() < results_paths.size())
        names.push_back("seq" + std::to_string(names.size() + 1));
    fs::create_directories(out_dir);

    std::vector<std::vector<BBox>> all_preds, all_gts;
    struct Row {
        std::string name;
        double re, pr;
    };
    std::vector<Row> rows;

    for (size_t i = 0; i < results_paths.size(); ++i) {
        int frame_count = 0;
        std::vector<std::vector<BBox>> preds = boxes_from_jsonl(results_paths[i], frame_count);

        int roi_first = 1, roi_last = frame_count;
        std::ifstream roi(fs::path(seq_dirs[i]) / "temporalROI.txt");
        if (roi) roi >> roi_first >> roi_last;
        std::vector<std::vector<BBox>> gts =
            read_gt_boxes((fs::path(seq_dirs[i]) / "gtboxes.csv").string(), frame_count);

        std::vector<std::vector<BBox>> rp, rg;
        for (int t = roi_first; t <= roi_last && t <= frame_count; ++t) {
            rp.push_back(preds[t - 1]);
            rg.push_back(gts[t - 1]);
        }
        SequenceMetrics m = accumulate_matches(rp, rg, 0.5);
        rows.push_back({names[i], m.recall(), m.precision()});
        all_preds.insert(all_preds.end(), rp.begin(), rp.end());
        all_gts.insert(all_gts.end(), rg.begin(), rg.end());
    }

    std::vector<CurvePoint> curve = pr_curve(all_preds, all_gts, thresholds);
    {
        std::ofstream csv(fs::path(out_dir) / "curve.csv");
        csv << curve_csv(curve);
        std::ofstream svg(fs::path(out_dir) / "curve.svg");
        svg << curve_svg(curve);
    }

    // Table-1 style text table: per-sequence Re/Pr at IoU 0.5 plus Avg
    std::ostringstream table;
    table << "Name";
    for (const Row& r : rows) table << "\t" << r.name;
    table << "\tAvg\n";
    double sre = 0, spr = 0;
    table << "Re";
    for (const Row& r : rows) {
        table << "\t" << std::fixed << std::setprecision(3) << r.re;
        sre += r.re;
    }
    table << "\t" << std::fixed << std::setprecision(3) << sre / rows.size() << "\nPr";
    for (const Row& r : rows) {
        table << "\t" << std::fixed << std::setprecision(3) << r.pr;
        spr += r.pr;
    }
    table << "\t" << std::fixed << std::setprecision(3) << spr / rows.size() << "\n";
    std::ofstream tf(fs::path(out_dir) / "table.txt");
    tf << table.str();
    std::cout << table.str();
    return 0;
}

int cmd_synth(const SynthConfig& cfg, const std::string& out_dir, int k) {
    SynthSequence seq = synth_scene(cfg);
    export_sequence(seq, out_dir, k);
    std::cerr << "synth: wrote " << seq.frame_count << " frames, " << seq.objects.size()
              << " objects to " << out_dir << "\n";
    return 0;
}

int cmd_flowviz(const std::string& flow_dir, int k, const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::vector<FlowField> flows;
    for (int t = 2;; ++t) {
        fs::path p = fs::path(flow_dir) / (detail::zero6(t) + ".flo");
        if (!fs::exists(p)) break;
        flows.push_back(read_flo(p.string()));
    }
    if (static_cast<int>(flows.size()) < k)
        throw FrameGap("flowviz: need at least " + std::to_string(k) + " flow files, found " +
                       std::to_string(flows.size()));
    FlowRing ring(k);
    for (size_t i = 0; i < flows.size(); ++i) {
        ring.push(flows[i]);
        if (!ring.full()) continue;
        int t = static_cast<int>(i) + 2;  // frame index of the newest flow
        write_ppm(flow_to_color(compound_pixelwise(ring)),
                  (fs::path(out_dir) / ("flow" + detail::zero6(t) + ".ppm")).string());
    }
    return 0;
}

int cmd_bench(const std::vector<int>& counts, int reps, const std::string& out_csv) {
    BenchReport report = run_bench(counts, reps);
    if (!out_csv.empty()) {
        std::ofstream out(out_csv);
        out << bench_csv(report);
    } else {
        std::cout << bench_csv(report);
    }
    std::printf("cfsfdp log-log slope: %.3f\n", report.cfsfdp_slope);
    std::printf("gbis   log-log slope: %.3f\n", report.gbis_slope);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moving-foreground instance analysis from masks and optical flow"};
    app.require_subcommand(1);
    app.set_config("--config")->configurable(false);

    PipelineParams params;
    std::string compound_mode = "trajectory";

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Run the analysis pipeline over a sequence");
    std::string seq_dir, flow_dir, output = "results.jsonl", overlay_dir, debug_dir;
    bool no_timing = false;
    analyze->add_option("--seq-dir", seq_dir, "Sequence directory (CDnet layout)")->required();
    analyze->add_option("--flow-dir", flow_dir, "Flow directory (default: <seq-dir>/flow)");
    analyze->add_option("-o,--output", output, "Output JSON Lines path")->capture_default_str();
    analyze->add_option("--overlay-dir", overlay_dir, "Write bounding-box overlay images here");
    analyze->add_option("--debug-dir", debug_dir, "Write per-frame decision-graph/segment CSVs");
    analyze->add_flag("--no-timing", no_timing, "Omit timing fields from diagnostics");
    add_pipeline_flags(analyze, params, compound_mode);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Score results against ground-truth boxes");
    std::vector<std::string> results_paths, eval_seq_dirs, names;
    std::string eval_out = "eval_out";
    std::vector<double> thresholds{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    eval_cmd->add_option("--results", results_paths, "Results JSONL (repeatable per sequence)")
        ->required();
    eval_cmd->add_option("--seq-dir", eval_seq_dirs, "Sequence dir with gtboxes.csv (repeatable)")
        ->required();
    eval_cmd->add_option("--name", names, "Sequence display name (repeatable)");
    eval_cmd->add_option("--out-dir", eval_out, "Output directory")->capture_default_str();
    eval_cmd->add_option("--thresholds", thresholds, "IoU threshold grid")->capture_default_str();

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic sequence (CDnet layout)");
    SynthConfig scfg;
    std::string synth_out = "synth_out";
    int synth_k = 5;
    synth->add_option("--out-dir", synth_out, "Output directory")->capture_default_str();
    synth->add_option("--width", scfg.width)->capture_default_str();
    synth->add_option("--height", scfg.height)->capture_default_str();
    synth->add_option("--frames", scfg.frame_count)->capture_default_str();
    synth->add_option("--objects", scfg.n_objects, "Object count (0..8)")->capture_default_str();
    synth->add_option("--seed", scfg.seed)->capture_default_str();
    synth->add_option("--speed", scfg.speed, "Lane speed in px/frame")->capture_default_str();
    synth->add_option("--flow-noise", scfg.flow_noise_sigma, "Gaussian flow noise sigma")
        ->capture_default_str();
    synth->add_option("--mask-noise", scfg.mask_noise, "Per-pixel label flip probability")
        ->capture_default_str();
    synth->add_option("--k", synth_k, "Ring size assumed for the temporal ROI")
        ->capture_default_str();

    // flowviz
    auto* flowviz = app.add_subcommand("flowviz", "Render compounded-flow color maps");
    std::string viz_flow_dir, viz_out = "flowviz_out";
    int viz_k = 5;
    flowviz->add_option("--flow-dir", viz_flow_dir, "Directory of %06d.flo files")->required();
    flowviz->add_option("--k", viz_k, "Compounded frame count")->capture_default_str();
    flowviz->add_option("--out-dir", viz_out, "Output directory")->capture_default_str();

    // bench
    auto* bench = app.add_subcommand("bench", "Time the clustering cores and fit slopes");
    std::vector<int> counts{100, 200, 400, 800, 1600};
    int reps = 9;
    std::string bench_csv_path;
    bench->add_option("--counts", counts, "Point counts")->capture_default_str();
    bench->add_option("--reps", reps, "Repetitions per count")->capture_default_str();
    bench->add_option("--out-csv", bench_csv_path, "Write timing CSV here");

    CLI11_PARSE(app, argc, argv);

    try {
        params.compound_mode = parse_compound_mode(compound_mode);
        if (analyze->parsed())
            return cmd_analyze(seq_dir, flow_dir, output, params, overlay_dir, debug_dir,
                               !no_timing);
        if (eval_cmd->parsed())
            return cmd_eval(results_paths, eval_seq_dirs, names, eval_out, thresholds);
        if (synth->parsed()) return cmd_synth(scfg, synth_out, synth_k);
        if (flowviz->parsed()) return cmd_flowviz(viz_flow_dir, viz_k, viz_out);
        if (bench->parsed()) return cmd_bench(counts, reps, bench_csv_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
