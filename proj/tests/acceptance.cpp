// Acceptance suite: runs every top-level acceptance check and prints one
// PASS/FAIL line per criterion. The first argument is the path to the CLI
// binary, used for the report-format and determinism checks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "flowseg/bench.hpp"
#include "flowseg/cdnet.hpp"
#include "flowseg/cfsfdp.hpp"
#include "flowseg/eval.hpp"
#include "flowseg/flo_io.hpp"
#include "flowseg/gbis.hpp"
#include "flowseg/pipeline.hpp"
#include "flowseg/run.hpp"
#include "flowseg/synth.hpp"

using namespace flowseg;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %s — %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    if (!ok) ++failures;
}

fs::path work_dir() {
    fs::path dir = fs::temp_directory_path() / "flowseg_acceptance";
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& cli, const std::string& args) {
    std::string cmd = "\"" + cli + "\" " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int pool_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

// The 20-scene synthetic suite: 320x240, 200 frames, 1..5 rectangles per
// scene. Lone objects are drawn large so their spatial extent alone separates
// them; multi-object scenes separate by per-lane velocity.
SynthConfig scene_config(int i) {
    SynthConfig cfg;
    cfg.width = 320;
    cfg.height = 240;
    cfg.frame_count = 200;
    cfg.n_objects = i % 5 + 1;
    cfg.seed = 1000 + i;
    cfg.speed = 1.2;
    if (cfg.n_objects == 1) {
        cfg.min_w = 110;
        cfg.max_w = 116;
        cfg.min_h = 40;
        cfg.max_h = 44;
    }
    return cfg;
}

struct SuiteMetrics {
    SequenceMetrics pooled;
    double elapsed_s = 0.0;
};

SuiteMetrics run_suite(double mask_noise, bool gbis_only) {
    auto start = std::chrono::steady_clock::now();
    PipelineParams params;
    params.gbis_only = gbis_only;
    SuiteMetrics out;
    for (int i = 0; i < 20; ++i) {
        SynthConfig cfg = scene_config(i);
        cfg.mask_noise = mask_noise;
        SynthSequence seq = synth_scene(cfg);
        std::vector<FrameResult> results =
            analyze_sequence(seq.masks, seq.step_flows, params, pool_threads());
        std::vector<std::vector<BBox>> preds, gts;
        for (int t = params.k + 1; t <= cfg.frame_count; ++t) {
            std::vector<BBox> frame;
            for (const Instance& inst : results[t - 1].instances) frame.push_back(inst.bbox);
            preds.push_back(std::move(frame));
            gts.push_back(seq.gt_boxes[t - 1]);
        }
        SequenceMetrics m = accumulate_matches(preds, gts, 0.5);
        out.pooled.tp += m.tp;
        out.pooled.fp += m.fp;
        out.pooled.fn += m.fn;
    }
    out.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

// --- criterion 1: report format on user-supplied data ---------------------

void check_report_format(const std::string& cli) {
    fs::path base = work_dir() / "report";
    fs::remove_all(base);
    fs::create_directories(base);
    bool ok = true;
    std::string detail;

    std::vector<std::string> eval_args;
    for (int i = 0; i < 2; ++i) {
        SynthConfig cfg;
        cfg.width = 160;
        cfg.height = 120;
        cfg.frame_count = 60;
        cfg.n_objects = 2;
        cfg.seed = 5 + i;
        SynthSequence seq = synth_scene(cfg);
        fs::path dir = base / ("seq" + std::to_string(i + 1));
        export_sequence(seq, dir.string(), 5);
        fs::path results = dir / "results.jsonl";
        if (run_cli(cli, "analyze --seq-dir \"" + dir.string() + "\" -o \"" + results.string() +
                             "\" --no-timing") != 0) {
            ok = false;
            detail = "analyze run failed for " + dir.string();
        }
        eval_args.push_back("--results \"" + results.string() + "\" --seq-dir \"" + dir.string() +
                            "\" --name seq" + std::to_string(i + 1));
    }

    fs::path out = base / "eval";
    if (ok && run_cli(cli, "eval " + eval_args[0] + " " + eval_args[1] + " --out-dir \"" +
                               out.string() + "\"") != 0) {
        ok = false;
        detail = "eval run failed";
    }
    if (ok) {
        std::string table = read_file(out / "table.txt");
        bool shape = table.find("Name") != std::string::npos &&
                     table.find("seq1") != std::string::npos &&
                     table.find("seq2") != std::string::npos &&
                     table.find("Avg") != std::string::npos &&
                     table.find("Re") != std::string::npos &&
                     table.find("Pr") != std::string::npos;
        bool artifacts = fs::exists(out / "curve.csv") && fs::exists(out / "curve.svg");
        ok = shape && artifacts;
        detail = ok ? "per-sequence Re/Pr table with Avg column plus curve.csv/curve.svg; "
                      "note: no benchmark datasets are bundled, so reported numbers reflect "
                      "the supplied sequences only and do not reproduce published figures"
                    : "table.txt or curve artifacts malformed";
    }
    report("report_format", ok, detail);
}

// --- criterion 2 and 3: synthetic end-to-end and ablation -----------------

void check_synthetic_e2e() {
    SuiteMetrics m = run_suite(0.0, false);
    double re = m.pooled.recall(), pr = m.pooled.precision();
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "20 scenes, IoU 0.5: Re=%.4f Pr=%.4f (tp=%lld fp=%lld fn=%lld) in %.1fs", re, pr,
                  m.pooled.tp, m.pooled.fp, m.pooled.fn, m.elapsed_s);
    report("synthetic_e2e", re >= 0.95 && pr >= 0.95 && m.elapsed_s < 120.0, buf);
}

void check_ablation() {
    SuiteMetrics full = run_suite(0.002, false);
    SuiteMetrics gbis = run_suite(0.002, true);
    double pf = full.pooled.precision(), pg = gbis.pooled.precision();
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "noisy masks: full Pr=%.4f vs segmentation-only Pr=%.4f (gap %.4f)", pf, pg,
                  pf - pg);
    report("ablation_precision_gap", pg < pf - 0.2, buf);
}

// --- criterion 4: oracle equivalence --------------------------------------

// Naive reference segmentation: recomputes component sizes and internal
// maxima from scratch at every merge decision.
std::vector<int> reference_segment(const Graph& graph, double tau) {
    std::vector<Edge> edges = graph.edges;
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
        if (x.w != y.w) return x.w < y.w;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    std::vector<int> comp(graph.node_count);
    for (int i = 0; i < graph.node_count; ++i) comp[i] = i;
    std::vector<std::vector<double>> internal(graph.node_count);
    for (const Edge& e : edges) {
        int ca = comp[e.a], cb = comp[e.b];
        if (ca == cb) continue;
        auto stats = [&](int c) {
            int size = 0;
            for (int x : comp)
                if (x == c) ++size;
            double mint = 0.0;
            for (double w : internal[c]) mint = std::max(mint, w);
            return std::pair<int, double>(size, mint);
        };
        auto [sa, ia] = stats(ca);
        auto [sb, ib] = stats(cb);
        if (e.w <= std::min(ia + tau / sa, ib + tau / sb)) {
            for (int& x : comp)
                if (x == cb) x = ca;
            internal[ca].insert(internal[ca].end(), internal[cb].begin(), internal[cb].end());
            internal[cb].clear();
            internal[ca].push_back(e.w);
        }
    }
    return comp;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    std::map<int, int> fwd, bwd;
    for (size_t i = 0; i < a.size(); ++i) {
        auto [it1, ins1] = fwd.emplace(a[i], b[i]);
        if (!ins1 && it1->second != b[i]) return false;
        auto [it2, ins2] = bwd.emplace(b[i], a[i]);
        if (!ins2 && it2->second != a[i]) return false;
    }
    return true;
}

void check_oracles() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> wdist(0.0, 10.0);

    int graph_mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Graph g;
        g.node_count = 2 + static_cast<int>(rng() % 49);
        int n_edges = static_cast<int>(rng() % (3 * g.node_count + 1));
        std::set<std::pair<int, int>> used;
        for (int e = 0; e < n_edges; ++e) {
            int a = static_cast<int>(rng() % g.node_count);
            int b = static_cast<int>(rng() % g.node_count);
            if (a == b) continue;
            if (a > b) std::swap(a, b);
            if (!used.emplace(a, b).second) continue;
            g.edges.push_back({a, b, wdist(rng)});
        }
        double tau = wdist(rng) * g.node_count;
        SegmentForest forest = segment(g, tau);
        std::vector<int> labels(g.node_count);
        for (int i = 0; i < g.node_count; ++i) labels[i] = forest.find(i);
        if (!same_partition(labels, reference_segment(g, tau))) ++graph_mismatches;
    }

    // density/separation brute force: same definitions, independent loop
    // structure with long-double accumulation in reverse index order
    int cluster_mismatches = 0;
    std::uniform_real_distribution<float> flow(-8.0f, 8.0f);
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 2 + static_cast<int>(rng() % 199);
        SamplePointSet set;
        set.interval = 3;
        std::set<std::pair<int, int>> taken;
        for (int i = 0; i < n;) {
            int x = static_cast<int>(rng() % 300), y = static_cast<int>(rng() % 300);
            if (!taken.emplace(x, y).second) continue;
            set.points.push_back({x, y, flow(rng), flow(rng), i});
            ++i;
        }
        std::vector<FeatureVector> feats = build_features(set, 50.0);
        double d_c = 0.5 + wdist(rng) / 4.0;
        std::vector<double> rho = densities(feats, d_c);
        auto [df, dc] = deltas(feats, rho);

        constexpr double inf = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n && cluster_mismatches == 0; ++i) {
            long double acc = 0.0L;
            for (int j = n - 1; j >= 0; --j) {
                long double d2 = 0.0L;
                for (int c = 0; c < 4; ++c) {
                    long double d = feats[i].f[c] - feats[j].f[c];
                    d2 += d * d;
                }
                long double q = std::sqrt((double)d2) / d_c;
                acc += std::exp(-(double)(q * q));
            }
            if (std::fabs((double)acc - rho[i]) > 1e-9) ++cluster_mismatches;

            double ref_f = inf, ref_c = inf;
            bool higher = false;
            double maxf = -inf, maxc = -inf;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                double wf = std::hypot(feats[i].f[0] - feats[j].f[0], feats[i].f[1] - feats[j].f[1]);
                double wc = std::hypot(feats[i].px - feats[j].px, feats[i].py - feats[j].py);
                maxf = std::max(maxf, wf);
                maxc = std::max(maxc, wc);
                if (rho[j] > rho[i] || (rho[j] == rho[i] && j < i)) {
                    higher = true;
                    ref_f = std::min(ref_f, wf);
                    ref_c = std::min(ref_c, wc);
                }
            }
            if (!higher) {
                ref_f = maxf;
                ref_c = maxc;
            }
            if (std::fabs(ref_f - df[i]) > 1e-9 || std::fabs(ref_c - dc[i]) > 1e-9)
                ++cluster_mismatches;
        }
        if (cluster_mismatches > 0) break;
    }

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "1000 random graphs vs naive merger: %d mismatches; 1000 point sets rho/delta "
                  "within 1e-9: %d mismatches",
                  graph_mismatches, cluster_mismatches);
    report("oracle_equivalence", graph_mismatches == 0 && cluster_mismatches == 0, buf);
}

// --- criterion 5: complexity slopes ---------------------------------------

void check_complexity() {
    BenchReport r = run_bench({100, 200, 400, 800, 1600}, 9);
    char buf[120];
    std::snprintf(buf, sizeof(buf), "log-log slopes: clustering %.3f (want 1.7..2.3), merger %.3f "
                                    "(want 0.7..1.4)",
                  r.cfsfdp_slope, r.gbis_slope);
    report("complexity_slopes",
           r.cfsfdp_slope >= 1.7 && r.cfsfdp_slope <= 2.3 && r.gbis_slope >= 0.7 &&
               r.gbis_slope <= 1.4,
           buf);
}

// --- criterion 6: format fidelity -----------------------------------------

void check_format_fidelity() {
    fs::path dir = work_dir() / "flo";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::mt19937_64 rng(404);
    int bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
        int w = 1 + static_cast<int>(rng() % 40);
        int h = 1 + static_cast<int>(rng() % 40);
        FlowField f(w, h);
        for (float& v : f.data) {
            // draw raw bit patterns so subnormals and negative zero appear too
            uint32_t bits;
            do {
                bits = static_cast<uint32_t>(rng());
                std::memcpy(&v, &bits, sizeof v);
            } while (!std::isfinite(v));
        }
        f.data[0] = std::numeric_limits<float>::denorm_min();
        if (f.data.size() > 1) f.data[1] = -std::numeric_limits<float>::denorm_min();
        fs::path p = dir / ("t" + std::to_string(trial) + ".flo");
        write_flo(f, p.string());
        FlowField g = read_flo(p.string());
        if (g.width != w || g.height != h ||
            std::memcmp(f.data.data(), g.data.data(), f.data.size() * sizeof(float)) != 0)
            ++bad;
    }

    // generate -> export -> reload must be lossless
    SynthConfig cfg;
    cfg.width = 128;
    cfg.height = 96;
    cfg.frame_count = 16;
    cfg.n_objects = 2;
    cfg.seed = 77;
    cfg.flow_noise_sigma = 0.25;
    SynthSequence seq = synth_scene(cfg);
    fs::path sdir = work_dir() / "roundtrip";
    fs::remove_all(sdir);
    export_sequence(seq, sdir.string(), 5);
    SequenceSource src = load_cdnet_sequence(sdir.string(), (sdir / "flow").string());
    int seq_bad = 0;
    for (int t = 1; t <= src.frame_count; ++t) {
        if (read_mask(src.mask_paths[t - 1]).labels != seq.masks[t - 1].labels) ++seq_bad;
        if (t >= 2 && read_flo(src.flow_paths[t - 1]).data != seq.step_flows[t - 1].data) ++seq_bad;
    }
    std::vector<std::vector<BBox>> gts =
        read_gt_boxes((sdir / "gtboxes.csv").string(), src.frame_count);
    for (int t = 0; t < src.frame_count; ++t)
        if (gts[t] != seq.gt_boxes[t]) ++seq_bad;

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "100 bitwise .flo round trips: %d failures; export/reload frame mismatches: %d",
                  bad, seq_bad);
    report("format_fidelity", bad == 0 && seq_bad == 0, buf);
}

// --- criterion 7: degenerate inputs ---------------------------------------

void check_degenerate() {
    bool ok = true;
    std::string detail = "empty mask, lone sample, zero-peak frame, k=1 ring all handled";
    try {
        PipelineParams params;

        // fully empty foreground
        FlowRing ring(params.k);
        for (int i = 0; i < params.k; ++i) ring.push(FlowField(64, 48));
        FrameResult empty = analyze_frame(Mask(64, 48, 0), ring, params);
        if (!empty.instances.empty()) {
            ok = false;
            detail = "empty mask produced instances";
        }

        // exactly one foreground sample point
        Mask lone(64, 48, 0);
        lone.label(4, 4) = 255;
        FrameResult single = analyze_frame(lone, ring, params);
        if (single.instances.size() != 1) {
            ok = false;
            detail = "lone sample did not yield one instance";
        }

        // small blob with zero flow: no point clears the separation gates
        Mask blob(64, 48, 0);
        for (int y = 10; y < 18; ++y)
            for (int x = 10; x < 20; ++x) blob.label(x, y) = 255;
        FrameResult no_peaks = analyze_frame(blob, ring, params);
        if (!no_peaks.instances.empty() || no_peaks.diagnostics.n_peaks_raw != 0) {
            ok = false;
            detail = "zero-peak frame was not handled cleanly";
        }

        // minimal temporal window
        PipelineParams k1 = params;
        k1.k = 1;
        FlowRing short_ring(1);
        short_ring.push(FlowField(64, 48));
        FrameResult r1 = analyze_frame(blob, short_ring, k1);
        (void)r1;
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("unexpected exception: ") + e.what();
    }
    report("degenerate_inputs", ok, detail);
}

// --- criterion 8: determinism through the CLI -----------------------------

void check_determinism(const std::string& cli) {
    fs::path base = work_dir() / "determinism";
    fs::remove_all(base);
    SynthConfig cfg;
    cfg.width = 320;
    cfg.height = 240;
    cfg.frame_count = 30;
    cfg.n_objects = 3;
    cfg.seed = 314;
    SynthSequence seq = synth_scene(cfg);
    fs::path dir = base / "seq";
    export_sequence(seq, dir.string(), 5);

    fs::path r1 = base / "r1.jsonl", r2 = base / "r2.jsonl";
    std::string args = "analyze --seq-dir \"" + dir.string() + "\" --no-timing --seed 7 -o \"";
    bool ran = run_cli(cli, args + r1.string() + "\"") == 0 &&
               run_cli(cli, args + r2.string() + "\"") == 0;
    std::string a = read_file(r1), b = read_file(r2);
    bool ok = ran && !a.empty() && a == b;
    char buf[120];
    std::snprintf(buf, sizeof(buf), "two runs, %zu bytes each, byte-identical: %s", a.size(),
                  ok ? "yes" : "no");
    report("determinism", ok, buf);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-cli>\n");
        return 2;
    }
    std::string cli = argv[1];

    check_report_format(cli);
    check_synthetic_e2e();
    check_ablation();
    check_oracles();
    check_complexity();
    check_format_fidelity();
    check_degenerate();
    check_determinism(cli);

    std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ACCEPTED" : "REJECTED",
                failures);
    return failures == 0 ? 0 : 1;
}
