#pragma once

#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include "flowseg/cfsfdp.hpp"
#include "flowseg/gbis.hpp"
#include "flowseg/sampler.hpp"

namespace flowseg {

struct BenchRow {
    std::string stage;
    int n = 0;
    double median_ms = 0.0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    double cfsfdp_slope = 0.0;  // log-log slope of time vs n
    double gbis_slope = 0.0;
};

namespace detail {

// Random foreground-like lattice block of n points with random flows.
inline SamplePointSet random_lattice_points(int n, int s, std::mt19937_64& rng) {
    int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    SamplePointSet set;
    set.interval = s;
    set.provenance = SampleProvenance::foreground;
    std::uniform_real_distribution<float> flow(-5.0f, 5.0f);
    int off = s / 2;
    int id = 0;
    for (int gy = 0; gy < side && id < n; ++gy)
        for (int gx = 0; gx < side && id < n; ++gx)
            set.points.push_back({off + gx * s, off + gy * s, flow(rng), flow(rng), id++});
    return set;
}

template <typename F>
inline double median_time_ms(F&& op, int repetitions) {
    // scale the inner loop so each sample is long enough to time reliably
    auto probe_start = std::chrono::steady_clock::now();
    op();
    double probe_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - probe_start)
            .count();
    int inner = probe_ms > 0.0 ? std::max(1, static_cast<int>(0.5 / probe_ms)) : 64;

    std::vector<double> samples;
    for (int r = 0; r < repetitions; ++r) {
        auto start = std::chrono::steady_clock::now();
        for (int i = 0; i < inner; ++i) op();
        double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
        samples.push_back(ms / inner);
    }
    std::sort(samples.begin(), samples.end());
    return samples[samples.size() / 2];
}

inline double loglog_slope(const std::vector<std::pair<int, double>>& points) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = static_cast<int>(points.size());
    for (auto [x, y] : points) {
        double lx = std::log(static_cast<double>(x));
        double ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

// Times the CFSFDP core (densities + separations) and the GBIS core
// (graph construction + merging) at each point count, then fits log-log
// slopes over the medians.
inline BenchReport run_bench(const std::vector<int>& counts, int repetitions = 9,
                             uint64_t seed = 7) {
    if (counts.size() < 2) throw ConfigInvalid("run_bench: need at least 2 point counts");
    BenchReport report;
    std::mt19937_64 rng(seed);
    std::vector<std::pair<int, double>> cfsfdp_pts, gbis_pts;

    for (int n : counts) {
        SamplePointSet points = detail::random_lattice_points(n, 3, rng);
        std::vector<FeatureVector> feats = build_features(points, 50.0);
        double d_c = choose_dc(feats);

        volatile double sink = 0.0;
        double cfsfdp_ms = detail::median_time_ms(
            [&] {
                std::vector<double> rho = densities(feats, d_c);
                auto [df, dc] = deltas(feats, rho);
                sink = sink + rho[0] + df[0] + dc[0];
            },
            repetitions);
        double gbis_ms = detail::median_time_ms(
            [&] {
                Graph g = build_graph(points);
                SegmentForest forest = segment(g, 2.0 * n);
                sink = sink + forest.find(0);
            },
            repetitions);

        report.rows.push_back({"cfsfdp", n, cfsfdp_ms});
        report.rows.push_back({"gbis", n, gbis_ms});
        cfsfdp_pts.emplace_back(n, cfsfdp_ms);
        gbis_pts.emplace_back(n, gbis_ms);
    }
    report.cfsfdp_slope = detail::loglog_slope(cfsfdp_pts);
    report.gbis_slope = detail::loglog_slope(gbis_pts);
    return report;
}

inline std::string bench_csv(const BenchReport& report) {
    std::string out = "stage,n,median_ms\n";
    char buf[96];
    for (const BenchRow& r : report.rows) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%.6f\n", r.stage.c_str(), r.n, r.median_ms);
        out += buf;
    }
    return out;
}

}  // namespace flowseg
