#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "flowseg/core.hpp"
#include "flowseg/sampler.hpp"

namespace flowseg {

// 4-d clustering feature (u, v, x/p, y/p); the unscaled pixel coordinates are
// kept alongside for the coordinate-space separation.
struct FeatureVector {
    double f[4];
    double px, py;
};

struct PeakSet {
    std::vector<int> ids;  // ids into the full foreground sample set, ascending
};

struct PeakAnalysis {
    std::vector<int> subsample_ids;  // ids of the analyzed points, ascending
    std::vector<double> rho;
    std::vector<double> delta_f;
    std::vector<double> delta_c;
    PeakSet peaks;
};

namespace detail {

inline uint64_t bounded_draw(std::mt19937_64& rng, uint64_t n) {
    return rng() % n;  // bias is n/2^64, negligible at these scales
}

}  // namespace detail

// All ids when the set is small enough, otherwise a seeded uniform random
// subset of size max_points, returned sorted ascending.
inline std::vector<int> subsample(const SamplePointSet& points, int max_points, uint64_t seed) {
    if (max_points < 1) throw ConfigInvalid("subsample: max_points must be >= 1");
    int n = static_cast<int>(points.size());
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    if (n <= max_points) return ids;

    std::mt19937_64 rng(seed);
    // partial Fisher-Yates
    for (int i = 0; i < max_points; ++i) {
        int j = i + static_cast<int>(detail::bounded_draw(rng, static_cast<uint64_t>(n - i)));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(max_points);
    std::sort(ids.begin(), ids.end());
    return ids;
}

inline std::vector<FeatureVector> build_features(const SamplePointSet& points,
                                                 const std::vector<int>& ids, double p) {
    if (p <= 0.0) throw NonPositiveBalance("build_features: p must be > 0");
    std::vector<FeatureVector> out;
    out.reserve(ids.size());
    for (int id : ids) {
        const SamplePoint& sp = points.points[id];
        out.push_back({{sp.u, sp.v, sp.x / p, sp.y / p},
                       static_cast<double>(sp.x),
                       static_cast<double>(sp.y)});
    }
    return out;
}

inline std::vector<FeatureVector> build_features(const SamplePointSet& points, double p) {
    std::vector<int> ids(points.size());
    std::iota(ids.begin(), ids.end(), 0);
    return build_features(points, ids, p);
}

inline double feature_distance(const FeatureVector& a, const FeatureVector& b) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        double d = a.f[i] - b.f[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline double flow_distance(const FeatureVector& a, const FeatureVector& b) {
    return std::hypot(a.f[0] - b.f[0], a.f[1] - b.f[1]);
}

inline double coord_distance(const FeatureVector& a, const FeatureVector& b) {
    return std::hypot(a.px - b.px, a.py - b.py);
}

// Quantile of all pairwise 4-feature distances; the usual density-peaks
// neighborhood heuristic (default fraction 0.02). Falls back to the smallest
// positive distance when the quantile hits coincident points.
inline double choose_dc(const std::vector<FeatureVector>& features, double target_fraction = 0.02) {
    size_t n = features.size();
    if (n < 2) throw TooFewPoints("choose_dc: need at least 2 points");
    if (target_fraction <= 0.0 || target_fraction >= 1.0)
        throw ConfigInvalid("choose_dc: fraction must be in (0,1)");
    std::vector<double> dists;
    dists.reserve(n * (n - 1) / 2);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) dists.push_back(feature_distance(features[i], features[j]));
    std::sort(dists.begin(), dists.end());
    size_t m = dists.size();
    size_t k = static_cast<size_t>(target_fraction * m);
    if (k < 1) k = 1;
    if (k > m) k = m;
    double dc = dists[k - 1];
    if (dc <= 0.0) {
        for (double d : dists)
            if (d > 0.0) { dc = d; break; }
    }
    if (dc <= 0.0) dc = 1.0;  // all points coincident
    return dc;
}

// Gaussian-kernel density, self term included; summed in fixed index order.
inline std::vector<double> densities(const std::vector<FeatureVector>& features, double d_c) {
    if (d_c <= 0.0) throw NonPositiveCutoff("densities: d_c must be > 0");
    size_t n = features.size();
    std::vector<double> rho(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (size_t j = 0; j < n; ++j) {
            double d = feature_distance(features[i], features[j]) / d_c;
            s += std::exp(-d * d);
        }
        rho[i] = s;
    }
    return rho;
}

// Density ties break by lower index counting as higher. Exactly one point
// (the density argmax under that rule) takes the max-over-all branch; for a
// lone point the max over no others is +infinity.
inline std::pair<std::vector<double>, std::vector<double>> deltas(
    const std::vector<FeatureVector>& features, const std::vector<double>& rho) {
    size_t n = features.size();
    if (n == 0) throw EmptyInput("deltas: no points");
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> df(n, inf), dc(n, inf);
    for (size_t i = 0; i < n; ++i) {
        bool has_higher = false;
        double min_f = inf, min_c = inf, max_f = -inf, max_c = -inf;
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double wf = flow_distance(features[i], features[j]);
            double wc = coord_distance(features[i], features[j]);
            max_f = std::max(max_f, wf);
            max_c = std::max(max_c, wc);
            if (rho[j] > rho[i] || (rho[j] == rho[i] && j < i)) {
                has_higher = true;
                min_f = std::min(min_f, wf);
                min_c = std::min(min_c, wc);
            }
        }
        if (has_higher) {
            df[i] = min_f;
            dc[i] = min_c;
        } else if (n > 1) {
            df[i] = max_f;
            dc[i] = max_c;
        }  // singleton keeps +inf
    }
    return {std::move(df), std::move(dc)};
}

struct PeakParams {
    double c1 = 15.0;    // density threshold divisor: T_r = rho_max / c1
    double c2 = 0.5;     // flow separation per frame step: T_d1 = c2 * k
    int k = 5;
    double t_d2 = 50.0;  // coordinate separation in pixels
};

// rho > rho_max/c1 && (delta_f > c2*k || delta_c > T_d2).
inline PeakSet select_peaks(const std::vector<int>& subsample_ids, const std::vector<double>& rho,
                            const std::vector<double>& delta_f, const std::vector<double>& delta_c,
                            const PeakParams& params) {
    PeakSet out;
    if (rho.empty()) return out;
    double rho_max = *std::max_element(rho.begin(), rho.end());
    double t_r = rho_max / params.c1;
    double t_d1 = params.c2 * params.k;
    for (size_t i = 0; i < rho.size(); ++i) {
        if (rho[i] > t_r && (delta_f[i] > t_d1 || delta_c[i] > params.t_d2))
            out.ids.push_back(subsample_ids[i]);
    }
    return out;
}

struct CompositionParams {
    int n_c = 200;
    uint64_t seed = 0;
    double p = 50.0;
    double d_c = 0.0;  // 0 = auto quantile
    double dc_fraction = 0.02;
    PeakParams peak;
};

// Subsample + features + densities + separations + peak criterion in one pass.
inline PeakAnalysis analyze_composition(const SamplePointSet& points,
                                        const CompositionParams& params) {
    PeakAnalysis a;
    a.subsample_ids = subsample(points, params.n_c, params.seed);
    if (a.subsample_ids.empty()) return a;
    std::vector<FeatureVector> feats = build_features(points, a.subsample_ids, params.p);
    double d_c = params.d_c;
    if (d_c <= 0.0) d_c = feats.size() >= 2 ? choose_dc(feats, params.dc_fraction) : 1.0;
    a.rho = densities(feats, d_c);
    auto [df, dc] = deltas(feats, a.rho);
    a.delta_f = std::move(df);
    a.delta_c = std::move(dc);
    a.peaks = select_peaks(a.subsample_ids, a.rho, a.delta_f, a.delta_c, params.peak);
    return a;
}

// Decision-graph dump: one row per analyzed point.
inline std::string composition_csv(const SamplePointSet& points, const PeakAnalysis& a) {
    std::string out = "id,x,y,u,v,rho,delta_f,delta_c,is_peak\n";
    char buf[200];
    for (size_t i = 0; i < a.subsample_ids.size(); ++i) {
        int id = a.subsample_ids[i];
        const SamplePoint& p = points.points[id];
        bool peak = std::binary_search(a.peaks.ids.begin(), a.peaks.ids.end(), id);
        std::snprintf(buf, sizeof(buf), "%d,%d,%d,%g,%g,%.9g,%.9g,%.9g,%d\n", id, p.x, p.y, p.u,
                      p.v, a.rho[i], a.delta_f[i], a.delta_c[i], peak ? 1 : 0);
        out += buf;
    }
    return out;
}

}  // namespace flowseg
