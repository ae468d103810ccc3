#pragma once

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "flowseg/core.hpp"
#include "flowseg/sampler.hpp"

namespace flowseg {

struct Edge {
    int a = 0;  // a < b
    int b = 0;
    double w = 0.0;
};

struct Graph {
    int node_count = 0;
    std::vector<Edge> edges;
};

// Union-find with rank and path compression, tracking per-root segment size
// and the internal difference Int(C) = max edge weight merged so far.
class SegmentForest {
public:
    explicit SegmentForest(int n)
        : parent_(n), rank_(n, 0), size_(n, 1), internal_(n, 0.0) {
        for (int i = 0; i < n; ++i) parent_[i] = i;
    }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    int size(int root) const { return size_[root]; }
    double internal(int root) const { return internal_[root]; }
    int node_count() const { return static_cast<int>(parent_.size()); }

    int merge(int a, int b, double w) {
        int ra = find(a), rb = find(b);
        if (ra == rb) return ra;
        if (rank_[ra] < rank_[rb]) std::swap(ra, rb);
        parent_[rb] = ra;
        if (rank_[ra] == rank_[rb]) ++rank_[ra];
        size_[ra] += size_[rb];
        internal_[ra] = std::max({internal_[ra], internal_[rb], w});
        return ra;
    }

private:
    std::vector<int> parent_;
    std::vector<int> rank_;
    std::vector<int> size_;
    std::vector<double> internal_;
};

// 8-neighborhood at the lattice stride; each point keeps its 4 smallest-weight
// incident candidates (ties by lower neighbor id), kept edges are unioned over
// all points and deduplicated. Weight is the Euclidean (u,v) distance.
inline Graph build_graph(const SamplePointSet& fg) {
    Graph g;
    g.node_count = static_cast<int>(fg.size());
    int s = fg.interval;

    std::unordered_map<int64_t, int> by_pos;
    by_pos.reserve(fg.size() * 2);
    auto key = [](int x, int y) { return (static_cast<int64_t>(y) << 32) | static_cast<uint32_t>(x); };
    for (const SamplePoint& p : fg.points) by_pos[key(p.x, p.y)] = p.id;

    std::vector<std::pair<int, int>> kept;  // (min id, max id)
    const int off[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};
    std::vector<std::pair<double, int>> cand;  // (weight, neighbor id)
    for (const SamplePoint& p : fg.points) {
        cand.clear();
        for (const auto& o : off) {
            auto it = by_pos.find(key(p.x + o[0] * s, p.y + o[1] * s));
            if (it == by_pos.end()) continue;
            const SamplePoint& q = fg.points[it->second];
            cand.emplace_back(std::hypot(p.u - q.u, p.v - q.v), q.id);
        }
        std::sort(cand.begin(), cand.end());
        size_t keep = std::min<size_t>(4, cand.size());
        for (size_t i = 0; i < keep; ++i)
            kept.emplace_back(std::min(p.id, cand[i].second), std::max(p.id, cand[i].second));
    }

    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    g.edges.reserve(kept.size());
    for (auto [a, b] : kept) {
        const SamplePoint& pa = fg.points[a];
        const SamplePoint& pb = fg.points[b];
        g.edges.push_back({a, b, std::hypot(pa.u - pb.u, pa.v - pb.v)});
    }
    return g;
}

// Felzenszwalb-Huttenlocher merging over edges sorted ascending by
// (weight, min id, max id): merge iff w <= min(Int(A)+tau/|A|, Int(B)+tau/|B|).
inline SegmentForest segment(const Graph& graph, double tau) {
    if (tau < 0.0) throw NegativeTau("segment: tau must be >= 0");
    std::vector<Edge> edges = graph.edges;
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
        if (x.w != y.w) return x.w < y.w;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    SegmentForest forest(graph.node_count);
    for (const Edge& e : edges) {
        int ra = forest.find(e.a);
        int rb = forest.find(e.b);
        if (ra == rb) continue;
        double ta = forest.internal(ra) + tau / forest.size(ra);
        double tb = forest.internal(rb) + tau / forest.size(rb);
        if (e.w <= std::min(ta, tb)) forest.merge(ra, rb, e.w);
    }
    return forest;
}

// tau = 2 * |foreground samples| / |peaks|
inline double adaptive_tau(size_t n_fg, size_t n_peaks) {
    if (n_peaks == 0) throw ZeroPeaks("adaptive_tau: no peaks");
    return 2.0 * static_cast<double>(n_fg) / static_cast<double>(n_peaks);
}

}  // namespace flowseg
