#pragma once

#include <string>
#include <vector>

#include "flowseg/core.hpp"

namespace flowseg {

struct MatchedPair {
    int pred_idx = 0;
    int gt_idx = 0;
    double iou = 0.0;
};

struct FrameMatch {
    std::vector<MatchedPair> matched;
    std::vector<int> unmatched_preds;
    std::vector<int> unmatched_gts;

    int tp() const { return static_cast<int>(matched.size()); }
    int fp() const { return static_cast<int>(unmatched_preds.size()); }
    int fn() const { return static_cast<int>(unmatched_gts.size()); }
};

// Greedy one-to-one matching in globally descending IoU order; only pairs with
// IoU >= threshold match. Ties break by lower pred index, then lower gt index.
inline FrameMatch match_boxes(const std::vector<BBox>& preds, const std::vector<BBox>& gts,
                              double threshold) {
    if (threshold <= 0.0 || threshold > 1.0)
        throw ConfigInvalid("match_boxes: threshold must be in (0,1]");
    size_t np = preds.size(), ng = gts.size();
    std::vector<double> ious(np * ng);
    for (size_t i = 0; i < np; ++i)
        for (size_t j = 0; j < ng; ++j) ious[i * ng + j] = iou(preds[i], gts[j]);

    std::vector<bool> pred_used(np, false), gt_used(ng, false);
    FrameMatch out;
    while (true) {
        double best = -1.0;
        size_t bi = 0, bj = 0;
        for (size_t i = 0; i < np; ++i) {
            if (pred_used[i]) continue;
            for (size_t j = 0; j < ng; ++j) {
                if (gt_used[j]) continue;
                if (ious[i * ng + j] > best) {
                    best = ious[i * ng + j];
                    bi = i;
                    bj = j;
                }
            }
        }
        if (best < threshold) break;
        pred_used[bi] = true;
        gt_used[bj] = true;
        out.matched.push_back({static_cast<int>(bi), static_cast<int>(bj), best});
    }
    for (size_t i = 0; i < np; ++i)
        if (!pred_used[i]) out.unmatched_preds.push_back(static_cast<int>(i));
    for (size_t j = 0; j < ng; ++j)
        if (!gt_used[j]) out.unmatched_gts.push_back(static_cast<int>(j));
    return out;
}

struct SequenceMetrics {
    long long tp = 0, fp = 0, fn = 0;

    // 0/0 counts as 1: an empty-gt, empty-pred sequence is perfect
    double recall() const { return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / (tp + fn); }
    double precision() const { return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp); }
};

inline SequenceMetrics accumulate_matches(const std::vector<std::vector<BBox>>& preds,
                                          const std::vector<std::vector<BBox>>& gts,
                                          double threshold) {
    if (preds.size() != gts.size())
        throw FrameCountMismatch("accumulate_matches: " + std::to_string(preds.size()) +
                                 " prediction frames vs " + std::to_string(gts.size()) + " gt frames");
    SequenceMetrics m;
    for (size_t f = 0; f < preds.size(); ++f) {
        FrameMatch fm = match_boxes(preds[f], gts[f], threshold);
        m.tp += fm.tp();
        m.fp += fm.fp();
        m.fn += fm.fn();
    }
    return m;
}

struct CurvePoint {
    double iou_threshold = 0.0;
    double recall = 0.0;
    double precision = 0.0;
    long long tp = 0, fp = 0, fn = 0;
};

inline std::vector<CurvePoint> pr_curve(const std::vector<std::vector<BBox>>& preds,
                                        const std::vector<std::vector<BBox>>& gts,
                                        const std::vector<double>& thresholds) {
    for (size_t i = 0; i + 1 < thresholds.size(); ++i)
        if (thresholds[i] >= thresholds[i + 1])
            throw ConfigInvalid("pr_curve: thresholds must be strictly increasing");
    std::vector<CurvePoint> curve;
    for (double t : thresholds) {
        SequenceMetrics m = accumulate_matches(preds, gts, t);
        curve.push_back({t, m.recall(), m.precision(), m.tp, m.fp, m.fn});
    }
    return curve;
}

inline std::string curve_csv(const std::vector<CurvePoint>& curve) {
    std::string out = "iou_threshold,recall,precision,tp,fp,fn\n";
    char buf[160];
    for (const CurvePoint& p : curve) {
        std::snprintf(buf, sizeof(buf), "%.6g,%.6f,%.6f,%lld,%lld,%lld\n", p.iou_threshold,
                      p.recall, p.precision, p.tp, p.fp, p.fn);
        out += buf;
    }
    return out;
}

// Minimal SVG line plot of the recall and precision curves.
inline std::string curve_svg(const std::vector<CurvePoint>& curve) {
    const int w = 480, h = 360, ml = 50, mb = 40, mt = 20, mr = 20;
    auto px = [&](double t) { return ml + t * (w - ml - mr); };
    auto py = [&](double v) { return h - mb - v * (h - mb - mt); };
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
                      "\" height=\"" + std::to_string(h) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", ml, h - mb,
                  w - mr, h - mb);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", ml, mt, ml,
                  h - mb);
    svg += buf;
    auto polyline = [&](auto value, const char* color) {
        std::string pts;
        for (const CurvePoint& p : curve) {
            std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", px(p.iou_threshold), py(value(p)));
            pts += buf;
        }
        return "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" points=\"" + pts +
               "\"/>\n";
    };
    svg += polyline([](const CurvePoint& p) { return p.recall; }, "blue");
    svg += polyline([](const CurvePoint& p) { return p.precision; }, "red");
    svg += "<text x=\"60\" y=\"30\" fill=\"blue\">recall</text>\n";
    svg += "<text x=\"120\" y=\"30\" fill=\"red\">precision</text>\n";
    svg += "<text x=\"" + std::to_string(w / 2) + "\" y=\"" + std::to_string(h - 8) +
           "\">IoU threshold</text>\n</svg>\n";
    return svg;
}

}  // namespace flowseg
