#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowseg/core.hpp"

namespace flowseg {

enum class CompoundMode { pixelwise, trajectory };

struct PipelineParams {
    int k = 5;            // compounded frame count
    int s = 3;            // sample interval
    double p = 50.0;      // flow/coordinate balance
    double c1 = 15.0;     // density threshold divisor
    double c2 = 0.5;      // flow separation per frame step
    double t_d2 = 50.0;   // coordinate separation threshold (pixels)
    int n_c = 200;        // max analyzed points
    double d_c = 0.0;     // density cutoff; 0 = auto quantile
    double dc_fraction = 0.02;
    // trajectory follows each point through the intermediate fields, so a
    // moving object keeps a uniform compounded flow right up to its trailing
    // edge; pixelwise summation only covers pixels inside every footprint
    CompoundMode compound_mode = CompoundMode::trajectory;
    uint64_t seed = 0;
    std::vector<uint8_t> fg_policy{255};

    // ablation: skip composition analysis, run segmentation with a fixed tau
    // and emit every segment as an instance
    bool gbis_only = false;
    double fixed_tau = 200.0;
};

inline CompoundMode parse_compound_mode(const std::string& s) {
    if (s == "pixelwise") return CompoundMode::pixelwise;
    if (s == "trajectory") return CompoundMode::trajectory;
    throw ConfigInvalid("unknown compound mode: " + s);
}

}  // namespace flowseg
