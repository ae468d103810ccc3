#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "flowseg/core.hpp"

namespace flowseg {

namespace detail {

inline int next_pnm_int(std::istream& in) {
    // Skips whitespace and '#' comment lines between header tokens.
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF) return -1;
    int value = 0;
    bool any = false;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        any = true;
        c = in.get();
    }
    return any ? value : -1;
}

}  // namespace detail

inline Mask read_mask(const std::string& path, std::vector<uint8_t> fg_policy = {255}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("read_mask: cannot open " + path);

    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5')
        throw UnsupportedFormat("read_mask: not a binary PGM (P5): " + path);

    int w = detail::next_pnm_int(in);
    int h = detail::next_pnm_int(in);
    int maxval = detail::next_pnm_int(in);
    if (w <= 0 || h <= 0 || maxval <= 0)
        throw UnsupportedFormat("read_mask: bad PGM header in " + path);
    if (maxval != 255)
        throw DepthMismatch("read_mask: expected 8-bit PGM (maxval 255) in " + path);

    Mask mask(w, h);
    if (fg_policy.empty()) throw ConfigInvalid("read_mask: empty fg_policy");
    mask.fg_policy = std::move(fg_policy);
    if (!in.read(reinterpret_cast<char*>(mask.labels.data()),
                 static_cast<std::streamsize>(mask.labels.size())))
        throw TruncatedFile("read_mask: short pixel payload in " + path);
    return mask;
}

inline void write_mask(const Mask& mask, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("write_mask: cannot open " + path);
    out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(mask.labels.data()),
              static_cast<std::streamsize>(mask.labels.size()));
    if (!out) throw IoFailure("write_mask: write failed for " + path);
}

// Interleaved RGB, row-major.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), data(3u * w * h, 0) {}

    void set(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
        size_t i = 3u * (static_cast<size_t>(y) * width + x);
        data[i] = r;
        data[i + 1] = g;
        data[i + 2] = b;
    }
};

inline void write_ppm(const RgbImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("write_ppm: cannot open " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
    if (!out) throw IoFailure("write_ppm: write failed for " + path);
}

}  // namespace flowseg
