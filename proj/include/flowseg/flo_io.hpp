#pragma once

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "flowseg/core.hpp"

namespace flowseg {

// Middlebury .flo: float32 magic 202021.25, int32 width, int32 height,
// then row-major interleaved float32 (u,v). All little-endian.
inline constexpr float kFloMagic = 202021.25f;

inline FlowField read_flo(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("read_flo: cannot open " + path);

    float magic = 0.0f;
    if (!in.read(reinterpret_cast<char*>(&magic), 4))
        throw TruncatedFile("read_flo: missing header in " + path);
    if (magic != kFloMagic)
        throw MagicMismatch("read_flo: bad magic in " + path);

    int32_t w = 0, h = 0;
    if (!in.read(reinterpret_cast<char*>(&w), 4) || !in.read(reinterpret_cast<char*>(&h), 4))
        throw TruncatedFile("read_flo: missing dimensions in " + path);
    if (w <= 0 || h <= 0)
        throw TruncatedFile("read_flo: invalid dimensions in " + path);

    FlowField field(w, h);
    size_t bytes = field.data.size() * sizeof(float);
    if (!in.read(reinterpret_cast<char*>(field.data.data()), static_cast<std::streamsize>(bytes)))
        throw TruncatedFile("read_flo: short payload in " + path);

    for (float f : field.data)
        if (!std::isfinite(f))
            throw NonFiniteValue("read_flo: non-finite value in " + path);
    return field;
}

inline void write_flo(const FlowField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("write_flo: cannot open " + path);
    float magic = kFloMagic;
    int32_t w = field.width, h = field.height;
    out.write(reinterpret_cast<const char*>(&magic), 4);
    out.write(reinterpret_cast<const char*>(&w), 4);
    out.write(reinterpret_cast<const char*>(&h), 4);
    out.write(reinterpret_cast<const char*>(field.data.data()),
              static_cast<std::streamsize>(field.data.size() * sizeof(float)));
    if (!out) throw IoFailure("write_flo: write failed for " + path);
}

}  // namespace flowseg
