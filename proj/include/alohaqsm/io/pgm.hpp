#ifndef ALOHAQSM_IO_PGM_HPP
#define ALOHAQSM_IO_PGM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <alohaqsm/volume.hpp>

namespace alohaqsm::io
{

/// A 2-D slice, row-major, `width` samples per row.
struct Slice
{
    std::size_t width  = 0;
    std::size_t height = 0;
    std::vector<double> values;
};

///
/// Slice perpendicular to `axis` at `index`. Axis 0 gives a (y, z) image with
/// y along the row, axis 1 gives (x, z), axis 2 gives (x, y).
///
inline Slice extract_slice(const RealVolume& v, int axis, std::size_t index)
{
    const auto& d = v.dims();
    alohaqsm::detail::require(axis >= 0 && axis <= 2, "extract_slice: axis must be 0, 1 or 2");
    if (index >= d[std::size_t(axis)])
        throw ContractError("extract_slice: index " + std::to_string(index) + " out of range for axis " + std::to_string(axis) +
                            " (extent " + std::to_string(d[std::size_t(axis)]) + ")");
    Slice s;
    const int ua = axis == 0 ? 1 : 0;
    const int va = axis == 2 ? 1 : 2;
    s.width      = d[std::size_t(ua)];
    s.height     = d[std::size_t(va)];
    s.values.resize(s.width * s.height);
    for (std::size_t r = 0; r < s.height; ++r)
        for (std::size_t c = 0; c < s.width; ++c) {
            std::size_t xyz[3];
            xyz[axis]         = index;
            xyz[ua]           = c;
            xyz[va]           = r;
            s.values[r * s.width + c] = v(xyz[0], xyz[1], xyz[2]);
        }
    return s;
}

/// Linear map of [lo, hi] onto [0, 65535], clamped.
inline std::uint16_t window_level(double x, double lo, double hi)
{
    const double t = (x - lo) / (hi - lo);
    return static_cast<std::uint16_t>(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
}

/// Binary 16-bit PGM: "P5 W H 65535\n" followed by big-endian samples.
inline std::vector<char> encode_pgm(const Slice& s, double lo, double hi)
{
    alohaqsm::detail::require(hi > lo, "encode_pgm: window requires hi > lo");
    std::string head = "P5 " + std::to_string(s.width) + " " + std::to_string(s.height) + " 65535\n";
    std::vector<char> out(head.begin(), head.end());
    out.reserve(head.size() + 2 * s.values.size());
    for (double x : s.values) {
        const auto q = window_level(x, lo, hi);
        out.push_back(static_cast<char>(q >> 8));
        out.push_back(static_cast<char>(q & 0xff));
    }
    return out;
}

inline void write_pgm(const std::filesystem::path& path, const Slice& s, double lo, double hi)
{
    auto bytes = encode_pgm(s, lo, hi);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !f.write(bytes.data(), static_cast<std::streamsize>(bytes.size())))
        throw IoError("cannot write PGM '" + path.string() + "'");
}

} // namespace alohaqsm::io

#endif
