#ifndef ALOHAQSM_IO_VOLUME_FILE_HPP
#define ALOHAQSM_IO_VOLUME_FILE_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <alohaqsm/volume.hpp>

///
/// \file volume_file.hpp
///
/// VolumeFile: a JSON sidecar (`<stem>.json`) next to a raw little-endian
/// payload (`<stem>.raw`). Real volumes are stored as f32, complex volumes as
/// interleaved (re, im) f32 pairs (dtype c64).
///
namespace alohaqsm::io
{

enum class Dtype
{
    f32,
    c64
};

inline std::size_t dtype_width(Dtype t) { return t == Dtype::f32 ? 4 : 8; }
inline std::string to_string(Dtype t) { return t == Dtype::f32 ? "f32" : "c64"; }

struct VolumeHeader
{
    Dims dims;
    VoxelSize voxel;
    Dtype dtype   = Dtype::f32;
    Domain domain = Domain::image;
    std::optional<Vec3> b0_dir;
    std::optional<double> te;
    std::optional<double> b0;

    std::size_t payload_bytes() const { return dims.size() * dtype_width(dtype); }
};

/// Base path without the .json / .raw suffix.
inline std::filesystem::path volume_stem(const std::filesystem::path& p)
{
    auto ext = p.extension();
    if (ext == ".json" || ext == ".raw")
        return std::filesystem::path(p).replace_extension();
    return p;
}

inline std::filesystem::path header_path(const std::filesystem::path& p)
{
    return std::filesystem::path(volume_stem(p)).concat(".json");
}

inline std::filesystem::path payload_path(const std::filesystem::path& p)
{
    return std::filesystem::path(volume_stem(p)).concat(".raw");
}

namespace detail
{

using alohaqsm::detail::require;

inline nlohmann::json to_json(const VolumeHeader& h)
{
    nlohmann::json j;
    j["dims"]          = {h.dims.nx, h.dims.ny, h.dims.nz};
    j["voxel_size_mm"] = {h.voxel.dx, h.voxel.dy, h.voxel.dz};
    j["dtype"]         = to_string(h.dtype);
    j["domain"]        = alohaqsm::to_string(h.domain);
    if (h.b0_dir)
        j["b0_dir"] = *h.b0_dir;
    if (h.te)
        j["te"] = *h.te;
    if (h.b0)
        j["b0"] = *h.b0;
    return j;
}

inline VolumeHeader header_from_json(const nlohmann::json& j)
{
    VolumeHeader h;
    try {
        auto d = j.at("dims").get<std::vector<long long>>();
        auto v = j.at("voxel_size_mm").get<std::vector<double>>();
        if (d.size() != 3 || v.size() != 3)
            throw IoError("VolumeFile: dims and voxel_size_mm must have three entries");
        for (auto n : d)
            if (n <= 0)
                throw IoError("VolumeFile: dims must be positive");
        for (auto s : v)
            if (!(s > 0))
                throw IoError("VolumeFile: voxel sizes must be positive");
        h.dims  = {std::size_t(d[0]), std::size_t(d[1]), std::size_t(d[2])};
        h.voxel = {v[0], v[1], v[2]};

        auto dt = j.at("dtype").get<std::string>();
        if (dt == "f32")
            h.dtype = Dtype::f32;
        else if (dt == "c64")
            h.dtype = Dtype::c64;
        else
            throw IoError("VolumeFile: unknown dtype '" + dt + "'");

        auto dom = j.value("domain", std::string("image"));
        if (dom == "image")
            h.domain = Domain::image;
        else if (dom == "kspace")
            h.domain = Domain::kspace;
        else
            throw IoError("VolumeFile: unknown domain '" + dom + "'");

        if (j.contains("b0_dir")) {
            auto b = j.at("b0_dir").get<std::vector<double>>();
            if (b.size() != 3)
                throw IoError("VolumeFile: b0_dir must have three entries");
            h.b0_dir = Vec3{b[0], b[1], b[2]};
        }
        if (j.contains("te"))
            h.te = j.at("te").get<double>();
        if (j.contains("b0"))
            h.b0 = j.at("b0").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("VolumeFile: malformed header: ") + e.what());
    }
    return h;
}

inline void put_f32(std::vector<char>& out, std::size_t at, double value)
{
    auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(value));
    for (int b = 0; b < 4; ++b)
        out[at + b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
}

inline double get_f32(const std::vector<char>& in, std::size_t at)
{
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b)
        bits |= std::uint32_t(static_cast<unsigned char>(in[at + b])) << (8 * b);
    return static_cast<double>(std::bit_cast<float>(bits));
}

inline void write_bytes(const std::filesystem::path& p, const char* data, std::size_t n)
{
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open '" + p.string() + "' for writing");
    f.write(data, static_cast<std::streamsize>(n));
    if (!f)
        throw IoError("write failed on '" + p.string() + "'");
}

inline void write_files(const std::filesystem::path& p, const VolumeHeader& h, const std::vector<char>& payload)
{
    auto text = to_json(h).dump(2) + "\n";
    write_bytes(header_path(p), text.data(), text.size());
    write_bytes(payload_path(p), payload.data(), payload.size());
}

} // namespace detail

inline VolumeHeader read_header(const std::filesystem::path& p)
{
    auto hp = header_path(p);
    std::ifstream f(hp);
    if (!f)
        throw IoError("cannot open header '" + hp.string() + "'");
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("VolumeFile: header '" + hp.string() + "' is not valid JSON: " + e.what());
    }
    return detail::header_from_json(j);
}

/// Reads the payload after checking its length against the parsed header.
inline std::vector<char> read_payload(const std::filesystem::path& p, const VolumeHeader& h)
{
    auto pp = payload_path(p);
    std::error_code ec;
    auto size = std::filesystem::file_size(pp, ec);
    if (ec)
        throw IoError("cannot stat payload '" + pp.string() + "'");
    if (size != h.payload_bytes())
        throw IoError("VolumeFile: payload '" + pp.string() + "' has " + std::to_string(size) + " bytes, header implies " +
                      std::to_string(h.payload_bytes()));
    std::vector<char> buf(size);
    std::ifstream f(pp, std::ios::binary);
    if (!f || !f.read(buf.data(), static_cast<std::streamsize>(size)))
        throw IoError("read failed on '" + pp.string() + "'");
    return buf;
}

inline void write_volume(const std::filesystem::path& p, const RealVolume& v, VolumeHeader extra = {})
{
    VolumeHeader h = extra;
    h.dims         = v.dims();
    h.voxel        = v.voxel_size();
    h.dtype        = Dtype::f32;
    h.domain       = v.domain();
    std::vector<char> buf(h.payload_bytes());
    for (std::size_t i = 0; i < v.size(); ++i)
        detail::put_f32(buf, 4 * i, v[i]);
    detail::write_files(p, h, buf);
}

inline void write_volume(const std::filesystem::path& p, const ComplexVolume& v, VolumeHeader extra = {})
{
    VolumeHeader h = extra;
    h.dims         = v.dims();
    h.voxel        = v.voxel_size();
    h.dtype        = Dtype::c64;
    h.domain       = v.domain();
    std::vector<char> buf(h.payload_bytes());
    for (std::size_t i = 0; i < v.size(); ++i) {
        detail::put_f32(buf, 8 * i, v[i].real());
        detail::put_f32(buf, 8 * i + 4, v[i].imag());
    }
    detail::write_files(p, h, buf);
}

inline void write_volume(const std::filesystem::path& p, const Mask& m, VolumeHeader extra = {})
{
    RealVolume r(m.dims(), m.voxel_size(), m.domain());
    for (std::size_t i = 0; i < m.size(); ++i)
        r[i] = m[i];
    write_volume(p, r, extra);
}

inline void write_volume(const std::filesystem::path& p, const LabelVolume& l, VolumeHeader extra = {})
{
    RealVolume r(l.dims(), l.voxel_size(), l.domain());
    for (std::size_t i = 0; i < l.size(); ++i)
        r[i] = l[i];
    write_volume(p, r, extra);
}

inline RealVolume read_real(const std::filesystem::path& p, VolumeHeader* header = nullptr)
{
    auto h = read_header(p);
    if (h.dtype != Dtype::f32)
        throw IoError("VolumeFile: '" + header_path(p).string() + "' holds " + to_string(h.dtype) + ", expected f32");
    auto buf = read_payload(p, h);
    RealVolume v(h.dims, h.voxel, h.domain);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = detail::get_f32(buf, 4 * i);
    if (header)
        *header = h;
    return v;
}

inline ComplexVolume read_complex(const std::filesystem::path& p, VolumeHeader* header = nullptr)
{
    auto h = read_header(p);
    auto buf = read_payload(p, h);
    ComplexVolume v(h.dims, h.voxel, h.domain);
    if (h.dtype == Dtype::c64)
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = {detail::get_f32(buf, 8 * i), detail::get_f32(buf, 8 * i + 4)};
    else
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = detail::get_f32(buf, 4 * i);
    if (header)
        *header = h;
    return v;
}

/// Nonzero voxels become 1.
inline Mask read_mask(const std::filesystem::path& p)
{
    auto r = read_real(p);
    Mask m(r.dims(), r.voxel_size(), r.domain());
    for (std::size_t i = 0; i < r.size(); ++i)
        m[i] = r[i] != 0.0 ? 1 : 0;
    return m;
}

inline LabelVolume read_labels(const std::filesystem::path& p)
{
    auto r = read_real(p);
    LabelVolume l(r.dims(), r.voxel_size(), r.domain());
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] != std::nearbyint(r[i]))
            throw IoError("label volume '" + header_path(p).string() + "' holds non-integer values");
        l[i] = static_cast<std::int32_t>(r[i]);
    }
    return l;
}

} // namespace alohaqsm::io

#endif
