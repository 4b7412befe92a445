#ifndef ALOHAQSM_IO_NIFTI_HPP
#define ALOHAQSM_IO_NIFTI_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <type_traits>
#include <vector>

#include <alohaqsm/volume.hpp>

/// Reader for uncompressed single-file NIfTI-1 volumes (float32 / int16, 3-D).
namespace alohaqsm::io
{

namespace nifti
{
inline constexpr std::int16_t dt_int16   = 4;
inline constexpr std::int16_t dt_float32 = 16;
inline constexpr std::size_t header_size = 348;
} // namespace nifti

namespace detail
{

class ByteReader
{
  public:
    ByteReader(const std::vector<char>& buf, bool swap) : buf_(buf), swap_(swap) {}

    template <class T>
    T get(std::size_t at) const
    {
        static_assert(std::is_trivially_copyable_v<T>);
        std::array<char, sizeof(T)> raw;
        std::memcpy(raw.data(), buf_.data() + at, sizeof(T));
        if (swap_)
            std::reverse(raw.begin(), raw.end());
        return std::bit_cast<T>(raw);
    }

  private:
    const std::vector<char>& buf_;
    bool swap_;
};

} // namespace detail

inline RealVolume read_nifti1(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open NIfTI file '" + path.string() + "'");
    std::vector<char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (bytes.size() < nifti::header_size)
        throw IoError("NIfTI: file '" + path.string() + "' is shorter than a NIfTI-1 header");

    std::int32_t sizeof_hdr;
    std::memcpy(&sizeof_hdr, bytes.data(), 4);
    const bool swap = sizeof_hdr != 348;
    detail::ByteReader rd(bytes, swap);
    if (rd.get<std::int32_t>(0) != 348)
        throw IoError("NIfTI: sizeof_hdr is not 348");

    if (std::memcmp(bytes.data() + 344, "n+1\0", 4) != 0)
        throw IoError("NIfTI: magic field is '" + std::string(bytes.data() + 344, strnlen(bytes.data() + 344, 4)) +
                      "', expected 'n+1' (single-file NIfTI-1)");

    const auto ndim = rd.get<std::int16_t>(40);
    if (ndim != 3)
        throw IoError("NIfTI: dim[0] = " + std::to_string(ndim) + ", only 3-D volumes are supported");
    std::int16_t dim[3];
    for (int a = 0; a < 3; ++a) {
        dim[a] = rd.get<std::int16_t>(42 + 2 * a);
        if (dim[a] <= 0)
            throw IoError("NIfTI: dim[" + std::to_string(a + 1) + "] must be positive");
    }

    const auto datatype = rd.get<std::int16_t>(70);
    std::size_t width   = 0;
    if (datatype == nifti::dt_float32)
        width = 4;
    else if (datatype == nifti::dt_int16)
        width = 2;
    else
        throw IoError("NIfTI: unsupported datatype " + std::to_string(datatype) + " (float32 = 16 and int16 = 4 are supported)");

    VoxelSize vox{std::abs(rd.get<float>(80)), std::abs(rd.get<float>(84)), std::abs(rd.get<float>(88))};
    if (!(vox.dx > 0 && vox.dy > 0 && vox.dz > 0))
        throw IoError("NIfTI: pixdim[1..3] must be positive");

    const auto offset = static_cast<std::size_t>(rd.get<float>(108));
    const double slope = rd.get<float>(112);
    const double inter = rd.get<float>(116);

    Dims d{std::size_t(dim[0]), std::size_t(dim[1]), std::size_t(dim[2])};
    if (offset < nifti::header_size || bytes.size() < offset + d.size() * width)
        throw IoError("NIfTI: data section is truncated");

    RealVolume v(d, vox, Domain::image);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::size_t at = offset + i * width;
        double x = datatype == nifti::dt_float32 ? double(rd.get<float>(at)) : double(rd.get<std::int16_t>(at));
        v[i]     = slope != 0.0 ? slope * x + inter : x;
    }
    return v;
}

} // namespace alohaqsm::io

#endif
