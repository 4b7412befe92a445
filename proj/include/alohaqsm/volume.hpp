#ifndef ALOHAQSM_VOLUME_HPP
#define ALOHAQSM_VOLUME_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <alohaqsm/error.hpp>

namespace alohaqsm
{

using Complex = std::complex<double>;

/// Grid extent. Storage is row-major with x fastest: index = x + nx*(y + ny*z).
struct Dims
{
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::size_t nz = 0;

    constexpr std::size_t size() const noexcept { return nx * ny * nz; }
    constexpr std::size_t operator[](std::size_t axis) const noexcept
    {
        return axis == 0 ? nx : (axis == 1 ? ny : nz);
    }
    friend constexpr bool operator==(const Dims&, const Dims&) = default;
};

/// Physical voxel spacing in millimetres.
struct VoxelSize
{
    double dx = 1.0;
    double dy = 1.0;
    double dz = 1.0;

    constexpr double operator[](std::size_t axis) const noexcept
    {
        return axis == 0 ? dx : (axis == 1 ? dy : dz);
    }
    friend constexpr bool operator==(const VoxelSize&, const VoxelSize&) = default;
};

enum class Domain
{
    image,
    kspace
};

inline std::string to_string(Domain d) { return d == Domain::image ? "image" : "kspace"; }

using Vec3 = std::array<double, 3>;

///
/// A dense 3-D field on a regular grid. The domain tag records whether the
/// samples are image values or (centered) k-space coefficients.
///
template <typename T>
class Volume
{
public:
    using value_type = T;

    Volume() = default;

    Volume(Dims dims, VoxelSize voxel, Domain domain = Domain::image)
        : dims_{dims}, voxel_{voxel}, domain_{domain}, data_(dims.size(), T{})
    {
        validate();
    }

    Volume(Dims dims, VoxelSize voxel, Domain domain, std::vector<T> data)
        : dims_{dims}, voxel_{voxel}, domain_{domain}, data_(std::move(data))
    {
        validate();
    }

    /// Same grid and domain as `other`, value-initialised samples.
    template <typename U>
    static Volume like(const Volume<U>& other)
    {
        return Volume(other.dims(), other.voxel_size(), other.domain());
    }

    const Dims& dims() const noexcept { return dims_; }
    const VoxelSize& voxel_size() const noexcept { return voxel_; }
    Domain domain() const noexcept { return domain_; }
    void set_domain(Domain d) noexcept { domain_ = d; }
    std::size_t size() const noexcept { return data_.size(); }

    std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept
    {
        return x + dims_.nx * (y + dims_.ny * z);
    }

    T& operator()(std::size_t x, std::size_t y, std::size_t z) noexcept { return data_[index(x, y, z)]; }
    const T& operator()(std::size_t x, std::size_t y, std::size_t z) const noexcept
    {
        return data_[index(x, y, z)];
    }
    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }
    std::vector<T>& storage() noexcept { return data_; }
    const std::vector<T>& storage() const noexcept { return data_; }

    bool same_grid(const auto& other) const noexcept
    {
        return dims_ == other.dims() && voxel_ == other.voxel_size();
    }

private:
    void validate() const
    {
        detail::require(dims_.nx > 0 && dims_.ny > 0 && dims_.nz > 0, "Volume: dims must be positive");
        detail::require(voxel_.dx > 0 && voxel_.dy > 0 && voxel_.dz > 0,
                        "Volume: voxel sizes must be strictly positive");
        detail::require(data_.size() == dims_.size(), "Volume: data length must equal nx*ny*nz");
    }

    Dims dims_{};
    VoxelSize voxel_{};
    Domain domain_ = Domain::image;
    std::vector<T> data_;
};

using RealVolume    = Volume<double>;
using ComplexVolume = Volume<Complex>;
using Mask          = Volume<std::uint8_t>;
using LabelVolume   = Volume<std::int32_t>;

namespace detail
{
template <typename A, typename B>
void require_same_grid(const A& a, const B& b, const char* where)
{
    if (!a.same_grid(b))
        throw ContractError(std::string(where) + ": grid mismatch");
}
} // namespace detail

/// A mask covering the whole grid.
template <typename T>
Mask full_mask(const Volume<T>& like)
{
    Mask m(like.dims(), like.voxel_size());
    for (auto& v : m.storage())
        v = 1;
    return m;
}

inline std::size_t count(const Mask& m)
{
    std::size_t n = 0;
    for (auto v : m.data())
        n += v != 0;
    return n;
}

inline RealVolume real_part(const ComplexVolume& v)
{
    RealVolume out(v.dims(), v.voxel_size(), v.domain());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = v[i].real();
    return out;
}

inline ComplexVolume to_complex(const RealVolume& v)
{
    ComplexVolume out(v.dims(), v.voxel_size(), v.domain());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = v[i];
    return out;
}

} // namespace alohaqsm

#endif // ALOHAQSM_VOLUME_HPP
