#ifndef ALOHAQSM_DIPOLE_HPP
#define ALOHAQSM_DIPOLE_HPP

#include <cmath>

#include <alohaqsm/fft.hpp>
#include <alohaqsm/volume.hpp>

namespace alohaqsm
{

///
/// Unit-dipole response in centered k-space, D(k) = 1/3 - (k.b0)^2/|k|^2,
/// with D(0) = 0. A truncated kernel (see tkd_kernel) shares the type and
/// records its threshold.
///
class DipoleKernel
{
public:
    DipoleKernel() = default;
    DipoleKernel(RealVolume values, Vec3 b0_dir, double threshold = 0.0)
        : values_{std::move(values)}, b0_dir_{b0_dir}, threshold_{threshold}
    {
        values_.set_domain(Domain::kspace);
    }

    const Dims& dims() const noexcept { return values_.dims(); }
    const VoxelSize& voxel_size() const noexcept { return values_.voxel_size(); }
    const Vec3& b0_dir() const noexcept { return b0_dir_; }
    const RealVolume& values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

    /// 0 for the exact kernel, the TKD threshold otherwise.
    double threshold() const noexcept { return threshold_; }

    bool same_grid(const auto& other) const noexcept { return values_.same_grid(other); }

private:
    RealVolume values_;
    Vec3 b0_dir_{0.0, 0.0, 1.0};
    double threshold_ = 0.0;
};

inline Vec3 normalized(Vec3 v)
{
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(n > 0.0) || !std::isfinite(n))
        throw ContractError("b0 direction must be a nonzero finite vector");
    return {v[0] / n, v[1] / n, v[2] / n};
}

inline DipoleKernel make_dipole_kernel(Dims dims, VoxelSize voxel, Vec3 b0_dir = {0.0, 0.0, 1.0})
{
    detail::require(dims.nx >= 2 && dims.ny >= 2 && dims.nz >= 2, "make_dipole_kernel: need at least 2 samples per axis");
    const Vec3 b = normalized(b0_dir);
    RealVolume d(dims, voxel, Domain::kspace);
    for (std::size_t z = 0; z < dims.nz; ++z) {
        const double kz = static_cast<double>(frequency_index(z, dims.nz)) / (static_cast<double>(dims.nz) * voxel.dz);
        for (std::size_t y = 0; y < dims.ny; ++y) {
            const double ky =
                static_cast<double>(frequency_index(y, dims.ny)) / (static_cast<double>(dims.ny) * voxel.dy);
            for (std::size_t x = 0; x < dims.nx; ++x) {
                const double kx =
                    static_cast<double>(frequency_index(x, dims.nx)) / (static_cast<double>(dims.nx) * voxel.dx);
                const double k2 = kx * kx + ky * ky + kz * kz;
                if (k2 == 0.0) {
                    d(x, y, z) = 0.0;
                    continue;
                }
                const double kb = kx * b[0] + ky * b[1] + kz * b[2];
                d(x, y, z)      = 1.0 / 3.0 - kb * kb / k2;
            }
        }
    }
    return DipoleKernel(std::move(d), b);
}

} // namespace alohaqsm

#endif // ALOHAQSM_DIPOLE_HPP
