#ifndef ALOHAQSM_PHANTOM_HPP
#define ALOHAQSM_PHANTOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <alohaqsm/baselines.hpp>
#include <alohaqsm/forward.hpp>
#include <alohaqsm/noise.hpp>

namespace alohaqsm
{

enum class ShapeKind
{
    ellipsoid,
    sphere,
    cylinder
};

///
/// One geometric susceptibility source. Positions are in millimetres relative
/// to the grid centre (voxel n sits at (n - N/2) * voxel size). `extent`
/// holds the semi-axes for an ellipsoid; for spheres and cylinders only
/// extent[0] (the radius) is used. Cylinders also use `length` and `axis`.
///
struct Shape
{
    ShapeKind kind = ShapeKind::sphere;
    std::string name;
    Vec3 center{0.0, 0.0, 0.0};
    Vec3 extent{1.0, 1.0, 1.0};
    double length  = 0.0;
    Vec3 axis{0.0, 0.0, 1.0};
    double chi_ppm = 0.0;

    void validate() const
    {
        switch (kind) {
        case ShapeKind::ellipsoid:
            detail::require(extent[0] > 0 && extent[1] > 0 && extent[2] > 0, "Shape: ellipsoid semi-axes must be positive");
            break;
        case ShapeKind::sphere: detail::require(extent[0] > 0, "Shape: sphere radius must be positive"); break;
        case ShapeKind::cylinder:
            detail::require(extent[0] > 0 && length > 0, "Shape: cylinder radius and length must be positive");
            (void)normalized(axis);
            break;
        }
    }

    bool contains(const Vec3& p) const
    {
        const double dx = p[0] - center[0], dy = p[1] - center[1], dz = p[2] - center[2];
        switch (kind) {
        case ShapeKind::ellipsoid: {
            const double ex = dx / extent[0], ey = dy / extent[1], ez = dz / extent[2];
            return ex * ex + ey * ey + ez * ez <= 1.0;
        }
        case ShapeKind::sphere: return dx * dx + dy * dy + dz * dz <= extent[0] * extent[0];
        case ShapeKind::cylinder: {
            const Vec3 u     = normalized(axis);
            const double t   = dx * u[0] + dy * u[1] + dz * u[2];
            const double px  = dx - t * u[0], py = dy - t * u[1], pz = dz - t * u[2];
            return std::abs(t) <= 0.5 * length && px * px + py * py + pz * pz <= extent[0] * extent[0];
        }
        }
        return false;
    }
};

struct PhantomSpec
{
    Dims dims{64, 64, 64};
    VoxelSize voxel{1.0, 1.0, 1.0};
    std::vector<Shape> shapes;
    double background_ppm = 0.0;

    void validate() const
    {
        (void)Volume<std::uint8_t>(dims, voxel); // dims/voxel checks
        for (const auto& s : shapes)
            s.validate();
    }
};

inline Vec3 voxel_position(const Dims& d, const VoxelSize& v, std::size_t x, std::size_t y, std::size_t z)
{
    return {static_cast<double>(frequency_index(x, d.nx)) * v.dx, static_cast<double>(frequency_index(y, d.ny)) * v.dy,
            static_cast<double>(frequency_index(z, d.nz)) * v.dz};
}

namespace detail
{
/// Index of the last shape containing each voxel centre, -1 for none.
inline std::vector<int> owner_map(const PhantomSpec& spec)
{
    spec.validate();
    const Dims& d = spec.dims;
    std::vector<int> owner(d.size(), -1);
    for (std::size_t z = 0; z < d.nz; ++z)
        for (std::size_t y = 0; y < d.ny; ++y)
            for (std::size_t x = 0; x < d.nx; ++x) {
                const Vec3 p = voxel_position(d, spec.voxel, x, y, z);
                for (std::size_t s = spec.shapes.size(); s-- > 0;)
                    if (spec.shapes[s].contains(p)) {
                        owner[x + d.nx * (y + d.ny * z)] = static_cast<int>(s);
                        break;
                    }
            }
    return owner;
}
} // namespace detail

/// Susceptibility map: the value of the last listed shape containing the
/// voxel centre, otherwise the background.
inline RealVolume render(const PhantomSpec& spec)
{
    const auto owner = detail::owner_map(spec);
    RealVolume chi(spec.dims, spec.voxel);
    for (std::size_t i = 0; i < chi.size(); ++i)
        chi[i] = owner[i] < 0 ? spec.background_ppm : spec.shapes[static_cast<std::size_t>(owner[i])].chi_ppm;
    return chi;
}

/// Label i+1 for voxels owned by shape i, 0 elsewhere.
inline LabelVolume render_labels(const PhantomSpec& spec)
{
    const auto owner = detail::owner_map(spec);
    LabelVolume labels(spec.dims, spec.voxel);
    for (std::size_t i = 0; i < labels.size(); ++i)
        labels[i] = owner[i] + 1;
    return labels;
}

/// Label id of the first shape called `name`.
inline std::optional<std::int32_t> label_of(const PhantomSpec& spec, const std::string& name)
{
    for (std::size_t i = 0; i < spec.shapes.size(); ++i)
        if (spec.shapes[i].name == name)
            return static_cast<std::int32_t>(i + 1);
    return std::nullopt;
}

///
/// 64^3, 1 mm phantom: a large low-susceptibility ellipsoid holding five
/// deep-grey-matter "nuclei" and two thin "veins". Susceptibilities follow
/// typical in vivo values (ppm).
///
inline PhantomSpec default_brain_like_spec()
{
    PhantomSpec s;
    s.dims  = {64, 64, 64};
    s.voxel = {1.0, 1.0, 1.0};
    auto ell = [](std::string name, Vec3 c, Vec3 r, double chi) {
        Shape sh;
        sh.kind    = ShapeKind::ellipsoid;
        sh.name    = std::move(name);
        sh.center  = c;
        sh.extent  = r;
        sh.chi_ppm = chi;
        return sh;
    };
    auto cyl = [](std::string name, Vec3 c, double radius, double length, Vec3 axis, double chi) {
        Shape sh;
        sh.kind    = ShapeKind::cylinder;
        sh.name    = std::move(name);
        sh.center  = c;
        sh.extent  = {radius, radius, radius};
        sh.length  = length;
        sh.axis    = axis;
        sh.chi_ppm = chi;
        return sh;
    };
    s.shapes = {
        ell("brain", {0, 0, 0}, {26, 22, 20}, 0.02),
        ell("substantia_nigra", {-5, 2, -8}, {3, 5, 2.5}, 0.10),
        ell("red_nucleus", {5, 2, -8}, {3, 3, 3}, 0.09),
        ell("globus_pallidus", {-9, -4, 3}, {4, 6, 4}, 0.12),
        ell("putamen", {-18, -4, 3}, {3.5, 8, 5}, 0.05),
        ell("caudate", {8, -12, 8}, {3.5, 5, 4}, 0.05),
        cyl("vein_1", {10, 8, 0}, 1.2, 24, {1, 0, 0}, 0.3),
        cyl("vein_2", {-4, 12, 4}, 1.2, 16, {0, 0.6, 0.8}, 0.3),
    };
    s.background_ppm = 0.0;
    return s;
}

struct Dataset
{
    RealVolume chi_true;    ///< ppm
    RealVolume phase_clean; ///< normalized field, ppm
    RealVolume phase_noisy; ///< normalized field, ppm
    Mask mask;              ///< union of all shapes
    LabelVolume labels;
    DipoleKernel kernel;
};

///
/// Renders the phantom, applies the forward model and adds complex noise at
/// the given SNR (unit magnitude) to the raw phase. Phases are returned as
/// normalized fields (raw phase / rad_per_ppm). Throws if the clean raw
/// phase would wrap.
///
inline Dataset make_dataset(const PhantomSpec& spec, const ScanParams& params, double snr, std::uint64_t seed,
                            const std::optional<DipoleKernel>& kernel_override = std::nullopt)
{
    params.validate();
    detail::require(snr > 0, "make_dataset: snr must be positive");
    Dataset ds;
    ds.chi_true = render(spec);
    ds.labels   = render_labels(spec);
    ds.kernel   = kernel_override ? *kernel_override : make_dipole_kernel(spec.dims, spec.voxel);
    detail::require_same_grid(ds.chi_true, ds.kernel, "make_dataset");

    ds.phase_clean      = forward_phase(ds.chi_true, ds.kernel);
    const double scale  = params.rad_per_ppm();
    RealVolume raw      = ds.phase_clean;
    for (auto& v : raw.storage()) {
        v *= scale;
        if (std::abs(v) >= std::numbers::pi)
            throw ContractError("make_dataset: raw phase wraps (|theta| >= pi); reduce TE or B0");
    }
    RealVolume magnitude(spec.dims, spec.voxel);
    for (auto& v : magnitude.storage())
        v = 1.0;
    ds.phase_noisy = add_noise(magnitude, raw, snr, seed);
    for (auto& v : ds.phase_noisy.storage())
        v /= scale;

    ds.mask = Mask(spec.dims, spec.voxel);
    for (std::size_t i = 0; i < ds.mask.size(); ++i)
        ds.mask[i] = ds.labels[i] != 0 ? 1 : 0;
    return ds;
}

} // namespace alohaqsm

#endif // ALOHAQSM_PHANTOM_HPP
