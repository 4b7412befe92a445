#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <alohaqsm/forward.hpp>

using namespace alohaqsm;

namespace
{

RealVolume random_real(Dims d, VoxelSize v, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    RealVolume r(d, v);
    for (auto& x : r.storage())
        x = g(rng);
    return r;
}

double dot(const RealVolume& a, const RealVolume& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

// One periodic pass of [1/4, 1/2, 1/4] along every axis.
RealVolume binomial_smooth(const RealVolume& in)
{
    RealVolume cur = in;
    const auto& d  = in.dims();
    for (int axis = 0; axis < 3; ++axis) {
        RealVolume next = RealVolume::like(cur);
        for (std::size_t z = 0; z < d.nz; ++z)
            for (std::size_t y = 0; y < d.ny; ++y)
                for (std::size_t x = 0; x < d.nx; ++x) {
                    std::size_t p[3] = {x, y, z}, m[3] = {x, y, z};
                    const std::size_t n = d[std::size_t(axis)];
                    p[axis]             = (p[axis] + 1) % n;
                    m[axis]             = (m[axis] + n - 1) % n;
                    next(x, y, z) = 0.5 * cur(x, y, z) + 0.25 * (cur(p[0], p[1], p[2]) + cur(m[0], m[1], m[2]));
                }
        cur = std::move(next);
    }
    return cur;
}

} // namespace

TEST(DipoleKernel, AnalyticValues)
{
    const Dims d{16, 16, 16};
    const auto k = make_dipole_kernel(d, VoxelSize{});
    const std::size_t c = dc_index(16);
    EXPECT_EQ(k.values()(c, c, c), 0.0);
    EXPECT_NEAR(k.values()(c, c, c + 3), -2.0 / 3.0, 1e-12);
    EXPECT_NEAR(k.values()(c + 2, c - 5, c), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(k.values()(c + 1, c + 1, c + 1), 0.0, 1e-12);
    EXPECT_NEAR(k.values()(c - 2, c + 2, c - 2), 0.0, 1e-12);
}

TEST(DipoleKernel, PhysicalFrequenciesForAnisotropicVoxels)
{
    // n = (1, 0, 1) on a grid where kz spacing equals kx spacing times 1/2:
    // k = (1/(8*1), 0, 1/(8*2)) -> 1/3 - (1/16)^2 / ((1/8)^2 + (1/16)^2) = 1/3 - 1/5
    const auto k        = make_dipole_kernel(Dims{8, 8, 8}, VoxelSize{1.0, 1.0, 2.0});
    const std::size_t c = dc_index(8);
    EXPECT_NEAR(k.values()(c + 1, c, c + 1), 1.0 / 3.0 - 1.0 / 5.0, 1e-12);
}

TEST(DipoleKernel, RangeSymmetryAndConeFraction)
{
    // cone fraction counted inside the inscribed frequency sphere
    for (std::size_t n : {32u, 48u}) {
        const auto k = make_dipole_kernel(Dims{n, n, n}, VoxelSize{});
        const auto half = static_cast<long>(n / 2);
        std::size_t small = 0, inside = 0;
        for (std::size_t z = 0; z < n; ++z)
            for (std::size_t y = 0; y < n; ++y)
                for (std::size_t x = 0; x < n; ++x) {
                    const double v = k.values()(x, y, z);
                    ASSERT_GE(v, -2.0 / 3.0 - 1e-15);
                    ASSERT_LE(v, 1.0 / 3.0 + 1e-15);
                    const long fx = frequency_index(x, n), fy = frequency_index(y, n), fz = frequency_index(z, n);
                    if (fx * fx + fy * fy + fz * fz <= half * half) {
                        ++inside;
                        small += std::abs(v) < 0.1;
                    }
                    if (x > 0 && y > 0 && z > 0)
                        ASSERT_EQ(v, k.values()(n - x, n - y, n - z));
                }
        const double frac = double(small) / double(inside);
        EXPECT_GT(frac, 0.05);
        EXPECT_LT(frac, 0.20);
    }
}

TEST(DipoleKernel, FieldDirectionIsNormalized)
{
    const auto a = make_dipole_kernel(Dims{8, 8, 8}, VoxelSize{}, {0.0, 0.0, 5.0});
    const auto b = make_dipole_kernel(Dims{8, 8, 8}, VoxelSize{});
    EXPECT_EQ(a.values().storage(), b.values().storage());
    EXPECT_THROW(make_dipole_kernel(Dims{8, 8, 8}, VoxelSize{}, {0.0, 0.0, 0.0}), ContractError);
    EXPECT_THROW(make_dipole_kernel(Dims{1, 8, 8}, VoxelSize{}), ContractError);
}

TEST(Forward, ZeroAndLinearity)
{
    const Dims d{12, 10, 8};
    const VoxelSize v{1.0, 1.0, 1.5};
    const auto k = make_dipole_kernel(d, v);
    const auto zero = forward_phase(RealVolume(d, v), k);
    for (double x : zero.data())
        EXPECT_EQ(x, 0.0);

    auto c1 = random_real(d, v, 1), c2 = random_real(d, v, 2);
    RealVolume mix(d, v);
    for (std::size_t i = 0; i < mix.size(); ++i)
        mix[i] = 2.5 * c1[i] - 0.75 * c2[i];
    auto f1 = forward_phase(c1, k), f2 = forward_phase(c2, k), fm = forward_phase(mix, k);
    for (std::size_t i = 0; i < mix.size(); ++i)
        EXPECT_NEAR(fm[i], 2.5 * f1[i] - 0.75 * f2[i], 1e-12);
}

TEST(Forward, SelfAdjoint)
{
    const Dims d{16, 12, 10};
    const VoxelSize v{1.0, 0.9, 1.4};
    const auto k = make_dipole_kernel(d, v, {0.2, 0.1, 1.0});
    auto a = random_real(d, v, 11), b = random_real(d, v, 12);
    const double lhs = dot(forward_phase(a, k), b), rhs = dot(a, forward_phase(b, k));
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::abs(lhs));
}

TEST(Forward, RawPhaseScaling)
{
    const Dims d{8, 8, 8};
    const auto k = make_dipole_kernel(d, VoxelSize{});
    auto chi     = random_real(d, VoxelSize{}, 3);
    ScanParams p;
    auto phi = forward_phase(chi, k), theta = forward_phase_raw(chi, k, p);
    for (std::size_t i = 0; i < phi.size(); ++i)
        EXPECT_NEAR(theta[i], p.rad_per_ppm() * phi[i], 1e-12 * std::max(1.0, std::abs(theta[i])));
    EXPECT_NEAR(p.rad_per_ppm(), 2.0 * std::numbers::pi * 42.577478518 * 3.0 * 0.02, 1e-12);
    EXPECT_THROW(forward_phase_raw(chi, k, ScanParams{1.0, 0.0, 1.0}), ContractError);
}

TEST(Forward, ImpulseMatchesSpatialDipoleSum)
{
    const std::size_t n = 16;
    const Dims d{n, n, n};
    const auto k = make_dipole_kernel(d, VoxelSize{});
    RealVolume chi(d, VoxelSize{});
    const std::size_t c = n / 2;
    chi(c, c, c)        = 1.0;
    const auto phi      = forward_phase(chi, k);

    // Source voxel as a 2x2x2 sub-point cube average, periodic images summed
    // inside a sphere of radius 4n.
    RealVolume ref(d, VoxelSize{});
    const double cutoff2 = std::pow(4.0 * n, 2);
    const double sub[2]  = {-0.25, 0.25};
    for (std::size_t z = 0; z < n; ++z)
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x) {
                double acc = 0.0;
                for (int iz = -4; iz <= 4; ++iz)
                    for (int iy = -4; iy <= 4; ++iy)
                        for (int ix = -4; ix <= 4; ++ix)
                            for (double sx : sub)
                                for (double sy : sub)
                                    for (double sz : sub) {
                                        const double rx = double(x) - double(c) - sx + double(ix * int(n));
                                        const double ry = double(y) - double(c) - sy + double(iy * int(n));
                                        const double rz = double(z) - double(c) - sz + double(iz * int(n));
                                        const double r2 = rx * rx + ry * ry + rz * rz;
                                        if (r2 > cutoff2)
                                            continue;
                                        acc += (3.0 * rz * rz / r2 - 1.0) / (r2 * std::sqrt(r2));
                                    }
                ref(x, y, z) = acc / (8.0 * 4.0 * std::numbers::pi);
            }
    double mean = 0.0;
    for (double v : ref.data())
        mean += v;
    mean /= double(ref.size());
    for (auto& v : ref.storage())
        v -= mean;

    const auto a = binomial_smooth(phi), b = binomial_smooth(ref);
    double num = 0.0, den = 0.0;
    for (std::size_t z = 0; z < n; ++z)
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x) {
                if (x == c && y == c && z == c)
                    continue;
                num += std::pow(a(x, y, z) - b(x, y, z), 2);
                den += std::pow(b(x, y, z), 2);
            }
    EXPECT_LT(std::sqrt(num / den), 0.05);
}
