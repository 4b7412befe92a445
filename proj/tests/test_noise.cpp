#include <cmath>

#include <gtest/gtest.h>

#include <alohaqsm/noise.hpp>

using namespace alohaqsm;

namespace
{
RealVolume filled(Dims d, double value)
{
    RealVolume v(d, VoxelSize{});
    for (auto& x : v.storage())
        x = value;
    return v;
}
} // namespace

TEST(Noise, VanishesAtHugeSnr)
{
    const Dims d{8, 8, 8};
    auto mag   = filled(d, 1.0);
    auto phase = filled(d, 0.0);
    for (std::size_t i = 0; i < phase.size(); ++i)
        phase[i] = -2.5 + 5.0 * double(i) / double(phase.size());
    auto noisy = add_noise(mag, phase, 1e12, 7);
    for (std::size_t i = 0; i < phase.size(); ++i)
        EXPECT_NEAR(noisy[i], phase[i], 1e-6);
}

TEST(Noise, SeedDeterminesOutput)
{
    const Dims d{8, 8, 8};
    auto mag = filled(d, 1.0), phase = filled(d, 0.3);
    auto a = add_noise(mag, phase, 10.0, 99), b = add_noise(mag, phase, 10.0, 99), c = add_noise(mag, phase, 10.0, 100);
    EXPECT_EQ(a.storage(), b.storage());
    EXPECT_NE(a.storage(), c.storage());
}

TEST(Noise, PhaseStdAtSnrTen)
{
    const Dims d{64, 64, 64};
    auto mag = filled(d, 1.0), phase = filled(d, 0.4);
    auto noisy = add_noise(mag, phase, 10.0, 2024);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
        const double e = noisy[i] - phase[i];
        s += e;
        s2 += e * e;
    }
    const double n  = double(noisy.size());
    const double sd = std::sqrt(s2 / n - (s / n) * (s / n));
    EXPECT_NEAR(sd, 0.1, 0.01);
}

TEST(Noise, RejectsBadSnr)
{
    auto v = filled(Dims{2, 2, 2}, 1.0);
    EXPECT_THROW(add_noise(v, v, 0.0, 1), ContractError);
    EXPECT_THROW(add_noise(v, v, -1.0, 1), ContractError);
}
