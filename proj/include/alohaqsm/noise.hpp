#ifndef ALOHAQSM_NOISE_HPP
#define ALOHAQSM_NOISE_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include <alohaqsm/volume.hpp>

namespace alohaqsm
{

///
/// Adds circular complex Gaussian noise to m.exp(i.theta) and returns the
/// phase of the noisy signal. Per-component standard deviation is
/// mean(m)/snr. One RNG stream, voxels visited in storage order, so the
/// result depends only on the inputs and the seed.
///
inline RealVolume add_noise(const RealVolume& magnitude, const RealVolume& phase, double snr, std::uint64_t seed)
{
    detail::require(snr > 0 && std::isfinite(snr), "add_noise: snr must be positive");
    detail::require_same_grid(magnitude, phase, "add_noise");

    double mean = 0.0;
    for (double m : magnitude.data())
        mean += m;
    mean /= static_cast<double>(magnitude.size());
    const double sigma = mean / snr;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    RealVolume out = RealVolume::like(phase);
    for (std::size_t i = 0; i < phase.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        const Complex s = std::polar(magnitude[i], phase[i]) + sigma * Complex(re, im);
        out[i]          = std::arg(s);
    }
    return out;
}

} // namespace alohaqsm

#endif // ALOHAQSM_NOISE_HPP
