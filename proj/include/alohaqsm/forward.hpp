#ifndef ALOHAQSM_FORWARD_HPP
#define ALOHAQSM_FORWARD_HPP

#include <numbers>

#include <alohaqsm/dipole.hpp>
#include <alohaqsm/fft.hpp>

namespace alohaqsm
{

/// Acquisition constants that convert a normalized field (ppm) to radians.
struct ScanParams
{
    double gamma_bar = 42.577478518e6; // Hz/T
    double b0        = 3.0;            // T
    double te        = 0.02;           // s

    void validate() const
    {
        detail::require(gamma_bar > 0 && b0 > 0 && te > 0, "ScanParams: gamma_bar, B0 and TE must be positive");
    }

    /// Phase in radians accumulated per ppm of normalized field.
    double rad_per_ppm() const { return 2.0 * std::numbers::pi * gamma_bar * b0 * te * 1e-6; }
};

/// Multiplies a k-space volume by the kernel in place.
inline void apply_kernel(ComplexVolume& k, const DipoleKernel& kernel)
{
    for (std::size_t i = 0; i < k.size(); ++i)
        k[i] *= kernel[i];
}

/// Normalized field shift phi = IFT(D . FT(chi)), same units as chi.
inline RealVolume forward_phase(const RealVolume& chi, const DipoleKernel& kernel)
{
    detail::require_same_grid(chi, kernel, "forward_phase");
    auto k = fft3(chi);
    apply_kernel(k, kernel);
    return real_part(ifft3(k));
}

/// Raw phase in radians, theta = 2 pi gamma_bar B0 TE . phi (chi in ppm).
inline RealVolume forward_phase_raw(const RealVolume& chi, const DipoleKernel& kernel, const ScanParams& params)
{
    params.validate();
    auto phi           = forward_phase(chi, kernel);
    const double scale = params.rad_per_ppm();
    for (auto& v : phi.storage())
        v *= scale;
    return phi;
}

} // namespace alohaqsm

#endif // ALOHAQSM_FORWARD_HPP
