#ifndef ALOHAQSM_BASELINES_HPP
#define ALOHAQSM_BASELINES_HPP

#include <cmath>
#include <optional>
#include <string>

#include <alohaqsm/dipole.hpp>
#include <alohaqsm/forward.hpp>

namespace alohaqsm
{

/// Truncation threshold used to initialise ALOHA-QSM and for the TKD baseline.
inline constexpr double default_tkd_threshold = 0.1;

/// Thresholds in [1/3, 2/3) are legal but clip the whole positive lobe.
inline std::optional<std::string> tkd_threshold_warning(double a)
{
    if (a >= 1.0 / 3.0 && a < 2.0 / 3.0)
        return "TKD threshold " + std::to_string(a) + " is >= 1/3 and replaces every positive kernel value";
    return std::nullopt;
}

///
/// Truncated kernel: D where |D| > a, a.sign(D) elsewhere, with sign(0) = +1.
/// Throws for a <= 0 and for a >= 2/3 (the whole kernel would be replaced).
///
inline DipoleKernel tkd_kernel(const DipoleKernel& kernel, double a)
{
    detail::require(a > 0.0 && std::isfinite(a), "tkd_kernel: threshold must be positive");
    detail::require(a < 2.0 / 3.0, "tkd_kernel: threshold must be below 2/3");
    RealVolume v = kernel.values();
    for (auto& d : v.storage())
        if (std::abs(d) <= a)
            d = d < 0.0 ? -a : a;
    return DipoleKernel(std::move(v), kernel.b0_dir(), a);
}

namespace detail
{
inline RealVolume divide_in_kspace(const RealVolume& phi, const DipoleKernel& kernel)
{
    auto k = fft3(phi);
    for (std::size_t i = 0; i < k.size(); ++i)
        k[i] /= kernel[i];
    return real_part(ifft3(k));
}
} // namespace detail

/// chi = IFT(FT(phi) / D_a).
inline RealVolume tkd_invert(const RealVolume& phi, const DipoleKernel& kernel, double a = default_tkd_threshold)
{
    detail::require_same_grid(phi, kernel, "tkd_invert");
    return detail::divide_in_kspace(phi, tkd_kernel(kernel, a));
}

/// chi = IFT(FT(phi) / D); refuses kernels with zero samples.
inline RealVolume direct_invert(const RealVolume& phi, const DipoleKernel& kernel)
{
    detail::require_same_grid(phi, kernel, "direct_invert");
    std::size_t zeros = 0;
    for (double d : kernel.values().data())
        zeros += d == 0.0;
    if (zeros)
        throw NumericalError("direct_invert: kernel has " + std::to_string(zeros) + " zero samples");
    return detail::divide_in_kspace(phi, kernel);
}

/// Replaces samples with |D| < floor by floor.sign(D) (sign(0) = +1). Used to
/// build kernels with no cone, where direct inversion is exact.
inline DipoleKernel floored_kernel(const DipoleKernel& kernel, double floor)
{
    RealVolume v = kernel.values();
    for (auto& d : v.storage())
        if (std::abs(d) < floor)
            d = d < 0.0 ? -floor : floor;
    return DipoleKernel(std::move(v), kernel.b0_dir());
}

} // namespace alohaqsm

#endif // ALOHAQSM_BASELINES_HPP
