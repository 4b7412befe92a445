#ifndef ALOHAQSM_FFT_HPP
#define ALOHAQSM_FFT_HPP

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include <fftw3.h>

#include <alohaqsm/volume.hpp>

///
/// \file fft.hpp
///
/// Unitary, centered 3-D DFT. The k-space DC sample lives at
/// (nx/2, ny/2, nz/2) (integer division); the image origin stays at index 0.
/// Plans are built with FFTW_ESTIMATE so that the chosen algorithm, and hence
/// every output bit, does not depend on timing.
///
namespace alohaqsm
{

namespace detail
{

class PlanCache
{
public:
    static PlanCache& instance()
    {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(const Dims& d, int sign)
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(d.nx, d.ny, d.nz, sign);
        if (auto it = plans_.find(key); it != plans_.end())
            return it->second;
        // The planner may scribble on its arrays, so plan on scratch storage
        // and run later with fftw_execute_dft on caller data.
        auto* scratch = fftw_alloc_complex(d.size());
        fftw_plan p = fftw_plan_dft_3d(static_cast<int>(d.nz), static_cast<int>(d.ny), static_cast<int>(d.nx),
                                       scratch, scratch, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(scratch);
        plans_.emplace(key, p);
        return p;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    PlanCache() = default;
    ~PlanCache()
    {
        for (auto& [k, p] : plans_)
            fftw_destroy_plan(p);
    }

    std::mutex mutex_;
    std::map<std::tuple<std::size_t, std::size_t, std::size_t, int>, fftw_plan> plans_;
};

/// Circular shift by floor(n/2) along every axis (`inverse` undoes it).
inline std::vector<Complex> center_shift(const std::vector<Complex>& in, const Dims& d, bool inverse)
{
    std::vector<Complex> out(in.size());
    const std::size_t sx = d.nx / 2, sy = d.ny / 2, sz = d.nz / 2;
    for (std::size_t z = 0; z < d.nz; ++z) {
        const std::size_t zs = inverse ? (z + sz) % d.nz : z;
        const std::size_t zd = inverse ? z : (z + sz) % d.nz;
        for (std::size_t y = 0; y < d.ny; ++y) {
            const std::size_t ys = inverse ? (y + sy) % d.ny : y;
            const std::size_t yd = inverse ? y : (y + sy) % d.ny;
            for (std::size_t x = 0; x < d.nx; ++x) {
                const std::size_t xs = inverse ? (x + sx) % d.nx : x;
                const std::size_t xd = inverse ? x : (x + sx) % d.nx;
                out[xd + d.nx * (yd + d.ny * zd)] = in[xs + d.nx * (ys + d.ny * zs)];
            }
        }
    }
    return out;
}

inline void execute(std::vector<Complex>& buf, const Dims& d, int sign)
{
    fftw_plan p = PlanCache::instance().get(d, sign);
    auto* ptr   = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(p, ptr, ptr);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d.size()));
    for (auto& v : buf)
        v *= scale;
}

} // namespace detail

/// Image -> centered k-space.
inline ComplexVolume fft3(const ComplexVolume& v)
{
    detail::require(v.domain() == Domain::image, "fft3: input must be an image-domain volume");
    std::vector<Complex> buf = v.storage();
    detail::execute(buf, v.dims(), FFTW_FORWARD);
    return ComplexVolume(v.dims(), v.voxel_size(), Domain::kspace, detail::center_shift(buf, v.dims(), false));
}

inline ComplexVolume fft3(const RealVolume& v)
{
    detail::require(v.domain() == Domain::image, "fft3: input must be an image-domain volume");
    return fft3(to_complex(v));
}

/// Centered k-space -> image.
inline ComplexVolume ifft3(const ComplexVolume& v)
{
    detail::require(v.domain() == Domain::kspace, "ifft3: input must be a k-space volume");
    std::vector<Complex> buf = detail::center_shift(v.storage(), v.dims(), true);
    detail::execute(buf, v.dims(), FFTW_BACKWARD);
    return ComplexVolume(v.dims(), v.voxel_size(), Domain::image, std::move(buf));
}

/// Index of the DC sample along an axis of length n.
constexpr std::size_t dc_index(std::size_t n) noexcept { return n / 2; }

/// Signed integer frequency of centered index `i` on an axis of length n.
constexpr long frequency_index(std::size_t i, std::size_t n) noexcept
{
    return static_cast<long>(i) - static_cast<long>(n / 2);
}

} // namespace alohaqsm

#endif // ALOHAQSM_FFT_HPP
