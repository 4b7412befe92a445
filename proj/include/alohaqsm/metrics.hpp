#ifndef ALOHAQSM_METRICS_HPP
#define ALOHAQSM_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include <alohaqsm/volume.hpp>

namespace alohaqsm
{

enum class RmseKind
{
    norm_ratio, ///< 100 |x_r - x_t|_2 / |x_t|_2
    literal     ///< 100 sqrt(sum (x_r - x_t)^2 / sum x_t)
};

/// Relative RMSE in percent over the mask.
inline double rmse(const RealVolume& x_r, const RealVolume& x_t, const Mask& mask, RmseKind kind = RmseKind::norm_ratio)
{
    detail::require_same_grid(x_r, x_t, "rmse");
    detail::require_same_grid(x_r, mask, "rmse");
    double num = 0.0, den = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x_r.size(); ++i) {
        if (!mask[i])
            continue;
        const double d = x_r[i] - x_t[i];
        num += d * d;
        den += kind == RmseKind::norm_ratio ? x_t[i] * x_t[i] : x_t[i];
        ++n;
    }
    detail::require(n > 0, "rmse: mask is empty");
    if (!(den > 0.0))
        throw NumericalError("rmse: reference has zero (or non-positive) norm within the mask");
    return 100.0 * std::sqrt(num / den);
}

/// Root-mean-square difference over the mask, in the units of the inputs.
inline double rms_difference(const RealVolume& a, const RealVolume& b, const Mask& mask)
{
    detail::require_same_grid(a, b, "rms_difference");
    detail::require_same_grid(a, mask, "rms_difference");
    double s      = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (mask[i]) {
            const double d = a[i] - b[i];
            s += d * d;
            ++n;
        }
    detail::require(n > 0, "rms_difference: mask is empty");
    return std::sqrt(s / static_cast<double>(n));
}

/// Population standard deviation over the mask.
inline double masked_std(const RealVolume& v, const Mask& mask)
{
    detail::require_same_grid(v, mask, "masked_std");
    double s = 0.0, s2 = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (mask[i]) {
            s += v[i];
            ++n;
        }
    detail::require(n > 0, "masked_std: mask is empty");
    const double mean = s / static_cast<double>(n);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (mask[i])
            s2 += (v[i] - mean) * (v[i] - mean);
    return std::sqrt(s2 / static_cast<double>(n));
}

struct RegressionResult
{
    double slope      = 0.0;
    double intercept  = 0.0;
    double r_squared  = 0.0;
    std::size_t n_samples = 0;
};

/// Ordinary least squares of x_r on x_t (with intercept) over the mask.
inline RegressionResult linregress(const RealVolume& x_t, const RealVolume& x_r, const Mask& mask)
{
    detail::require_same_grid(x_t, x_r, "linregress");
    detail::require_same_grid(x_t, mask, "linregress");
    double sx = 0.0, sy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x_t.size(); ++i)
        if (mask[i]) {
            sx += x_t[i];
            sy += x_r[i];
            ++n;
        }
    detail::require(n >= 2, "linregress: need at least two samples");
    const double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x_t.size(); ++i)
        if (mask[i]) {
            const double dx = x_t[i] - mx, dy = x_r[i] - my;
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
    if (!(sxx > 0.0))
        throw NumericalError("linregress: reference is constant over the mask, slope undefined");
    RegressionResult r;
    r.n_samples = n;
    r.slope     = sxy / sxx;
    r.intercept = my - r.slope * mx;
    r.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 0.0;
    return r;
}

/// Zero-intercept least-squares slope of y against x over the mask;
/// nullopt when sum x^2 vanishes.
inline std::optional<double> origin_slope(const RealVolume& x, const RealVolume& y, const Mask& mask)
{
    detail::require_same_grid(x, y, "origin_slope");
    detail::require_same_grid(x, mask, "origin_slope");
    double sxy = 0.0, sxx = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (mask[i]) {
            sxy += x[i] * y[i];
            sxx += x[i] * x[i];
            ++n;
        }
    detail::require(n > 0, "origin_slope: mask is empty");
    if (!(sxx > 0.0))
        return std::nullopt;
    return sxy / sxx;
}

struct RoiStats
{
    std::int32_t label = 0;
    double mean        = 0.0;
    double stddev      = 0.0;
    std::size_t count  = 0;
};

/// Mean and population standard deviation per nonzero label, ascending by label.
inline std::vector<RoiStats> roi_stats(const RealVolume& chi, const LabelVolume& labels)
{
    detail::require_same_grid(chi, labels, "roi_stats");
    std::map<std::int32_t, std::pair<double, std::size_t>> acc;
    for (std::size_t i = 0; i < chi.size(); ++i)
        if (labels[i] != 0) {
            auto& [s, n] = acc[labels[i]];
            s += chi[i];
            ++n;
        }
    detail::require(!acc.empty(), "roi_stats: no labelled voxels");
    std::map<std::int32_t, double> ss;
    for (std::size_t i = 0; i < chi.size(); ++i)
        if (labels[i] != 0) {
            const auto& [s, n] = acc[labels[i]];
            const double d     = chi[i] - s / static_cast<double>(n);
            ss[labels[i]] += d * d;
        }
    std::vector<RoiStats> out;
    for (const auto& [label, sn] : acc) {
        const auto n = static_cast<double>(sn.second);
        out.push_back(RoiStats{label, sn.first / n, std::sqrt(ss[label] / n), sn.second});
    }
    return out;
}

} // namespace alohaqsm

#endif // ALOHAQSM_METRICS_HPP
