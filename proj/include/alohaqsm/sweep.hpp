#ifndef ALOHAQSM_SWEEP_HPP
#define ALOHAQSM_SWEEP_HPP

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <alohaqsm/error.hpp>

///
/// \file sweep.hpp
///
/// Discrepancy-principle grid search over (mu, lambda). Points are visited
/// with mu in the outer loop and lambda in the inner loop, both ascending;
/// the first point whose data residual reaches the noise level is selected.
///
namespace alohaqsm
{

struct SweepConfig
{
    double mu_lo     = 1e-3;
    double mu_hi     = 1e0;
    double lambda_lo = 1e0;
    double lambda_hi = 1e4;
    double step      = 1.5848931924611136; // 10^0.2
    std::optional<double> noise_sigma;

    void validate() const
    {
        detail::require(mu_lo > 0 && lambda_lo > 0, "SweepConfig: ranges must be positive");
        detail::require(mu_lo <= mu_hi && lambda_lo <= lambda_hi, "SweepConfig: ranges must be ascending");
        detail::require(step > 1, "SweepConfig: step must exceed 1");
        detail::require(!noise_sigma || *noise_sigma > 0, "SweepConfig: noise_sigma must be positive");
    }
};

/// lo, lo*step, ... up to hi (inclusive within rounding).
inline std::vector<double> geometric_grid(double lo, double hi, double step)
{
    detail::require(lo > 0 && hi >= lo && step > 1, "geometric_grid: need 0 < lo <= hi and step > 1");
    const auto n = static_cast<long>(std::floor(std::log(hi / lo) / std::log(step) + 1e-9)) + 1;
    std::vector<double> g(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k)
        g[std::size_t(k)] = lo * std::pow(step, double(k));
    return g;
}

struct SweepPoint
{
    double mu       = 0.0;
    double lambda   = 0.0;
    double rmse     = 0.0;
    bool selected   = false;
};

struct SweepResult
{
    std::vector<SweepPoint> points;
    std::optional<std::size_t> selected; ///< first crossing
    std::size_t closest = 0;             ///< argmin |rmse - sigma|
};

/// Grid in visiting order with rmse left at zero.
inline std::vector<SweepPoint> sweep_grid(const SweepConfig& cfg)
{
    cfg.validate();
    std::vector<SweepPoint> pts;
    const auto lams = geometric_grid(cfg.lambda_lo, cfg.lambda_hi, cfg.step);
    for (double mu : geometric_grid(cfg.mu_lo, cfg.mu_hi, cfg.step))
        for (double lam : lams)
            pts.push_back({mu, lam, 0.0, false});
    return pts;
}

/// Marks the first point with rmse >= sigma; records the closest point either way.
inline SweepResult select_first_crossing(std::vector<SweepPoint> pts, double sigma)
{
    detail::require(!pts.empty(), "select_first_crossing: empty grid");
    SweepResult r;
    for (auto& p : pts)
        p.selected = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (std::abs(pts[i].rmse - sigma) < std::abs(pts[r.closest].rmse - sigma))
            r.closest = i;
        if (!r.selected && pts[i].rmse >= sigma) {
            r.selected       = i;
            pts[i].selected = true;
        }
    }
    r.points = std::move(pts);
    return r;
}

/// Evaluates `residual(mu, lambda)` over the whole grid, then selects.
template <class Residual>
SweepResult run_sweep(const SweepConfig& cfg, double sigma, Residual&& residual,
                      const std::function<void(const SweepPoint&)>& progress = {})
{
    auto pts = sweep_grid(cfg);
    for (auto& p : pts) {
        p.rmse = residual(p.mu, p.lambda);
        if (progress)
            progress(p);
    }
    return select_first_crossing(std::move(pts), sigma);
}

inline std::string format_g9(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& pts)
{
    os << "mu,lambda,rmse,selected\n";
    for (const auto& p : pts)
        os << format_g9(p.mu) << ',' << format_g9(p.lambda) << ',' << format_g9(p.rmse) << ',' << (p.selected ? 1 : 0)
           << '\n';
}

} // namespace alohaqsm

#endif
