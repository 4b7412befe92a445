#ifndef ALOHAQSM_ALOHA_HPP
#define ALOHAQSM_ALOHA_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <alohaqsm/admm.hpp>
#include <alohaqsm/baselines.hpp>
#include <alohaqsm/haar.hpp>
#include <alohaqsm/metrics.hpp>

///
/// \file aloha.hpp
///
/// Volume-level ALOHA-QSM driver. The 3-D k-space is initialised by TKD and
/// then swept once along each k-space axis: every 2-D plane perpendicular to
/// the current axis is Haar-weighted, completed by solve_plane against the
/// matching weighted phase plane, unweighted and written back before the
/// next axis starts. The result is rescaled by the correction factor s_m.
///
namespace alohaqsm
{

struct AlohaOptions
{
    AdmmParams admm;
    /// Filter window; nullopt picks default_hankel_config per plane shape.
    std::optional<HankelConfig> hankel;
    double tkd_threshold = default_tkd_threshold;
    /// Axis sweep order (0 = k_x, 1 = k_y, 2 = k_z).
    std::array<int, 3> axis_order{0, 1, 2};
    /// Average the k-space results of all six sweep orders.
    bool average_orders = false;
    /// Solve only one plane of each conjugate pair and mirror the other;
    /// valid because the phase is real.
    bool hermitian_pairing = true;
    /// 0 = OpenMP default.
    int threads = 0;

    void validate() const
    {
        admm.validate();
        detail::require(tkd_threshold > 0 && tkd_threshold < 2.0 / 3.0, "AlohaOptions: bad TKD threshold");
        auto sorted = axis_order;
        std::sort(sorted.begin(), sorted.end());
        detail::require(sorted == std::array<int, 3>{0, 1, 2}, "AlohaOptions: axis_order must be a permutation of 0,1,2");
        detail::require(threads >= 0, "AlohaOptions: threads must be >= 0");
    }
};

struct PlaneRecord
{
    int axis    = 0;
    Index plane = 0;
    SolverReport report;
    double tkd_fidelity = 0.0; ///< weighted-plane fidelity of the TKD initialisation
};

struct AxisSummary
{
    int axis                    = 0;
    std::size_t planes_solved   = 0;
    double mean_iterations      = 0.0;
    double mean_residual_ratio  = 0.0; ///< final / first primal residual
    double descent_fraction     = 0.0; ///< planes with final <= 0.1 x first residual
    double seconds              = 0.0;
};

struct CorrectionFactor
{
    double value    = 1.0;
    bool degenerate = false;
};

struct AlohaResult
{
    RealVolume chi;             ///< corrected: real(IFT(chi_k)) / s_m
    RealVolume chi_uncorrected; ///< real(IFT(chi_k))
    ComplexVolume chi_k;        ///< final k-space estimate
    CorrectionFactor s_m;
    double imag_ratio = 0.0; ///< |Im IFT(chi_k)| / |Re IFT(chi_k)|
    std::vector<PlaneRecord> planes;
    std::vector<AxisSummary> axes;
};

///
/// s_m = sum(phi phi') / sum(phi^2) over the mask with phi' = forward(chi).
/// Returns 1 flagged degenerate when sum(phi^2) = 0 or the slope is not
/// positive.
///
inline CorrectionFactor correction_factor(const RealVolume& phi, const RealVolume& chi, const DipoleKernel& kernel,
                                          const Mask& mask)
{
    detail::require_same_grid(phi, chi, "correction_factor");
    detail::require(count(mask) > 0, "correction_factor: mask is empty");
    const RealVolume phi_prime = forward_phase(chi, kernel);
    const auto slope           = origin_slope(phi, phi_prime, mask);
    if (!slope || !(*slope > 0.0) || !std::isfinite(*slope))
        return CorrectionFactor{1.0, true};
    return CorrectionFactor{*slope, false};
}

namespace detail
{

struct PlaneGeometry
{
    int axis;
    Index rows, cols, count;
};

inline PlaneGeometry plane_geometry(const Dims& d, int axis)
{
    const auto nx = static_cast<Index>(d.nx), ny = static_cast<Index>(d.ny), nz = static_cast<Index>(d.nz);
    switch (axis) {
    case 0: return {0, ny, nz, nx};
    case 1: return {1, nx, nz, ny};
    default: return {2, nx, ny, nz};
    }
}

/// Volume index of in-plane sample (i, j) of plane k.
inline std::size_t plane_to_volume(const Dims& d, int axis, Index k, Index i, Index j)
{
    const auto K = static_cast<std::size_t>(k), I = static_cast<std::size_t>(i), J = static_cast<std::size_t>(j);
    switch (axis) {
    case 0: return K + d.nx * (I + d.ny * J);
    case 1: return I + d.nx * (K + d.ny * J);
    default: return I + d.nx * (J + d.ny * K);
    }
}

template <typename Vol>
Eigen::Matrix<typename Vol::value_type, Eigen::Dynamic, Eigen::Dynamic> extract_plane(const Vol& v, int axis, Index k)
{
    const auto g = plane_geometry(v.dims(), axis);
    Eigen::Matrix<typename Vol::value_type, Eigen::Dynamic, Eigen::Dynamic> p(g.rows, g.cols);
    for (Index j = 0; j < g.cols; ++j)
        for (Index i = 0; i < g.rows; ++i)
            p(i, j) = v[plane_to_volume(v.dims(), axis, k, i, j)];
    return p;
}

inline RealPlane extract_kernel_plane(const DipoleKernel& kernel, int axis, Index k)
{
    return extract_plane(kernel.values(), axis, k);
}

inline void insert_plane(ComplexVolume& v, int axis, Index k, const Plane& p)
{
    for (Index j = 0; j < p.cols(); ++j)
        for (Index i = 0; i < p.rows(); ++i)
            v[plane_to_volume(v.dims(), axis, k, i, j)] = p(i, j);
}

/// Centered index of -f for the frequency at index i.
inline Index mirror_index(Index i, Index n)
{
    const Index c = n / 2;
    return ((2 * c - i) % n + n) % n;
}

/// Plane holding the conjugate-symmetric partner samples of `p`.
inline Plane conjugate_mirror(const Plane& p)
{
    Plane out(p.rows(), p.cols());
    for (Index j = 0; j < p.cols(); ++j)
        for (Index i = 0; i < p.rows(); ++i)
            out(mirror_index(i, p.rows()), mirror_index(j, p.cols())) = std::conj(p(i, j));
    return out;
}

inline const char* axis_name(int axis) { return axis == 0 ? "k_x" : (axis == 1 ? "k_y" : "k_z"); }

/// One sweep along `axis`, updating chi_k in place.
inline AxisSummary sweep_axis(ComplexVolume& chi_k, const ComplexVolume& phi_k, const ComplexVolume& tkd_k,
                              const DipoleKernel& kernel, int axis, const AlohaOptions& opt,
                              std::vector<PlaneRecord>& records)
{
    const auto start = std::chrono::steady_clock::now();
    const auto g     = plane_geometry(chi_k.dims(), axis);
    const HankelConfig cfg = opt.hankel.value_or(default_hankel_config(g.rows, g.cols));
    cfg.validate(g.rows, g.cols);
    const Plane weights = haar_weights(g.rows, g.cols);

    std::vector<Index> todo;
    for (Index k = 0; k < g.count; ++k)
        if (!opt.hermitian_pairing || frequency_index(static_cast<std::size_t>(k), static_cast<std::size_t>(g.count)) >= 0 ||
            mirror_index(k, g.count) == k)
            todo.push_back(k);

    std::vector<PlaneRecord> local(todo.size());
    std::vector<std::string> errors(todo.size());
    const auto n_todo = static_cast<long>(todo.size());

#ifdef _OPENMP
    const int nt = opt.threads > 0 ? opt.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
#endif
    for (long t = 0; t < n_todo; ++t) {
        const Index k = todo[static_cast<std::size_t>(t)];
        try {
            const Plane chi_p     = extract_plane(chi_k, axis, k);
            const Plane phi_w     = extract_plane(phi_k, axis, k).cwiseProduct(weights);
            const RealPlane d_p   = extract_kernel_plane(kernel, axis, k);
            const Plane init_w    = chi_p.cwiseProduct(weights);
            const Plane tkd_w     = extract_plane(tkd_k, axis, k).cwiseProduct(weights);
            const auto solution   = solve_plane(phi_w, d_p, cfg, opt.admm, init_w);
            const Plane recovered = haar_unweight(solution.chi_w, chi_p, opt.admm.eps_weight);

            insert_plane(chi_k, axis, k, recovered);
            const Index partner = mirror_index(k, g.count);
            if (opt.hermitian_pairing && partner != k)
                insert_plane(chi_k, axis, partner, conjugate_mirror(recovered));

            local[static_cast<std::size_t>(t)] =
                PlaneRecord{axis, k, solution.report, fidelity(phi_w, d_p, tkd_w)};
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(t)] = e.what();
        }
    }

    for (std::size_t t = 0; t < errors.size(); ++t)
        if (!errors[t].empty())
            throw NumericalError(std::string("aloha_qsm: axis ") + axis_name(axis) + ", plane " +
                                 std::to_string(todo[t]) + ": " + errors[t]);

    AxisSummary s;
    s.axis          = axis;
    s.planes_solved = local.size();
    for (const auto& r : local) {
        s.mean_iterations += r.report.iterations;
        const double ratio = r.report.first_residual > 0 ? r.report.primal_residual / r.report.first_residual : 0.0;
        s.mean_residual_ratio += ratio;
        s.descent_fraction += ratio <= 0.1 ? 1.0 : 0.0;
    }
    if (!local.empty()) {
        const auto n = static_cast<double>(local.size());
        s.mean_iterations /= n;
        s.mean_residual_ratio /= n;
        s.descent_fraction /= n;
    }
    records.insert(records.end(), local.begin(), local.end());
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return s;
}

} // namespace detail

///
/// Full reconstruction. `kernel` is the exact dipole kernel; the TKD
/// initialisation is derived from it with `opt.tkd_threshold`. The
/// correction factor is fitted over `mask` (whole grid when absent).
///
inline AlohaResult aloha_qsm(const RealVolume& phi, const DipoleKernel& kernel, const AlohaOptions& opt,
                             const std::optional<Mask>& mask = std::nullopt)
{
    opt.validate();
    detail::require(phi.domain() == Domain::image, "aloha_qsm: phase must be an image-domain volume");
    detail::require_same_grid(phi, kernel, "aloha_qsm");
    if (mask)
        detail::require_same_grid(phi, *mask, "aloha_qsm");

    AlohaResult result;
    const ComplexVolume phi_k = fft3(phi);
    const DipoleKernel tkd    = tkd_kernel(kernel, opt.tkd_threshold);
    ComplexVolume tkd_k       = phi_k;
    for (std::size_t i = 0; i < tkd_k.size(); ++i)
        tkd_k[i] /= tkd[i];

    std::vector<std::array<int, 3>> orders;
    if (opt.average_orders) {
        std::array<int, 3> o{0, 1, 2};
        do
            orders.push_back(o);
        while (std::next_permutation(o.begin(), o.end()));
    } else {
        orders.push_back(opt.axis_order);
    }

    ComplexVolume acc = ComplexVolume::like(tkd_k);
    for (const auto& order : orders) {
        ComplexVolume chi_k = tkd_k;
        for (int axis : order)
            result.axes.push_back(detail::sweep_axis(chi_k, phi_k, tkd_k, kernel, axis, opt, result.planes));
        for (std::size_t i = 0; i < acc.size(); ++i)
            acc[i] += chi_k[i];
    }
    const double inv = 1.0 / static_cast<double>(orders.size());
    for (auto& v : acc.storage())
        v *= inv;

    const ComplexVolume img = ifft3(acc);
    double re2 = 0.0, im2 = 0.0;
    for (const auto& v : img.data()) {
        re2 += v.real() * v.real();
        im2 += v.imag() * v.imag();
    }
    result.imag_ratio      = re2 > 0 ? std::sqrt(im2 / re2) : 0.0;
    result.chi_uncorrected = real_part(img);
    result.chi_k           = std::move(acc);

    const Mask m = mask ? *mask : full_mask(phi);
    result.s_m   = correction_factor(phi, result.chi_uncorrected, kernel, m);
    result.chi   = result.chi_uncorrected;
    for (auto& v : result.chi.storage())
        v /= result.s_m.value;
    return result;
}

} // namespace alohaqsm

#endif // ALOHAQSM_ALOHA_HPP
