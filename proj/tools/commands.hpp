#ifndef ALOHAQSM_TOOLS_COMMANDS_HPP
#define ALOHAQSM_TOOLS_COMMANDS_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <alohaqsm/alohaqsm.hpp>
#include <alohaqsm/io/config.hpp>
#include <alohaqsm/io/nifti.hpp>
#include <alohaqsm/io/pgm.hpp>
#include <alohaqsm/io/volume_file.hpp>

namespace alohaqsm::cli
{

namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode : int
{
    exit_ok          = 0,
    exit_usage       = 1,
    exit_numerical   = 2,
    exit_no_crossing = 3,
};

struct PhantomArgs
{
    std::optional<fs::path> config;
    fs::path out_dir = ".";
    std::optional<double> snr;
    std::optional<std::uint64_t> seed;
};

/// Options shared by invert and sweep.
struct ReconArgs
{
    fs::path phase;
    std::optional<fs::path> mask;
    std::string method = "aloha";
    std::optional<std::string> preset;
    std::optional<double> lambda;
    std::optional<double> mu;
    double tkd_a = default_tkd_threshold;
    std::vector<int> filter; ///< empty = per-plane default
    std::optional<int> rank;
    std::optional<int> iters;
    std::optional<double> tol;
    std::optional<double> eps_weight;
    std::vector<double> b0_dir; ///< empty = header value or +z
    int threads = 0;
};

struct InvertArgs
{
    ReconArgs recon;
    fs::path out;
    std::optional<fs::path> report;
};

struct SweepArgs
{
    ReconArgs recon;
    std::optional<fs::path> config;
    std::optional<double> noise_sigma;
    std::optional<fs::path> noise_region;
    std::vector<double> mu_range;
    std::vector<double> lambda_range;
    std::optional<double> step;
    fs::path csv = "sweep.csv";
};

struct MetricsArgs
{
    fs::path chi;
    fs::path ref;
    std::optional<fs::path> mask;
    std::optional<fs::path> labels;
    std::optional<fs::path> out;
    bool literal_rmse = false;
};

struct SliceArgs
{
    fs::path volume;
    int axis = 2;
    std::optional<std::size_t> index;
    std::vector<double> window;
    fs::path out;
};

struct NiftiArgs
{
    fs::path in;
    fs::path out;
};

struct PhantomConfig
{
    PhantomSpec spec = default_brain_like_spec();
    ScanParams scan;
    double snr         = 10.0;
    std::uint64_t seed = 42;
    Vec3 b0_dir{0.0, 0.0, 1.0};
};

inline PhantomConfig phantom_config_from_json(const json& j)
{
    PhantomConfig c;
    if (j.contains("phantom"))
        c.spec = io::phantom_from_json(j.at("phantom"));
    if (j.contains("scan"))
        c.scan = io::scan_from_json(j.at("scan"));
    try {
        c.snr  = j.value("snr", c.snr);
        c.seed = j.value("seed", c.seed);
        if (j.contains("b0_dir"))
            c.b0_dir = io::detail::vec3(j.at("b0_dir"), "b0_dir");
    } catch (const json::exception& e) {
        throw IoError(std::string("phantom config: ") + e.what());
    }
    return c;
}

inline io::VolumeHeader scan_header(const PhantomConfig& c)
{
    io::VolumeHeader h;
    h.b0_dir = c.b0_dir;
    h.te     = c.scan.te;
    h.b0     = c.scan.b0;
    return h;
}

/// Writes chi_true, phase_clean, phase_noisy, mask and labels into out_dir.
inline int cmd_phantom(const PhantomArgs& a)
{
    PhantomConfig c = a.config ? phantom_config_from_json(io::read_json(*a.config)) : PhantomConfig{};
    if (a.snr)
        c.snr = *a.snr;
    if (a.seed)
        c.seed = *a.seed;
    c.scan.validate();

    const auto kernel = make_dipole_kernel(c.spec.dims, c.spec.voxel, c.b0_dir);
    const auto ds     = make_dataset(c.spec, c.scan, c.snr, c.seed, kernel);
    fs::create_directories(a.out_dir);
    const auto h = scan_header(c);
    io::write_volume(a.out_dir / "chi_true", ds.chi_true, h);
    io::write_volume(a.out_dir / "phase_clean", ds.phase_clean, h);
    io::write_volume(a.out_dir / "phase_noisy", ds.phase_noisy, h);
    io::write_volume(a.out_dir / "mask", ds.mask, h);
    io::write_volume(a.out_dir / "labels", ds.labels, h);
    std::cerr << "phantom: wrote 5 volumes " << ds.chi_true.dims().nx << "x" << ds.chi_true.dims().ny << "x"
              << ds.chi_true.dims().nz << " to " << a.out_dir.string() << "\n";
    return exit_ok;
}

inline AlohaOptions aloha_options(const ReconArgs& a)
{
    AlohaOptions o;
    if (a.preset) {
        const auto p  = io::preset(*a.preset);
        o.admm.lambda = p.lambda;
        o.admm.mu     = p.mu;
    }
    if (a.lambda)
        o.admm.lambda = *a.lambda;
    if (a.mu)
        o.admm.mu = *a.mu;
    if (a.rank)
        o.admm.rank_r = *a.rank;
    if (a.iters)
        o.admm.max_iters = *a.iters;
    if (a.tol)
        o.admm.tol = *a.tol;
    if (a.eps_weight)
        o.admm.eps_weight = *a.eps_weight;
    if (!a.filter.empty()) {
        detail::require(a.filter.size() == 2, "--filter expects p,q");
        o.hankel = HankelConfig{a.filter[0], a.filter[1], true};
    }
    o.tkd_threshold = a.tkd_a;
    o.threads       = a.threads;
    o.validate();
    return o;
}

struct Inputs
{
    RealVolume phase;
    std::optional<Mask> mask;
    DipoleKernel kernel;
    io::VolumeHeader header;
};

inline Inputs load_inputs(const ReconArgs& a)
{
    Inputs in;
    in.phase = io::read_real(a.phase, &in.header);
    if (a.mask) {
        in.mask = io::read_mask(*a.mask);
        detail::require_same_grid(in.phase, *in.mask, "mask");
    }
    Vec3 b0{0.0, 0.0, 1.0};
    if (!a.b0_dir.empty()) {
        detail::require(a.b0_dir.size() == 3, "--b0-dir expects x,y,z");
        b0 = {a.b0_dir[0], a.b0_dir[1], a.b0_dir[2]};
    } else if (in.header.b0_dir) {
        b0 = *in.header.b0_dir;
    }
    in.kernel = make_dipole_kernel(in.phase.dims(), in.phase.voxel_size(), b0);
    return in;
}

inline json axis_json(const AxisSummary& s)
{
    return {{"axis", detail::axis_name(s.axis)},
            {"planes_solved", s.planes_solved},
            {"mean_iterations", s.mean_iterations},
            {"mean_residual_ratio", s.mean_residual_ratio},
            {"descent_fraction", s.descent_fraction},
            {"seconds", s.seconds}};
}

inline int cmd_invert(const InvertArgs& a)
{
    const auto start = std::chrono::steady_clock::now();
    const Inputs in  = load_inputs(a.recon);
    json report{{"method", a.recon.method}};

    io::VolumeHeader out_header;
    out_header.b0_dir = in.kernel.b0_dir();
    out_header.te     = in.header.te;
    out_header.b0     = in.header.b0;

    if (a.recon.method == "tkd") {
        if (auto w = tkd_threshold_warning(a.recon.tkd_a))
            std::cerr << "warning: " << *w << "\n";
        const auto chi = tkd_invert(in.phase, in.kernel, a.recon.tkd_a);
        io::write_volume(a.out, chi, out_header);
        report["tkd_a"] = a.recon.tkd_a;
    } else if (a.recon.method == "aloha") {
        const auto opt = aloha_options(a.recon);
        const auto res = aloha_qsm(in.phase, in.kernel, opt, in.mask);
        io::write_volume(a.out, res.chi, out_header);
        report["lambda"]         = opt.admm.lambda;
        report["mu"]             = opt.admm.mu;
        report["admm"]           = io::to_json(opt.admm);
        report["tkd_a"]          = opt.tkd_threshold;
        report["filter"]         = opt.hankel ? json{opt.hankel->p, opt.hankel->q} : json("default");
        report["s_m"]            = res.s_m.value;
        report["s_m_degenerate"] = res.s_m.degenerate;
        report["imag_ratio"]     = res.imag_ratio;
        json axes                = json::array();
        for (const auto& s : res.axes)
            axes.push_back(axis_json(s));
        report["axes"] = axes;
        if (res.s_m.degenerate)
            std::cerr << "warning: correction factor is degenerate, chi left unscaled\n";
    } else {
        throw ContractError("--method must be tkd or aloha, got '" + a.recon.method + "'");
    }

    report["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const fs::path rp      = a.report ? *a.report : fs::path(io::volume_stem(a.out)).concat(".report.json");
    std::ofstream f(rp);
    if (!f)
        throw IoError("cannot write report '" + rp.string() + "'");
    f << report.dump(2) << "\n";
    return exit_ok;
}

/// Absolute RMS of phi - forward(chi_uncorrected) over the mask.
inline double data_residual(const RealVolume& phase, const DipoleKernel& kernel, const Mask& mask, const AlohaOptions& o)
{
    const auto res = aloha_qsm(phase, kernel, o, mask);
    return rms_difference(phase, forward_phase(res.chi_uncorrected, kernel), mask);
}

inline int cmd_sweep(const SweepArgs& a)
{
    SweepConfig cfg = a.config ? io::sweep_from_json(io::read_json(*a.config)) : SweepConfig{};
    if (a.mu_range.size() == 2) {
        cfg.mu_lo = a.mu_range[0];
        cfg.mu_hi = a.mu_range[1];
    } else if (!a.mu_range.empty()) {
        throw ContractError("--mu-range expects lo,hi");
    }
    if (a.lambda_range.size() == 2) {
        cfg.lambda_lo = a.lambda_range[0];
        cfg.lambda_hi = a.lambda_range[1];
    } else if (!a.lambda_range.empty()) {
        throw ContractError("--lambda-range expects lo,hi");
    }
    if (a.step)
        cfg.step = *a.step;
    if (a.noise_sigma)
        cfg.noise_sigma = *a.noise_sigma;
    cfg.validate();

    const Inputs in = load_inputs(a.recon);
    const Mask mask = in.mask ? *in.mask : full_mask(in.phase);
    double sigma    = 0.0;
    if (cfg.noise_sigma) {
        sigma = *cfg.noise_sigma;
    } else if (a.noise_region) {
        const Mask region = io::read_mask(*a.noise_region);
        sigma             = masked_std(in.phase, region);
    } else {
        throw ContractError("sweep needs --noise-sigma or --noise-region");
    }

    AlohaOptions base = aloha_options(a.recon);
    auto result       = run_sweep(
        cfg, sigma,
        [&](double mu, double lambda) {
            AlohaOptions o = base;
            o.admm.mu      = mu;
            o.admm.lambda  = lambda;
            return data_residual(in.phase, in.kernel, mask, o);
        },
        [](const SweepPoint& p) {
            std::cerr << "sweep: mu " << format_g9(p.mu) << " lambda " << format_g9(p.lambda) << " rmse "
                      << format_g9(p.rmse) << "\n";
        });

    std::ofstream f(a.csv);
    if (!f)
        throw IoError("cannot write '" + a.csv.string() + "'");
    write_sweep_csv(f, result.points);
    f.close();

    if (!result.selected) {
        const auto& c = result.points[result.closest];
        std::cerr << "sweep: no grid point reached sigma " << format_g9(sigma) << "; closest mu " << format_g9(c.mu)
                  << " lambda " << format_g9(c.lambda) << " rmse " << format_g9(c.rmse) << "\n";
        std::cout << "closest mu=" << format_g9(c.mu) << " lambda=" << format_g9(c.lambda) << "\n";
        return exit_no_crossing;
    }
    const auto& s = result.points[*result.selected];
    std::cout << "selected mu=" << format_g9(s.mu) << " lambda=" << format_g9(s.lambda) << " rmse=" << format_g9(s.rmse)
              << " sigma=" << format_g9(sigma) << "\n";
    return exit_ok;
}

inline int cmd_metrics(const MetricsArgs& a)
{
    const auto chi = io::read_real(a.chi);
    const auto ref = io::read_real(a.ref);
    detail::require_same_grid(chi, ref, "metrics");
    const Mask mask = a.mask ? io::read_mask(*a.mask) : full_mask(ref);
    detail::require_same_grid(chi, mask, "metrics mask");

    const auto kind = a.literal_rmse ? RmseKind::literal : RmseKind::norm_ratio;
    const auto lr   = linregress(ref, chi, mask);
    std::vector<RoiStats> rois;
    if (a.labels) {
        const auto labels = io::read_labels(*a.labels);
        detail::require_same_grid(chi, labels, "metrics labels");
        rois = roi_stats(chi, labels);
    }

    std::ofstream file;
    if (a.out) {
        file.open(*a.out);
        if (!file)
            throw IoError("cannot write '" + a.out->string() + "'");
    }
    std::ostream& os = a.out ? file : std::cout;
    os << "scope,rmse,slope,intercept,r_squared,mean,std,count\n";
    os << "all," << format_g9(rmse(chi, ref, mask, kind)) << ',' << format_g9(lr.slope) << ','
       << format_g9(lr.intercept) << ',' << format_g9(lr.r_squared) << ",,," << lr.n_samples << "\n";
    for (const auto& r : rois)
        os << "label:" << r.label << ",,,,," << format_g9(r.mean) << ',' << format_g9(r.stddev) << ',' << r.count
           << "\n";
    return exit_ok;
}

inline int cmd_export_slice(const SliceArgs& a)
{
    const auto v = io::read_real(a.volume);
    detail::require(a.axis >= 0 && a.axis <= 2, "--axis must be 0, 1 or 2");
    const std::size_t index = a.index ? *a.index : v.dims()[std::size_t(a.axis)] / 2;
    const auto slice        = io::extract_slice(v, a.axis, index);
    double lo, hi;
    if (a.window.size() == 2) {
        lo = a.window[0];
        hi = a.window[1];
    } else if (a.window.empty()) {
        const auto [mn, mx] = std::minmax_element(slice.values.begin(), slice.values.end());
        lo                  = *mn;
        hi                  = *mx > *mn ? *mx : *mn + 1.0;
    } else {
        throw ContractError("--window expects lo,hi");
    }
    io::write_pgm(a.out, slice, lo, hi);
    return exit_ok;
}

inline int cmd_import_nifti(const NiftiArgs& a)
{
    io::write_volume(a.out, io::read_nifti1(a.in));
    return exit_ok;
}

} // namespace alohaqsm::cli

#endif
