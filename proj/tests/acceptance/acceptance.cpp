#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <alohaqsm/alohaqsm.hpp>
#include <alohaqsm/io/volume_file.hpp>

#include "oracles.hpp"

using namespace alohaqsm;
namespace fs = std::filesystem;

namespace
{

struct Verdict
{
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what)
    {
        if (!ok)
            pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [FAIL]");
    }
};

std::string fmt(double x, const char* f = "%.4g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Reconstruction setting shared by the end-to-end criteria.
AlohaOptions desk_options(int threads = 0)
{
    AlohaOptions o;
    o.hankel       = HankelConfig{4, 4, true};
    o.admm.rank_r  = 16;
    o.admm.lambda  = 0.03;
    o.admm.mu      = 0.03;
    o.threads      = threads;
    return o;
}

const Dataset& noisy_phantom()
{
    static const Dataset ds = make_dataset(default_brain_like_spec(), ScanParams{}, 10.0, 42);
    return ds;
}

// ---------------------------------------------------------------------------

Verdict criterion_1()
{
    Verdict v;
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;

    const Dims dims{16, 12, 10};
    ComplexVolume x(dims, VoxelSize{});
    for (auto& c : x.storage())
        c = {g(rng), g(rng)};
    const auto k  = fft3(x);
    const auto xx = ifft3(k);
    double err = 0, nx = 0, nk = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        err = std::max(err, std::abs(xx[i] - x[i]));
        nx += std::norm(x[i]);
        nk += std::norm(k[i]);
    }
    v.check(err <= 1e-12, "fft round trip " + fmt(err));
    const double pars = std::abs(nx - nk) / nx;
    v.check(pars <= 1e-12, "parseval " + fmt(pars));

    const Dims kd{16, 16, 16};
    const auto d = make_dipole_kernel(kd, VoxelSize{});
    auto at      = [&](std::size_t x, std::size_t y, std::size_t z) { return d.values()(x, y, z); };
    double kerr  = std::abs(at(8, 8, 8));
    kerr         = std::max(kerr, std::abs(at(8, 8, 12) + 2.0 / 3.0));
    kerr         = std::max(kerr, std::abs(at(12, 8, 8) - 1.0 / 3.0));
    kerr         = std::max(kerr, std::abs(at(8, 12, 8) - 1.0 / 3.0));
    // k_z^2 = (k_x^2 + k_y^2) / 2 lies on the cone: (4, 4, 4) has k_z^2 / |k|^2 = 1/3
    kerr = std::max(kerr, std::abs(at(12, 12, 12)));
    v.check(kerr <= 1e-12, "kernel values " + fmt(kerr));

    double adj = 0, inv = 0;
    for (auto [p, q] : {std::pair<Index, Index>{3, 3}, {8, 8}, {2, 5}})
        for (bool wrap : {true, false}) {
            const HankelConfig cfg{p, q, wrap};
            Plane a(12, 10);
            for (Index j = 0; j < a.cols(); ++j)
                for (Index i = 0; i < a.rows(); ++i)
                    a(i, j) = {g(rng), g(rng)};
            const auto la = lift2(a, cfg);
            Eigen::MatrixXcd b(la.entries.rows(), la.entries.cols());
            for (Index j = 0; j < b.cols(); ++j)
                for (Index i = 0; i < b.rows(); ++i)
                    b(i, j) = {g(rng), g(rng)};
            const Complex lhs = (la.entries.conjugate().cwiseProduct(b)).sum();
            const Complex rhs = (a.conjugate().cwiseProduct(adjoint2(b, a.rows(), a.cols(), cfg))).sum();
            adj = std::max(adj, std::abs(lhs - rhs) / std::abs(lhs));
            inv = std::max(inv, (pseudo_inverse2(la) - a).cwiseAbs().maxCoeff());
        }
    v.check(adj <= 1e-12, "hankel adjoint " + fmt(adj));
    v.check(inv <= 1e-14, "pinv(lift) " + fmt(inv));

    double floor = 1.0;
    for (double a : {0.05, 0.1, 0.2, 0.3}) {
        const auto t = tkd_kernel(make_dipole_kernel(Dims{32, 32, 32}, VoxelSize{}), a);
        double mn    = 1.0;
        for (double s : t.values().data())
            mn = std::min(mn, std::abs(s));
        floor = std::min(floor, mn / a);
    }
    v.check(floor >= 1.0, "tkd min|D_a|/a " + fmt(floor));
    return v;
}

Verdict criterion_2()
{
    Verdict v;
    double worst   = 0.0;
    int instances  = 0;
    bool obj_ok    = true;
    for (auto [p, r] : {std::pair<Index, Index>{3, 9}, {4, 4}}) {
        const HankelConfig cfg{p, p, true};
        for (std::uint64_t s = 0; s < 12; ++s) {
            const auto in = oracle::lowrank_instance(5000 + 100 * std::uint64_t(p) + s);
            Plane init(8, 8);
            for (Index j = 0; j < 8; ++j)
                for (Index i = 0; i < 8; ++i) {
                    const double d = in.d_hat(i, j);
                    init(i, j)     = in.phi_w(i, j) / (std::abs(d) > 0.1 ? d : 0.1);
                }
            AdmmParams a;
            a.lambda    = 1.0;
            a.mu        = 1.0;
            a.rank_r    = r;
            a.max_iters = 2000;
            a.tol       = 1e-14;
            const auto sol = solve_plane(in.phi_w, in.d_hat, cfg, a, init);
            const auto ref = oracle::svt_reference(in.phi_w, in.d_hat, cfg, a.lambda, 3000, init);
            worst          = std::max(worst, (sol.chi_w - ref).norm() / ref.norm());
            obj_ok         = obj_ok && oracle::objective(sol.chi_w, in.phi_w, in.d_hat, cfg, a.lambda) <=
                                   oracle::objective(ref, in.phi_w, in.d_hat, cfg, a.lambda) * (1.0 + 1e-6);
            ++instances;
        }
    }
    v.check(instances >= 20, std::to_string(instances) + " instances (8x8, 20% zeroed)");
    v.check(worst <= 1e-2, "max relative error vs SVT reference " + fmt(worst));
    v.check(obj_ok, "objective not above reference");
    return v;
}

struct EndToEnd
{
    AlohaResult res;
    double seconds = 0.0;
};

const EndToEnd& end_to_end()
{
    static const EndToEnd run = [] {
        const auto& ds = noisy_phantom();
        const auto t0  = std::chrono::steady_clock::now();
        EndToEnd e{aloha_qsm(ds.phase_noisy, ds.kernel, desk_options(), ds.mask), 0.0};
        e.seconds = seconds_since(t0);
        return e;
    }();
    return run;
}

Verdict criterion_3()
{
    Verdict v;
    const auto& ds  = noisy_phantom();
    const auto& run = end_to_end();
    const auto tkd  = tkd_invert(ds.phase_noisy, ds.kernel, default_tkd_threshold);

    const double r_aloha = rmse(run.res.chi, ds.chi_true, ds.mask);
    const double r_tkd   = rmse(tkd, ds.chi_true, ds.mask);
    v.check(r_aloha < r_tkd, "RMSE aloha " + fmt(r_aloha) + " < tkd " + fmt(r_tkd));

    const double s_corr   = linregress(ds.chi_true, run.res.chi, ds.mask).slope;
    const double s_uncorr = linregress(ds.chi_true, run.res.chi_uncorrected, ds.mask).slope;
    v.check(std::abs(s_corr - 1.0) < std::abs(s_uncorr - 1.0),
            "slope corrected " + fmt(s_corr) + " vs uncorrected " + fmt(s_uncorr));

    const auto& sm = run.res.s_m;
    v.check(!sm.degenerate && sm.value > 0.0 && sm.value <= 1.0, "s_m " + fmt(sm.value));
    v.check(run.seconds < 600.0, "runtime " + fmt(run.seconds, "%.1f") + " s");
    return v;
}

Verdict criterion_4()
{
    Verdict v;
    const auto spec = default_brain_like_spec();
    const auto ds   = make_dataset(spec, ScanParams{}, 10.0, 42);
    AlohaOptions o  = desk_options();
    o.admm.lambda   = 0.001;
    const auto res  = aloha_qsm(ds.phase_clean, ds.kernel, o, ds.mask);
    const auto tkd  = tkd_invert(ds.phase_clean, ds.kernel, default_tkd_threshold);

    auto mean_in = [&](const RealVolume& chi, const std::string& name) {
        const auto id = *label_of(spec, name);
        for (const auto& s : roi_stats(chi, ds.labels))
            if (s.label == id)
                return s.mean;
        return std::nan("");
    };
    for (auto [name, target] : {std::pair<const char*, double>{"globus_pallidus", 0.12}, {"putamen", 0.05}}) {
        const double a = mean_in(res.chi, name), t = mean_in(tkd, name);
        v.check(std::abs(a - target) <= 0.03, std::string(name) + " aloha " + fmt(a));
        v.check(std::abs(t - target) <= 0.05, std::string(name) + " tkd " + fmt(t));
    }
    return v;
}

Verdict criterion_5()
{
    Verdict v;
    const auto& run = end_to_end();
    std::size_t ok = 0;
    for (const auto& p : run.res.planes)
        ok += p.report.primal_residual <= 0.1 * p.report.first_residual;
    const double frac = run.res.planes.empty() ? 0.0 : double(ok) / double(run.res.planes.size());
    v.check(frac >= 0.95, fmt(100.0 * frac, "%.2f") + "% of " + std::to_string(run.res.planes.size()) +
                              " planes reach 0.1x first residual");
    return v;
}

Verdict criterion_6()
{
    Verdict v;

    // Injected monotone residual: the selection must equal a brute-force scan.
    SweepConfig syn;
    const double sigma_syn = 0.37;
    auto injected          = [](double mu, double lambda) { return 0.01 * std::pow(lambda, 0.6) / (1.0 + 5.0 * mu); };
    const auto rs          = run_sweep(syn, sigma_syn, injected);
    std::optional<std::size_t> expect;
    const auto grid = sweep_grid(syn);
    for (std::size_t i = 0; i < grid.size() && !expect; ++i)
        if (injected(grid[i].mu, grid[i].lambda) >= sigma_syn)
            expect = i;
    std::size_t flagged = 0;
    for (const auto& p : rs.points)
        flagged += p.selected;
    v.check(expect && rs.selected == expect && flagged == 1,
            "synthetic 16x21 grid selects index " + (rs.selected ? std::to_string(*rs.selected) : std::string("none")));

    // Reduced grid on the noisy phantom.
    const auto& ds = noisy_phantom();
    RealVolume noise = ds.phase_noisy;
    for (std::size_t i = 0; i < noise.size(); ++i)
        noise[i] -= ds.phase_clean[i];
    const double sigma = rms_difference(noise, RealVolume::like(noise), ds.mask);

    // mu steps by 10^0.2, lambda by 10^0.05
    std::vector<SweepPoint> pts;
    for (double mu : geometric_grid(1e-2, 1e-1, std::pow(10.0, 0.2)))
        for (double lam : geometric_grid(std::pow(10.0, -1.3), std::pow(10.0, -1.05), std::pow(10.0, 0.05)))
            pts.push_back({mu, lam, 0.0, false});
    for (auto& p : pts) {
        AlohaOptions o = desk_options();
        o.admm.mu      = p.mu;
        o.admm.lambda  = p.lambda;
        const auto res = aloha_qsm(ds.phase_noisy, ds.kernel, o, ds.mask);
        p.rmse         = rms_difference(ds.phase_noisy, forward_phase(res.chi_uncorrected, ds.kernel), ds.mask);
        std::cerr << "  sweep mu " << format_g9(p.mu) << " lambda " << format_g9(p.lambda) << " rmse "
                  << format_g9(p.rmse) << "\n";
    }
    const auto rp = select_first_crossing(pts, sigma);
    flagged       = 0;
    for (const auto& p : rp.points)
        flagged += p.selected;
    v.check(rp.points.size() == 36 && flagged == 1,
            std::to_string(rp.points.size()) + " points, " + std::to_string(flagged) + " selected");
    if (rp.selected) {
        const auto& s   = rp.points[*rp.selected];
        const double rel = std::abs(s.rmse - sigma) / sigma;
        v.check(rel <= 0.1, "selected mu " + fmt(s.mu) + " lambda " + fmt(s.lambda) + " residual " + fmt(s.rmse) +
                                " vs sigma " + fmt(sigma) + " (" + fmt(100 * rel, "%.1f") + "%)");
    }
    return v;
}

std::string file_bytes(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Verdict criterion_7()
{
    Verdict v;
    const auto& ds = noisy_phantom();
    const auto dir = fs::temp_directory_path() / "alohaqsm_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::vector<std::string> payloads;
    for (int threads : {1, 4}) {
        const auto res = aloha_qsm(ds.phase_noisy, ds.kernel, desk_options(threads), ds.mask);
        const auto p   = dir / ("chi_t" + std::to_string(threads));
        io::write_volume(p, res.chi);
        payloads.push_back(file_bytes(io::payload_path(p)));
    }
    fs::remove_all(dir);
    v.check(!payloads[0].empty() && payloads[0] == payloads[1], "chi files with 1 and 4 threads byte-identical");
    return v;
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc)
            which.push_back(std::stoi(argv[++i]));
        else {
            std::cerr << "usage: acceptance [--criterion N]...\n";
            return 1;
        }
    }
    if (which.empty())
        which = {1, 2, 3, 4, 5, 6, 7};

    const std::vector<std::function<Verdict()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                         criterion_5, criterion_6, criterion_7};
    bool all = true;
    for (int c : which) {
        if (c < 1 || c > 7) {
            std::cerr << "no criterion " << c << "\n";
            return 1;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[std::size_t(c - 1)]();
        } catch (const std::exception& e) {
            v.check(false, std::string("exception: ") + e.what());
        }
        std::cout << "criterion " << c << ": " << (v.pass ? "PASS" : "FAIL") << " - " << v.detail.str() << " ("
                  << fmt(seconds_since(t0), "%.1f") << " s)" << std::endl;
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
