#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace alohaqsm;
using namespace alohaqsm::cli;

namespace
{

void add_recon_options(CLI::App* sub, ReconArgs& r)
{
    sub->add_option("--phase", r.phase, "Normalized field map (VolumeFile, ppm)")->required();
    sub->add_option("--mask", r.mask, "Support mask (VolumeFile)");
    sub->add_option("--preset", r.preset, "phantom | invivo | invivo-experiment");
    sub->add_option("--lambda", r.lambda, "Rank penalty weight");
    sub->add_option("--mu", r.mu, "ADMM penalty");
    sub->add_option("--tkd-a", r.tkd_a, "TKD threshold");
    sub->add_option("--filter", r.filter, "Annihilating filter size p,q")->delimiter(',')->expected(2);
    sub->add_option("--rank", r.rank, "Factor rank r");
    sub->add_option("--iters", r.iters, "ADMM iterations per plane");
    sub->add_option("--tol", r.tol, "Relative primal-residual stop");
    sub->add_option("--eps-weight", r.eps_weight, "Haar weight floor fraction");
    sub->add_option("--b0-dir", r.b0_dir, "Field direction x,y,z")->delimiter(',')->expected(3);
    sub->add_option("--threads", r.threads, "Plane-solver threads (0 = all)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ALOHA-QSM susceptibility reconstruction"};
    app.require_subcommand(1);

    PhantomArgs pa;
    auto* phantom = app.add_subcommand("phantom", "Synthesize a phantom dataset");
    phantom->add_option("--config", pa.config, "Phantom config (JSON)");
    phantom->add_option("--out-dir", pa.out_dir, "Output directory");
    phantom->add_option("--snr", pa.snr, "Override SNR");
    phantom->add_option("--seed", pa.seed, "Override noise seed");

    InvertArgs ia;
    auto* invert = app.add_subcommand("invert", "Dipole inversion");
    invert->add_option("--method", ia.recon.method, "tkd | aloha")->check(CLI::IsMember({"tkd", "aloha"}));
    add_recon_options(invert, ia.recon);
    invert->add_option("--out", ia.out, "Output susceptibility (VolumeFile)")->required();
    invert->add_option("--report", ia.report, "Report JSON path");

    SweepArgs sa;
    auto* sweep = app.add_subcommand("sweep", "Discrepancy-principle parameter sweep");
    add_recon_options(sweep, sa.recon);
    sweep->add_option("--config", sa.config, "Sweep config (JSON)");
    sweep->add_option("--noise-sigma", sa.noise_sigma, "Target residual level (ppm)");
    sweep->add_option("--noise-region", sa.noise_region, "Mask of a uniform region to measure sigma");
    sweep->add_option("--mu-range", sa.mu_range, "lo,hi")->delimiter(',')->expected(2);
    sweep->add_option("--lambda-range", sa.lambda_range, "lo,hi")->delimiter(',')->expected(2);
    sweep->add_option("--step", sa.step, "Multiplicative grid step");
    sweep->add_option("--csv", sa.csv, "Output CSV");

    MetricsArgs ma;
    auto* metrics = app.add_subcommand("metrics", "RMSE, regression and ROI statistics");
    metrics->add_option("--chi", ma.chi, "Reconstruction")->required();
    metrics->add_option("--ref", ma.ref, "Reference")->required();
    metrics->add_option("--mask", ma.mask, "Evaluation mask");
    metrics->add_option("--labels", ma.labels, "ROI label volume");
    metrics->add_option("--out", ma.out, "CSV path (stdout if omitted)");
    metrics->add_flag("--literal-rmse", ma.literal_rmse, "Use the sum-normalized RMSE");

    SliceArgs xa;
    auto* slice = app.add_subcommand("export-slice", "Write one slice as 16-bit PGM");
    slice->add_option("--volume", xa.volume, "Input VolumeFile")->required();
    slice->add_option("--axis", xa.axis, "Slice normal axis 0|1|2");
    slice->add_option("--index", xa.index, "Slice index (default centre)");
    slice->add_option("--window", xa.window, "lo,hi")->delimiter(',')->expected(2);
    slice->add_option("--out", xa.out, "Output PGM")->required();

    NiftiArgs na;
    auto* nifti = app.add_subcommand("import-nifti", "Convert NIfTI-1 to VolumeFile");
    nifti->add_option("--in", na.in, "Input .nii")->required();
    nifti->add_option("--out", na.out, "Output VolumeFile")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*phantom)
            return cmd_phantom(pa);
        if (*invert)
            return cmd_invert(ia);
        if (*sweep)
            return cmd_sweep(sa);
        if (*metrics)
            return cmd_metrics(ma);
        if (*slice)
            return cmd_export_slice(xa);
        if (*nifti)
            return cmd_import_nifti(na);
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
