// oamcnot: reproduce the polarization/OAM CNOT gate, its Bell family and the
// triangular-aperture readout from the command line.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "oamcnot/commands.hpp"

namespace {

void add_shared_flags(CLI::App& cmd, oamcnot::cli::RunConfig& cfg) {
    static const std::map<std::string, oamcnot::MziMode> modes{
        {"paper-default", oamcnot::MziMode::PaperDefault},
        {"strict-parity", oamcnot::MziMode::StrictParity},
    };
    cmd.add_option("--grid-n", cfg.grid_n, "Samples per side (power of two >= 64)")->capture_default_str();
    cmd.add_option("--window-mm", cfg.window_mm, "Aperture-plane window side [mm]")->capture_default_str();
    cmd.add_option("--waist-mm", cfg.waist_mm, "Beam waist w0 [mm]")->capture_default_str();
    cmd.add_option("--lambda-nm", cfg.lambda_nm, "Wavelength [nm]")->capture_default_str();
    cmd.add_option("--focal-cm", cfg.focal_cm, "Lens focal length [cm]")->capture_default_str();
    cmd.add_option("--side-mm", cfg.side_mm, "Triangle side length [mm]")->capture_default_str();
    cmd.add_option("--threshold", cfg.threshold, "Peak threshold as a fraction of the maximum")
        ->capture_default_str();
    cmd.add_option("--mode", cfg.mode, "Interferometer model")
        ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case))
        ->default_str("paper-default");
    cmd.add_option("--out", cfg.out_dir, "Output directory for reports and images")->capture_default_str();
    cmd.add_flag("--raw-float", cfg.raw_float, "Also dump intensities as raw little-endian float64");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace oamcnot::cli;

    CLI::App app{"Polarization/OAM CNOT gate simulator"};
    app.require_subcommand(1);

    RunConfig truth_cfg, bell_cfg, sim_cfg, sweep_cfg;

    auto* truth = app.add_subcommand("truth-table", "Run the four basis inputs through both layers");
    add_shared_flags(*truth, truth_cfg);

    auto* bell = app.add_subcommand("bell", "Synthesize the four Bell states and their concurrences");
    add_shared_flags(*bell, bell_cfg);

    std::string circuit_path;
    auto* sim = app.add_subcommand("simulate", "Run a circuit file through both layers");
    sim->add_option("file", circuit_path, "Circuit description")->required();
    add_shared_flags(*sim, sim_cfg);

    int ell_min = -3, ell_max = 3;
    auto* sweep = app.add_subcommand("readout-sweep", "Classify a range of OAM charges");
    sweep->add_option("--ell-min", ell_min, "First charge")->capture_default_str();
    sweep->add_option("--ell-max", ell_max, "Last charge")->capture_default_str();
    add_shared_flags(*sweep, sweep_cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    CommandResult result;
    if (*truth) result = cmd_truth_table(truth_cfg);
    else if (*bell) result = cmd_bell(bell_cfg);
    else if (*sim) result = cmd_simulate(circuit_path, sim_cfg);
    else result = cmd_readout_sweep(ell_min, ell_max, sweep_cfg);

    const bool failed_to_run = result.exit_code == kExitUsage || result.exit_code == kExitParse || result.exit_code == kExitIo;
    (failed_to_run ? std::cerr : std::cout) << result.report;
    return result.exit_code;
}
