#include "ftb/config.hpp"
#include "ftb/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv) {
    CLI::App app{"Subwavelength band structures of space-time modulated "
                 "resonator lattices"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int jobs = 0;

    auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("--config", config_path, "JSON configuration file")
            ->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--jobs", jobs, "worker thread cap");
    };

    auto *cap = app.add_subcommand("capacitance",
                                   "compute the capacitance field over a path");
    auto *bands = app.add_subcommand("bands", "band diagram and reports");
    auto *perturb =
        app.add_subcommand("perturb", "degenerate points and first-order rates");
    auto *sweep = app.add_subcommand("sweep", "epsilon sweep at a degeneracy");
    for (auto *cmd : {cap, bands, perturb, sweep}) add_common(cmd);

    double epsilon = -1.0, omega = -1.0;
    std::vector<std::string> reports;
    bands->add_option("--epsilon", epsilon, "override modulation amplitude");
    bands->add_option("--omega", omega, "override modulation frequency");
    bands->add_option("--report", reports, "gaps,reciprocity")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        ftb::RunConfig cfg = ftb::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (jobs > 0) cfg.jobs = jobs;
        if (bands->parsed()) {
            if (epsilon >= 0.0) cfg.epsilon = epsilon;
            if (omega > 0.0) cfg.omega = omega;
            for (const auto &r : reports) cfg.reports.push_back(r);
        }
        if (cap->parsed()) return ftb::cmd_capacitance(cfg);
        if (bands->parsed()) return ftb::cmd_bands(cfg);
        if (perturb->parsed()) return ftb::cmd_perturb(cfg);
        if (sweep->parsed()) return ftb::cmd_sweep(cfg);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
