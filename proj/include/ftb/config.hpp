#pragma once

#include "ftb/bands.hpp"
#include "ftb/modulation.hpp"
#include "ftb/provider.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ftb {

/// Parsed run configuration. JSON with nesting; unknown keys are rejected.
struct RunConfig {
    // layout: builtin kind or explicit geometry
    std::optional<LayoutKind> layout_kind;
    double layout_radius = 0.0; // 0 -> default for the kind
    std::optional<ResonatorLayout> explicit_layout;

    GreenParams green;

    double delta = 1e-3;
    double kappa_r = 1.0;
    double rho_r = 1.0;

    // modulation
    std::string family = "cosine"; // cosine | two_harmonic | explicit
    double omega = 0.3;
    double epsilon = 0.0;
    std::vector<double> phases;
    double second_harmonic = 0.0;
    std::vector<double> phases2;
    std::vector<std::map<int, std::complex<double>>> rho_inv_tables;
    std::vector<std::map<int, std::complex<double>>> kappa_inv_tables;

    // path
    std::optional<PathKind> path_kind;
    int samples_per_segment = 32;

    IntegratorTolerance tolerance;

    // command-specific options
    std::vector<std::string> reports;       // bands: {gaps, reciprocity}
    std::vector<double> eps_grid;           // sweep
    std::optional<Vec2> sweep_alpha;        // sweep: degenerate point override
    std::vector<double> omega_scan;         // perturb: explicit Omega list
    double omega_scan_base = 0.0;           // perturb: 0 -> detected scale
    bool cross_check = true;                // perturb: extract_f comparison
    std::string capacitance_file;           // bands/perturb: external field

    std::string out_dir = ".";
    int jobs = 0;

    ResonatorLayout layout() const;
    ModulationProfile profile(int n) const;
    CouplingParams coupling(const ResonatorLayout &layout) const;
    BrillouinPath path() const;
    std::shared_ptr<CapacitanceProvider> provider() const;
};

RunConfig load_config(const std::string &path);

/// Commands; each returns the exit code and writes files under out_dir.
int cmd_capacitance(const RunConfig &config);
int cmd_bands(const RunConfig &config);
int cmd_perturb(const RunConfig &config);
int cmd_sweep(const RunConfig &config);

} // namespace ftb
