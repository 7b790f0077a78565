#pragma once

#include "ftb/floquet.hpp"
#include "ftb/provider.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace ftb {

struct BandSample {
    Vec2 alpha;
    double s = 0.0;
    bool interpolated = false; // flagged near the dual lattice, filled in
    std::vector<std::complex<double>> values; // folded, sorted by (Re, Im)
};

struct BandDiagram {
    BrillouinPath path;
    double omega = 0.0;
    double epsilon = 0.0;
    std::vector<BandSample> samples;
    std::string layout_kind = "custom";
    IntegratorTolerance tolerance;

    int bands() const {
        return samples.empty() ? 0 : static_cast<int>(samples.front().values.size());
    }
};

/// Full pipeline per path sample: C^alpha -> M(t) -> first-order system ->
/// monodromy -> folded quasifrequencies. Samples within 1e-6 of the dual
/// lattice are interpolated per band from the nearest computed neighbors
/// (flag retained).
BandDiagram compute_bands(const std::shared_ptr<const CapacitanceProvider> &cap,
                          const ModulationProfile &profile,
                          const CouplingParams &coupling,
                          const BrillouinPath &path, double epsilon,
                          const IntegratorTolerance &tol = {}, int jobs = 0);

struct ReciprocityReport {
    double max_set_distance = 0.0;
    Vec2 worst_alpha = Vec2::Zero();
    std::vector<double> per_sample; // one entry per mirrored pair (by index)
};

/// Optimal-assignment distance (sorted pairing of real parts, exact in 1D)
/// between quasifrequency sets at alpha and -alpha, per mirrored pair.
ReciprocityReport reciprocity_report(const BandDiagram &diagram);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

struct GapReport {
    std::vector<Interval> forward;
    std::vector<Interval> backward;
    std::vector<Interval> unidirectional; // symmetric difference
    int sub_resolution = 0; // suppressed candidates (sampling artifacts)
};

/// Maximal open frequency intervals inside [-Omega/2, Omega/2) containing no
/// band value over each half-path. A candidate is suppressed (sub-resolution)
/// when a sorted-band curve crosses it between consecutive samples or when it
/// is narrower than twice the local sampled band spacing.
GapReport gap_analysis(const BandDiagram &diagram);

struct SweepRow {
    double epsilon = 0.0;
    std::optional<double> splitting;  // censored when branches are ambiguous
    double shift = 0.0;               // tracked non-degenerate band movement
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double splitting_exponent = 0.0;  // log-log fit over positive rows
    double shift_exponent = 0.0;
};

/// Splitting of the two branches at a degenerate point and the displacement
/// of a reference non-degenerate band, per epsilon.
SweepResult epsilon_sweep(const std::shared_ptr<const CapacitanceProvider> &cap,
                          const ModulationProfile &profile,
                          const CouplingParams &coupling, const Vec2 &alpha_deg,
                          std::complex<double> f0, const Vec2 &alpha_ref,
                          const std::vector<double> &eps_grid,
                          const IntegratorTolerance &tol = {});

/// Interval set algebra used by the gap report (exposed for tests).
std::vector<Interval> interval_difference(const std::vector<Interval> &a,
                                          const std::vector<Interval> &b);

} // namespace ftb
