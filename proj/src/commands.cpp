#include "ftb/config.hpp"

#include "ftb/errors.hpp"
#include "ftb/perturbation.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace ftb {

using nlohmann::json;

namespace {

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::filesystem::path out_path(const RunConfig &cfg, const std::string &name) {
    std::filesystem::create_directories(cfg.out_dir);
    return std::filesystem::path(cfg.out_dir) / name;
}

std::string layout_name(const RunConfig &cfg) {
    if (cfg.explicit_layout) return "custom";
    return to_string(cfg.layout_kind.value_or(LayoutKind::square3));
}

void write_band_csv(const std::filesystem::path &file, const BandDiagram &diagram,
                    const std::string &layout) {
    std::ofstream out(file);
    out << "# omega=" << fmt(diagram.omega) << " epsilon=" << fmt(diagram.epsilon)
        << " layout=" << layout << "\n";
    out << "s,alpha1,alpha2,band_index,re_omega,im_omega\n";
    for (const auto &sample : diagram.samples) {
        for (size_t b = 0; b < sample.values.size(); ++b) {
            out << fmt(sample.s) << ',' << fmt(sample.alpha.x()) << ','
                << fmt(sample.alpha.y()) << ',' << b << ','
                << fmt(sample.values[b].real()) << ','
                << fmt(sample.values[b].imag()) << "\n";
        }
    }
}

json interval_list(const std::vector<Interval> &intervals) {
    json arr = json::array();
    for (const auto &iv : intervals) arr.push_back({iv.lo, iv.hi});
    return arr;
}

/// Static band spread over the path grid; the folding scale of the layout.
double detected_folding_scale(const M0Provider &m0, const BrillouinPath &path) {
    double wmin = 1e300, wmax = -1e300;
    for (const auto &pt : path.points) {
        if (pt.alpha.norm() < 1e-6) continue;
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m0(pt.alpha), false);
        for (int i = 0; i < es.eigenvalues().size(); ++i) {
            const double w = std::sqrt(std::abs(es.eigenvalues()(i)));
            wmin = std::min(wmin, w);
            wmax = std::max(wmax, w);
        }
    }
    return wmax - wmin;
}

} // namespace

int cmd_capacitance(const RunConfig &cfg) {
    const ResonatorLayout lay = cfg.layout();
    const BrillouinPath path = cfg.path();
    const auto field = capacitance_field(lay, path, cfg.green, cfg.jobs);
    save_capacitance_field(out_path(cfg, "capacitance_field.txt").string(), field);

    // diagnostics: |C_ij| over the path plus symmetry residuals
    std::ofstream diag(out_path(cfg, "capacitance_diagnostics.csv"));
    diag << "s,alpha1,alpha2,flagged,herm_defect,max_abs_entry\n";
    double worst_herm = 0.0;
    for (size_t i = 0; i < field.size(); ++i) {
        const auto &f = field[i];
        diag << fmt(path.points[i].s) << ',' << fmt(f.alpha.x()) << ','
             << fmt(f.alpha.y()) << ',' << (f.singular ? 1 : 0) << ',';
        if (f.singular) {
            diag << "NA,NA\n";
            continue;
        }
        worst_herm = std::max(worst_herm, f.matrix.hermitian_defect);
        diag << fmt(f.matrix.hermitian_defect) << ','
             << fmt(f.matrix.entries.cwiseAbs().maxCoeff()) << "\n";
    }
    // conjugation residual over mirrored pairs
    double worst_conj = 0.0;
    for (size_t i = 0; i < field.size(); ++i) {
        const auto m = path.mirror_index(static_cast<int>(i));
        if (!m || *m < static_cast<int>(i)) continue;
        if (field[i].singular || field[*m].singular) continue;
        const auto &a = field[i].matrix.entries;
        const auto &b = field[*m].matrix.entries;
        worst_conj = std::max(
            worst_conj, (b - a.transpose()).norm() / std::max(a.norm(), 1e-300));
    }
    std::cout << "hermiticity residual (worst): " << worst_herm << "\n"
              << "conjugation residual (worst): " << worst_conj << "\n";
    return (worst_herm <= 1e-8 && worst_conj <= 1e-8) ? 0 : 1;
}

int cmd_bands(const RunConfig &cfg) {
    const ResonatorLayout lay = cfg.explicit_layout || cfg.layout_kind
                                    ? cfg.layout()
                                    : cfg.layout();
    const auto provider = cfg.provider();
    const ModulationProfile profile = cfg.profile(provider->size());
    const CouplingParams coupling = cfg.coupling(lay);
    const BrillouinPath path = cfg.path();
    const BandDiagram diagram = compute_bands(provider, profile, coupling, path,
                                              cfg.epsilon, cfg.tolerance, cfg.jobs);
    write_band_csv(out_path(cfg, "bands.csv"), diagram, layout_name(cfg));

    bool ok = true;
    for (const std::string &report : cfg.reports) {
        if (report == "reciprocity") {
            const ReciprocityReport rec = reciprocity_report(diagram);
            json j;
            j["max_set_distance"] = rec.max_set_distance;
            j["worst_alpha"] = {rec.worst_alpha.x(), rec.worst_alpha.y()};
            j["per_sample"] = rec.per_sample;
            std::ofstream(out_path(cfg, "reciprocity.json")) << j.dump(2) << "\n";
            std::cout << "reciprocity max set distance: " << rec.max_set_distance
                      << "\n";
        } else if (report == "gaps") {
            const GapReport gaps = gap_analysis(diagram);
            json j;
            j["forward"] = interval_list(gaps.forward);
            j["backward"] = interval_list(gaps.backward);
            j["unidirectional"] = interval_list(gaps.unidirectional);
            j["sub_resolution"] = gaps.sub_resolution;
            std::ofstream(out_path(cfg, "gaps.json")) << j.dump(2) << "\n";
            std::cout << "gaps: " << gaps.forward.size() << " forward, "
                      << gaps.backward.size() << " backward, "
                      << gaps.unidirectional.size() << " unidirectional\n";
        }
    }
    return ok ? 0 : 1;
}

int cmd_perturb(const RunConfig &cfg) {
    const ResonatorLayout lay = cfg.layout();
    auto provider = std::shared_ptr<const CapacitanceProvider>(cfg.provider());
    const CouplingParams coupling = cfg.coupling(lay);
    const M0Provider m0 = static_m0_provider(provider, coupling);
    const BrillouinPath scan_path = cfg.path();

    std::vector<double> omegas = cfg.omega_scan;
    if (omegas.empty()) {
        const double base = cfg.omega_scan_base > 0.0
                                ? cfg.omega_scan_base
                                : detected_folding_scale(m0, scan_path);
        for (double f : {0.8, 0.9, 1.0, 1.1}) omegas.push_back(f * base);
    }

    // fine scan grid per spec resolution
    const BrillouinPath fine = symmetry_path_resolution(
        cfg.path_kind.value_or(PathKind::chain), 0.01);
    std::vector<Vec2> grid;
    for (const auto &p : fine.points) grid.push_back(p.alpha);

    json rows = json::array();
    for (double om : omegas) {
        const auto points = find_degeneracies(m0, om, grid);
        for (const auto &pt : points) {
            json row;
            row["omega"] = om;
            row["alpha"] = {pt.alpha.x(), pt.alpha.y()};
            row["f0"] = {pt.f0.real(), pt.f0.imag()};
            row["m"] = {pt.m_l, pt.m_k};
            row["multiplicity"] = pt.multiplicity;
            if (pt.multiplicity == 2) {
                const StaticDiagonalization diag =
                    static_diagonalization(m0(pt.alpha), om);
                ModulationProfile prof = cfg.profile(provider->size());
                prof.omega = om;
                CapacitanceMatrix cm;
                cm.alpha = pt.alpha;
                cm.entries = provider->at(pt.alpha);
                const TimeMatrix tm = assemble_m(prof, cm, coupling);
                const EpsExpansion exp = eps_expansion(tm);
                const A1Coefficients a1 = a1_in_diagonal_basis(diag, exp);
                const PerturbationResult res = p_value(diag, a1, pt);
                row["p"] = {res.p_alpha.real(), res.p_alpha.imag()};
                row["r"] = {res.r_alpha.real(), res.r_alpha.imag()};
                row["abs_r"] = std::abs(res.r_alpha);
                if (cfg.cross_check) {
                    auto family = [&](double e) {
                        return first_order_system(tm.at_epsilon(e));
                    };
                    const ExtractedF ef =
                        extract_f(family, 0.01, diag, cfg.tolerance);
                    const std::complex<double> pfit =
                        ef.f1n(pt.l, pt.k) * ef.f1n(pt.k, pt.l);
                    row["p_cross"] = {pfit.real(), pfit.imag()};
                    row["cross_residual"] =
                        std::abs(pfit - res.p_alpha) /
                        std::max(std::abs(res.p_alpha), 1e-300);
                }
            }
            rows.push_back(row);
        }
    }
    json doc;
    doc["rows"] = rows;
    std::ofstream(out_path(cfg, "perturbation.json")) << doc.dump(2) << "\n";
    if (rows.empty()) {
        std::cout << "no degenerate points found in the scanned Omega set\n";
    } else {
        std::cout << rows.size() << " degenerate-point rows written\n";
    }
    return 0;
}

int cmd_sweep(const RunConfig &cfg) {
    const ResonatorLayout lay = cfg.layout();
    auto provider = std::shared_ptr<const CapacitanceProvider>(cfg.provider());
    const CouplingParams coupling = cfg.coupling(lay);
    const ModulationProfile profile = cfg.profile(provider->size());
    const M0Provider m0 = static_m0_provider(provider, coupling);

    Vec2 alpha_deg;
    std::complex<double> f0;
    if (cfg.sweep_alpha) {
        alpha_deg = *cfg.sweep_alpha;
        // identify f0 at the given point: closest folded pair with distinct m
        const StaticDiagonalization d = static_diagonalization(m0(alpha_deg), cfg.omega);
        double best = 1e300;
        for (int i = 0; i < d.size(); ++i) {
            for (int j = i + 1; j < d.size(); ++j) {
                if (d.folding[i] == d.folding[j]) continue;
                const double gap = std::abs(d.f0(i) - d.f0(j));
                if (gap < best) {
                    best = gap;
                    f0 = 0.5 * (d.f0(i) + d.f0(j));
                }
            }
        }
    } else {
        const BrillouinPath fine = symmetry_path_resolution(
            cfg.path_kind.value_or(PathKind::chain), 0.01);
        std::vector<Vec2> grid;
        for (const auto &p : fine.points) grid.push_back(p.alpha);
        const auto points = find_degeneracies(m0, cfg.omega, grid);
        const DegeneratePoint *pick = nullptr;
        for (const auto &pt : points) {
            if (pt.multiplicity == 2 && std::abs(pt.m_l - pt.m_k) == 1) {
                pick = &pt;
                break;
            }
        }
        if (!pick) {
            std::cout << "no r=2 degenerate point found; nothing to sweep\n";
            return 0;
        }
        alpha_deg = pick->alpha;
        f0 = pick->f0;
    }

    // reference non-degenerate point: halfway to the zone corner
    const Vec2 alpha_ref = alpha_deg * 0.5 + Vec2(1.3, 0.0);
    std::vector<double> grid_eps = cfg.eps_grid;
    if (grid_eps.empty()) grid_eps = {0.0, 0.01, 0.02, 0.04, 0.08};

    const SweepResult sweep =
        epsilon_sweep(provider, profile, coupling, alpha_deg, f0, alpha_ref,
                      grid_eps, cfg.tolerance);

    std::ofstream out(out_path(cfg, "sweep.csv"));
    out << "epsilon,splitting,shift,fit_exponent_running\n";
    std::vector<std::pair<double, double>> acc;
    for (const auto &row : sweep.rows) {
        out << fmt(row.epsilon) << ',';
        if (row.splitting) {
            out << fmt(*row.splitting);
        } else {
            out << "NA";
        }
        out << ',' << fmt(row.shift) << ',';
        if (row.epsilon > 0.0 && row.splitting && *row.splitting > 0.0) {
            acc.push_back({row.epsilon, *row.splitting});
        }
        if (acc.size() >= 2) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (auto [x, y] : acc) {
                sx += std::log(x);
                sy += std::log(y);
                sxx += std::log(x) * std::log(x);
                sxy += std::log(x) * std::log(y);
            }
            const double n = static_cast<double>(acc.size());
            out << fmt((n * sxy - sx * sy) / (n * sxx - sx * sx));
        } else {
            out << "NA";
        }
        out << "\n";
    }
    out << "# alpha_deg=" << fmt(alpha_deg.x()) << ',' << fmt(alpha_deg.y())
        << " f0_im=" << fmt(f0.imag()) << "\n";
    out << "# splitting_exponent=" << fmt(sweep.splitting_exponent)
        << " shift_exponent=" << fmt(sweep.shift_exponent) << "\n";
    std::cout << "splitting exponent " << sweep.splitting_exponent
              << ", shift exponent " << sweep.shift_exponent << "\n";
    return 0;
}

} // namespace ftb
