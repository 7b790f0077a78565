#include "ftb/config.hpp"

#include "ftb/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace ftb {

using nlohmann::json;

namespace {

void reject_unknown(const json &obj, const std::set<std::string> &known,
                    const std::string &where) {
    for (const auto &[key, value] : obj.items()) {
        (void)value;
        if (!known.count(key)) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

Vec2 parse_vec2(const json &j, const std::string &where) {
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError(where + " must be a 2-element array");
    }
    return Vec2(j[0].get<double>(), j[1].get<double>());
}

std::map<int, std::complex<double>> parse_table(const json &j,
                                                const std::string &where) {
    std::map<int, std::complex<double>> out;
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto &[key, value] : j.items()) {
        const int n = std::stoi(key);
        if (!value.is_array() || value.size() != 2) {
            throw ConfigError(where + " entries must be [re, im] pairs");
        }
        out[n] = {value[0].get<double>(), value[1].get<double>()};
    }
    return out;
}

} // namespace

RunConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json root;
    try {
        in >> root;
    } catch (const json::parse_error &e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    reject_unknown(root,
                   {"layout", "green", "coupling", "modulation", "path",
                    "integrator", "bands", "perturb", "sweep", "capacitance_file",
                    "out_dir", "jobs"},
                   "config root");
    RunConfig cfg;

    if (root.contains("layout")) {
        const json &l = root["layout"];
        reject_unknown(l, {"kind", "radius", "lattice", "centers", "radii"},
                       "layout");
        if (l.contains("kind")) {
            cfg.layout_kind = layout_kind_from_string(l["kind"].get<std::string>());
            if (l.contains("radius")) cfg.layout_radius = l["radius"].get<double>();
        } else {
            ResonatorLayout lay;
            if (!l.contains("lattice") || !l.contains("centers") ||
                !l.contains("radii")) {
                throw ConfigError(
                    "explicit layout needs lattice, centers and radii");
            }
            const json &lat = l["lattice"];
            reject_unknown(lat, {"l1", "l2"}, "layout.lattice");
            lay.lattice = Lattice::from_vectors(
                parse_vec2(lat.at("l1"), "layout.lattice.l1"),
                parse_vec2(lat.at("l2"), "layout.lattice.l2"));
            for (const auto &c : l["centers"]) {
                lay.centers.push_back(parse_vec2(c, "layout.centers[]"));
            }
            for (const auto &r : l["radii"]) lay.radii.push_back(r.get<double>());
            lay.validate();
            cfg.explicit_layout = lay;
        }
    }

    if (root.contains("green")) {
        const json &g = root["green"];
        reject_unknown(g, {"truncation", "quadrature_points"}, "green");
        if (g.contains("truncation")) cfg.green.truncation = g["truncation"].get<int>();
        if (g.contains("quadrature_points")) {
            cfg.green.quadrature_points = g["quadrature_points"].get<int>();
        }
        cfg.green.validate();
    }

    if (root.contains("coupling")) {
        const json &c = root["coupling"];
        reject_unknown(c, {"delta", "kappa_r", "rho_r"}, "coupling");
        if (c.contains("delta")) cfg.delta = c["delta"].get<double>();
        if (c.contains("kappa_r")) cfg.kappa_r = c["kappa_r"].get<double>();
        if (c.contains("rho_r")) cfg.rho_r = c["rho_r"].get<double>();
    }

    if (root.contains("modulation")) {
        const json &m = root["modulation"];
        reject_unknown(m,
                       {"family", "omega", "epsilon", "phases",
                        "second_harmonic", "phases2", "rho_inv", "kappa_inv"},
                       "modulation");
        if (m.contains("family")) cfg.family = m["family"].get<std::string>();
        if (m.contains("omega")) cfg.omega = m["omega"].get<double>();
        if (m.contains("epsilon")) cfg.epsilon = m["epsilon"].get<double>();
        if (m.contains("phases")) {
            for (const auto &p : m["phases"]) cfg.phases.push_back(p.get<double>());
        }
        if (m.contains("second_harmonic")) {
            cfg.second_harmonic = m["second_harmonic"].get<double>();
        }
        if (m.contains("phases2")) {
            for (const auto &p : m["phases2"]) cfg.phases2.push_back(p.get<double>());
        }
        if (m.contains("rho_inv")) {
            for (const auto &t : m["rho_inv"]) {
                cfg.rho_inv_tables.push_back(parse_table(t, "modulation.rho_inv[]"));
            }
        }
        if (m.contains("kappa_inv")) {
            for (const auto &t : m["kappa_inv"]) {
                cfg.kappa_inv_tables.push_back(
                    parse_table(t, "modulation.kappa_inv[]"));
            }
        }
    }

    if (root.contains("path")) {
        const json &p = root["path"];
        reject_unknown(p, {"kind", "samples_per_segment"}, "path");
        if (p.contains("kind")) {
            cfg.path_kind = path_kind_from_string(p["kind"].get<std::string>());
        }
        if (p.contains("samples_per_segment")) {
            cfg.samples_per_segment = p["samples_per_segment"].get<int>();
        }
    }

    if (root.contains("integrator")) {
        const json &t = root["integrator"];
        reject_unknown(t, {"rtol", "atol"}, "integrator");
        if (t.contains("rtol")) cfg.tolerance.rtol = t["rtol"].get<double>();
        if (t.contains("atol")) cfg.tolerance.atol = t["atol"].get<double>();
    }

    if (root.contains("bands")) {
        const json &b = root["bands"];
        reject_unknown(b, {"reports"}, "bands");
        if (b.contains("reports")) {
            for (const auto &r : b["reports"]) {
                const std::string name = r.get<std::string>();
                if (name != "gaps" && name != "reciprocity") {
                    throw ConfigError("unknown report: " + name);
                }
                cfg.reports.push_back(name);
            }
        }
    }

    if (root.contains("perturb")) {
        const json &p = root["perturb"];
        reject_unknown(p, {"omega_scan", "omega_scan_base", "cross_check"},
                       "perturb");
        if (p.contains("omega_scan")) {
            for (const auto &w : p["omega_scan"]) {
                cfg.omega_scan.push_back(w.get<double>());
            }
        }
        if (p.contains("omega_scan_base")) {
            cfg.omega_scan_base = p["omega_scan_base"].get<double>();
        }
        if (p.contains("cross_check")) cfg.cross_check = p["cross_check"].get<bool>();
    }

    if (root.contains("sweep")) {
        const json &s = root["sweep"];
        reject_unknown(s, {"eps_grid", "alpha"}, "sweep");
        if (s.contains("eps_grid")) {
            for (const auto &e : s["eps_grid"]) cfg.eps_grid.push_back(e.get<double>());
        }
        if (s.contains("alpha")) cfg.sweep_alpha = parse_vec2(s["alpha"], "sweep.alpha");
    }

    if (root.contains("capacitance_file")) {
        cfg.capacitance_file = root["capacitance_file"].get<std::string>();
    }
    if (root.contains("out_dir")) cfg.out_dir = root["out_dir"].get<std::string>();
    if (root.contains("jobs")) cfg.jobs = root["jobs"].get<int>();
    return cfg;
}

ResonatorLayout RunConfig::layout() const {
    if (explicit_layout) return *explicit_layout;
    const LayoutKind kind = layout_kind.value_or(LayoutKind::square3);
    const double radius = layout_radius > 0.0 ? layout_radius : default_radius(kind);
    return standard_layout(kind, radius);
}

ModulationProfile RunConfig::profile(int n) const {
    if (family == "cosine") {
        std::vector<double> ph = phases;
        if (ph.empty()) ph.assign(n, 0.0);
        if (static_cast<int>(ph.size()) != n) {
            throw ConfigError("modulation.phases length must equal N");
        }
        return cosine_profile(n, omega, epsilon, ph);
    }
    if (family == "two_harmonic") {
        std::vector<double> ph = phases, ph2 = phases2;
        if (ph.empty()) ph.assign(n, 0.0);
        if (ph2.empty()) ph2.assign(n, 0.0);
        return two_harmonic_profile(n, omega, epsilon, ph, second_harmonic, ph2);
    }
    if (family == "explicit") {
        if (static_cast<int>(rho_inv_tables.size()) != n) {
            throw ConfigError("modulation.rho_inv needs one table per resonator");
        }
        ModulationProfile p;
        p.n = n;
        p.omega = omega;
        p.epsilon = epsilon;
        p.cosine_family = false;
        p.phases.assign(n, 0.0);
        for (int i = 0; i < n; ++i) {
            p.rho_inv.emplace_back(rho_inv_tables[i]);
            if (static_cast<int>(kappa_inv_tables.size()) == n) {
                p.kappa_inv.emplace_back(kappa_inv_tables[i]);
            } else {
                p.kappa_inv.emplace_back(
                    std::map<int, std::complex<double>>{{0, 1.0}});
            }
        }
        p.validate();
        return p;
    }
    throw ConfigError("unknown modulation family: " + family);
}

CouplingParams RunConfig::coupling(const ResonatorLayout &lay) const {
    return CouplingParams::for_layout(lay, delta, kappa_r, rho_r);
}

BrillouinPath RunConfig::path() const {
    PathKind kind = PathKind::chain;
    if (path_kind) {
        kind = *path_kind;
    } else if (layout_kind) {
        switch (*layout_kind) {
        case LayoutKind::chain3: kind = PathKind::chain; break;
        case LayoutKind::square3: kind = PathKind::square; break;
        case LayoutKind::honeycomb6: kind = PathKind::honeycomb; break;
        }
    }
    return symmetry_path(kind, samples_per_segment);
}

std::shared_ptr<CapacitanceProvider> RunConfig::provider() const {
    if (!capacitance_file.empty()) {
        return std::make_shared<LoadedCapacitance>(
            load_capacitance(capacitance_file));
    }
    return std::make_shared<ComputedCapacitance>(layout(), green);
}

} // namespace ftb
