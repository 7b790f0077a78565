#include "ftb/bands.hpp"

#include "ftb/errors.hpp"
#include "ftb/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ftb {

namespace {

void sort_values(std::vector<std::complex<double>> &v) {
    std::sort(v.begin(), v.end(),
              [](const std::complex<double> &a, const std::complex<double> &b) {
                  if (a.real() != b.real()) return a.real() < b.real();
                  return a.imag() < b.imag();
              });
}

} // namespace

BandDiagram compute_bands(const std::shared_ptr<const CapacitanceProvider> &cap,
                          const ModulationProfile &profile,
                          const CouplingParams &coupling,
                          const BrillouinPath &path, double epsilon,
                          const IntegratorTolerance &tol, int jobs) {
    if (cap->size() != profile.n) {
        throw ConfigError("capacitance/profile resonator count mismatch");
    }
    BandDiagram diagram;
    diagram.path = path;
    diagram.omega = profile.omega;
    diagram.epsilon = epsilon;
    diagram.tolerance = tol;
    const int n = path.size();
    diagram.samples.resize(n);

    const ModulationProfile prof = profile.with_epsilon(epsilon);

    // lattice for singular-sample detection: only computed providers know it;
    // synthetic/loaded fields never flag
    const auto *computed = dynamic_cast<const ComputedCapacitance *>(cap.get());

    parallel_for(n, jobs, [&](int i) {
        BandSample &sample = diagram.samples[i];
        sample.alpha = path.points[i].alpha;
        sample.s = path.points[i].s;
        if (computed &&
            near_dual_lattice(sample.alpha, computed->layout().lattice, 1e-6)) {
            sample.interpolated = true;
            return;
        }
        Eigen::MatrixXcd c;
        try {
            c = cap->at(sample.alpha);
        } catch (const SingularQuasimomentumError &) {
            sample.interpolated = true;
            return;
        }
        CapacitanceMatrix cm;
        cm.alpha = sample.alpha;
        cm.entries = std::move(c);
        const TimeMatrix tm = assemble_m(prof, cm, coupling);
        const FirstOrderSystem sys = first_order_system(tm);
        const MonodromyMatrix mono = monodromy(sys, tol);
        const QuasifrequencySet qf = quasifrequencies(mono, prof.omega, sample.alpha);
        sample.values = qf.values;
    });

    // interpolate flagged samples per band index from nearest computed neighbors
    for (int i = 0; i < n; ++i) {
        if (!diagram.samples[i].interpolated) continue;
        int lo = i - 1, hi = i + 1;
        while (lo >= 0 && diagram.samples[lo].interpolated) --lo;
        while (hi < n && diagram.samples[hi].interpolated) ++hi;
        if (lo < 0 && hi >= n) {
            throw NumericalError("no computable samples on the path");
        }
        if (lo < 0) {
            diagram.samples[i].values = diagram.samples[hi].values;
        } else if (hi >= n) {
            diagram.samples[i].values = diagram.samples[lo].values;
        } else {
            const auto &a = diagram.samples[lo];
            const auto &b = diagram.samples[hi];
            const double t =
                (diagram.samples[i].s - a.s) / std::max(b.s - a.s, 1e-300);
            std::vector<std::complex<double>> v(a.values.size());
            for (size_t j = 0; j < v.size(); ++j) {
                v[j] = (1.0 - t) * a.values[j] + t * b.values[j];
            }
            sort_values(v);
            diagram.samples[i].values = std::move(v);
        }
    }
    return diagram;
}

ReciprocityReport reciprocity_report(const BandDiagram &diagram) {
    ReciprocityReport report;
    const int n = static_cast<int>(diagram.samples.size());
    for (int i = 0; i < n; ++i) {
        const auto mirror = diagram.path.mirror_index(i);
        if (!mirror) {
            std::ostringstream os;
            os << "path sample " << i << " has no mirrored partner";
            throw ConfigError(os.str());
        }
        if (*mirror < i) continue; // count each pair once
        const auto &a = diagram.samples[i].values;
        const auto &b = diagram.samples[*mirror].values;
        // sorted pairing is the optimal bottleneck assignment for reals
        double dist = 0.0;
        for (size_t j = 0; j < a.size(); ++j) {
            dist = std::max(dist, std::abs(a[j].real() - b[j].real()));
        }
        report.per_sample.push_back(dist);
        if (dist >= report.max_set_distance) {
            report.max_set_distance = dist;
            report.worst_alpha = diagram.samples[i].alpha;
        }
    }
    return report;
}

namespace {

bool lex_positive(const Vec2 &a) {
    if (a.x() != 0.0) return a.x() > 0.0;
    return a.y() > 0.0;
}

struct HalfData {
    std::vector<const BandSample *> samples; // ordered along the path
};

std::vector<Interval> find_gaps(const HalfData &half, double omega,
                                int *suppressed) {
    // collect all values
    std::vector<double> vals;
    const int nb = half.samples.empty()
                       ? 0
                       : static_cast<int>(half.samples.front()->values.size());
    for (const auto *s : half.samples) {
        for (const auto &v : s->values) vals.push_back(v.real());
    }
    std::sort(vals.begin(), vals.end());
    const double lo = -omega / 2.0, hi = omega / 2.0;

    // median consecutive step per sorted band (sampling resolution)
    std::vector<double> steps;
    for (int b = 0; b < nb; ++b) {
        for (size_t i = 0; i + 1 < half.samples.size(); ++i) {
            steps.push_back(std::abs(half.samples[i + 1]->values[b].real() -
                                     half.samples[i]->values[b].real()));
        }
    }
    double med_step = 0.0;
    if (!steps.empty()) {
        std::nth_element(steps.begin(), steps.begin() + steps.size() / 2,
                         steps.end());
        med_step = steps[steps.size() / 2];
    }

    auto crossed_by_band = [&](double a, double b) {
        for (int band = 0; band < nb; ++band) {
            for (size_t i = 0; i + 1 < half.samples.size(); ++i) {
                const double v0 = half.samples[i]->values[band].real();
                const double v1 = half.samples[i + 1]->values[band].real();
                if ((v0 <= a && v1 >= b) || (v1 <= a && v0 >= b)) return true;
            }
        }
        return false;
    };

    std::vector<Interval> gaps;
    double prev = lo;
    auto consider = [&](double a, double b) {
        if (b - a <= 0.0) return;
        if (b - a < 2.0 * med_step || crossed_by_band(a, b)) {
            ++(*suppressed);
            return;
        }
        gaps.push_back({a, b});
    };
    for (double v : vals) {
        if (v > prev) consider(prev, v);
        prev = std::max(prev, v);
    }
    if (hi > prev) consider(prev, hi);
    return gaps;
}

} // namespace

std::vector<Interval> interval_difference(const std::vector<Interval> &a,
                                          const std::vector<Interval> &b) {
    std::vector<Interval> out;
    for (const auto &x : a) {
        std::vector<Interval> segs{x};
        for (const auto &y : b) {
            std::vector<Interval> next;
            for (const auto &s : segs) {
                if (y.hi <= s.lo || y.lo >= s.hi) {
                    next.push_back(s);
                    continue;
                }
                if (s.lo < y.lo) next.push_back({s.lo, y.lo});
                if (y.hi < s.hi) next.push_back({y.hi, s.hi});
            }
            segs = std::move(next);
        }
        for (const auto &s : segs) {
            if (s.width() > 1e-12) out.push_back(s);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Interval &x, const Interval &y) { return x.lo < y.lo; });
    return out;
}

GapReport gap_analysis(const BandDiagram &diagram) {
    HalfData fw, bw;
    for (const auto &s : diagram.samples) {
        if (lex_positive(s.alpha)) {
            fw.samples.push_back(&s);
        } else if (lex_positive(Vec2(-s.alpha))) {
            bw.samples.push_back(&s);
        } else {
            fw.samples.push_back(&s); // self-mirrored (Gamma) in both halves
            bw.samples.push_back(&s);
        }
    }
    GapReport report;
    int suppressed = 0;
    report.forward = find_gaps(fw, diagram.omega, &suppressed);
    report.backward = find_gaps(bw, diagram.omega, &suppressed);
    report.sub_resolution = suppressed;
    auto uni = interval_difference(report.forward, report.backward);
    const auto rev = interval_difference(report.backward, report.forward);
    uni.insert(uni.end(), rev.begin(), rev.end());
    std::sort(uni.begin(), uni.end(),
              [](const Interval &x, const Interval &y) { return x.lo < y.lo; });
    report.unidirectional = std::move(uni);
    return report;
}

SweepResult epsilon_sweep(const std::shared_ptr<const CapacitanceProvider> &cap,
                          const ModulationProfile &profile,
                          const CouplingParams &coupling, const Vec2 &alpha_deg,
                          std::complex<double> f0, const Vec2 &alpha_ref,
                          const std::vector<double> &eps_grid,
                          const IntegratorTolerance &tol) {
    SweepResult result;
    const double w0 = f0.imag(); // folded quasifrequency of the degeneracy

    auto qf_at = [&](const Vec2 &alpha, double eps) {
        CapacitanceMatrix cm;
        cm.alpha = alpha;
        cm.entries = cap->at(alpha);
        const TimeMatrix tm = assemble_m(profile.with_epsilon(eps), cm, coupling);
        const MonodromyMatrix mono = monodromy(first_order_system(tm), tol);
        return quasifrequencies(mono, profile.omega, alpha).values;
    };

    const auto ref0 = qf_at(alpha_ref, 0.0);
    // track the band farthest from its neighbors (stable identification)
    int track = 0;
    double best_iso = -1.0;
    for (size_t j = 0; j < ref0.size(); ++j) {
        double iso = 1e300;
        for (size_t k = 0; k < ref0.size(); ++k) {
            if (k != j) iso = std::min(iso, std::abs(ref0[j] - ref0[k]));
        }
        if (iso > best_iso) {
            best_iso = iso;
            track = static_cast<int>(j);
        }
    }

    for (double eps : eps_grid) {
        SweepRow row;
        row.epsilon = eps;
        const auto qd = qf_at(alpha_deg, eps);
        // the two branches nearest the degenerate value
        std::vector<std::pair<double, int>> byd;
        for (size_t j = 0; j < qd.size(); ++j) {
            byd.push_back(
                {std::abs(qd[j] - std::complex<double>(w0, 0.0)),
                 static_cast<int>(j)});
        }
        std::sort(byd.begin(), byd.end());
        const double split =
            std::abs(qd[byd[0].second] - qd[byd[1].second]);
        if (eps > 0.0 && split < 1e-9) {
            row.splitting.reset(); // censored: branch tracking ambiguous
        } else {
            row.splitting = split;
        }
        const auto qr = qf_at(alpha_ref, eps);
        double shift = 1e300;
        for (const auto &v : qr) shift = std::min(shift, std::abs(v - ref0[track]));
        row.shift = shift;
        result.rows.push_back(row);
    }

    // log-log fits over strictly positive entries at eps > 0
    auto fit = [](const std::vector<std::pair<double, double>> &xy) {
        if (xy.size() < 2) return 0.0;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [x, y] : xy) {
            const double lx = std::log(x), ly = std::log(y);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        const double n = static_cast<double>(xy.size());
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    std::vector<std::pair<double, double>> sp, sh;
    for (const auto &row : result.rows) {
        if (row.epsilon <= 0.0) continue;
        if (row.splitting && *row.splitting > 0.0) sp.push_back({row.epsilon, *row.splitting});
        if (row.shift > 0.0) sh.push_back({row.epsilon, row.shift});
    }
    result.splitting_exponent = fit(sp);
    result.shift_exponent = fit(sh);
    return result;
}

} // namespace ftb
