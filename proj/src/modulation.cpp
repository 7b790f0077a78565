#include "ftb/modulation.hpp"

#include "ftb/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ftb {

namespace {
constexpr double kPi = std::numbers::pi;
}

FourierSeries::FourierSeries(std::map<int, std::complex<double>> coeffs) {
    for (const auto &[n, c] : coeffs) {
        if (std::abs(c) == 0.0) continue;
        coeffs_[n] = c;
        max_order_ = std::max(max_order_, std::abs(n));
    }
    // realness: c_{-n} must equal conj(c_n)
    for (const auto &[n, c] : coeffs_) {
        const auto it = coeffs_.find(-n);
        const std::complex<double> other =
            it == coeffs_.end() ? std::complex<double>(0.0) : it->second;
        if (std::abs(other - std::conj(c)) > 1e-12 * (1.0 + std::abs(c))) {
            std::ostringstream os;
            os << "Fourier series not real-valued: c(" << -n
               << ") != conj c(" << n << ")";
            throw ConfigError(os.str());
        }
    }
}

std::complex<double> FourierSeries::coeff(int n) const {
    const auto it = coeffs_.find(n);
    return it == coeffs_.end() ? std::complex<double>(0.0) : it->second;
}

double FourierSeries::eval(double phase) const {
    std::complex<double> acc(0.0);
    for (const auto &[n, c] : coeffs_) {
        acc += c * std::exp(std::complex<double>(0.0, n * phase));
    }
    return acc.real();
}

double FourierSeries::deriv(double phase) const {
    std::complex<double> acc(0.0);
    for (const auto &[n, c] : coeffs_) {
        acc += c * std::complex<double>(0.0, n) *
               std::exp(std::complex<double>(0.0, n * phase));
    }
    return acc.real();
}

double FourierSeries::deriv2(double phase) const {
    std::complex<double> acc(0.0);
    for (const auto &[n, c] : coeffs_) {
        acc += c * std::complex<double>(-static_cast<double>(n) * n, 0.0) *
               std::exp(std::complex<double>(0.0, n * phase));
    }
    return acc.real();
}

double ModulationProfile::period() const { return 2.0 * kPi / omega; }

ModulationProfile ModulationProfile::with_epsilon(double eps) const {
    if (epsilon == 0.0) {
        if (eps == 0.0) return *this;
        throw ConfigError("cannot rescale a static profile to nonzero epsilon");
    }
    const double scale = eps / epsilon;
    ModulationProfile out = *this;
    out.epsilon = eps;
    auto rescale = [scale](const FourierSeries &s) {
        std::map<int, std::complex<double>> c = s.coeffs();
        for (auto &[n, v] : c) {
            if (n != 0) v *= scale;
        }
        return FourierSeries(std::move(c));
    };
    for (int i = 0; i < n; ++i) {
        out.rho_inv[i] = rescale(rho_inv[i]);
        out.kappa_inv[i] = rescale(kappa_inv[i]);
    }
    return out;
}

void ModulationProfile::validate() const {
    if (n <= 0) throw ConfigError("profile resonator count must be positive");
    if (omega <= 0.0) throw ConfigError("modulation frequency must be positive");
    if (epsilon < 0.0 || epsilon >= 1.0) {
        throw ConfigError("epsilon must lie in [0, 1)");
    }
    if (static_cast<int>(rho_inv.size()) != n ||
        static_cast<int>(kappa_inv.size()) != n) {
        throw ConfigError("profile series count mismatch");
    }
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < 1024; ++k) {
            const double phase = 2.0 * kPi * k / 1024.0;
            if (rho_inv[i].eval(phase) <= 0.0) {
                throw ConfigError("1/rho must stay positive over the period");
            }
            if (kappa_inv[i].eval(phase) <= 0.0) {
                throw ConfigError("1/kappa must stay positive over the period");
            }
        }
    }
}

ModulationProfile cosine_profile(int n, double omega, double epsilon,
                                 const std::vector<double> &phases) {
    if (static_cast<int>(phases.size()) != n) {
        throw ConfigError("cosine_profile: phases length must equal N");
    }
    ModulationProfile p;
    p.n = n;
    p.omega = omega;
    p.epsilon = epsilon;
    p.phases = phases;
    p.cosine_family = true;
    for (int i = 0; i < n; ++i) {
        std::map<int, std::complex<double>> r;
        r[0] = 1.0;
        if (epsilon != 0.0) {
            r[1] = 0.5 * epsilon * std::exp(std::complex<double>(0.0, phases[i]));
            r[-1] = std::conj(r[1]);
        }
        p.rho_inv.emplace_back(std::move(r));
        p.kappa_inv.emplace_back(std::map<int, std::complex<double>>{{0, 1.0}});
    }
    p.validate();
    return p;
}

ModulationProfile two_harmonic_profile(int n, double omega, double epsilon,
                                       const std::vector<double> &phases,
                                       double a2,
                                       const std::vector<double> &phases2) {
    if (static_cast<int>(phases.size()) != n ||
        static_cast<int>(phases2.size()) != n) {
        throw ConfigError("two_harmonic_profile: phase lists must have length N");
    }
    ModulationProfile p;
    p.n = n;
    p.omega = omega;
    p.epsilon = epsilon;
    p.phases = phases;
    p.cosine_family = false;
    for (int i = 0; i < n; ++i) {
        std::map<int, std::complex<double>> r;
        r[0] = 1.0;
        if (epsilon != 0.0) {
            r[1] = 0.5 * epsilon * std::exp(std::complex<double>(0.0, phases[i]));
            r[-1] = std::conj(r[1]);
            r[2] = 0.5 * epsilon * a2 *
                   std::exp(std::complex<double>(0.0, phases2[i]));
            r[-2] = std::conj(r[2]);
        }
        p.rho_inv.emplace_back(std::move(r));
        p.kappa_inv.emplace_back(std::map<int, std::complex<double>>{{0, 1.0}});
    }
    p.validate();
    return p;
}

CouplingParams CouplingParams::for_layout(const ResonatorLayout &layout,
                                          double delta, double kappa_r,
                                          double rho_r) {
    CouplingParams c;
    c.delta = delta;
    c.kappa_r = kappa_r;
    c.rho_r = rho_r;
    c.volumes = layout.volumes();
    c.validate(layout.size());
    return c;
}

void CouplingParams::validate(int n) const {
    if (delta <= 0.0 || delta > 1e-2) {
        throw ConfigError("delta must lie in (0, 1e-2] (subwavelength regime)");
    }
    if (kappa_r <= 0.0 || rho_r <= 0.0) {
        throw ConfigError("kappa_r and rho_r must be positive");
    }
    if (static_cast<int>(volumes.size()) != n) {
        throw ConfigError("coupling volume count mismatch");
    }
    for (double v : volumes) {
        if (v <= 0.0) throw ConfigError("volumes must be positive");
    }
}

TimeMatrix::TimeMatrix(ModulationProfile profile, Eigen::MatrixXcd capacitance,
                       CouplingParams coupling)
    : profile_(std::move(profile)), cap_(std::move(capacitance)),
      coupling_(std::move(coupling)) {
    if (cap_.rows() != profile_.n || cap_.cols() != profile_.n) {
        throw ConfigError("capacitance size does not match profile");
    }
    coupling_.validate(profile_.n);
}

Eigen::MatrixXcd TimeMatrix::at(double t) const {
    const int n = profile_.n;
    const double phase = profile_.omega * t;
    Eigen::VectorXd w1(n), w2(n), w3(n);
    for (int i = 0; i < n; ++i) {
        const double ri = 1.0 / profile_.rho_inv[i].eval(phase); // rho_i(t)
        const double si = profile_.kappa_inv[i].eval(phase);     // 1/kappa_i
        const double ki = 1.0 / si;                              // kappa_i(t)
        const double sqk = std::sqrt(ki);
        w1(i) = sqk * ri / coupling_.volumes[i];
        w2(i) = sqk / ri;
        // W3 = kappa''/(2 kappa) - (3/4)(kappa'/kappa)^2, expressed through
        // the stored series s = 1/kappa:  W3 = -s''/(2s) + (1/4)(s'/s)^2,
        // derivatives in t = Omega * d/d(phase).
        const double om = profile_.omega;
        const double sp = profile_.kappa_inv[i].deriv(phase) * om;
        const double spp = profile_.kappa_inv[i].deriv2(phase) * om * om;
        w3(i) = -spp / (2.0 * si) + 0.25 * (sp / si) * (sp / si);
    }
    const double k = coupling_.delta * coupling_.kappa_r / coupling_.rho_r;
    Eigen::MatrixXcd m = k * (w1.asDiagonal() * cap_ * w2.asDiagonal());
    m += w3.cast<std::complex<double>>().asDiagonal();
    return m;
}

const std::map<int, Eigen::MatrixXcd> &TimeMatrix::fourier_coefficients() const {
    if (fourier_done_) return fourier_;
    const int grid = 1024;
    const int n = profile_.n;
    std::vector<Eigen::MatrixXcd> samples(grid);
    double maxnorm = 0.0;
    for (int g = 0; g < grid; ++g) {
        samples[g] = at(g * period() / grid);
        maxnorm = std::max(maxnorm, samples[g].norm());
    }
    int max_harm = 1;
    for (int i = 0; i < n; ++i) {
        max_harm = std::max({max_harm, profile_.rho_inv[i].max_order(),
                             profile_.kappa_inv[i].max_order()});
    }
    // products of finite series through 1/rho leak into all harmonics;
    // keep extending until the coefficients fall below roundoff scale
    const int hard_cap = grid / 4;
    for (int k = 0; k <= hard_cap; ++k) {
        Eigen::MatrixXcd cp = Eigen::MatrixXcd::Zero(n, n);
        Eigen::MatrixXcd cm = Eigen::MatrixXcd::Zero(n, n);
        for (int g = 0; g < grid; ++g) {
            const double ang = -2.0 * kPi * k * g / grid;
            cp += samples[g] * std::exp(std::complex<double>(0.0, ang));
            if (k > 0) cm += samples[g] * std::exp(std::complex<double>(0.0, -ang));
        }
        cp /= grid;
        cm /= grid;
        const bool keep_p = cp.norm() > 1e-14 * maxnorm;
        const bool keep_m = k > 0 && cm.norm() > 1e-14 * maxnorm;
        if (keep_p) fourier_[k] = cp;
        if (keep_m) fourier_[-k] = cm;
        if (k > max_harm + 2 && !keep_p && !keep_m) break;
    }
    fourier_done_ = true;
    return fourier_;
}

TimeMatrix TimeMatrix::at_epsilon(double eps) const {
    return TimeMatrix(profile_.with_epsilon(eps), cap_, coupling_);
}

TimeMatrix assemble_m(const ModulationProfile &profile,
                      const CapacitanceMatrix &capacitance,
                      const CouplingParams &coupling) {
    profile.validate();
    return TimeMatrix(profile, capacitance.entries, coupling);
}

Eigen::MatrixXcd EpsExpansion::m1_coeff(int harmonic) const {
    const auto it = m1.find(harmonic);
    if (it != m1.end()) return it->second;
    if (std::abs(harmonic) > max_order) {
        std::ostringstream os;
        os << "insufficient harmonics: order " << harmonic
           << " beyond represented band " << max_order;
        throw NumericalError(os.str());
    }
    return Eigen::MatrixXcd::Zero(m0.rows(), m0.cols());
}

EpsExpansion eps_expansion(const TimeMatrix &tm) {
    const auto &prof = tm.profile();
    const int n = prof.n;
    EpsExpansion out;
    out.m0 = tm.at_epsilon(0.0).at(0.0);

    if (prof.cosine_family) {
        // M1_ij = K_ij C_ij (cos(Omega t + phi_j) - cos(Omega t + phi_i)):
        // harmonic +1 coefficient K_ij C_ij (e^{i phi_j} - e^{i phi_i}) / 2.
        const double k = tm.coupling().delta * tm.coupling().kappa_r /
                         tm.coupling().rho_r;
        Eigen::MatrixXcd m1p(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const std::complex<double> ei =
                    std::exp(std::complex<double>(0.0, prof.phases[i]));
                const std::complex<double> ej =
                    std::exp(std::complex<double>(0.0, prof.phases[j]));
                m1p(i, j) = k / tm.coupling().volumes[i] *
                            tm.capacitance()(i, j) * 0.5 * (ej - ei);
            }
        }
        if (m1p.norm() > 0.0) {
            out.m1[1] = m1p;
            out.m1[-1] = m1p.conjugate(); // real family: conj of +1 entries
        }
        out.max_order = std::numeric_limits<int>::max();
        out.truncation_error = 0.0;
        return out;
    }

    // numeric path: central differences of the Fourier coefficients at
    // eps = +-h with a Richardson consistency check at +-h/2
    const double h = 1e-4;
    auto coeffs_at = [&](double e) { return tm.at_epsilon(e).fourier_coefficients(); };
    const auto cp = coeffs_at(h);
    const auto cm = coeffs_at(-h);
    const auto cp2 = coeffs_at(h / 2.0);
    const auto cm2 = coeffs_at(-h / 2.0);
    std::map<int, Eigen::MatrixXcd> d1, d2;
    int max_order = 0;
    auto diff = [&](const std::map<int, Eigen::MatrixXcd> &a,
                    const std::map<int, Eigen::MatrixXcd> &b, double step,
                    std::map<int, Eigen::MatrixXcd> &dst) {
        for (const auto &[k, v] : a) {
            Eigen::MatrixXcd other = Eigen::MatrixXcd::Zero(n, n);
            if (auto it = b.find(k); it != b.end()) other = it->second;
            dst[k] = (v - other) / (2.0 * step);
            max_order = std::max(max_order, std::abs(k));
        }
        for (const auto &[k, v] : b) {
            if (!dst.count(k)) {
                dst[k] = -v / (2.0 * step);
                max_order = std::max(max_order, std::abs(k));
            }
        }
    };
    diff(cp, cm, h, d1);
    diff(cp2, cm2, h / 2.0, d2);
    double norm1 = 0.0, err = 0.0;
    for (const auto &[k, v] : d1) {
        norm1 += v.squaredNorm();
        Eigen::MatrixXcd fine = Eigen::MatrixXcd::Zero(n, n);
        if (auto it = d2.find(k); it != d2.end()) fine = it->second;
        err += (v - fine).squaredNorm();
    }
    out.truncation_error = std::sqrt(err) / std::max(std::sqrt(norm1), 1e-300);
    if (!(out.truncation_error <= 1e-8)) {
        std::ostringstream os;
        os << "eps-expansion truncation error " << out.truncation_error
           << " exceeds 1e-8 relative";
        throw NumericalError(os.str());
    }
    for (auto &[k, v] : d2) {
        if (v.norm() > 1e-12 * std::max(1.0, out.m0.norm())) out.m1[k] = v;
    }
    out.max_order = max_order;
    return out;
}

} // namespace ftb
