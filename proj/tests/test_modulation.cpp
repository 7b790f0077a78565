#include "ftb/modulation.hpp"

#include "ftb/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

using namespace ftb;
using namespace std::complex_literals;

namespace {
constexpr double kPi = std::numbers::pi;

CapacitanceMatrix test_capacitance() {
    CapacitanceMatrix cm;
    cm.alpha = Vec2(0.9, 0.4);
    cm.entries.resize(3, 3);
    cm.entries << 3.0, -0.5 + 0.2i, -0.3 - 0.1i, //
        -0.5 - 0.2i, 3.2, -0.45 + 0.05i,          //
        -0.3 + 0.1i, -0.45 - 0.05i, 2.9;
    return cm;
}

CouplingParams test_coupling(int n) {
    CouplingParams c;
    c.delta = 1e-3;
    c.kappa_r = c.rho_r = 1.0;
    c.volumes.assign(n, kPi * 0.01);
    return c;
}

} // namespace

TEST_CASE("static cosine profile is identically one") {
    const auto p = cosine_profile(3, 0.3, 0.0, {0.0, 1.0, 2.0});
    for (int i = 0; i < 3; ++i) {
        for (double t : {0.0, 1.7, 5.2}) {
            CHECK(p.rho_inv[i].eval(0.3 * t) == doctest::Approx(1.0));
            CHECK(p.kappa_inv[i].eval(0.3 * t) == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("cosine profile has exactly three rho harmonics") {
    const double eps = 0.4;
    const auto p = cosine_profile(3, 0.3, eps, {0.0, kPi / 2, kPi});
    const std::complex<double> expected[3] = {eps / 2.0, eps / 2.0 * 1.0i,
                                              -eps / 2.0};
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(p.rho_inv[i].coeff(0) - 1.0) < 1e-15);
        CHECK(std::abs(p.rho_inv[i].coeff(1) - expected[i]) < 1e-15);
        CHECK(std::abs(p.rho_inv[i].coeff(-1) - std::conj(expected[i])) < 1e-15);
        CHECK(p.rho_inv[i].coeff(2) == 0.0);
        CHECK(std::abs(p.kappa_inv[i].coeff(0) - 1.0) < 1e-15);
    }
}

TEST_CASE("honeycomb pairing phases") {
    std::vector<double> ph = {0.0,       2 * kPi / 3, 4 * kPi / 3,
                              0.0,       2 * kPi / 3, 4 * kPi / 3};
    const auto p = cosine_profile(6, 0.2, 0.3, ph);
    CHECK(std::abs(p.rho_inv[0].coeff(1) - p.rho_inv[3].coeff(1)) < 1e-15);
    CHECK(std::abs(p.rho_inv[1].coeff(1) - p.rho_inv[4].coeff(1)) < 1e-15);
    CHECK(std::abs(p.rho_inv[2].coeff(1) - p.rho_inv[5].coeff(1)) < 1e-15);
}

TEST_CASE("epsilon >= 1 violates positivity") {
    CHECK_THROWS_AS(cosine_profile(2, 0.3, 1.0, {0.0, 0.0}), ConfigError);
}

TEST_CASE("assembled M obeys the rho-ratio closed form") {
    const auto cm = test_capacitance();
    const auto coup = test_coupling(3);
    const std::vector<double> ph = {0.1, 1.3, 2.6};
    const double eps = 0.3, om = 0.3;
    const auto tm = assemble_m(cosine_profile(3, om, eps, ph), cm, coup);
    const double K = coup.delta * coup.kappa_r / (coup.rho_r * coup.volumes[0]);
    for (double t : {0.0, 3.3, 11.8}) {
        const Eigen::MatrixXcd m = tm.at(t);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double ri = 1.0 / (1.0 + eps * std::cos(om * t + ph[i]));
                const double rj = 1.0 / (1.0 + eps * std::cos(om * t + ph[j]));
                const std::complex<double> want =
                    K * cm.entries(i, j) * (ri / rj);
                CHECK(std::abs(m(i, j) - want) < 1e-13 * std::abs(want) + 1e-16);
            }
        }
        // diagonal entries are time-independent (rho_i / rho_i = 1)
        CHECK(std::abs(m(0, 0) - K * cm.entries(0, 0)) < 1e-15);
    }
}

TEST_CASE("epsilon zero gives the static matrix") {
    const auto cm = test_capacitance();
    const auto coup = test_coupling(3);
    const auto tm =
        assemble_m(cosine_profile(3, 0.3, 0.0, {0.0, 0.0, 0.0}), cm, coup);
    const Eigen::MatrixXcd m0 = tm.at(0.0);
    CHECK((tm.at(7.7) - m0).norm() < 1e-15 * m0.norm());
    const double K = coup.delta / coup.volumes[0];
    CHECK((m0 - K * cm.entries).norm() < 1e-14 * m0.norm());
}

TEST_CASE("Fourier reconstruction matches the evaluator") {
    const auto cm = test_capacitance();
    const auto tm = assemble_m(cosine_profile(3, 0.3, 0.45, {0.0, 2.1, 4.4}),
                               cm, test_coupling(3));
    const auto &coeffs = tm.fourier_coefficients();
    double max_err = 0.0, max_norm = 0.0;
    for (int g = 0; g < 256; ++g) {
        const double t = g * tm.period() / 256.0;
        Eigen::MatrixXcd rec = Eigen::MatrixXcd::Zero(3, 3);
        for (const auto &[k, c] : coeffs) {
            rec += c * std::exp(std::complex<double>(0.0, k * tm.omega() * t));
        }
        const Eigen::MatrixXcd m = tm.at(t);
        max_err = std::max(max_err, (m - rec).norm());
        max_norm = std::max(max_norm, m.norm());
    }
    CHECK(max_err <= 1e-10 * max_norm);
}

TEST_CASE("W3 vanishes for constant kappa and is exact for modulated kappa") {
    const auto cm = test_capacitance();
    auto coup = test_coupling(3);
    // kappa-modulated profile built from explicit tables
    ModulationProfile p;
    p.n = 3;
    p.omega = 0.4;
    p.epsilon = 0.2;
    p.cosine_family = false;
    p.phases.assign(3, 0.0);
    for (int i = 0; i < 3; ++i) {
        p.rho_inv.emplace_back(std::map<int, std::complex<double>>{{0, 1.0}});
        std::map<int, std::complex<double>> kap{{0, 1.0}};
        if (i == 0) {
            kap[1] = std::complex<double>(0.1, 0.05);
            kap[-1] = std::conj(kap[1]);
        }
        p.kappa_inv.emplace_back(std::move(kap));
    }
    p.validate();
    const auto tm = assemble_m(p, cm, coup);
    // finite-difference check of W3 = sqrt(k)/2 d/dt (k'/k^{3/2}) on entry 0
    const double h = 1e-5;
    auto kappa0 = [&](double t) { return 1.0 / p.kappa_inv[0].eval(p.omega * t); };
    for (double t : {0.3, 2.9}) {
        const double k0 = kappa0(t);
        const double kp = (kappa0(t + h) - kappa0(t - h)) / (2 * h);
        const double g_p = (kappa0(t + 2 * h) - 2 * kappa0(t + h) + kappa0(t)) /
                           (h * h); // crude second derivative at t+h
        (void)g_p;
        auto inner = [&](double tt) {
            const double k = kappa0(tt);
            const double kd = (kappa0(tt + h) - kappa0(tt - h)) / (2 * h);
            return kd / std::pow(k, 1.5);
        };
        const double w3_fd = std::sqrt(k0) / 2.0 *
                             (inner(t + h) - inner(t - h)) / (2 * h);
        const std::complex<double> m00 = tm.at(t)(0, 0);
        const double K = coup.delta / coup.volumes[0];
        const double w1w2 = k0 / coup.volumes[0] * coup.volumes[0]; // sqrt(k)^2
        const std::complex<double> coupling_part =
            K * cm.entries(0, 0) * w1w2;
        CHECK(std::abs((m00 - coupling_part).real() - w3_fd) < 5e-6);
        CHECK(kp == kp); // silence unused warnings in release builds
    }
}

TEST_CASE("eps expansion: equal phases give vanishing M1") {
    const auto cm = test_capacitance();
    const auto tm = assemble_m(cosine_profile(3, 0.3, 0.2, {1.1, 1.1, 1.1}), cm,
                               test_coupling(3));
    const auto exp = eps_expansion(tm);
    for (const auto &[k, v] : exp.m1) CHECK(v.norm() < 1e-14);
}

TEST_CASE("eps expansion closed form at phases (0, pi/2)") {
    CapacitanceMatrix cm;
    cm.entries.resize(2, 2);
    cm.entries << 2.0, -0.4 + 0.3i, -0.4 - 0.3i, 2.5;
    CouplingParams coup = test_coupling(2);
    const auto tm =
        assemble_m(cosine_profile(2, 0.3, 0.15, {0.0, kPi / 2}), cm, coup);
    const auto exp = eps_expansion(tm);
    const double K = coup.delta / coup.volumes[0];
    const std::complex<double> want =
        K * cm.entries(0, 1) * (1.0i - 1.0) / 2.0;
    CHECK(std::abs(exp.m1_coeff(1)(0, 1) - want) < 1e-12);
    // n = 0 coefficient vanishes for the cosine family
    CHECK(exp.m1_coeff(0).norm() < 1e-12);
}

TEST_CASE("analytic and numeric eps expansions agree") {
    const auto cm = test_capacitance();
    const auto coup = test_coupling(3);
    const std::vector<double> ph = {0.0, kPi / 2, kPi};
    const auto tm = assemble_m(cosine_profile(3, 0.3, 0.2, ph), cm, coup);
    const auto analytic = eps_expansion(tm);
    // route the same profile through the numeric path
    ModulationProfile generic = tm.profile();
    generic.cosine_family = false;
    const auto numeric = eps_expansion(TimeMatrix(generic, cm.entries, coup));
    for (const auto &[k, v] : analytic.m1) {
        const double rel =
            (numeric.m1_coeff(k) - v).norm() / std::max(v.norm(), 1e-300);
        CHECK(rel < 1e-7);
    }
    CHECK((numeric.m0 - analytic.m0).norm() < 1e-12 * analytic.m0.norm());
}

TEST_CASE("time-reversal symmetry detector for equal phases") {
    const auto cm = test_capacitance();
    const double phi = 0.8, om = 0.3;
    const auto tm = assemble_m(cosine_profile(3, om, 0.3, {phi, phi, phi}), cm,
                               test_coupling(3));
    const double t0 = -2.0 * phi / om;
    double worst = 0.0, scale = 0.0;
    for (int g = 0; g < 64; ++g) {
        const double t = g * tm.period() / 64.0;
        worst = std::max(worst, (tm.at(t) - tm.at(t0 - t)).norm());
        scale = std::max(scale, tm.at(t).norm());
    }
    CHECK(worst <= 1e-12 * scale);
}
