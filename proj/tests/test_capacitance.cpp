#include "ftb/capacitance.hpp"

#include "ftb/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

using namespace ftb;

namespace {
constexpr double kPi = std::numbers::pi;

ResonatorLayout square3() { return standard_layout(LayoutKind::square3, 0.1); }

// Fine-grid quadrature of int_{dD_q} G(x, y) ds(y) with the log part handled
// analytically; independent of the Nystrom assembly.
std::complex<double> single_layer_on_constant(const ResonatorLayout &lay,
                                              const Vec2 &alpha, int q,
                                              const Vec2 &x, bool x_on_q,
                                              int nfine) {
    const QuasiperiodicGreen green(lay.lattice, alpha, GreenParams{12, 64});
    const double R = lay.radii[q];
    const Vec2 c = lay.centers[q];
    std::complex<double> acc(0.0);
    if (!x_on_q) {
        for (int j = 0; j < nfine; ++j) {
            const double th = (j + 0.5) * 2.0 * kPi / nfine;
            acc += green.value(x, c + R * Vec2(std::cos(th), std::sin(th)));
        }
        return acc * (2.0 * kPi * R / nfine);
    }
    // x = c + R (cos t0, sin t0): split off ln(2R|sin|)/2pi whose integral
    // over the circle is R * 2pi * ln(R) / (2pi) = R ln R... careful:
    // int_0^{2pi} ln(2|sin(u/2)|) du = 0, so int ln|x-y| R du = 2 pi R ln R.
    const double t0 = std::atan2(x.y() - c.y(), x.x() - c.x());
    for (int j = 0; j < nfine; ++j) {
        const double th = t0 + (j + 0.5) * 2.0 * kPi / nfine;
        const Vec2 y = c + R * Vec2(std::cos(th), std::sin(th));
        const double s = 2.0 * std::abs(std::sin((t0 - th) / 2.0));
        acc += green.value(x, y) - std::log(s * R) / (2.0 * kPi);
    }
    return acc * (2.0 * kPi * R / nfine) + R * std::log(R);
}

} // namespace

TEST_CASE("nystrom matrix size is N*Mb") {
    const auto lay = square3();
    const Eigen::MatrixXcd a =
        assemble_single_layer(lay, Vec2(1.0, 0.7), GreenParams{4, 64});
    CHECK(a.rows() == 192);
    CHECK(a.cols() == 192);
}

TEST_CASE("operator on a constant density matches fine-grid quadrature") {
    const auto lay = square3();
    const Vec2 alpha(0.9, 0.6);
    const GreenParams params{4, 32};
    const Eigen::MatrixXcd a = assemble_single_layer(lay, alpha, params);
    const int M = params.quadrature_points;
    Eigen::VectorXcd density = Eigen::VectorXcd::Zero(3 * M);
    density.segment(M, M).setOnes(); // constant on disk 1
    const Eigen::VectorXcd pot = a * density;

    // target node 0 on disk 0 (smooth case) and node 3 on disk 1 (self case)
    const auto node = [&](int disk, int j) {
        const double th = (j + 0.5) * 2.0 * kPi / M;
        return Vec2(lay.centers[disk] +
                    lay.radii[disk] * Vec2(std::cos(th), std::sin(th)));
    };
    const auto ref_smooth =
        single_layer_on_constant(lay, alpha, 1, node(0, 0), false, 4096);
    CHECK(std::abs(pot(0) - ref_smooth) < 1e-5 * std::abs(ref_smooth) + 1e-9);
    const auto ref_self =
        single_layer_on_constant(lay, alpha, 1, node(1, 3), true, 8192);
    CHECK(std::abs(pot(M + 3) - ref_self) < 1e-5 * std::abs(ref_self) + 1e-7);
}

TEST_CASE("condition number finite at the M point") {
    const auto lay = square3();
    const Eigen::MatrixXcd a =
        assemble_single_layer(lay, Vec2(kPi, kPi), GreenParams{4, 32});
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    const double cond = svd.singularValues()(0) /
                        svd.singularValues()(svd.singularValues().size() - 1);
    CHECK(cond < 1e8);
}

TEST_CASE("single resonator capacitance is a positive real scalar") {
    ResonatorLayout lay;
    lay.lattice = Lattice::unit_square();
    lay.centers = {Vec2(0.5, 0.5)};
    lay.radii = {0.1};
    const auto cm = capacitance_matrix(lay, Vec2(1.1, 0.3), GreenParams{4, 32});
    REQUIRE(cm.size() == 1);
    CHECK(std::abs(cm.entries(0, 0).imag()) < 1e-12);
    CHECK(cm.entries(0, 0).real() > 0.0);
}

TEST_CASE("hermiticity and conjugation at random quasimomenta") {
    const auto lay = square3();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int trial = 0; trial < 5; ++trial) {
        Vec2 a(u(rng), u(rng));
        if (a.norm() < 0.3) a += Vec2(1.0, 0.5);
        const auto cp = capacitance_matrix(lay, a, GreenParams{4, 32});
        const auto cmn = capacitance_matrix(lay, Vec2(-a), GreenParams{4, 32});
        CHECK(cp.hermitian_defect <= 1e-8);
        const double conj_res = (cmn.entries - cp.entries.transpose()).norm() /
                                cp.entries.norm();
        CHECK(conj_res <= 1e-8);
    }
}

TEST_CASE("quadrature refinement: Mb 64 vs 128") {
    const auto lay = square3();
    const Vec2 a(kPi / 3, kPi / 7);
    const auto c64 = capacitance_matrix(lay, a, GreenParams{12, 64});
    const auto c128 = capacitance_matrix(lay, a, GreenParams{12, 128});
    CHECK((c64.entries - c128.entries).norm() <= 1e-6 * c128.entries.norm());
}

TEST_CASE("truncation refinement: Q 12 vs 24") {
    const auto lay = square3();
    const Vec2 a(1.3, -0.8);
    const auto c1 = capacitance_matrix(lay, a, GreenParams{12, 64});
    const auto c2 = capacitance_matrix(lay, a, GreenParams{24, 64});
    CHECK((c1.entries - c2.entries).norm() <= 1e-5 * c2.entries.norm());
}

TEST_CASE("capacitance field flags the Gamma sample and computes neighbors") {
    const auto lay = square3();
    const BrillouinPath path = symmetry_path(PathKind::chain, 9);
    const auto field = capacitance_field(lay, path, GreenParams{4, 32}, 2);
    REQUIRE(field.size() == 9);
    CHECK(field[4].singular); // alpha = 0
    CHECK_FALSE(field[3].singular);
    CHECK(field[3].matrix.size() == 3);
    // purity: same sample recomputed standalone gives identical entries
    const auto lone =
        capacitance_matrix(lay, path.points[3].alpha, GreenParams{4, 32});
    CHECK((lone.entries - field[3].matrix.entries).norm() == 0.0);
}

TEST_CASE("field save/load round-trip is numerically identical") {
    const auto lay = square3();
    const BrillouinPath path = symmetry_path(PathKind::chain, 5);
    const auto field = capacitance_field(lay, path, GreenParams{4, 32}, 2);
    const std::string file = "roundtrip_field.txt";
    save_capacitance_field(file, field);
    const auto loaded = load_capacitance(file);
    size_t k = 0;
    for (const auto &f : field) {
        if (f.singular) continue;
        REQUIRE(k < loaded.size());
        CHECK((loaded[k].entries - f.matrix.entries).norm() == 0.0);
        CHECK(loaded[k].alpha.x() == f.alpha.x());
        ++k;
    }
    std::remove(file.c_str());
}

TEST_CASE("load rejects a non-Hermitian matrix") {
    const std::string file = "bad_field.txt";
    {
        std::ofstream out(file);
        out << "N 2 D 2\n";
        out << "alpha 0.5 0.25\n";
        out << "1 0 0.5 0.1\n";
        out << "0.9 0.2 2 0\n"; // C21 != conj(C12)
    }
    CHECK_THROWS_AS(load_capacitance(file), ValidationError);
    std::remove(file.c_str());
}

TEST_CASE("synthetic 3-resonator field loads and stays Hermitian") {
    const std::string file = "synthetic_field.txt";
    {
        std::ofstream out(file);
        out << "N 3 D 2\n";
        for (double a1 : {-0.7, 0.7}) {
            out << "alpha " << a1 << " 0\n";
            // Hermitian by construction, conjugation-symmetric in a1
            const double c = std::cos(a1), s = std::sin(a1);
            out << "3 0 " << -0.5 * c << ' ' << -0.5 * s << " 0 0\n";
            out << -0.5 * c << ' ' << 0.5 * s << " 3.2 0 " << -0.4 * c << ' '
                << -0.4 * s << "\n";
            out << "0 0 " << -0.4 * c << ' ' << 0.4 * s << " 2.9 0\n";
        }
    }
    const auto field = load_capacitance(file);
    REQUIRE(field.size() == 2);
    CHECK((field[0].entries - field[1].entries.transpose()).norm() < 1e-12);
    std::remove(file.c_str());
}
