#include "ftb/capacitance.hpp"

#include "ftb/errors.hpp"
#include "ftb/parallel.hpp"

#include <Eigen/LU>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ftb {

namespace {

constexpr double kPi = std::numbers::pi;

// Exact weights on the uniform M-point grid for the operator
//   psi |-> -(1/2pi) int_0^{2pi} ln(2|sin((t-s)/2)|) psi(s) ds,
// whose symbol is 1/(2|l|) on e^{ils} and 0 on constants. Symmetric circulant.
Eigen::MatrixXd log_kernel_weights(int M) {
    Eigen::VectorXd first(M);
    for (int k = 0; k < M; ++k) {
        double acc = 0.0;
        const double dk = 2.0 * kPi * k / M;
        for (int l = 1; l < M / 2; ++l) acc += std::cos(l * dk) / l;
        acc += std::cos(kPi * k) / M; // Nyquist mode, symbol 1/M
        first(k) = acc / M;
    }
    Eigen::MatrixXd W(M, M);
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) W(i, j) = first((i - j + M) % M);
    }
    return W;
}

std::vector<Vec2> boundary_nodes(const Vec2 &center, double radius, int M) {
    std::vector<Vec2> nodes(M);
    for (int j = 0; j < M; ++j) {
        const double th = (j + 0.5) * 2.0 * kPi / M;
        nodes[j] = center + radius * Vec2(std::cos(th), std::sin(th));
    }
    return nodes;
}

// Hermitian kernel matrix K with A = K * diag(h R_q). The self blocks carry
// the exact log-kernel weights; C = -B^T K^{-1} B then needs no quadrature
// weights at all.
Eigen::MatrixXcd hermitian_kernel(const ResonatorLayout &layout, const Vec2 &alpha,
                                  const GreenParams &params) {
    layout.validate();
    const int N = layout.size();
    const int M = params.quadrature_points;
    const double h = 2.0 * kPi / M;
    const QuasiperiodicGreen green(layout.lattice, alpha, params);

    std::vector<std::vector<Vec2>> nodes(N);
    for (int p = 0; p < N; ++p) {
        nodes[p] = boundary_nodes(layout.centers[p], layout.radii[p], M);
    }

    const Eigen::MatrixXd wlog = log_kernel_weights(M);
    Eigen::MatrixXcd K(N * M, N * M);
    for (int p = 0; p < N; ++p) {
        for (int q = 0; q < N; ++q) {
            Eigen::MatrixXcd blk = green.pair_matrix(nodes[p], nodes[q]);
            if (p == q) {
                const double R = layout.radii[p];
                // G = ln|x-y|/(2pi) + smooth, with |x-y| = 2R|sin((t-s)/2)|.
                const std::complex<double> diag =
                    green.regularized(layout.centers[p]) + std::log(R) / (2.0 * kPi);
                for (int i = 0; i < M; ++i) {
                    for (int j = 0; j < M; ++j) {
                        if (i == j) {
                            blk(i, j) = diag;
                        } else {
                            const double s =
                                2.0 * std::abs(std::sin((i - j) * kPi / M));
                            blk(i, j) -= std::log(s) / (2.0 * kPi);
                        }
                    }
                }
                blk -= (wlog / h).cast<std::complex<double>>();
            }
            K.block(p * M, q * M, M, M) = blk;
        }
    }
    return K;
}

} // namespace

Eigen::MatrixXcd assemble_single_layer(const ResonatorLayout &layout,
                                       const Vec2 &alpha,
                                       const GreenParams &params) {
    const int N = layout.size();
    const int M = params.quadrature_points;
    const double h = 2.0 * kPi / M;
    Eigen::MatrixXcd A = hermitian_kernel(layout, alpha, params);
    for (int q = 0; q < N; ++q) {
        A.middleCols(q * M, M) *= h * layout.radii[q];
    }
    return A;
}

CapacitanceMatrix capacitance_matrix(const ResonatorLayout &layout,
                                     const Vec2 &alpha,
                                     const GreenParams &params) {
    const int N = layout.size();
    const int M = params.quadrature_points;
    const Eigen::MatrixXcd K = hermitian_kernel(layout, alpha, params);

    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(N * M, N);
    for (int i = 0; i < N; ++i) B.block(i * M, i, M, 1).setOnes();

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(K);
    const Eigen::MatrixXcd Z = lu.solve(B);
    const double residual = (K * Z - B).norm() / B.norm();
    if (!std::isfinite(residual) || residual > 1e-6) {
        std::ostringstream os;
        os << "single-layer solve failed at alpha=(" << alpha.x() << "," << alpha.y()
           << "), residual " << residual;
        throw NumericalError(os.str());
    }

    Eigen::MatrixXcd C = -(B.adjoint() * Z);
    CapacitanceMatrix out;
    out.alpha = alpha;
    out.hermitian_defect = (C - C.adjoint()).norm() / C.norm();
    out.entries = 0.5 * (C + C.adjoint().eval());
    out.layout_hash = layout.hash();
    return out;
}

bool near_dual_lattice(const Vec2 &alpha, const Lattice &lattice, double tol) {
    const auto [q1, q2] = dual_lattice(lattice);
    Eigen::Matrix2d Q;
    Q.col(0) = q1;
    Q.col(1) = q2;
    const Vec2 frac = Q.inverse() * alpha;
    const Vec2 rounded(std::round(frac.x()), std::round(frac.y()));
    return (alpha - Q * rounded).norm() < tol;
}

std::vector<FieldSample> capacitance_field(const ResonatorLayout &layout,
                                           const BrillouinPath &path,
                                           const GreenParams &params, int jobs) {
    const int n = path.size();
    std::vector<FieldSample> field(n);
    parallel_for(n, jobs, [&](int i) {
        const Vec2 a = path.points[i].alpha;
        field[i].alpha = a;
        if (near_dual_lattice(a, layout.lattice, 1e-6)) {
            field[i].singular = true;
            return;
        }
        try {
            field[i].matrix = capacitance_matrix(layout, a, params);
        } catch (const std::exception &e) {
            std::ostringstream os;
            os << "sample " << i << " at alpha=(" << a.x() << "," << a.y()
               << "): " << e.what();
            throw NumericalError(os.str());
        }
    });
    return field;
}

void save_capacitance_field(const std::string &path,
                            const std::vector<FieldSample> &field) {
    int N = 0;
    for (const auto &s : field) {
        if (!s.singular) {
            N = s.matrix.size();
            break;
        }
    }
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    char buf[64];
    out << "N " << N << " D 2\n";
    auto put = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out << buf;
    };
    for (const auto &s : field) {
        if (s.singular) continue;
        out << "alpha ";
        put(s.alpha.x());
        out << ' ';
        put(s.alpha.y());
        out << '\n';
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < N; ++j) {
                if (j) out << ' ';
                put(s.matrix.entries(i, j).real());
                out << ' ';
                put(s.matrix.entries(i, j).imag());
            }
            out << '\n';
        }
    }
}

std::vector<CapacitanceMatrix> load_capacitance(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open: " + path);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string &msg) {
        std::ostringstream os;
        os << path << ":" << lineno << ": " << msg;
        throw ValidationError(os.str());
    };
    if (!std::getline(in, line)) fail("empty file");
    ++lineno;
    int N = 0, D = 0;
    {
        std::istringstream is(line);
        std::string kn, kd;
        if (!(is >> kn >> N >> kd >> D) || kn != "N" || kd != "D") {
            fail("expected header 'N <N> D <dim>'");
        }
        if (N <= 0 || D != 2) fail("unsupported field header");
    }
    std::vector<CapacitanceMatrix> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string tag;
        CapacitanceMatrix cm;
        if (!(is >> tag) || tag != "alpha") fail("expected 'alpha <a1> <a2>'");
        double a1 = 0.0, a2 = 0.0;
        if (!(is >> a1 >> a2)) fail("bad alpha line");
        cm.alpha = Vec2(a1, a2);
        cm.entries.resize(N, N);
        for (int i = 0; i < N; ++i) {
            if (!std::getline(in, line)) fail("truncated sample block");
            ++lineno;
            std::istringstream row(line);
            for (int j = 0; j < N; ++j) {
                double re = 0.0, im = 0.0;
                if (!(row >> re >> im)) fail("bad matrix row");
                cm.entries(i, j) = {re, im};
            }
        }
        const double defect =
            (cm.entries - cm.entries.adjoint().eval()).norm() / cm.entries.norm();
        if (!(defect <= 1e-8)) {
            std::ostringstream os;
            os << "matrix at alpha=(" << a1 << "," << a2
               << ") violates Hermiticity (defect " << defect << ")";
            fail(os.str());
        }
        cm.hermitian_defect = defect;
        out.push_back(std::move(cm));
    }
    return out;
}

} // namespace ftb
