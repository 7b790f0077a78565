#include "ftb/floquet.hpp"

#include "ftb/errors.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ftb {

namespace {
constexpr double kPi = std::numbers::pi;
}

FirstOrderSystem first_order_system(const TimeMatrix &tm) {
    const int n = tm.size();
    FirstOrderSystem sys;
    sys.size = 2 * n;
    sys.period = tm.period();
    sys.evaluator = [tm, n](double t) {
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
        a.block(0, n, n, n) = Eigen::MatrixXcd::Identity(n, n);
        a.block(n, 0, n, n) = -tm.at(t);
        return a;
    };
    return sys;
}

FirstOrderSystem constant_first_order_system(const Eigen::MatrixXcd &m0,
                                             double period) {
    const int n = static_cast<int>(m0.rows());
    FirstOrderSystem sys;
    sys.size = 2 * n;
    sys.period = period;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    a.block(0, n, n, n) = Eigen::MatrixXcd::Identity(n, n);
    a.block(n, 0, n, n) = -m0;
    sys.evaluator = [a](double) { return a; };
    return sys;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

} // namespace

Eigen::MatrixXcd integrate_matrix_ode(
    const std::function<Eigen::MatrixXcd(double)> &a, double t0, double t1,
    const Eigen::MatrixXcd &x0, const IntegratorTolerance &tol,
    IntegratorStats *stats) {
    if (tol.rtol <= 0.0 || tol.atol <= 0.0) {
        throw ConfigError("integrator tolerances must be positive");
    }
    const double span = t1 - t0;
    Eigen::MatrixXcd x = x0;
    double t = t0;
    double h = span / 100.0;
    Eigen::MatrixXcd k1 = a(t) * x;
    IntegratorStats st;
    double err_prev = 1.0;
    const int max_steps = 2'000'000;

    while (t < t1) {
        if (t + h > t1) h = t1 - t;
        const Eigen::MatrixXcd k2 = a(t + c2 * h) * (x + h * (a21 * k1));
        const Eigen::MatrixXcd k3 = a(t + c3 * h) * (x + h * (a31 * k1 + a32 * k2));
        const Eigen::MatrixXcd k4 =
            a(t + c4 * h) * (x + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Eigen::MatrixXcd k5 =
            a(t + c5 * h) * (x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Eigen::MatrixXcd k6 =
            a(t + h) * (x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Eigen::MatrixXcd xnew =
            x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Eigen::MatrixXcd k7 = a(t + h) * xnew;
        const Eigen::MatrixXcd errm =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0.0;
        for (int i = 0; i < x.rows(); ++i) {
            for (int j = 0; j < x.cols(); ++j) {
                const double scale =
                    tol.atol +
                    tol.rtol * std::max(std::abs(x(i, j)), std::abs(xnew(i, j)));
                err = std::max(err, std::abs(errm(i, j)) / scale);
            }
        }
        st.max_error_estimate = std::max(st.max_error_estimate, err);

        if (err <= 1.0) {
            t += h;
            x = xnew;
            k1 = k7; // FSAL
            ++st.steps;
            // PI controller
            const double fac =
                0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) *
                std::pow(std::max(err_prev, 1e-10), 0.4 / 5.0);
            h *= std::clamp(fac, 0.2, 6.0);
            err_prev = std::max(err, 1e-10);
        } else {
            ++st.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
        if (h < 1e-14 * std::abs(span)) {
            throw NumericalError(
                "step-size underflow in the monodromy integrator (stiffness?); "
                "reached t = " +
                std::to_string(t));
        }
        if (st.steps + st.rejected > max_steps) {
            throw NumericalError("monodromy integrator exceeded step budget");
        }
    }
    st.last_step = h;
    if (stats) *stats = st;
    return x;
}

MonodromyMatrix monodromy(const FirstOrderSystem &system,
                          const IntegratorTolerance &tol) {
    MonodromyMatrix out;
    const Eigen::MatrixXcd id =
        Eigen::MatrixXcd::Identity(system.size, system.size);
    out.x_t = integrate_matrix_ode(system.evaluator, 0.0, system.period, id, tol,
                                   &out.stats);
    return out;
}

Folded folding_number(double omega_a, double omega) {
    if (omega <= 0.0) throw ConfigError("folding requires Omega > 0");
    Folded f;
    f.m = static_cast<int>(std::floor(omega_a / omega + 0.5));
    f.omega0 = omega_a - f.m * omega;
    // half-open interval [-Omega/2, Omega/2)
    if (f.omega0 >= omega / 2.0) {
        f.omega0 -= omega;
        f.m += 1;
    }
    return f;
}

QuasifrequencySet quasifrequencies(const MonodromyMatrix &mono, double omega,
                                   const Vec2 &alpha) {
    const double T = 2.0 * kPi / omega;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(mono.x_t, false);
    if (es.info() != Eigen::Success) {
        throw NumericalError("eigensolver failed on the monodromy matrix");
    }
    QuasifrequencySet out;
    out.alpha = alpha;
    out.omega = omega;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const std::complex<double> lam = es.eigenvalues()(i);
        if (std::abs(lam) < 1e-300) {
            throw NumericalError(
                "zero characteristic multiplier: degenerate flow (integrator "
                "failure)");
        }
        // omega = -i Log(lambda) / T, then fold the real part
        const std::complex<double> w =
            std::complex<double>(0.0, -1.0) * std::log(lam) / T;
        const Folded f = folding_number(w.real(), omega);
        out.values.emplace_back(f.omega0, w.imag());
    }
    std::sort(out.values.begin(), out.values.end(),
              [](const std::complex<double> &a, const std::complex<double> &b) {
                  if (a.real() != b.real()) return a.real() < b.real();
                  return a.imag() < b.imag();
              });
    return out;
}

} // namespace ftb
