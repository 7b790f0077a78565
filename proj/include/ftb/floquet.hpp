#pragma once

#include "ftb/modulation.hpp"

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace ftb {

/// First-order form of the second-order system: y' = A(t) y with
/// A(t) = [[0, Id], [-M(t), 0]], size 2N, period T.
struct FirstOrderSystem {
    int size = 0; // 2N
    double period = 0.0;
    std::function<Eigen::MatrixXcd(double)> evaluator;

    Eigen::MatrixXcd at(double t) const { return evaluator(t); }
};

FirstOrderSystem first_order_system(const TimeMatrix &tm);

/// Constant-coefficient variant for oracles and the static path.
FirstOrderSystem constant_first_order_system(const Eigen::MatrixXcd &m0,
                                             double period);

struct IntegratorTolerance {
    double rtol = 1e-10;
    double atol = 1e-12;
};

struct IntegratorStats {
    long steps = 0;
    long rejected = 0;
    double last_step = 0.0;
    double max_error_estimate = 0.0;
};

/// Monodromy matrix X(T) of dX/dt = A(t) X, X(0) = Id, by an adaptive
/// embedded Dormand-Prince 5(4) pair with PI step control.
struct MonodromyMatrix {
    Eigen::MatrixXcd x_t; // X(T)
    IntegratorStats stats;
};

MonodromyMatrix monodromy(const FirstOrderSystem &system,
                          const IntegratorTolerance &tol = {});

/// General matrix ODE integration over [t0, t1] (exposed for oracles).
Eigen::MatrixXcd integrate_matrix_ode(
    const std::function<Eigen::MatrixXcd(double)> &a, double t0, double t1,
    const Eigen::MatrixXcd &x0, const IntegratorTolerance &tol,
    IntegratorStats *stats = nullptr);

/// omega_A = omega0 + m * Omega with omega0 in [-Omega/2, Omega/2).
struct Folded {
    double omega0 = 0.0;
    int m = 0;
};
Folded folding_number(double omega_a, double omega);

/// Folded Floquet quasifrequencies at one quasimomentum.
struct QuasifrequencySet {
    Vec2 alpha;
    double omega = 0.0; // modulation frequency
    std::vector<std::complex<double>> values; // Re in [-Omega/2, Omega/2),
                                              // sorted by (Re, Im)
};

/// Eigenvalues lambda of X(T); omega = -i Log(lambda)/T folded into the
/// time-Brillouin zone. Throws NumericalError on a vanishing multiplier.
QuasifrequencySet quasifrequencies(const MonodromyMatrix &mono, double omega,
                                   const Vec2 &alpha = Vec2::Zero());

} // namespace ftb
