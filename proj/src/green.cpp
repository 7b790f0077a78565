#include "ftb/green.hpp"

#include "ftb/errors.hpp"

#include <cmath>
#include <numbers>

namespace ftb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286061;

// E1(x) = -Ei(-x) for x > 0.
double exp_int_e1(double x) { return -std::expint(-x); }

} // namespace

void GreenParams::validate() const {
    if (truncation < 4) throw ConfigError("green truncation Q must be >= 4");
    if (quadrature_points < 16 || quadrature_points % 2 != 0) {
        throw ConfigError("quadrature_points must be even and >= 16");
    }
}

QuasiperiodicGreen::QuasiperiodicGreen(const Lattice &lattice, const Vec2 &alpha,
                                       const GreenParams &params)
    : alpha_(alpha), volume_(lattice.cell_volume) {
    params.validate();
    const auto [q1, q2] = dual_lattice(lattice);
    const double qmax = std::max(q1.norm(), q2.norm());
    const double qmin = std::min(q1.norm(), q2.norm());
    const double radius = params.truncation * qmax;

    // Gaussian filter negligible (< 1e-16) at the ball edge for every
    // admissible alpha inside the first few Brillouin zones.
    eta_ = 6.1 / ((params.truncation - 1) * qmax);

    const int mspan = static_cast<int>(std::ceil(radius / qmin)) + 2;
    for (int i = -mspan; i <= mspan; ++i) {
        for (int j = -mspan; j <= mspan; ++j) {
            const Vec2 q = i * q1 + j * q2;
            if (q.norm() > radius) continue;
            const Vec2 k = alpha + q;
            const double k2 = k.squaredNorm();
            if (k2 < 1e-20) {
                throw SingularQuasimomentumError(
                    "alpha lies on the dual lattice; G^{alpha,0} does not exist");
            }
            kpoints_.push_back(k);
            kweights_.push_back(std::exp(-eta_ * eta_ * k2) / (-k2 * volume_));
        }
    }

    // Image sum cutoff: E1(|n-d|^2/(4 eta^2)) < 1e-18 once |n-d| > ~4.6*2eta.
    const double lmin = std::min(lattice.l1.norm(), lattice.l2.norm());
    const double diam = lattice.l1.norm() + lattice.l2.norm();
    const double rcut = 2.0 * eta_ * 6.5 + diam;
    const int nspan = static_cast<int>(std::ceil(rcut / lmin)) + 1;
    for (int i = -nspan; i <= nspan; ++i) {
        for (int j = -nspan; j <= nspan; ++j) {
            const Vec2 n = i * lattice.l1 + j * lattice.l2;
            if (n.norm() > rcut) continue;
            images_.push_back(n);
            image_phases_.push_back(std::exp(std::complex<double>(0.0, alpha.dot(n))));
        }
    }
}

std::complex<double> QuasiperiodicGreen::spatial_sum(const Vec2 &d) const {
    std::complex<double> acc(0.0, 0.0);
    const double inv4eta2 = 1.0 / (4.0 * eta_ * eta_);
    for (size_t i = 0; i < images_.size(); ++i) {
        const double z = (d - images_[i]).squaredNorm() * inv4eta2;
        if (z > 42.0 || z == 0.0) continue; // E1(42) ~ 2e-20
        acc += image_phases_[i] * exp_int_e1(z);
    }
    return acc;
}

std::complex<double> QuasiperiodicGreen::value(const Vec2 &x, const Vec2 &y) const {
    const Vec2 d = x - y;
    std::complex<double> spec(0.0, 0.0);
    for (size_t i = 0; i < kpoints_.size(); ++i) {
        const double phase = kpoints_[i].dot(d);
        spec += kweights_[i] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return spec - spatial_sum(d) / (4.0 * kPi);
}

std::complex<double> QuasiperiodicGreen::regularized(const Vec2 &x) const {
    (void)x; // translation invariant: depends on alpha and the lattice only
    std::complex<double> spec(0.0, 0.0);
    for (double w : kweights_) spec += w;
    std::complex<double> imgs(0.0, 0.0);
    const double inv4eta2 = 1.0 / (4.0 * eta_ * eta_);
    for (size_t i = 0; i < images_.size(); ++i) {
        const double n2 = images_[i].squaredNorm();
        if (n2 == 0.0) continue;
        const double z = n2 * inv4eta2;
        if (z > 42.0) continue;
        imgs += image_phases_[i] * exp_int_e1(z);
    }
    const double self_term = (kEulerGamma - 2.0 * std::log(2.0 * eta_)) / (4.0 * kPi);
    return spec - imgs / (4.0 * kPi) + self_term;
}

Eigen::MatrixXcd QuasiperiodicGreen::pair_matrix(const std::vector<Vec2> &X,
                                                 const std::vector<Vec2> &Y) const {
    const int nx = static_cast<int>(X.size());
    const int ny = static_cast<int>(Y.size());
    const int nq = static_cast<int>(kpoints_.size());

    Eigen::MatrixXcd ex(nx, nq), ey(ny, nq);
    for (int q = 0; q < nq; ++q) {
        const Vec2 &k = kpoints_[q];
        for (int i = 0; i < nx; ++i) {
            const double ph = k.dot(X[i]);
            ex(i, q) = std::complex<double>(std::cos(ph), std::sin(ph)) * kweights_[q];
        }
        for (int j = 0; j < ny; ++j) {
            const double ph = k.dot(Y[j]);
            ey(j, q) = std::complex<double>(std::cos(ph), std::sin(ph));
        }
    }
    Eigen::MatrixXcd out = ex * ey.adjoint();

    const double inv4eta2 = 1.0 / (4.0 * eta_ * eta_);
    for (size_t m = 0; m < images_.size(); ++m) {
        const Vec2 &n = images_[m];
        const std::complex<double> ph = image_phases_[m] / (4.0 * kPi);
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                const double z = (X[i] - Y[j] - n).squaredNorm() * inv4eta2;
                if (z > 42.0 || z == 0.0) continue;
                out(i, j) -= ph * exp_int_e1(z);
            }
        }
    }
    return out;
}

std::complex<double> green_alpha_zero(const Vec2 &x, const Vec2 &y,
                                      const Vec2 &alpha, const Lattice &lattice,
                                      const GreenParams &params) {
    return QuasiperiodicGreen(lattice, alpha, params).value(x, y);
}

} // namespace ftb
