#pragma once

#include "ftb/capacitance.hpp"

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <vector>

namespace ftb {

/// Finite Fourier series sum_n c_n e^{i n Omega t} of a real function:
/// c_{-n} = conj(c_n) is enforced on construction.
class FourierSeries {
public:
    FourierSeries() = default;
    explicit FourierSeries(std::map<int, std::complex<double>> coeffs);

    std::complex<double> coeff(int n) const;
    double eval(double phase) const;        // value at Omega*t = phase (real)
    double deriv(double phase) const;       // d/d(phase), i.e. (1/Omega) d/dt
    double deriv2(double phase) const;
    int max_order() const { return max_order_; }
    const std::map<int, std::complex<double>> &coeffs() const { return coeffs_; }

private:
    std::map<int, std::complex<double>> coeffs_;
    int max_order_ = 0;
};

/// Per-resonator T-periodic modulation of 1/rho_i and 1/kappa_i.
struct ModulationProfile {
    int n = 0;                 // resonator count
    double omega = 0.0;        // modulation angular frequency, Omega = 2 pi / T
    double epsilon = 0.0;      // modulation amplitude
    std::vector<FourierSeries> rho_inv;   // series of 1/rho_i(t)
    std::vector<FourierSeries> kappa_inv; // series of 1/kappa_i(t)
    std::vector<double> phases;           // cosine-family phase shifts
    bool cosine_family = false;           // 1/rho = 1 + eps cos(Omega t + phi)

    double period() const;

    /// The same modulation family evaluated at a different amplitude: the
    /// oscillating part of every stored series scales by eps/epsilon. For the
    /// cosine family this is the closed-form scaling.
    ModulationProfile with_epsilon(double eps) const;

    /// Positivity of rho_i, kappa_i sampled on a 1024-point grid plus the
    /// realness constraint; throws ConfigError on violation.
    void validate() const;
};

/// rho_i(t) = 1 / (1 + eps cos(Omega t + phi_i)), kappa_i = 1.
ModulationProfile cosine_profile(int n, double omega, double epsilon,
                                 const std::vector<double> &phases);

/// Cosine family plus a relative second harmonic on 1/rho:
/// 1/rho_i = 1 + eps (cos(Omega t + phi_i) + a2 cos(2 Omega t + psi_i)).
ModulationProfile two_harmonic_profile(int n, double omega, double epsilon,
                                       const std::vector<double> &phases,
                                       double a2,
                                       const std::vector<double> &phases2);

/// Physical coupling between the capacitance matrix and the ODE system.
struct CouplingParams {
    double delta = 1e-3;
    double kappa_r = 1.0;
    double rho_r = 1.0;
    std::vector<double> volumes; // |D_i|

    static CouplingParams for_layout(const ResonatorLayout &layout,
                                     double delta = 1e-3, double kappa_r = 1.0,
                                     double rho_r = 1.0);
    void validate(int n) const;
};

/// The governing matrix M^alpha(t) of the second-order ODE system, with its
/// Fourier coefficients and epsilon-expansion to first order.
class TimeMatrix {
public:
    TimeMatrix() = default;
    TimeMatrix(ModulationProfile profile, Eigen::MatrixXcd capacitance,
               CouplingParams coupling);

    int size() const { return profile_.n; }
    double omega() const { return profile_.omega; }
    double period() const { return profile_.period(); }

    Eigen::MatrixXcd at(double t) const;

    /// Fourier coefficients M^{(k)} with e^{i k Omega t} convention, computed
    /// by 1024-point periodic quadrature and truncated at 1e-14 relative.
    const std::map<int, Eigen::MatrixXcd> &fourier_coefficients() const;

    /// Rebuild for another amplitude of the same modulation family.
    TimeMatrix at_epsilon(double eps) const;

    const ModulationProfile &profile() const { return profile_; }
    const Eigen::MatrixXcd &capacitance() const { return cap_; }
    const CouplingParams &coupling() const { return coupling_; }

private:
    ModulationProfile profile_;
    Eigen::MatrixXcd cap_;
    CouplingParams coupling_;
    mutable std::map<int, Eigen::MatrixXcd> fourier_;
    mutable bool fourier_done_ = false;
};

TimeMatrix assemble_m(const ModulationProfile &profile,
                      const CapacitanceMatrix &capacitance,
                      const CouplingParams &coupling);

/// First-order expansion M(t) = M0 + eps M1(t) + O(eps^2).
struct EpsExpansion {
    Eigen::MatrixXcd m0;
    std::map<int, Eigen::MatrixXcd> m1; // harmonic -> coefficient
    /// Largest harmonic the expansion can represent; orders beyond carry an
    /// insufficient-harmonics error, orders within are exact zeros if absent.
    int max_order = 0;
    double truncation_error = 0.0; // numeric path residual estimate

    Eigen::MatrixXcd m1_coeff(int harmonic) const;
};

/// Cosine family: closed form. Otherwise: central differences in epsilon at
/// +-1e-4 with a Richardson consistency check (throws NumericalError when the
/// estimated truncation error exceeds 1e-8 relative).
EpsExpansion eps_expansion(const TimeMatrix &tm);

} // namespace ftb
