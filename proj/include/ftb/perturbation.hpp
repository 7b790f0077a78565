#pragma once

#include "ftb/floquet.hpp"
#include "ftb/modulation.hpp"
#include "ftb/provider.hpp"

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace ftb {

/// Diagonalization of the static first-order block matrix
/// A~0 = [[0, Id], [-M0, 0]]:  S A~0 S^{-1} = diag(a0), columns gauge-fixed
/// (unit norm, first significant component real positive) and ordered by
/// increasing imaginary part of the eigenvalue.
struct StaticDiagonalization {
    double omega = 0.0;
    Eigen::VectorXcd a0;       // eigenvalues of A~0, a0_i = i * omega_A,i
    Eigen::MatrixXcd s;        // S = V^{-1}
    Eigen::MatrixXcd s_inv;    // V, eigenvector columns
    std::vector<int> folding;  // m_i of Im(a0_i)
    Eigen::VectorXcd f0;       // folded diagonal: a0_i - i m_i omega

    int size() const { return static_cast<int>(a0.size()); }
};

StaticDiagonalization static_diagonalization(const Eigen::MatrixXcd &m0,
                                             double omega);

/// A1 harmonics in the diagonalizing basis:
/// A1^{(n)} = S [[0,0],[-M1^{(n)},0]] S^{-1}.
struct A1Coefficients {
    std::map<int, Eigen::MatrixXcd> coeffs;
    int max_order = 0; // orders beyond carry an insufficient-harmonics error

    Eigen::MatrixXcd at(int harmonic, int size) const;
};

A1Coefficients a1_in_diagonal_basis(const StaticDiagonalization &diag,
                                    const EpsExpansion &expansion);

/// Degenerate point of the folded static Floquet matrix F0.
struct DegeneratePoint {
    Vec2 alpha;
    std::complex<double> f0;   // the coinciding folded eigenvalue of F0
    int l = 0, k = 0;          // slot indices in the sorted static basis
    int multiplicity = 2;
    int m_l = 0, m_k = 0;
    double gap = 0.0;          // residual |folded_l - folded_k| after refinement
};

struct DegeneracySearchParams {
    double tol = 1e-6;         // cluster tolerance in quasifrequency units
    double refine_tol = 1e-8;  // bisection gap target
    double max_spacing = 0.01; // alpha-grid arclength resolution
};

/// Scans folded static spectra along the grid for collisions of two folded
/// eigenvalues with different folding numbers, refines each by bisection with
/// frozen folding numbers (immune to fold-boundary jumps) and reports both
/// alpha and -alpha partners.
std::vector<DegeneratePoint> find_degeneracies(const M0Provider &provider,
                                               double omega,
                                               const std::vector<Vec2> &grid,
                                               const DegeneracySearchParams &params = {});

/// Upper-left coupling block of F1 for a degenerate pair (l, k):
///   [[ (A1^{(0)})_ll,        (A1^{(m_l-m_k)})_lk ],
///    [ (A1^{(m_k-m_l)})_kl,  (A1^{(0)})_kk       ]]
Eigen::Matrix2cd f1_block(const StaticDiagonalization &diag,
                          const A1Coefficients &a1, int l, int k);

struct PerturbationResult {
    Vec2 alpha;
    std::complex<double> f0;
    std::complex<double> p_alpha;
    std::complex<double> r_alpha; // principal sqrt(p)
    Eigen::Matrix2cd block;

    /// Predicted perturbed Floquet eigenvalues f0 +- eps * r.
    std::pair<std::complex<double>, std::complex<double>>
    predicted_edges(double eps) const {
        return {f0 + eps * r_alpha, f0 - eps * r_alpha};
    }

    std::optional<std::complex<double>> second_order_shift;
};

/// Theorem-level first-order rate p_alpha = (F1)_lk (F1)_kl for an r = 2
/// degenerate point. Throws NumericalError for multiplicity > 2.
PerturbationResult p_value(const StaticDiagonalization &diag,
                           const A1Coefficients &a1,
                           const DegeneratePoint &point);

/// Numeric Floquet-matrix expansion: F_eps = Log X_eps(T) / T expressed in
/// the diagonalizing basis, fitted quadratically over the symmetric grid
/// {0, +-h, +-2h}.
struct ExtractedF {
    Eigen::MatrixXcd f0n, f1n, f2n;
    double fit_residual = 0.0;
};

ExtractedF extract_f(const std::function<FirstOrderSystem(double)> &family,
                     double h, const StaticDiagonalization &diag,
                     const IntegratorTolerance &tol = {});

/// Effective Hamiltonian of the degenerate block:
/// H(eps) = P f0 P + eps P F1 P + eps^2 P (F1 G F1 + F2) P with
/// G = (f0 Id - F0)^{-1} Q vanishing on the degenerate slots.
class EffectiveHamiltonian {
public:
    EffectiveHamiltonian(const Eigen::VectorXcd &f0_diagonal,
                         const Eigen::MatrixXcd &f1, const Eigen::MatrixXcd &f2,
                         std::vector<int> degenerate_slots);

    Eigen::MatrixXcd at(double eps) const;       // r x r block
    Eigen::VectorXcd eigenvalues(double eps) const;

private:
    std::complex<double> f0_;
    std::vector<int> slots_;
    Eigen::MatrixXcd block1_; // P F1 P
    Eigen::MatrixXcd block2_; // P (F1 G F1 + F2) P
};

} // namespace ftb
