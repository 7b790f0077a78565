#pragma once

#include "ftb/lattice.hpp"

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace ftb {

/// Parameters of the spectral Green's function and its boundary quadrature.
struct GreenParams {
    int truncation = 12;          ///< Q: dual sum over |q| <= Q * max(|q1|,|q2|)
    int quadrature_points = 64;   ///< M_b: midpoint nodes per disk boundary

    void validate() const;
};

/// Evaluator of the alpha-quasiperiodic Green's function of the Laplacian
/// (the k = 0 limit of the Helmholtz lattice sum)
///
///     G(x, y) = (1/|Y|) sum_{q in L*} e^{i (alpha+q).(x-y)} / (0 - |alpha+q|^2),
///
/// summed over the ball |q| <= Q max(|q1|,|q2|). The conditionally convergent
/// tail is resummed with an exponentially convergent Gaussian split (a
/// spectral part filtered by e^{-eta^2 |alpha+q|^2} plus an image sum of
/// exponential integrals), so the value is independent of Q to roundoff for
/// every Q >= 4 and satisfies G(x,y;alpha) = conj G(x,y;-alpha) exactly.
class QuasiperiodicGreen {
public:
    QuasiperiodicGreen(const Lattice &lattice, const Vec2 &alpha,
                       const GreenParams &params);

    std::complex<double> value(const Vec2 &x, const Vec2 &y) const;

    /// lim_{y->x} [ G(x, y) - ln|x-y| / (2 pi) ]
    std::complex<double> regularized(const Vec2 &x) const;

    /// G(x_i, y_j) for all pairs. Rows follow X, columns follow Y. Any
    /// coincident pair (x_i == y_j) yields an unusable entry; callers handle
    /// the diagonal separately via regularized().
    Eigen::MatrixXcd pair_matrix(const std::vector<Vec2> &X,
                                 const std::vector<Vec2> &Y) const;

    const Vec2 &alpha() const { return alpha_; }

private:
    Vec2 alpha_;
    double volume_ = 0.0;
    double eta_ = 0.0; // Ewald splitting length
    std::vector<Vec2> kpoints_;          // alpha + q over the truncated ball
    std::vector<double> kweights_;       // exp(-eta^2 |k|^2) / (-|k|^2 |Y|)
    std::vector<Vec2> images_;           // lattice translates n
    std::vector<std::complex<double>> image_phases_; // e^{i alpha.n}

    std::complex<double> spatial_sum(const Vec2 &d) const;
};

/// Single-point convenience wrapper.
std::complex<double> green_alpha_zero(const Vec2 &x, const Vec2 &y,
                                      const Vec2 &alpha, const Lattice &lattice,
                                      const GreenParams &params);

} // namespace ftb
