#include "ftb/perturbation.hpp"

#include "ftb/errors.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ftb {

namespace {
constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd block_form(const Eigen::MatrixXcd &m) {
    const int n = static_cast<int>(m.rows());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    a.block(0, n, n, n) = Eigen::MatrixXcd::Identity(n, n);
    a.block(n, 0, n, n) = -m;
    return a;
}

Eigen::MatrixXcd lower_block_form(const Eigen::MatrixXcd &m1) {
    const int n = static_cast<int>(m1.rows());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    a.block(n, 0, n, n) = -m1;
    return a;
}

} // namespace

StaticDiagonalization static_diagonalization(const Eigen::MatrixXcd &m0,
                                             double omega) {
    const Eigen::MatrixXcd a0t = block_form(m0);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a0t, true);
    if (es.info() != Eigen::Success) {
        throw NumericalError("eigensolver failed on the static block matrix");
    }
    const int n2 = static_cast<int>(a0t.rows());
    Eigen::VectorXcd lam = es.eigenvalues();
    Eigen::MatrixXcd v = es.eigenvectors();

    // distinct nonzero eigenvalues required for a stable diagonalization
    const double scale = lam.cwiseAbs().maxCoeff();
    for (int i = 0; i < n2; ++i) {
        if (std::abs(lam(i)) < 1e-10 * std::max(scale, 1.0)) {
            throw NumericalError("static matrix has a (near-)zero eigenvalue; "
                                 "first-order block system not diagonalizable");
        }
        for (int j = i + 1; j < n2; ++j) {
            if (std::abs(lam(i) - lam(j)) < 1e-10 * std::max(scale, 1.0)) {
                throw NumericalError(
                    "static matrix has coinciding eigenvalues; block system "
                    "not diagonalizable");
            }
        }
    }

    // gauge: unit columns, first significant component real positive
    for (int j = 0; j < n2; ++j) {
        Eigen::VectorXcd col = v.col(j).normalized();
        int lead = 0;
        while (lead < n2 - 1 && std::abs(col(lead)) < 1e-8) ++lead;
        const std::complex<double> ph = col(lead) / std::abs(col(lead));
        v.col(j) = col / ph;
    }

    // order by imaginary part (then real) of the eigenvalue
    std::vector<int> order(n2);
    for (int i = 0; i < n2; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (lam(a).imag() != lam(b).imag()) return lam(a).imag() < lam(b).imag();
        return lam(a).real() < lam(b).real();
    });
    StaticDiagonalization out;
    out.omega = omega;
    out.a0.resize(n2);
    out.s_inv.resize(n2, n2);
    for (int i = 0; i < n2; ++i) {
        out.a0(i) = lam(order[i]);
        out.s_inv.col(i) = v.col(order[i]);
    }
    out.s = out.s_inv.inverse();
    out.f0.resize(n2);
    out.folding.resize(n2);
    for (int i = 0; i < n2; ++i) {
        const Folded f = folding_number(out.a0(i).imag(), omega);
        out.folding[i] = f.m;
        out.f0(i) = std::complex<double>(out.a0(i).real(), f.omega0);
    }
    return out;
}

Eigen::MatrixXcd A1Coefficients::at(int harmonic, int size) const {
    const auto it = coeffs.find(harmonic);
    if (it != coeffs.end()) return it->second;
    if (std::abs(harmonic) > max_order) {
        std::ostringstream os;
        os << "insufficient harmonics: A1 order " << harmonic
           << " beyond represented band " << max_order;
        throw NumericalError(os.str());
    }
    return Eigen::MatrixXcd::Zero(size, size);
}

A1Coefficients a1_in_diagonal_basis(const StaticDiagonalization &diag,
                                    const EpsExpansion &expansion) {
    A1Coefficients out;
    out.max_order = expansion.max_order;
    for (const auto &[n, m1] : expansion.m1) {
        out.coeffs[n] = diag.s * lower_block_form(m1) * diag.s_inv;
    }
    return out;
}

namespace {

struct FoldedSpectrum {
    std::vector<double> unfolded; // 2N static frequencies, ascending
    std::vector<double> folded;
    std::vector<int> m;
};

FoldedSpectrum folded_static(const M0Provider &provider, const Vec2 &alpha,
                             double omega) {
    const Eigen::MatrixXcd m0 = provider(alpha);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m0, false);
    if (es.info() != Eigen::Success) {
        throw NumericalError("eigensolver failed in degeneracy scan");
    }
    const int n = static_cast<int>(m0.rows());
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
        const std::complex<double> mu = es.eigenvalues()(i);
        if (mu.real() <= 0.0 && std::abs(mu.imag()) < 1e-12) {
            throw NumericalError("static matrix not positive definite");
        }
        w[i] = std::sqrt(std::abs(mu));
    }
    std::sort(w.begin(), w.end());
    FoldedSpectrum out;
    out.unfolded.resize(2 * n);
    for (int i = 0; i < n; ++i) {
        out.unfolded[i] = -w[n - 1 - i];
        out.unfolded[n + i] = w[i];
    }
    out.folded.resize(2 * n);
    out.m.resize(2 * n);
    for (int i = 0; i < 2 * n; ++i) {
        const Folded f = folding_number(out.unfolded[i], omega);
        out.folded[i] = f.omega0;
        out.m[i] = f.m;
    }
    return out;
}

} // namespace

std::vector<DegeneratePoint> find_degeneracies(const M0Provider &provider,
                                               double omega,
                                               const std::vector<Vec2> &grid,
                                               const DegeneracySearchParams &params) {
    std::vector<DegeneratePoint> points;
    if (grid.size() < 2) return points;

    auto spectrum = [&](const Vec2 &a) { return folded_static(provider, a, omega); };

    std::optional<std::pair<Vec2, FoldedSpectrum>> prev;
    for (const Vec2 &a : grid) {
        FoldedSpectrum cur;
        try {
            cur = spectrum(a);
        } catch (const SingularQuasimomentumError &) {
            prev.reset();
            continue;
        }
        if (prev) {
            const auto &[ap, sp] = *prev;
            const int nb = static_cast<int>(cur.folded.size());
            for (int p = 0; p < nb; ++p) {
                for (int q = p + 1; q < nb; ++q) {
                    if (sp.m[p] == sp.m[q]) continue;
                    if (cur.m[p] != sp.m[p] || cur.m[q] != sp.m[q]) continue;
                    // frozen-m gap, continuous across fold boundaries
                    const double ga = (sp.unfolded[p] - sp.m[p] * omega) -
                                      (sp.unfolded[q] - sp.m[q] * omega);
                    const double gb = (cur.unfolded[p] - sp.m[p] * omega) -
                                      (cur.unfolded[q] - sp.m[q] * omega);
                    if (ga == 0.0 || ga * gb >= 0.0) continue;

                    // bisection with frozen folding numbers
                    Vec2 lo = ap, hi = a;
                    double glo = ga;
                    FoldedSpectrum smid;
                    for (int it = 0; it < 200; ++it) {
                        const Vec2 mid = 0.5 * (lo + hi);
                        smid = spectrum(mid);
                        const double gm = (smid.unfolded[p] - sp.m[p] * omega) -
                                          (smid.unfolded[q] - sp.m[q] * omega);
                        if (std::abs(gm) <= params.refine_tol ||
                            (hi - lo).norm() < 1e-14) {
                            lo = hi = mid;
                            break;
                        }
                        if (glo * gm < 0.0) {
                            hi = mid;
                        } else {
                            lo = mid;
                            glo = gm;
                        }
                    }
                    const Vec2 astar = 0.5 * (lo + hi);
                    const FoldedSpectrum sref = spectrum(astar);
                    // genuine only if the frozen m's still hold at the root
                    if (sref.m[p] != sp.m[p] || sref.m[q] != sp.m[q]) continue;
                    const double gap = std::abs(sref.folded[p] - sref.folded[q]);
                    if (gap > 10 * params.refine_tol) continue;

                    DegeneratePoint pt;
                    pt.alpha = astar;
                    pt.l = p;
                    pt.k = q;
                    pt.m_l = sref.m[p];
                    pt.m_k = sref.m[q];
                    pt.gap = gap;
                    const double w0 = 0.5 * (sref.folded[p] + sref.folded[q]);
                    pt.f0 = std::complex<double>(0.0, w0);
                    pt.multiplicity = 0;
                    for (double v : sref.folded) {
                        if (std::abs(v - w0) <= params.tol) ++pt.multiplicity;
                    }
                    points.push_back(pt);
                }
            }
        }
        prev = {a, cur};
    }

    // deduplicate clusters, then add mirrors
    std::vector<DegeneratePoint> unique;
    for (const auto &pt : points) {
        bool dup = false;
        for (const auto &u : unique) {
            if ((u.alpha - pt.alpha).norm() < 1e-6 &&
                std::abs(u.f0 - pt.f0) < 10 * params.tol &&
                ((u.l == pt.l && u.k == pt.k))) {
                dup = true;
                break;
            }
        }
        if (!dup) unique.push_back(pt);
    }
    std::vector<DegeneratePoint> with_mirrors;
    for (const auto &pt : unique) {
        with_mirrors.push_back(pt);
        DegeneratePoint mir = pt;
        mir.alpha = -pt.alpha;
        with_mirrors.push_back(mir);
    }
    std::sort(with_mirrors.begin(), with_mirrors.end(),
              [](const DegeneratePoint &a, const DegeneratePoint &b) {
                  if (a.alpha.x() != b.alpha.x()) return a.alpha.x() < b.alpha.x();
                  if (a.alpha.y() != b.alpha.y()) return a.alpha.y() < b.alpha.y();
                  return a.f0.imag() < b.f0.imag();
              });
    return with_mirrors;
}

Eigen::Matrix2cd f1_block(const StaticDiagonalization &diag,
                          const A1Coefficients &a1, int l, int k) {
    const int n2 = diag.size();
    const int ml = diag.folding[l], mk = diag.folding[k];
    Eigen::Matrix2cd blk;
    blk(0, 0) = a1.at(0, n2)(l, l);
    blk(1, 1) = a1.at(0, n2)(k, k);
    blk(0, 1) = a1.at(ml - mk, n2)(l, k);
    blk(1, 0) = a1.at(mk - ml, n2)(k, l);
    return blk;
}

PerturbationResult p_value(const StaticDiagonalization &diag,
                           const A1Coefficients &a1,
                           const DegeneratePoint &point) {
    if (point.multiplicity > 2) {
        std::ostringstream os;
        os << "unsupported multiplicity r = " << point.multiplicity
           << " at alpha = (" << point.alpha.x() << ", " << point.alpha.y()
           << "); only r = 2 degenerate points are expanded";
        throw NumericalError(os.str());
    }
    PerturbationResult out;
    out.alpha = point.alpha;
    out.f0 = point.f0;
    out.block = f1_block(diag, a1, point.l, point.k);
    out.p_alpha = out.block(0, 1) * out.block(1, 0);
    out.r_alpha = std::sqrt(out.p_alpha);
    return out;
}

ExtractedF extract_f(const std::function<FirstOrderSystem(double)> &family,
                     double h, const StaticDiagonalization &diag,
                     const IntegratorTolerance &tol) {
    if (h <= 0.0 || h > 0.02) {
        throw ConfigError("extract_f grid step must lie in (0, 0.02]");
    }
    const std::vector<double> eps = {-2 * h, -h, 0.0, h, 2 * h};
    const int n2 = diag.size();
    std::vector<Eigen::MatrixXcd> fs;
    double period = 0.0;
    for (double e : eps) {
        const FirstOrderSystem sys = family(e);
        period = sys.period;
        const MonodromyMatrix mono = monodromy(sys, tol);
        const Eigen::MatrixXcd logm = mono.x_t.log();
        Eigen::MatrixXcd f = diag.s * (logm / period) * diag.s_inv;
        fs.push_back(std::move(f));
    }
    // branch alignment: eigenvalue folding must match F0 within Omega/4
    const double omega = 2.0 * kPi / period;
    for (int i = 0; i < n2; ++i) {
        double best = 1e300;
        for (int j = 0; j < n2; ++j) {
            best = std::min(best, std::abs(fs[2](j, j) - diag.f0(i)));
        }
        if (best > omega / 4.0) {
            throw NumericalError(
                "branch alignment failure near the fold boundary; shift the "
                "epsilon grid or the modulation frequency");
        }
    }

    // least-squares quadratic fit per entry over the 5-point grid
    Eigen::MatrixXd vand(5, 3);
    for (int i = 0; i < 5; ++i) {
        vand(i, 0) = 1.0;
        vand(i, 1) = eps[i];
        vand(i, 2) = eps[i] * eps[i];
    }
    const Eigen::MatrixXd pinv =
        (vand.transpose() * vand).ldlt().solve(vand.transpose()).eval();

    ExtractedF out;
    out.f0n.resize(n2, n2);
    out.f1n.resize(n2, n2);
    out.f2n.resize(n2, n2);
    double res2 = 0.0, norm2 = 0.0;
    for (int r = 0; r < n2; ++r) {
        for (int c = 0; c < n2; ++c) {
            Eigen::VectorXcd y(5);
            for (int i = 0; i < 5; ++i) y(i) = fs[i](r, c);
            Eigen::VectorXcd coef = pinv.cast<std::complex<double>>() * y;
            out.f0n(r, c) = coef(0);
            out.f1n(r, c) = coef(1);
            out.f2n(r, c) = coef(2);
            const Eigen::VectorXcd fit =
                vand.cast<std::complex<double>>() * coef;
            res2 += (y - fit).squaredNorm();
            norm2 += y.squaredNorm();
        }
    }
    out.fit_residual = std::sqrt(res2 / std::max(norm2, 1e-300));
    return out;
}

EffectiveHamiltonian::EffectiveHamiltonian(const Eigen::VectorXcd &f0_diagonal,
                                           const Eigen::MatrixXcd &f1,
                                           const Eigen::MatrixXcd &f2,
                                           std::vector<int> degenerate_slots)
    : slots_(std::move(degenerate_slots)) {
    if (slots_.empty()) throw ConfigError("effective Hamiltonian needs slots");
    const int n = static_cast<int>(f0_diagonal.size());
    f0_ = f0_diagonal(slots_.front());
    for (int s : slots_) {
        if (std::abs(f0_diagonal(s) - f0_) > 1e-6) {
            throw ConfigError("degenerate slots do not share an eigenvalue");
        }
    }
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(n);
    for (int j = 0; j < n; ++j) {
        if (std::find(slots_.begin(), slots_.end(), j) != slots_.end()) continue;
        const std::complex<double> d = f0_ - f0_diagonal(j);
        if (std::abs(d) < 1e-10) {
            std::ostringstream os;
            os << "near-resonance: non-degenerate eigenvalue within 1e-10 of "
                  "f0 (slot "
               << j << ")";
            throw NumericalError(os.str());
        }
        g(j) = 1.0 / d;
    }
    const int r = static_cast<int>(slots_.size());
    block1_.resize(r, r);
    block2_.resize(r, r);
    const Eigen::MatrixXcd f1g_f1 = f1 * g.asDiagonal() * f1;
    for (int a = 0; a < r; ++a) {
        for (int b = 0; b < r; ++b) {
            block1_(a, b) = f1(slots_[a], slots_[b]);
            block2_(a, b) = f1g_f1(slots_[a], slots_[b]) + f2(slots_[a], slots_[b]);
        }
    }
}

Eigen::MatrixXcd EffectiveHamiltonian::at(double eps) const {
    const int r = static_cast<int>(slots_.size());
    return f0_ * Eigen::MatrixXcd::Identity(r, r) + eps * block1_ +
           eps * eps * block2_;
}

Eigen::VectorXcd EffectiveHamiltonian::eigenvalues(double eps) const {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(at(eps), false);
    return es.eigenvalues();
}

} // namespace ftb
