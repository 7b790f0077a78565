#pragma once

#include "ftb/capacitance.hpp"
#include "ftb/modulation.hpp"

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace ftb {

/// Source of capacitance matrices for band computations: computed from a
/// layout, synthesized from a closure, or loaded from a matrix-field file.
class CapacitanceProvider {
public:
    virtual ~CapacitanceProvider() = default;
    virtual int size() const = 0;
    virtual Eigen::MatrixXcd at(const Vec2 &alpha) const = 0;
};

/// Computes (and memoizes) capacitance matrices for a resonator layout.
class ComputedCapacitance : public CapacitanceProvider {
public:
    ComputedCapacitance(ResonatorLayout layout, GreenParams params);
    int size() const override { return layout_.size(); }
    Eigen::MatrixXcd at(const Vec2 &alpha) const override;
    const ResonatorLayout &layout() const { return layout_; }
    const GreenParams &params() const { return params_; }

private:
    ResonatorLayout layout_;
    GreenParams params_;
    mutable std::mutex mutex_;
    mutable std::map<std::pair<double, double>, Eigen::MatrixXcd> cache_;
};

/// Wraps an arbitrary closure (test fields, synthetic lemma-conform fields).
class SyntheticCapacitance : public CapacitanceProvider {
public:
    SyntheticCapacitance(int n, std::function<Eigen::MatrixXcd(const Vec2 &)> fn)
        : n_(n), fn_(std::move(fn)) {}
    int size() const override { return n_; }
    Eigen::MatrixXcd at(const Vec2 &alpha) const override { return fn_(alpha); }

private:
    int n_;
    std::function<Eigen::MatrixXcd(const Vec2 &)> fn_;
};

/// Serves matrices loaded from a field file; exact-sample lookup only.
class LoadedCapacitance : public CapacitanceProvider {
public:
    explicit LoadedCapacitance(std::vector<CapacitanceMatrix> field);
    int size() const override { return n_; }
    Eigen::MatrixXcd at(const Vec2 &alpha) const override;

private:
    int n_ = 0;
    std::map<std::pair<double, double>, Eigen::MatrixXcd> samples_;
};

using M0Provider = std::function<Eigen::MatrixXcd(const Vec2 &)>;

/// Static governing matrix M0(alpha) = (delta kappa_r / rho_r) diag(1/|D_i|) C^alpha.
M0Provider static_m0_provider(std::shared_ptr<const CapacitanceProvider> cap,
                              CouplingParams coupling);

} // namespace ftb
