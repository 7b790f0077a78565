#include "ftb/provider.hpp"

#include "ftb/errors.hpp"

#include <sstream>

namespace ftb {

ComputedCapacitance::ComputedCapacitance(ResonatorLayout layout,
                                         GreenParams params)
    : layout_(std::move(layout)), params_(params) {
    layout_.validate();
    params_.validate();
}

Eigen::MatrixXcd ComputedCapacitance::at(const Vec2 &alpha) const {
    const std::pair<double, double> key{alpha.x(), alpha.y()};
    {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    Eigen::MatrixXcd m = capacitance_matrix(layout_, alpha, params_).entries;
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.emplace(key, std::move(m)).first->second;
}

LoadedCapacitance::LoadedCapacitance(std::vector<CapacitanceMatrix> field) {
    if (field.empty()) throw ValidationError("empty capacitance field");
    n_ = field.front().size();
    for (auto &cm : field) {
        if (cm.size() != n_) {
            throw ValidationError("inconsistent matrix sizes in field");
        }
        samples_[{cm.alpha.x(), cm.alpha.y()}] = cm.entries;
    }
}

Eigen::MatrixXcd LoadedCapacitance::at(const Vec2 &alpha) const {
    const auto it = samples_.find({alpha.x(), alpha.y()});
    if (it != samples_.end()) return it->second;
    // tolerate tiny representation drift
    for (const auto &[key, m] : samples_) {
        if (std::abs(key.first - alpha.x()) < 1e-12 &&
            std::abs(key.second - alpha.y()) < 1e-12) {
            return m;
        }
    }
    std::ostringstream os;
    os << "loaded field has no sample at alpha = (" << alpha.x() << ", "
       << alpha.y() << ")";
    throw ValidationError(os.str());
}

M0Provider static_m0_provider(std::shared_ptr<const CapacitanceProvider> cap,
                              CouplingParams coupling) {
    coupling.validate(cap->size());
    return [cap, coupling](const Vec2 &alpha) {
        const Eigen::MatrixXcd c = cap->at(alpha);
        const int n = static_cast<int>(c.rows());
        const double k = coupling.delta * coupling.kappa_r / coupling.rho_r;
        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i) w(i) = k / coupling.volumes[i];
        return Eigen::MatrixXcd(w.asDiagonal() * c);
    };
}

} // namespace ftb
