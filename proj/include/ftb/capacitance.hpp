#pragma once

#include "ftb/green.hpp"
#include "ftb/lattice.hpp"

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace ftb {

/// N x N quasiperiodic capacitance matrix tagged by its quasimomentum.
struct CapacitanceMatrix {
    Vec2 alpha;
    Eigen::MatrixXcd entries;      // Hermitian-symmetrized
    double hermitian_defect = 0.0; // pre-symmetrization ||C - C^H|| / ||C||
    std::string layout_hash;

    int size() const { return static_cast<int>(entries.rows()); }
};

/// Nystrom matrix of the single layer potential: maps density values at the
/// midpoint nodes to potential values at the same nodes (quadrature weights
/// folded in). Size (N * M_b)^2. The log singularity on each disk is handled
/// with exact spectral weights on the uniform grid.
Eigen::MatrixXcd assemble_single_layer(const ResonatorLayout &layout,
                                       const Vec2 &alpha,
                                       const GreenParams &params);

/// Capacitance matrix C^alpha per Definition: solve the single-layer system
/// against boundary indicators and integrate the densities back.
CapacitanceMatrix capacitance_matrix(const ResonatorLayout &layout,
                                     const Vec2 &alpha,
                                     const GreenParams &params);

/// One entry of a capacitance field: either a computed matrix or a flagged
/// sample too close to the dual lattice.
struct FieldSample {
    Vec2 alpha;
    bool singular = false;
    CapacitanceMatrix matrix; // valid when !singular
};

/// Maps capacitance_matrix over the path samples. Samples within 1e-6 of a
/// dual-lattice point are flagged, not computed. jobs <= 0 means hardware
/// concurrency.
std::vector<FieldSample> capacitance_field(const ResonatorLayout &layout,
                                           const BrillouinPath &path,
                                           const GreenParams &params,
                                           int jobs = 0);

/// True if alpha is within tol of a dual-lattice point of the layout lattice.
bool near_dual_lattice(const Vec2 &alpha, const Lattice &lattice, double tol);

/// Matrix-field file format:
///   N <N> D <dim>
///   alpha <a1> <a2>
///   <2N reals: re im re im ...>   (N lines per sample)
/// Flagged samples are skipped on save.
void save_capacitance_field(const std::string &path,
                            const std::vector<FieldSample> &field);

std::vector<CapacitanceMatrix> load_capacitance(const std::string &path);

} // namespace ftb
