#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace ftb {

using Vec2 = Eigen::Vector2d;

/// Two-dimensional periodic lattice spanned by l1, l2.
struct Lattice {
    Vec2 l1;
    Vec2 l2;
    double cell_volume = 0.0; // |det[l1 l2]|

    /// Validates linear independence and computes the cell volume.
    static Lattice from_vectors(const Vec2 &l1, const Vec2 &l2);

    static Lattice unit_square();
};

/// Dual vectors q1, q2 with l_i . q_j = 2*pi*delta_ij.
std::pair<Vec2, Vec2> dual_lattice(const Lattice &lattice);

/// Disk resonators inside one unit cell of a lattice.
struct ResonatorLayout {
    Lattice lattice;
    std::vector<Vec2> centers;
    std::vector<double> radii;

    int size() const { return static_cast<int>(centers.size()); }
    std::vector<double> volumes() const; // pi R_i^2

    /// Stable identifier of the generating geometry (content hash).
    std::string hash() const;

    /// Throws GeometryError if disks overlap (checked across the 8 neighbor
    /// translates) or a disk does not fit into one period tile.
    void validate() const;
};

enum class LayoutKind { chain3, square3, honeycomb6 };

/// Built-in layouts. chain3 shares the square3 geometry; it differs only in
/// the Brillouin path used to sweep it.
ResonatorLayout standard_layout(LayoutKind kind, double radius);

/// Default radius for each standard layout.
double default_radius(LayoutKind kind);

LayoutKind layout_kind_from_string(const std::string &name);
std::string to_string(LayoutKind kind);

enum class PathKind { chain, square, honeycomb };

PathKind path_kind_from_string(const std::string &name);
std::string to_string(PathKind kind);

/// Sampled path through the Brillouin zone. The second half of the built-in
/// paths is the exact negation of the first half, so every sample alpha has
/// a bit-exact mirror sample -alpha.
struct BrillouinPath {
    struct Vertex {
        std::string label;
        Vec2 alpha;
    };
    struct Sample {
        Vec2 alpha;
        double s = 0.0; // arclength parameter
    };

    std::vector<Vertex> vertices;
    int samples_per_segment = 0;
    std::vector<Sample> points;

    int size() const { return static_cast<int>(points.size()); }

    /// Index of the sample at -alpha(i), when the path contains one.
    std::optional<int> mirror_index(int i) const;

    double total_length() const;
};

/// Symmetry path for the given lattice family:
///   chain:     a single segment alpha1 in [-pi, pi] along (alpha1, 0)
///   square:    Gamma -> M -> X -> Gamma -> -X -> -M -> Gamma
///   honeycomb: Gamma -> M -> K -> Gamma -> -K -> -M -> Gamma
/// samples_per_segment >= 2; internal junction samples are deduplicated.
BrillouinPath symmetry_path(PathKind kind, int samples_per_segment);

/// Same vertices, with per-segment sampling chosen so that the arclength
/// resolution is at most max_spacing.
BrillouinPath symmetry_path_resolution(PathKind kind, double max_spacing);

/// Symmetry points of the honeycomb layout's hexagonal lattice.
Vec2 honeycomb_K(const Lattice &lattice);
Vec2 honeycomb_M(const Lattice &lattice);

} // namespace ftb
