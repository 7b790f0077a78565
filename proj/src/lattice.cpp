#include "ftb/lattice.hpp"

#include "ftb/errors.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <sstream>

namespace ftb {

namespace {
constexpr double kPi = std::numbers::pi;
}

Lattice Lattice::from_vectors(const Vec2 &v1, const Vec2 &v2) {
    const double det = v1.x() * v2.y() - v1.y() * v2.x();
    const double scale = std::max(v1.norm(), v2.norm());
    if (std::abs(det) <= 1e-12 * scale * scale) {
        throw GeometryError("lattice vectors are linearly dependent");
    }
    Lattice l;
    l.l1 = v1;
    l.l2 = v2;
    l.cell_volume = std::abs(det);
    return l;
}

Lattice Lattice::unit_square() {
    return from_vectors(Vec2(1.0, 0.0), Vec2(0.0, 1.0));
}

std::pair<Vec2, Vec2> dual_lattice(const Lattice &lattice) {
    Eigen::Matrix2d L;
    L.row(0) = lattice.l1;
    L.row(1) = lattice.l2;
    const double det = L.determinant();
    const double scale = std::max(lattice.l1.norm(), lattice.l2.norm());
    if (std::abs(det) <= 1e-12 * scale * scale) {
        throw GeometryError("singular lattice matrix in dual_lattice");
    }
    const Eigen::Matrix2d Q = 2.0 * kPi * L.inverse().transpose();
    // Q columns are... rows q_i of the dual basis satisfy L * Q^T = 2pi Id.
    return {Q.row(0).transpose(), Q.row(1).transpose()};
}

std::vector<double> ResonatorLayout::volumes() const {
    std::vector<double> v(radii.size());
    for (size_t i = 0; i < radii.size(); ++i) v[i] = kPi * radii[i] * radii[i];
    return v;
}

std::string ResonatorLayout::hash() const {
    // FNV-1a over the raw geometry payload; stable across runs.
    uint64_t h = 1469598103934665603ull;
    auto feed = [&h](const void *p, size_t n) {
        const auto *b = static_cast<const unsigned char *>(p);
        for (size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    auto feed_d = [&](double x) { feed(&x, sizeof x); };
    feed_d(lattice.l1.x());
    feed_d(lattice.l1.y());
    feed_d(lattice.l2.x());
    feed_d(lattice.l2.y());
    for (int i = 0; i < size(); ++i) {
        feed_d(centers[i].x());
        feed_d(centers[i].y());
        feed_d(radii[i]);
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void ResonatorLayout::validate() const {
    if (centers.size() != radii.size()) {
        throw GeometryError("centers/radii size mismatch");
    }
    const int n = size();
    for (int i = 0; i < n; ++i) {
        if (radii[i] <= 0.0) throw GeometryError("non-positive disk radius");
    }
    // Pairwise disjointness within the cell and across the 8 neighbor cells.
    for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
            const Vec2 shift = di * lattice.l1 + dj * lattice.l2;
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    if (di == 0 && dj == 0 && a >= b) continue;
                    const double dist = (centers[a] - (centers[b] + shift)).norm();
                    if (dist <= radii[a] + radii[b]) {
                        std::ostringstream os;
                        os << "disks " << a << " and " << b << " overlap";
                        if (di != 0 || dj != 0) {
                            os << " (translate " << di << "," << dj << ")";
                        }
                        throw GeometryError(os.str());
                    }
                }
            }
        }
    }
    // Each disk must fit in the closure of one period tile: its center in
    // fractional coordinates, inflated by the radius, stays within [0, 1].
    Eigen::Matrix2d L;
    L.col(0) = lattice.l1;
    L.col(1) = lattice.l2;
    const Eigen::Matrix2d Linv = L.inverse();
    for (int i = 0; i < n; ++i) {
        const Vec2 f = Linv * centers[i];
        // conservative bound on the fractional-coordinate inflation
        const double pad = radii[i] * Linv.norm();
        for (int c = 0; c < 2; ++c) {
            if (f[c] - pad < -1e-12 || f[c] + pad > 1.0 + 1e-12) {
                std::ostringstream os;
                os << "disk " << i << " does not fit inside one period tile";
                throw GeometryError(os.str());
            }
        }
    }
}

double default_radius(LayoutKind kind) {
    switch (kind) {
    case LayoutKind::chain3:
    case LayoutKind::square3: return 0.1;
    case LayoutKind::honeycomb6: return 0.12;
    }
    return 0.1;
}

ResonatorLayout standard_layout(LayoutKind kind, double radius) {
    if (radius <= 0.0) throw GeometryError("radius must be positive");
    ResonatorLayout lay;
    switch (kind) {
    case LayoutKind::chain3:
    case LayoutKind::square3: {
        lay.lattice = Lattice::unit_square();
        lay.centers = {Vec2(0.24, 0.65), Vec2(0.5, 0.2), Vec2(0.76, 0.65)};
        lay.radii = {radius, radius, radius};
        break;
    }
    case LayoutKind::honeycomb6: {
        const double s = 1.5;
        lay.lattice = Lattice::from_vectors(
            s * Vec2(1.0, 1.0 / std::sqrt(3.0)), s * Vec2(1.0, -1.0 / std::sqrt(3.0)));
        const Vec2 a1(1.0, 0.0), a2(2.0, 0.0);
        const double R = radius;
        auto at = [R](const Vec2 &anchor, double angle) {
            return Vec2(anchor + 3.0 * R * Vec2(std::cos(angle), std::sin(angle)));
        };
        lay.centers = {at(a1, 0.0),          at(a1, 2.0 * kPi / 3.0),
                       at(a1, 4.0 * kPi / 3.0), at(a2, kPi / 3.0),
                       at(a2, kPi),         at(a2, 5.0 * kPi / 3.0)};
        lay.radii.assign(6, radius);
        break;
    }
    }
    lay.validate();
    return lay;
}

LayoutKind layout_kind_from_string(const std::string &name) {
    if (name == "chain3") return LayoutKind::chain3;
    if (name == "square3") return LayoutKind::square3;
    if (name == "honeycomb6") return LayoutKind::honeycomb6;
    throw ConfigError("unknown layout kind: " + name);
}

std::string to_string(LayoutKind kind) {
    switch (kind) {
    case LayoutKind::chain3: return "chain3";
    case LayoutKind::square3: return "square3";
    case LayoutKind::honeycomb6: return "honeycomb6";
    }
    return "?";
}

PathKind path_kind_from_string(const std::string &name) {
    if (name == "chain") return PathKind::chain;
    if (name == "square") return PathKind::square;
    if (name == "honeycomb") return PathKind::honeycomb;
    throw ConfigError("unknown path kind: " + name);
}

std::string to_string(PathKind kind) {
    switch (kind) {
    case PathKind::chain: return "chain";
    case PathKind::square: return "square";
    case PathKind::honeycomb: return "honeycomb";
    }
    return "?";
}

Vec2 honeycomb_K(const Lattice &lattice) {
    auto [q1, q2] = dual_lattice(lattice);
    return (2.0 * q1 + q2) / 3.0;
}

Vec2 honeycomb_M(const Lattice &lattice) {
    auto [q1, q2] = dual_lattice(lattice);
    (void)q2;
    return q1 / 2.0;
}

std::optional<int> BrillouinPath::mirror_index(int i) const {
    if (i < 0 || i >= size()) return std::nullopt;
    const Vec2 want = -points[i].alpha;
    // Mirror samples are constructed by exact negation; search from the
    // mirrored position outward to keep this O(1) for the built-in paths.
    const int guess = size() - 1 - i;
    auto matches = [&](int j) {
        return j >= 0 && j < size() && points[j].alpha.x() == want.x() &&
               points[j].alpha.y() == want.y();
    };
    if (matches(guess)) return guess;
    for (int j = 0; j < size(); ++j) {
        if (matches(j)) return j;
    }
    return std::nullopt;
}

double BrillouinPath::total_length() const {
    return points.empty() ? 0.0 : points.back().s;
}

namespace {

BrillouinPath build_mirrored_path(std::vector<BrillouinPath::Vertex> half_vertices,
                                  int samples_per_segment) {
    // Sample the first half, then append its reversed exact negation.
    BrillouinPath path;
    path.samples_per_segment = samples_per_segment;
    const int S = samples_per_segment;
    std::vector<Vec2> half;
    for (size_t seg = 0; seg + 1 < half_vertices.size(); ++seg) {
        const Vec2 a = half_vertices[seg].alpha;
        const Vec2 b = half_vertices[seg + 1].alpha;
        for (int j = (seg == 0 ? 0 : 1); j < S; ++j) {
            const double t = static_cast<double>(j) / (S - 1);
            half.push_back(j == S - 1 ? b : Vec2(a + t * (b - a)));
        }
    }
    std::vector<Vec2> pts = half;
    for (int j = static_cast<int>(half.size()) - 2; j >= 0; --j) {
        pts.push_back(-half[j]);
    }
    path.vertices = half_vertices;
    for (size_t k = half_vertices.size(); k-- > 1;) {
        path.vertices.push_back({"-" + half_vertices[k - 1].label,
                                 Vec2(-half_vertices[k - 1].alpha)});
    }
    double s = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) s += (pts[i] - pts[i - 1]).norm();
        path.points.push_back({pts[i], s});
    }
    return path;
}

} // namespace

BrillouinPath symmetry_path(PathKind kind, int samples_per_segment) {
    if (samples_per_segment < 2) {
        throw ConfigError("samples_per_segment must be >= 2");
    }
    const int S = samples_per_segment;
    if (kind == PathKind::chain) {
        BrillouinPath path;
        path.samples_per_segment = S;
        path.vertices = {{"-pi", Vec2(-kPi, 0.0)}, {"pi", Vec2(kPi, 0.0)}};
        for (int j = 0; j < S; ++j) {
            const double t = static_cast<double>(j) / (S - 1);
            const double a1 = kPi * (2.0 * t - 1.0); // exact negation pairing
            path.points.push_back({Vec2(a1, 0.0), a1 + kPi});
        }
        return path;
    }
    if (kind == PathKind::square) {
        const Vec2 G(0.0, 0.0), M(kPi, kPi), X(kPi, 0.0);
        return build_mirrored_path({{"Gamma", G}, {"M", M}, {"X", X}, {"Gamma", G}}, S);
    }
    // honeycomb
    const ResonatorLayout lay = standard_layout(LayoutKind::honeycomb6,
                                                default_radius(LayoutKind::honeycomb6));
    const Vec2 G(0.0, 0.0);
    const Vec2 M = honeycomb_M(lay.lattice);
    const Vec2 K = honeycomb_K(lay.lattice);
    return build_mirrored_path({{"Gamma", G}, {"M", M}, {"K", K}, {"Gamma", G}}, S);
}

BrillouinPath symmetry_path_resolution(PathKind kind, double max_spacing) {
    if (max_spacing <= 0.0) throw ConfigError("max_spacing must be positive");
    // Longest segment decides the per-segment sampling.
    BrillouinPath coarse = symmetry_path(kind, 2);
    double longest = 0.0;
    for (size_t v = 0; v + 1 < coarse.vertices.size(); ++v) {
        longest = std::max(longest,
                           (coarse.vertices[v + 1].alpha - coarse.vertices[v].alpha).norm());
    }
    const int S = std::max(2, static_cast<int>(std::ceil(longest / max_spacing)) + 1);
    return symmetry_path(kind, S);
}

} // namespace ftb
