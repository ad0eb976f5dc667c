#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"
#include "reduce.hpp"
#include "vec3.hpp"

namespace dockette {

/// Flat gene vector: [tx, ty, tz, phi, theta, alpha, torsion_0, ...].
///
/// (phi, theta) give the rigid rotation axis (sin t cos p, sin t sin p, cos t)
/// and alpha the angle about it. Angles are never wrapped.
class Genotype {
public:
    static constexpr std::size_t kRigidGenes = 6;
    static constexpr std::size_t kTranslationGenes = 3;

    Genotype() : genes_(kRigidGenes, 0.0) {}
    explicit Genotype(std::size_t torsion_count) : genes_(kRigidGenes + torsion_count, 0.0) {}

    static Genotype from_genes(std::vector<double> genes) {
        if (genes.size() < kRigidGenes) throw std::invalid_argument("genotype needs at least 6 genes");
        Genotype g;
        g.genes_ = std::move(genes);
        return g;
    }

    std::size_t size() const noexcept { return genes_.size(); }
    std::size_t torsion_count() const noexcept { return genes_.size() - kRigidGenes; }

    std::span<double> genes() noexcept { return genes_; }
    std::span<const double> genes() const noexcept { return genes_; }
    double& operator[](std::size_t i) noexcept { return genes_[i]; }
    double operator[](std::size_t i) const noexcept { return genes_[i]; }

    Vec3 translation() const noexcept { return {genes_[0], genes_[1], genes_[2]}; }
    void set_translation(const Vec3& t) noexcept { genes_[0] = t.x; genes_[1] = t.y; genes_[2] = t.z; }
    double phi() const noexcept { return genes_[3]; }
    double theta() const noexcept { return genes_[4]; }
    double alpha() const noexcept { return genes_[5]; }
    void set_orientation(double phi, double theta, double alpha) noexcept { genes_[3] = phi; genes_[4] = theta; genes_[5] = alpha; }
    std::span<const double> torsion_angles() const noexcept { return std::span<const double>(genes_).subspan(kRigidGenes); }
    double& torsion_angle(std::size_t t) noexcept { return genes_[kRigidGenes + t]; }

    static constexpr bool is_translation_gene(std::size_t i) noexcept { return i < kTranslationGenes; }

    friend bool operator==(const Genotype&, const Genotype&) = default;

private:
    std::vector<double> genes_;
};

/// A prepared rotation about a line; cos/sin are evaluated once.
struct AxisRotation {
    Vec3 origin;
    Vec3 dir; // unit
    double c = 1.0;
    double s = 0.0;

    AxisRotation() = default;
    AxisRotation(const Vec3& axis_origin, const Vec3& axis_dir, double angle)
        : origin(axis_origin), dir(axis_dir), c(std::cos(angle)), s(std::sin(angle)) {}

    /// Rodrigues form, right-hand rule about `dir`.
    Vec3 apply(const Vec3& p) const noexcept {
        if (s == 0.0 && c == 1.0) return p; // exact identity, no round trip through the origin
        const Vec3 v = p - origin;
        const Vec3 k_cross_v = cross(dir, v);
        const double k_dot_v = dot(dir, v);
        return origin + v * c + k_cross_v * s + dir * (k_dot_v * (1.0 - c));
    }
};

inline constexpr double kUnitAxisTolerance = 1e-12;

inline void check_unit_axis(const Vec3& dir) {
    if (!(std::abs(norm(dir) - 1.0) <= kUnitAxisTolerance)) throw std::invalid_argument("rotation axis must have unit norm");
}

inline std::vector<Vec3> axis_angle_rotate(std::span<const Vec3> points, const Vec3& axis_origin, const Vec3& axis_dir, double angle) {
    check_unit_axis(axis_dir);
    const AxisRotation rot(axis_origin, axis_dir, angle);
    std::vector<Vec3> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(rot.apply(p));
    return out;
}

/// Rotation for torsion `t` given the current (partially rotated)
/// coordinates of its axis atoms.
inline AxisRotation torsion_rotation(const Torsion& t, std::span<const Vec3> coords, double angle) {
    const Vec3 a = coords[static_cast<std::size_t>(t.axis_a)];
    const Vec3 axis = coords[static_cast<std::size_t>(t.axis_b)] - a;
    return AxisRotation(a, axis * (1.0 / norm(axis)), angle);
}

inline Vec3 orientation_axis(double phi, double theta) noexcept {
    const double st = std::sin(theta);
    return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

/// Centroid under the library's fixed-order summation.
inline Vec3 centroid(std::span<const Vec3> coords) {
    const Vec3 sum = fixed_order_sum<Vec3>(coords);
    return sum * (1.0 / static_cast<double>(coords.size()));
}

inline void check_genotype_dimension(const Ligand& ligand, const Genotype& genotype) {
    if (genotype.torsion_count() != ligand.torsion_count())
        throw std::invalid_argument("genotype has " + std::to_string(genotype.torsion_count()) + " torsion genes, ligand has " +
                                    std::to_string(ligand.torsion_count()) + " torsions");
}

/// Rigid-body stage of a pose build, applied in place to post-torsion
/// coordinates.
inline void apply_rigid_transform(const Genotype& genotype, std::span<Vec3> coords) {
    const Vec3 center = centroid(coords);
    const AxisRotation rot(center, orientation_axis(genotype.phi(), genotype.theta()), genotype.alpha());
    const Vec3 shift = genotype.translation();
    for (auto& p : coords) p = rot.apply(p) + shift;
}

/// Writes the pose into `out` (resized to the atom count). Torsions are
/// applied one after another in listed order, then the ligand is rotated
/// about its centroid and translated.
inline void build_pose_into(const Ligand& ligand, const Genotype& genotype, std::vector<Vec3>& out) {
    check_genotype_dimension(ligand, genotype);
    out.resize(ligand.atoms.size());
    for (std::size_t a = 0; a < ligand.atoms.size(); ++a) out[a] = ligand.atoms[a].position;
    const auto angles = genotype.torsion_angles();
    for (std::size_t t = 0; t < ligand.torsions.size(); ++t) {
        const Torsion& tor = ligand.torsions[t];
        const AxisRotation rot = torsion_rotation(tor, out, angles[t]);
        for (int m : tor.moved) {
            auto& p = out[static_cast<std::size_t>(m)];
            p = rot.apply(p);
        }
    }
    apply_rigid_transform(genotype, out);
}

inline std::vector<Vec3> build_pose(const Ligand& ligand, const Genotype& genotype) {
    std::vector<Vec3> out;
    build_pose_into(ligand, genotype, out);
    return out;
}

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace dockette
