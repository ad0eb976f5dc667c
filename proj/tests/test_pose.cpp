#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace dockette;
using dockette::testing::bundled_ligand;

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

// R = I + sin(a) K + (1 - cos(a)) K^2, K the cross-product matrix of the axis.
Mat3 rodrigues_matrix(const Vec3& k, double angle) {
    const Mat3 K{{{0, -k.z, k.y}, {k.z, 0, -k.x}, {-k.y, k.x, 0}}};
    Mat3 K2{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int m = 0; m < 3; ++m) K2[i][j] += K[i][m] * K[m][j];
    Mat3 R{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) R[i][j] = (i == j ? 1.0 : 0.0) + std::sin(angle) * K[i][j] + (1.0 - std::cos(angle)) * K2[i][j];
    return R;
}

Vec3 rotate_with_matrix(const Mat3& R, const Vec3& origin, const Vec3& p) {
    const std::array<double, 3> v{p.x - origin.x, p.y - origin.y, p.z - origin.z};
    std::array<double, 3> o{};
    for (int i = 0; i < 3; ++i) o[i] = R[i][0] * v[0] + R[i][1] * v[1] + R[i][2] * v[2];
    return {origin.x + o[0], origin.y + o[1], origin.z + o[2]};
}

void expect_near(const Vec3& a, const Vec3& b, double tol) {
    EXPECT_NEAR(a.x, b.x, tol);
    EXPECT_NEAR(a.y, b.y, tol);
    EXPECT_NEAR(a.z, b.z, tol);
}

Ligand chain4() {
    Ligand lig;
    lig.atoms = {{0, "C", 0, {0.0, 0.0, 0.0}}, {1, "C", 0, {1.5, 0.0, 0.0}}, {2, "C", 0, {2.0, 1.4, 0.0}}, {3, "C", 0, {3.5, 1.6, 0.3}}};
    lig.torsions = {{1, 2, {3}}};
    return lig;
}

double max_relative_distance_error(std::span<const Vec3> a, std::span<const Vec3> b, std::span<const int> idx) {
    double worst = 0.0;
    for (std::size_t x = 0; x < idx.size(); ++x)
        for (std::size_t y = x + 1; y < idx.size(); ++y) {
            const double d0 = distance(a[idx[x]], a[idx[y]]);
            const double d1 = distance(b[idx[x]], b[idx[y]]);
            worst = std::max(worst, std::abs(d1 - d0) / std::max(d0, 1e-300));
        }
    return worst;
}

} // namespace

TEST(Pose, ZeroGenesReproduceReference) {
    for (const char* label : {"small", "medium", "large"}) {
        const Ligand& lig = bundled_ligand(label);
        EXPECT_EQ(build_pose(lig, Genotype(lig.torsion_count())), lig.reference_coordinates()) << label;
    }
}

TEST(Pose, PureTranslation) {
    const Ligand& lig = bundled_ligand("medium");
    Genotype g(lig.torsion_count());
    g.set_translation({1, 2, 3});
    const auto pose = build_pose(lig, g);
    for (std::size_t a = 0; a < lig.atom_count(); ++a) EXPECT_EQ(pose[a], (lig.atoms[a].position + Vec3{1, 2, 3}));
}

TEST(Pose, HalfTurnTorsionMatchesMatrixOracle) {
    const Ligand lig = chain4();
    Genotype g(1);
    g.torsion_angle(0) = std::numbers::pi;
    const auto pose = build_pose(lig, g);
    const Vec3 B = lig.atoms[1].position, C = lig.atoms[2].position, D = lig.atoms[3].position;
    const Vec3 k = (C - B) * (1.0 / norm(C - B));
    expect_near(pose[3], rotate_with_matrix(rodrigues_matrix(k, std::numbers::pi), B, D), 1e-12);
    // A half turn reflects D through its foot point on the axis.
    const Vec3 foot = B + k * dot(D - B, k);
    expect_near(pose[3], foot * 2.0 - D, 1e-12);
    for (int a = 0; a < 3; ++a) EXPECT_EQ(pose[a], lig.atoms[a].position);
}

TEST(Pose, GeneralTorsionMatchesMatrixOracle) {
    const Ligand lig = chain4();
    for (double angle : {0.3, -1.7, 2.5, 7.1}) {
        Genotype g(1);
        g.torsion_angle(0) = angle;
        const Vec3 B = lig.atoms[1].position, C = lig.atoms[2].position;
        const Vec3 k = (C - B) * (1.0 / norm(C - B));
        expect_near(build_pose(lig, g)[3], rotate_with_matrix(rodrigues_matrix(k, angle), B, lig.atoms[3].position), 1e-12);
    }
}

TEST(AxisAngle, Identities) {
    const std::vector<Vec3> pts{{1, 2, 3}, {-0.5, 4.25, 1e-3}, {0, 0, 0}};
    const Vec3 origin{0.3, -1, 2};
    const Vec3 dir = Vec3{1, 2, 2} * (1.0 / 3.0);
    EXPECT_EQ(axis_angle_rotate(pts, origin, dir, 0.0), pts);
    const auto full = axis_angle_rotate(pts, origin, dir, kTwoPi);
    for (std::size_t i = 0; i < pts.size(); ++i) expect_near(full[i], pts[i], 1e-12);
    const std::vector<Vec3> x{{1, 0, 0}};
    expect_near(axis_angle_rotate(x, {0, 0, 0}, {0, 0, 1}, std::numbers::pi / 2)[0], {0, 1, 0}, 1e-15);
}

TEST(AxisAngle, RejectsNonUnitAxis) {
    const std::vector<Vec3> p{{1, 0, 0}};
    EXPECT_THROW(axis_angle_rotate(p, {0, 0, 0}, {0, 0, 2}, 1.0), std::invalid_argument);
    EXPECT_THROW(axis_angle_rotate(p, {0, 0, 0}, {0, 0, 0}, 1.0), std::invalid_argument);
}

TEST(Pose, GenotypeDimensionIsChecked) {
    EXPECT_THROW(build_pose(bundled_ligand("small"), Genotype(3)), std::invalid_argument);
}

TEST(Pose, RigidStepPreservesDistances) {
    const GridMaps& grid = dockette::testing::bundled_grid();
    for (const char* label : {"small", "medium", "large"}) {
        const Ligand& lig = bundled_ligand(label);
        std::vector<int> all(lig.atom_count());
        std::iota(all.begin(), all.end(), 0);
        for (std::uint32_t s = 0; s < 50; ++s) {
            const Genotype g = dockette::testing::random_test_genotype(lig, grid, 5, s);
            Genotype torsions_only = g;
            for (std::size_t i = 0; i < 6; ++i) torsions_only[i] = 0.0;
            const auto flexed = build_pose(lig, torsions_only);
            const auto posed = build_pose(lig, g);
            EXPECT_LE(max_relative_distance_error(flexed, posed, all), 1e-9) << label << " " << s;
        }
    }
}

TEST(Pose, TorsionsPreserveGroupDistances) {
    const Ligand& lig = bundled_ligand("large");
    const GridMaps& grid = dockette::testing::bundled_grid();
    for (std::uint32_t s = 0; s < 20; ++s) {
        const Genotype g = dockette::testing::random_test_genotype(lig, grid, 9, s);
        // Apply torsions one at a time and compare each step with the last.
        std::vector<Vec3> prev = lig.reference_coordinates();
        for (std::size_t t = 0; t < lig.torsion_count(); ++t) {
            const Torsion& tor = lig.torsions[t];
            std::vector<Vec3> next = prev;
            const AxisRotation rot = torsion_rotation(tor, prev, g.torsion_angles()[t]);
            for (int m : tor.moved) next[m] = rot.apply(prev[m]);
            std::vector<int> group = tor.moved;
            group.push_back(tor.axis_a);
            group.push_back(tor.axis_b);
            EXPECT_LE(max_relative_distance_error(prev, next, group), 1e-9);
            prev = std::move(next);
        }
        Genotype flex_only = g;
        for (std::size_t i = 0; i < 6; ++i) flex_only[i] = 0.0;
        EXPECT_EQ(build_pose(lig, flex_only), prev);
    }
}

TEST(Pose, CentroidMovesByTranslation) {
    const GridMaps& grid = dockette::testing::bundled_grid();
    const Ligand& lig = bundled_ligand("medium");
    for (std::uint32_t s = 0; s < 30; ++s) {
        const Genotype g = dockette::testing::random_test_genotype(lig, grid, 3, s);
        Genotype flex_only = g;
        for (std::size_t i = 0; i < 6; ++i) flex_only[i] = 0.0;
        const Vec3 before = centroid(build_pose(lig, flex_only));
        const Vec3 after = centroid(build_pose(lig, g));
        expect_near(after, before + g.translation(), 1e-9);
    }
}

TEST(Pose, Deterministic) {
    const Ligand& lig = bundled_ligand("large");
    const Genotype g = dockette::testing::random_test_genotype(lig, dockette::testing::bundled_grid(), 1, 1);
    EXPECT_EQ(build_pose(lig, g), build_pose(lig, g));
}
