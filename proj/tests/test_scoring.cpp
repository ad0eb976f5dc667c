#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "reference.hpp"
#include "support.hpp"

using namespace dockette;
using dockette::testing::make_grid;

namespace {

Ligand one_atom(const std::string& type, double charge, Vec3 p) {
    Ligand lig;
    lig.atoms = {{0, type, charge, p}};
    return lig;
}

PairParams plain(double r_eq, double eps) {
    PairParams p;
    p.r_eq = r_eq;
    p.eps = eps;
    return p;
}

} // namespace

TEST(Trilinear, ExactAtNodes) {
    const GridMaps g = make_grid({4, 5, 3}, 0.375, {-1.5, 0.25, 2.0}, {"C"}, [](int i, int j, int k, std::size_t) { return std::cos(i * 1.3 + j * j * 0.21 - k); });
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 5; ++j)
            for (int i = 0; i < 4; ++i) {
                const Vec3 p{g.origin.x + i * g.spacing, g.origin.y + j * g.spacing, g.origin.z + k * g.spacing};
                EXPECT_EQ(trilinear(g, g.type_maps[0], p), g.type_maps[0][g.node_index(i, j, k)]);
            }
}

TEST(Trilinear, CellCentreIsMeanOfCorners) {
    const GridMaps g = make_grid({2, 2, 2}, 1.0, {0, 0, 0}, {"C"}, [](int i, int j, int k, std::size_t) { return i + 2.0 * j + 4.0 * k; });
    EXPECT_EQ(trilinear(g, g.type_maps[0], {0.5, 0.5, 0.5}), 3.5);
}

TEST(Trilinear, BoundedByCorners) {
    const GridMaps g = make_grid({2, 2, 2}, 1.5, {0, 0, 0}, {"C"}, [](int i, int j, int k, std::size_t) { return std::sin(7.0 * i + 3.0 * j - 5.0 * k); });
    const auto [lo, hi] = std::minmax_element(g.type_maps[0].begin(), g.type_maps[0].end());
    Draws d(RngKey{3, 0, 0, 0, 0});
    for (int n = 0; n < 10000; ++n) {
        const double v = trilinear(g, g.type_maps[0], {1.5 * d.uniform(), 1.5 * d.uniform(), 1.5 * d.uniform()});
        ASSERT_GE(v, *lo);
        ASSERT_LE(v, *hi);
    }
}

TEST(Trilinear, LinearAlongAxes) {
    const GridMaps g = make_grid({6, 6, 6}, 0.5, {1, 1, 1}, {"C"}, [](int i, int j, int k, std::size_t) { return std::sin(i * 0.9) * std::cos(j * 1.7) + k * k; });
    for (int i = 0; i + 1 < 6; ++i)
        for (double f : {0.0, 0.125, 0.5, 0.8}) {
            const double v0 = g.type_maps[0][g.node_index(i, 2, 3)];
            const double v1 = g.type_maps[0][g.node_index(i + 1, 2, 3)];
            const Vec3 p{1 + (i + f) * 0.5, 2.0, 2.5};
            EXPECT_NEAR(trilinear(g, g.type_maps[0], p), v0 + f * (v1 - v0), 1e-12);
        }
    // A linear field is reproduced everywhere.
    const GridMaps lin = make_grid({5, 5, 5}, 0.25, {0, 0, 0}, {"C"}, [](int i, int j, int k, std::size_t) { return 2.0 * i - 3.0 * j + 0.5 * k; });
    Draws d(RngKey{4, 0, 0, 0, 0});
    for (int n = 0; n < 1000; ++n) {
        const Vec3 p{d.uniform(), d.uniform(), d.uniform()};
        EXPECT_NEAR(trilinear(lin, lin.type_maps[0], p), (2.0 * p.x - 3.0 * p.y + 0.5 * p.z) / 0.25, 1e-11);
    }
}

TEST(Intermolecular, AtomOnANode) {
    // maps: C, E, D
    const GridMaps g = make_grid({3, 3, 3}, 1.0, {0, 0, 0}, {"C"}, [](int, int, int, std::size_t m) { return m == 0 ? -1.25 : (m == 1 ? 2.0 : 0.5); });
    const std::vector<Vec3> at{{1, 1, 1}};
    const GridMaps g0 = make_grid({3, 3, 3}, 1.0, {0, 0, 0}, {"C"}, [](int, int, int, std::size_t m) { return m == 0 ? -1.25 : (m == 1 ? 2.0 : 0.0); });
    EXPECT_EQ(intermolecular_energy(g0, one_atom("C", 0.0, {1, 1, 1}), at), -1.25);
    EXPECT_EQ(intermolecular_energy(g, one_atom("C", 1.0, {1, 1, 1}), at), 1.25);
    EXPECT_EQ(intermolecular_energy(g, one_atom("C", -1.0, {1, 1, 1}), at), -1.25 - 2.0 + 0.5);
}

TEST(Intermolecular, OutOfGridPenalty) {
    const GridMaps g = make_grid({3, 3, 3}, 1.0, {0, 0, 0}, {"C"}, [](int, int, int, std::size_t) { return 0.0; });
    const Ligand lig = one_atom("C", 0.0, {0, 0, 0});
    EXPECT_EQ(intermolecular_energy(g, lig, std::vector<Vec3>{{12, 1, 1}}), 100000.0 * 11.0);
    EXPECT_EQ(intermolecular_energy(g, lig, std::vector<Vec3>{{-3, -4, 1}}), 100000.0 * 6.0);
    EXPECT_EQ(intermolecular_energy(g, lig, std::vector<Vec3>{{2, 2, 2}}), 0.0);
}

TEST(Intermolecular, MissingTypeMapThrows) {
    const GridMaps g = make_grid({2, 2, 2}, 1.0, {0, 0, 0}, {"C"}, [](int, int, int, std::size_t) { return 0.0; });
    EXPECT_THROW(Scorer(one_atom("OA", 0.0, {0, 0, 0}), g), std::invalid_argument);
}

TEST(PairEnergy, LennardJonesMinimum) {
    EXPECT_DOUBLE_EQ(pair_energy(plain(4.0, 0.15), 0, 0, 4.0), -0.15);
    PairParams hb = plain(1.9, 0.3);
    hb.is_hbond = true;
    EXPECT_DOUBLE_EQ(pair_energy(hb, 0, 0, 1.9), -0.3);
    // The minimum is a minimum.
    EXPECT_GT(pair_energy(plain(4.0, 0.15), 0, 0, 3.9), -0.15);
    EXPECT_GT(pair_energy(plain(4.0, 0.15), 0, 0, 4.1), -0.15);
}

TEST(PairEnergy, Coulomb) {
    EXPECT_DOUBLE_EQ(pair_energy(plain(4.0, 0.0), 1.0, 1.0, 2.0), 332.06363 / 16.0);
    EXPECT_NEAR(pair_energy(plain(4.0, 0.0), 1.0, 1.0, 2.0), 20.75397687, 1e-8);
}

TEST(PairEnergy, Desolvation) {
    PairParams p = plain(4.0, 0.0);
    p.s_i = -0.002;
    p.v_i = 30.0;
    p.s_j = 0.001;
    p.v_j = 20.0;
    EXPECT_DOUBLE_EQ(pair_energy(p, 0, 0, 3.0), (-0.002 * 20.0 + 0.001 * 30.0) * std::exp(-9.0 / 25.92));
}

TEST(PairEnergy, ClampAndDecay) {
    const PairParams p = plain(4.0, 0.15);
    EXPECT_EQ(pair_energy(p, 0, 0, 0.0), pair_energy(p, 0, 0, 0.01));
    EXPECT_GT(pair_energy(p, 0, 0, 0.01), 1e30);
    EXPECT_LT(std::abs(pair_energy(p, 0, 0, 200.0)), 1e-6);
    const PairParams c = builtin_type_table().combine("C", "OA");
    EXPECT_LT(std::abs(pair_energy(c, 0, 0, 50.0 * c.r_eq)), 1e-6);
}

TEST(PairEnergy, HbondRoles) {
    const TypeTable& t = builtin_type_table();
    EXPECT_TRUE(t.combine("HD", "OA").is_hbond);
    EXPECT_TRUE(t.combine("NA", "HD").is_hbond);
    EXPECT_FALSE(t.combine("HD", "HD").is_hbond);
    EXPECT_FALSE(t.combine("OA", "NA").is_hbond);
    EXPECT_FALSE(t.combine("C", "OA").is_hbond);
    EXPECT_FALSE(t.combine("H", "OA").is_hbond);
    const PairParams c = t.combine("C", "OA");
    EXPECT_DOUBLE_EQ(c.r_eq, 3.6);
    EXPECT_DOUBLE_EQ(c.eps, std::sqrt(0.15 * 0.2));
}

TEST(Intramolecular, Basics) {
    Ligand lig;
    lig.atoms = {{0, "C", 0.0, {0, 0, 0}}, {1, "C", 0.0, {4, 0, 0}}};
    EXPECT_EQ(intramolecular_energy(lig, lig.reference_coordinates()), 0.0);
    lig.intra_pairs = {{0, 1}};
    const TypeParams& c = builtin_type_table().at("C");
    const double solv = 2.0 * c.solvation * c.volume * std::exp(-16.0 / 25.92);
    EXPECT_DOUBLE_EQ(intramolecular_energy(lig, lig.reference_coordinates()), -0.15 + solv);
}

TEST(Intramolecular, RigidInvariance) {
    const GridMaps& grid = dockette::testing::bundled_grid();
    for (const char* label : {"small", "medium", "large"}) {
        const Ligand& lig = dockette::testing::bundled_ligand(label);
        for (std::uint32_t s = 0; s < 20; ++s) {
            Genotype g = dockette::testing::random_test_genotype(lig, grid, 17, s);
            Genotype flex = g;
            for (std::size_t i = 0; i < 6; ++i) flex[i] = 0.0;
            const double a = intramolecular_energy(lig, build_pose(lig, flex));
            const double b = intramolecular_energy(lig, build_pose(lig, g));
            EXPECT_LE(std::abs(a - b), 1e-9 * std::max(1.0, std::abs(a))) << label << " " << s;
        }
    }
}

TEST(TotalEnergy, SumOfParts) {
    const GridMaps& grid = dockette::testing::bundled_grid();
    const Ligand& lig = dockette::testing::bundled_ligand("medium");
    for (std::uint32_t s = 0; s < 20; ++s) {
        const auto xyz = build_pose(lig, dockette::testing::random_test_genotype(lig, grid, 2, s));
        const EnergyBreakdown e = total_energy(grid, lig, xyz);
        EXPECT_EQ(e.total, e.inter + e.intra);
        EXPECT_EQ(e.inter, intermolecular_energy(grid, lig, xyz));
        EXPECT_EQ(e.intra, intramolecular_energy(lig, xyz));
    }
    const Ligand single = one_atom("C", 0.2, {0, 0, 0});
    const std::vector<Vec3> p{{1.3, -2.2, 0.7}};
    const EnergyBreakdown e = total_energy(grid, single, p);
    EXPECT_EQ(e.intra, 0.0);
    EXPECT_EQ(e.total, e.inter);
}

TEST(TotalEnergy, MatchesSerialReference) {
    const GridMaps& grid = dockette::testing::bundled_grid();
    for (const char* label : {"small", "medium", "large"}) {
        const Ligand& lig = dockette::testing::bundled_ligand(label);
        const Scorer scorer(lig, grid);
        std::vector<Vec3> scratch;
        for (std::uint32_t s = 0; s < 100; ++s) {
            Genotype g = dockette::testing::random_test_genotype(lig, grid, 8, s);
            // Keep most poses near the box centre so the grid terms are exercised.
            if (s % 4 != 0) g.set_translation(g.translation() * 0.2);
            const auto xyz = build_pose(lig, g);
            ASSERT_EQ(scorer.energy(g, scratch), dockette::testing::reference_total(lig, grid, xyz)) << label << " " << s;
        }
    }
}
