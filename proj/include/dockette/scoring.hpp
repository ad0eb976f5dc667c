#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"
#include "params.hpp"
#include "pose.hpp"
#include "reduce.hpp"

namespace dockette {

inline constexpr double kOutOfGridPenalty = 100000.0;   // kcal/mol, plus the same per Å outside
inline constexpr double kCoulombConstant = 332.06363;   // kcal·Å/(mol·e²)
inline constexpr double kSolvationSigma = 3.6;          // Å
inline constexpr double kMinPairDistance = 0.01;        // Å

struct EnergyBreakdown {
    double inter = 0.0;
    double intra = 0.0;
    double total = 0.0;

    friend bool operator==(const EnergyBreakdown&, const EnergyBreakdown&) = default;
};

/// Enclosing cell and fractional offsets of a point inside the grid box.
struct CellSample {
    std::size_t base = 0; // index of corner (i, j, k)
    std::size_t sx = 1, sy = 0, sz = 0; // index strides
    double fx = 0.0, fy = 0.0, fz = 0.0;
};

inline bool inside_grid(const GridMaps& g, const Vec3& p) noexcept {
    const Vec3 lo = g.box_min();
    const Vec3 hi = g.box_max();
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
}

/// Euclidean distance from `p` to the grid box (0 inside).
inline double distance_to_grid(const GridMaps& g, const Vec3& p) noexcept {
    const Vec3 lo = g.box_min();
    const Vec3 hi = g.box_max();
    auto excess = [](double v, double a, double b) { return v < a ? a - v : (v > b ? v - b : 0.0); };
    const Vec3 d{excess(p.x, lo.x, hi.x), excess(p.y, lo.y, hi.y), excess(p.z, lo.z, hi.z)};
    return norm(d);
}

inline CellSample locate_cell(const GridMaps& g, const Vec3& p) noexcept {
    auto axis = [&](double coord, double origin, int n, double& frac) {
        const double u = (coord - origin) / g.spacing;
        int i = static_cast<int>(std::floor(u));
        i = std::clamp(i, 0, n - 2);
        frac = u - i;
        return i;
    };
    CellSample s;
    const int i = axis(p.x, g.origin.x, g.dims[0], s.fx);
    const int j = axis(p.y, g.origin.y, g.dims[1], s.fy);
    const int k = axis(p.z, g.origin.z, g.dims[2], s.fz);
    s.base = g.node_index(i, j, k);
    s.sx = 1;
    s.sy = static_cast<std::size_t>(g.dims[0]);
    s.sz = static_cast<std::size_t>(g.dims[0]) * static_cast<std::size_t>(g.dims[1]);
    return s;
}

/// Nested linear blends along x, then y, then z.
inline double interpolate(std::span<const double> map, const CellSample& s) noexcept {
    const double* v = map.data() + s.base;
    auto lerp = [](double a, double b, double f) { return a * (1.0 - f) + b * f; };
    const double c00 = lerp(v[0], v[s.sx], s.fx);
    const double c10 = lerp(v[s.sy], v[s.sy + s.sx], s.fx);
    const double c01 = lerp(v[s.sz], v[s.sz + s.sx], s.fx);
    const double c11 = lerp(v[s.sz + s.sy], v[s.sz + s.sy + s.sx], s.fx);
    const double c0 = lerp(c00, c10, s.fy);
    const double c1 = lerp(c01, c11, s.fy);
    return lerp(c0, c1, s.fz);
}

/// Trilinear value of `map` at `p`; `p` must lie inside the grid box.
inline double trilinear(const GridMaps& g, std::span<const double> map, const Vec3& p) noexcept {
    return interpolate(map, locate_cell(g, p));
}

inline double out_of_grid_penalty(double distance) noexcept { return kOutOfGridPenalty * (1.0 + distance); }

/// Pair energy at distance r: van der Waals (12-6, or 12-10 for H-bond
/// donor/acceptor pairs), screened Coulomb with eps(r) = 4r, and Gaussian
/// desolvation.
inline double pair_energy(const PairParams& pp, double q_i, double q_j, double r) noexcept {
    r = std::max(r, kMinPairDistance);
    const double ratio = pp.r_eq / r;
    const double r2 = ratio * ratio;
    const double r6 = r2 * r2 * r2;
    const double r12 = r6 * r6;
    const double vdw = pp.is_hbond ? pp.eps * (5.0 * r12 - 6.0 * (r6 * r2 * r2)) : pp.eps * (r12 - 2.0 * r6);
    const double elec = kCoulombConstant * q_i * q_j / (4.0 * r * r);
    const double solv = (pp.s_i * pp.v_j + pp.s_j * pp.v_i) * std::exp(-(r * r) / (2.0 * kSolvationSigma * kSolvationSigma));
    return vdw + elec + solv;
}

/// Run-constant scoring data for one ligand over one grid: per-atom map
/// lookups and per-pair combined parameters are resolved up front.
class Scorer {
public:
    Scorer(const Ligand& ligand, const GridMaps& grids, const TypeTable& types = builtin_type_table())
        : ligand_(&ligand), grids_(&grids) {
        atoms_.reserve(ligand.atoms.size());
        for (const auto& a : ligand.atoms) {
            const auto* map = grids.find_type_map(a.type);
            if (map == nullptr) throw std::invalid_argument("grid has no map for atom type '" + a.type + "'");
            atoms_.push_back({map->data(), a.charge, std::abs(a.charge)});
        }
        pairs_.reserve(ligand.intra_pairs.size());
        for (const auto& [i, j] : ligand.intra_pairs) {
            const auto& ai = ligand.atoms.at(static_cast<std::size_t>(i));
            const auto& aj = ligand.atoms.at(static_cast<std::size_t>(j));
            if (!types.contains(ai.type) || !types.contains(aj.type)) throw std::invalid_argument("atom type missing from parameter table");
            pairs_.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), types.combine(ai.type, aj.type), ai.charge, aj.charge});
        }
    }

    const Ligand& ligand() const noexcept { return *ligand_; }
    const GridMaps& grids() const noexcept { return *grids_; }
    std::size_t atom_count() const noexcept { return atoms_.size(); }
    std::size_t pair_count() const noexcept { return pairs_.size(); }

    /// Grid interaction of atom `a` placed at `p`.
    double atom_term(std::size_t a, const Vec3& p) const noexcept {
        const GridMaps& g = *grids_;
        if (!inside_grid(g, p)) return out_of_grid_penalty(distance_to_grid(g, p));
        const CellSample s = locate_cell(g, p);
        const std::size_t n = g.node_count();
        const AtomData& ad = atoms_[a];
        return interpolate({ad.type_map, n}, s) + ad.charge * interpolate(g.elec_map, s) + ad.abs_charge * interpolate(g.desolv_map, s);
    }

    double pair_term(std::size_t k, std::span<const Vec3> coords) const noexcept {
        const PairData& pd = pairs_[k];
        return pair_energy(pd.params, pd.q_i, pd.q_j, distance(coords[pd.i], coords[pd.j]));
    }

    double intermolecular(std::span<const Vec3> coords) const {
        check_coords(coords);
        return fixed_order_sum<double>(atoms_.size(), [&](std::size_t a) { return atom_term(a, coords[a]); });
    }

    double intramolecular(std::span<const Vec3> coords) const {
        check_coords(coords);
        return fixed_order_sum<double>(pairs_.size(), [&](std::size_t k) { return pair_term(k, coords); });
    }

    EnergyBreakdown total(std::span<const Vec3> coords) const {
        EnergyBreakdown e;
        e.inter = intermolecular(coords);
        e.intra = intramolecular(coords);
        e.total = e.inter + e.intra;
        return e;
    }

    /// Builds the pose into `scratch` and scores it.
    EnergyBreakdown evaluate(const Genotype& genotype, std::vector<Vec3>& scratch) const {
        build_pose_into(*ligand_, genotype, scratch);
        return total(scratch);
    }

    double energy(const Genotype& genotype, std::vector<Vec3>& scratch) const { return evaluate(genotype, scratch).total; }

private:
    struct AtomData {
        const double* type_map;
        double charge;
        double abs_charge;
    };
    struct PairData {
        std::size_t i, j;
        PairParams params;
        double q_i, q_j;
    };

    void check_coords(std::span<const Vec3> coords) const {
        if (coords.size() != atoms_.size()) throw std::invalid_argument("coordinate count does not match atom count");
    }

    const Ligand* ligand_;
    const GridMaps* grids_;
    std::vector<AtomData> atoms_;
    std::vector<PairData> pairs_;
};

inline double intermolecular_energy(const GridMaps& grids, const Ligand& ligand, std::span<const Vec3> coords,
                                    const TypeTable& types = builtin_type_table()) {
    return Scorer(ligand, grids, types).intermolecular(coords);
}

/// Intramolecular pairs need only the parameter table, not a grid.
inline double intramolecular_energy(const Ligand& ligand, std::span<const Vec3> coords, const TypeTable& types = builtin_type_table()) {
    if (coords.size() != ligand.atoms.size()) throw std::invalid_argument("coordinate count does not match atom count");
    const auto& pairs = ligand.intra_pairs;
    return fixed_order_sum<double>(pairs.size(), [&](std::size_t k) {
        const auto& ai = ligand.atoms[static_cast<std::size_t>(pairs[k].first)];
        const auto& aj = ligand.atoms[static_cast<std::size_t>(pairs[k].second)];
        return pair_energy(types.combine(ai.type, aj.type), ai.charge, aj.charge,
                           distance(coords[static_cast<std::size_t>(pairs[k].first)], coords[static_cast<std::size_t>(pairs[k].second)]));
    });
}

inline EnergyBreakdown total_energy(const GridMaps& grids, const Ligand& ligand, std::span<const Vec3> coords,
                                    const TypeTable& types = builtin_type_table()) {
    return Scorer(ligand, grids, types).total(coords);
}

} // namespace dockette
