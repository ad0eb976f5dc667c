#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "vec3.hpp"

namespace dockette {

struct Atom {
    int index = 0;
    std::string type;
    double charge = 0.0; // elementary charges
    Vec3 position;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// A rotatable bond. `moved` atoms turn about the axis_a -> axis_b line.
struct Torsion {
    int axis_a = 0;
    int axis_b = 0;
    std::vector<int> moved;

    friend bool operator==(const Torsion&, const Torsion&) = default;
};

struct Ligand {
    std::vector<Atom> atoms;
    /// Application order is the listed order.
    std::vector<Torsion> torsions;
    std::vector<std::pair<int, int>> intra_pairs;

    std::size_t atom_count() const noexcept { return atoms.size(); }
    std::size_t torsion_count() const noexcept { return torsions.size(); }

    std::vector<Vec3> reference_coordinates() const {
        std::vector<Vec3> out;
        out.reserve(atoms.size());
        for (const auto& a : atoms) out.push_back(a.position);
        return out;
    }

    friend bool operator==(const Ligand&, const Ligand&) = default;
};

/// Precomputed receptor field on a regular lattice. All arrays are stored
/// x-fastest: node (i, j, k) lives at i + nx * (j + ny * k).
struct GridMaps {
    std::array<int, 3> dims{1, 1, 1};
    double spacing = 1.0;
    Vec3 origin;
    std::vector<std::string> type_names;
    std::vector<std::vector<double>> type_maps; // parallel to type_names
    std::vector<double> elec_map;
    std::vector<double> desolv_map;

    std::size_t node_count() const noexcept {
        return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(dims[2]);
    }

    std::size_t node_index(int i, int j, int k) const noexcept {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(dims[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(k));
    }

    Vec3 node_position(int i, int j, int k) const noexcept {
        return {origin.x + i * spacing, origin.y + j * spacing, origin.z + k * spacing};
    }

    Vec3 box_min() const noexcept { return origin; }
    Vec3 box_max() const noexcept { return node_position(dims[0] - 1, dims[1] - 1, dims[2] - 1); }

    /// nullptr when no map exists for `type`.
    const std::vector<double>* find_type_map(const std::string& type) const noexcept {
        for (std::size_t m = 0; m < type_names.size(); ++m)
            if (type_names[m] == type) return &type_maps[m];
        return nullptr;
    }

    friend bool operator==(const GridMaps&, const GridMaps&) = default;
};

} // namespace dockette
