#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <dockette/dockette.hpp>

namespace dockette::testing {

inline std::string data_path(const std::string& name) { return std::string(DOCKETTE_DATA_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline const Ligand& bundled_ligand(const std::string& label) {
    static const Ligand small = parse_ligand(slurp(data_path("small.lig")));
    static const Ligand medium = parse_ligand(slurp(data_path("medium.lig")));
    static const Ligand large = parse_ligand(slurp(data_path("large.lig")));
    if (label == "small") return small;
    if (label == "medium") return medium;
    return large;
}

inline const GridMaps& bundled_grid() {
    static const GridMaps grid = parse_grid(slurp(data_path("box.grd")));
    return grid;
}

/// Grid with every map filled from `f(i, j, k, map_index)`.
template <class F>
GridMaps make_grid(std::array<int, 3> dims, double spacing, Vec3 origin, std::vector<std::string> types, F&& f) {
    GridMaps g;
    g.dims = dims;
    g.spacing = spacing;
    g.origin = origin;
    g.type_names = std::move(types);
    const std::size_t maps = g.type_names.size() + 2;
    std::vector<std::vector<double>> values(maps, std::vector<double>(g.node_count()));
    for (int k = 0; k < dims[2]; ++k)
        for (int j = 0; j < dims[1]; ++j)
            for (int i = 0; i < dims[0]; ++i)
                for (std::size_t m = 0; m < maps; ++m) values[m][g.node_index(i, j, k)] = f(i, j, k, m);
    for (std::size_t m = 0; m + 2 < maps; ++m) g.type_maps.push_back(values[m]);
    g.elec_map = values[maps - 2];
    g.desolv_map = values[maps - 1];
    return g;
}

/// Random genotype using explicit draws, independent of the GA operators.
inline Genotype random_test_genotype(const Ligand& lig, const GridMaps& g, std::uint64_t seed, std::uint32_t unit) {
    Draws d(RngKey{seed, 999, 0, unit, 0});
    Genotype gen(lig.torsion_count());
    const Vec3 lo = g.box_min(), hi = g.box_max();
    gen[0] = lo.x + d.uniform() * (hi.x - lo.x);
    gen[1] = lo.y + d.uniform() * (hi.y - lo.y);
    gen[2] = lo.z + d.uniform() * (hi.z - lo.z);
    for (std::size_t i = 3; i < gen.size(); ++i) gen[i] = (d.uniform() - 0.5) * 4.0 * kTwoPi;
    return gen;
}

} // namespace dockette::testing
