// dockette: docking driver, benchmark sweep and input validator.
//
// Exit codes: 0 success, 1 input error (bad flags, unreadable or malformed
// files), 2 internal error.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <dockette/dockette.hpp>

#ifndef DOCKETTE_DATA_DIR
#define DOCKETTE_DATA_DIR "data"
#endif

namespace {

using namespace dockette;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file '" + path + "'");
    out << text;
}

// Parse errors are re-raised with the file name in front.
template <class F>
auto parse_file(const std::string& path, F&& parse) {
    const std::string text = read_file(path);
    try {
        return parse(text);
    } catch (const ParseError& e) {
        throw InputError(path + ": " + e.what());
    }
}

TypeTable load_types(const std::string& params_path) {
    if (params_path.empty()) return builtin_type_table();
    return parse_file(params_path, [](const std::string& t) { return parse_type_table(t); });
}

struct DockOptions {
    std::string ligand, grid, params, out;
    std::size_t nruns = 10;
    std::uint64_t seed = 42;
    std::string strategy = "workshare";
    std::size_t team_size = 64;
    std::size_t pop_size = 150;
    std::uint64_t max_evals = 2'500'000;
    std::uint32_t max_generations = 27'000;
    std::size_t parallel_runs = 1;
    std::string format = "json";
    bool with_timings = false;
};

int cmd_dock(const DockOptions& o) {
    const TypeTable types = load_types(o.params);
    const Ligand lig = parse_file(o.ligand, [&](const std::string& t) { return parse_ligand(t, types); });
    const GridMaps grid = parse_file(o.grid, [](const std::string& t) { return parse_grid(t); });
    const ResultFormat format = parse_result_format(o.format);

    DockingConfig cfg;
    cfg.nruns = o.nruns;
    cfg.seed = o.seed;
    cfg.ga.pop_size = o.pop_size;
    cfg.ga.max_evals = o.max_evals;
    cfg.ga.max_generations = o.max_generations;
    cfg.backend.strategy = parse_strategy(o.strategy);
    cfg.backend.team_size = o.team_size;
    cfg.backend.max_parallel_runs = o.parallel_runs;
    cfg.validate();

    DockingResult res = run_docking(lig, grid, cfg, types);
    // Timings are opt-in so that repeated runs produce identical files.
    if (!o.with_timings) res.timings.clear();
    const std::string out = o.out.empty() ? (format == ResultFormat::Json ? "result.json" : "result.csv") : o.out;
    write_file(out, write_result(res, format));
    std::cout << "best_energy=" << detail::format_real(res.best_energy) << "\n";
    return 0;
}

struct BenchOptions {
    std::string data_dir = DOCKETTE_DATA_DIR;
    std::vector<std::string> inputs; // label=ligand:grid
    std::vector<std::string> labels;
    std::vector<std::size_t> nruns_values{10, 100};
    std::vector<std::size_t> team_sizes{32, 64, 128, 256};
    std::vector<std::string> strategies{"workshare", "explicit"};
    std::size_t repeats = 10;
    std::uint64_t seed = 42;
    std::uint64_t max_evals = 50'000;
    std::size_t pop_size = 150;
    std::uint32_t max_generations = 27'000;
    std::string params, out;
};

int cmd_bench(const BenchOptions& o) {
    const TypeTable types = load_types(o.params);
    std::vector<std::string> specs = o.inputs;
    if (specs.empty()) {
        const std::string grid = o.data_dir + "/box.grd";
        for (const char* label : {"small", "medium", "large"}) specs.push_back(std::string(label) + "=" + o.data_dir + "/" + label + ".lig:" + grid);
    }

    BenchMatrix matrix;
    for (const auto& spec : specs) {
        const auto eq = spec.find('=');
        const auto colon = spec.rfind(':');
        if (eq == std::string::npos || colon == std::string::npos || colon < eq)
            throw InputError("--input expects LABEL=LIGAND:GRID, got '" + spec + "'");
        const std::string label = spec.substr(0, eq);
        if (!o.labels.empty() && std::find(o.labels.begin(), o.labels.end(), label) == o.labels.end()) continue;
        const std::string lig_path = spec.substr(eq + 1, colon - eq - 1);
        const std::string grid_path = spec.substr(colon + 1);
        matrix.inputs.push_back({label, parse_file(lig_path, [&](const std::string& t) { return parse_ligand(t, types); }),
                                 parse_file(grid_path, [](const std::string& t) { return parse_grid(t); })});
    }
    if (matrix.inputs.empty()) throw InputError("no bench inputs selected");
    matrix.nruns_values = o.nruns_values;
    matrix.team_sizes = o.team_sizes;
    matrix.strategies.clear();
    for (const auto& s : o.strategies) matrix.strategies.push_back(parse_strategy(s));
    matrix.repeats = o.repeats;
    matrix.validate();

    BenchSettings settings;
    settings.seed = o.seed;
    settings.max_evals = o.max_evals;
    settings.pop_size = o.pop_size;
    settings.max_generations = o.max_generations;

    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out, std::ios::binary);
        if (!file) throw InputError("cannot write file '" + o.out + "'");
    }
    std::ostream& os = o.out.empty() ? std::cout : file;
    os << kBenchHeader << "\n";
    run_bench(
        matrix, settings, [&](const BenchRow& row) { os << format_bench_row(row) << "\n" << std::flush; }, types);
    return 0;
}

int cmd_validate(const std::string& ligand_path, const std::string& grid_path, const std::string& params) {
    if (ligand_path.empty() && grid_path.empty()) throw InputError("validate needs --ligand and/or --grid");
    const TypeTable types = load_types(params);
    if (!ligand_path.empty()) {
        const Ligand lig = parse_file(ligand_path, [&](const std::string& t) { return parse_ligand(t, types); });
        std::cout << "atoms=" << lig.atom_count() << " torsions=" << lig.torsion_count() << " pairs=" << lig.intra_pairs.size() << "\n";
    }
    if (!grid_path.empty()) {
        const GridMaps g = parse_file(grid_path, [](const std::string& t) { return parse_grid(t); });
        std::cout << "grid=" << g.dims[0] << "x" << g.dims[1] << "x" << g.dims[2] << " spacing=" << detail::format_real(g.spacing) << " maps=";
        for (const auto& t : g.type_names) std::cout << t << ",";
        std::cout << "E,D\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dockette: memetic GA ligand docking over grid maps"};
    app.require_subcommand(1);

    DockOptions dock;
    auto* dock_cmd = app.add_subcommand("dock", "Dock a ligand and write the result");
    dock_cmd->add_option("--ligand", dock.ligand, "Ligand file")->required();
    dock_cmd->add_option("--grid", dock.grid, "Grid map file")->required();
    dock_cmd->add_option("--nruns", dock.nruns, "Independent GA runs")->capture_default_str();
    dock_cmd->add_option("--seed", dock.seed, "Random seed")->capture_default_str();
    dock_cmd->add_option("--strategy", dock.strategy, "workshare|explicit")->capture_default_str();
    dock_cmd->add_option("--team-size", dock.team_size, "Workers per run")->capture_default_str();
    dock_cmd->add_option("--pop-size", dock.pop_size, "Population size")->capture_default_str();
    dock_cmd->add_option("--max-evals", dock.max_evals, "Energy evaluations per run")->capture_default_str();
    dock_cmd->add_option("--max-generations", dock.max_generations, "Generation cap per run")->capture_default_str();
    dock_cmd->add_option("--parallel-runs", dock.parallel_runs, "Runs executed concurrently")->capture_default_str();
    dock_cmd->add_option("--params", dock.params, "Atom type parameter file");
    dock_cmd->add_option("--out", dock.out, "Result path (default result.json / result.csv)");
    dock_cmd->add_option("--format", dock.format, "json|csv")->capture_default_str();
    dock_cmd->add_flag("--with-timings", dock.with_timings, "Include per-kernel wall-clock timings in the result");

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Sweep strategies, team sizes and nruns; CSV rows out");
    bench_cmd->add_option("--data-dir", bench.data_dir, "Directory with small/medium/large.lig and box.grd")->capture_default_str();
    bench_cmd->add_option("--input", bench.inputs, "LABEL=LIGAND:GRID (repeatable; replaces bundled inputs)");
    bench_cmd->add_option("--labels", bench.labels, "Subset of input labels")->delimiter(',');
    bench_cmd->add_option("--nruns-values", bench.nruns_values, "nruns sweep")->delimiter(',');
    bench_cmd->add_option("--team-sizes", bench.team_sizes, "team size sweep")->delimiter(',');
    bench_cmd->add_option("--strategies", bench.strategies, "strategy sweep")->delimiter(',');
    bench_cmd->add_option("--repeats", bench.repeats, "Repeats per cell")->capture_default_str();
    bench_cmd->add_option("--seed", bench.seed, "Random seed")->capture_default_str();
    bench_cmd->add_option("--bench-max-evals", bench.max_evals, "Energy evaluations per run")->capture_default_str();
    bench_cmd->add_option("--pop-size", bench.pop_size, "Population size")->capture_default_str();
    bench_cmd->add_option("--max-generations", bench.max_generations, "Generation cap per run")->capture_default_str();
    bench_cmd->add_option("--params", bench.params, "Atom type parameter file");
    bench_cmd->add_option("--out", bench.out, "CSV path (default stdout)");

    std::string v_ligand, v_grid, v_params;
    auto* validate_cmd = app.add_subcommand("validate", "Parse inputs and print their sizes");
    validate_cmd->add_option("--ligand", v_ligand, "Ligand file");
    validate_cmd->add_option("--grid", v_grid, "Grid map file");
    validate_cmd->add_option("--params", v_params, "Atom type parameter file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*dock_cmd) return cmd_dock(dock);
        if (*bench_cmd) return cmd_bench(bench);
        if (*validate_cmd) return cmd_validate(v_ligand, v_grid, v_params);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
