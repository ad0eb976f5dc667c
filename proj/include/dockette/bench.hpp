#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "engine.hpp"
#include "io.hpp"

namespace dockette {

inline constexpr std::string_view kBenchHeader = "label,strategy,team_size,nruns,repeat,wall_s,pose_score_s,ga_s,ls_s,reduce_s,best_energy";

struct BenchInput {
    std::string label;
    Ligand ligand;
    GridMaps grids;
};

/// Sweep over inputs x strategies x team sizes x nruns x repeats.
struct BenchMatrix {
    std::vector<BenchInput> inputs;
    std::vector<std::size_t> nruns_values{10, 100};
    std::vector<std::size_t> team_sizes{32, 64, 128, 256};
    std::vector<Strategy> strategies{Strategy::WorkShare, Strategy::ExplicitTeam};
    std::size_t repeats = 10;

    void validate() const {
        if (inputs.empty() || nruns_values.empty() || team_sizes.empty() || strategies.empty())
            throw std::invalid_argument("bench matrix lists must be non-empty");
        if (repeats < 1) throw std::invalid_argument("repeats must be at least 1");
    }

    std::size_t row_count() const noexcept {
        return inputs.size() * strategies.size() * team_sizes.size() * nruns_values.size() * repeats;
    }
};

/// Workload knobs shared by every cell of the sweep.
struct BenchSettings {
    std::uint64_t seed = 42;
    std::uint64_t max_evals = 50'000;
    std::size_t pop_size = 150;
    std::uint32_t max_generations = 27'000;
    std::size_t max_threads = 0;
};

struct BenchRow {
    std::string label;
    Strategy strategy = Strategy::WorkShare;
    std::size_t team_size = 0;
    std::size_t nruns = 0;
    std::size_t repeat_index = 0;
    double wall_seconds = 0.0;
    KernelTimings kernels;
    double best_energy = 0.0;
};

inline std::string format_bench_row(const BenchRow& r) {
    using detail::format_real;
    std::string out = r.label + "," + std::string(to_string(r.strategy)) + "," + std::to_string(r.team_size) + "," + std::to_string(r.nruns) + "," +
                      std::to_string(r.repeat_index) + "," + format_real(r.wall_seconds) + "," + format_real(r.kernels.pose_score) + "," +
                      format_real(r.kernels.ga) + "," + format_real(r.kernels.local_search) + "," + format_real(r.kernels.reduction) + "," +
                      format_real(r.best_energy);
    return out;
}

inline BenchRow parse_bench_row(std::string_view line) {
    std::vector<std::string> f;
    std::istringstream ss{std::string(line)};
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 11) throw ParseError(0, "bench row needs 11 fields, got " + std::to_string(f.size()));
    auto count = [](const std::string& s) { return static_cast<std::size_t>(detail::parse_integer(s, 0, "count")); };
    auto real = [](const std::string& s) { return detail::parse_real(s, 0, "timing"); };
    BenchRow r;
    r.label = f[0];
    r.strategy = parse_strategy(f[1]);
    r.team_size = count(f[2]);
    r.nruns = count(f[3]);
    r.repeat_index = count(f[4]);
    r.wall_seconds = real(f[5]);
    r.kernels = {real(f[6]), real(f[7]), real(f[8]), real(f[9])};
    r.best_energy = real(f[10]);
    return r;
}

/// Runs the sweep, handing each row to `sink` as soon as it is measured.
/// Runs within a cell execute one at a time so the per-kernel columns never
/// exceed the row's wall time.
inline void run_bench(const BenchMatrix& matrix, const BenchSettings& settings, const std::function<void(const BenchRow&)>& sink,
                      const TypeTable& types = builtin_type_table()) {
    matrix.validate();
    for (const auto& input : matrix.inputs) {
        for (Strategy strategy : matrix.strategies) {
            for (std::size_t team_size : matrix.team_sizes) {
                for (std::size_t nruns : matrix.nruns_values) {
                    DockingConfig cfg;
                    cfg.nruns = nruns;
                    cfg.seed = settings.seed;
                    cfg.ga.pop_size = settings.pop_size;
                    cfg.ga.max_evals = settings.max_evals;
                    cfg.ga.max_generations = settings.max_generations;
                    cfg.backend.strategy = strategy;
                    cfg.backend.team_size = team_size;
                    cfg.backend.max_parallel_runs = 1;
                    cfg.backend.max_threads = settings.max_threads;
                    for (std::size_t rep = 0; rep < matrix.repeats; ++rep) {
                        const auto t0 = std::chrono::steady_clock::now();
                        const DockingResult res = run_docking(input.ligand, input.grids, cfg, types);
                        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                        BenchRow row;
                        row.label = input.label;
                        row.strategy = strategy;
                        row.team_size = team_size;
                        row.nruns = nruns;
                        row.repeat_index = rep;
                        row.wall_seconds = wall;
                        for (const auto& [name, secs] : res.timings) {
                            if (name == "pose_score") row.kernels.pose_score = secs;
                            else if (name == "ga") row.kernels.ga = secs;
                            else if (name == "local_search") row.kernels.local_search = secs;
                            else if (name == "reduction") row.kernels.reduction = secs;
                        }
                        row.best_energy = res.best_energy;
                        sink(row);
                    }
                }
            }
        }
    }
}

} // namespace dockette
