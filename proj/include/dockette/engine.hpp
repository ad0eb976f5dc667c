#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "reduce.hpp"
#include "result.hpp"
#include "scoring.hpp"
#include "search.hpp"
#include "team.hpp"

namespace dockette {

struct DockingConfig {
    std::size_t nruns = 10;
    GAParams ga;
    SolisWetsParams sw;
    BackendConfig backend;
    std::uint64_t seed = 42;

    void validate() const {
        if (nruns < 1) throw std::invalid_argument("nruns must be at least 1");
        ga.validate();
        sw.validate();
        backend.validate();
    }
};

/// Everything a run reads and never writes, shared by all workers of all runs.
struct DockingContext {
    Scorer scorer;
    GAParams ga;
    SolisWetsParams sw;
    std::uint64_t seed = 0;
};

struct RunResult {
    std::uint32_t run_index = 0;
    Individual best;
    std::uint64_t total_evals = 0;
    std::uint32_t generations = 0;
    KernelTimings timings;
};

// ---------------------------------------------------------------------------
// Team reductions

/// Fixed-order chunked sum computed cooperatively: chunk partials are
/// distributed over the team, then combined in ascending chunk order.
template <class T, class Sched>
T scheduled_sum(Sched& sched, std::span<const T> values, std::vector<T>& partials, T& result) {
    const std::size_t n = values.size();
    sched.single(KernelClass::Reduction, [&] { partials.assign(chunk_count(n), T{}); });
    sched.parallel(KernelClass::Reduction, partials.size(),
                   [&](std::size_t c, std::size_t) { partials[c] = chunk_partial<T>(c, n, [&](std::size_t i) { return values[i]; }); });
    sched.single(KernelClass::Reduction, [&] { result = combine_partials<T>(partials); });
    return result;
}

inline void check_reducible(std::size_t n) {
    if (n == 0) throw std::invalid_argument("team_reduce of an empty list");
}

template <class T>
T team_reduce_sum(std::span<const T> values, const BackendConfig& backend) {
    check_reducible(values.size());
    backend.validate();
    const std::size_t width = physical_width(backend.team_size, thread_budget(backend), 1);
    std::vector<T> partials;
    T result{};
    with_schedule(backend.strategy, backend.team_size, width, nullptr, [&](auto& sched) { scheduled_sum<T>(sched, values, partials, result); });
    return result;
}

inline ArgMin team_reduce_min(std::span<const double> values, const BackendConfig& backend) {
    check_reducible(values.size());
    backend.validate();
    const std::size_t width = physical_width(backend.team_size, thread_budget(backend), 1);
    const std::size_t n = values.size();
    std::vector<ArgMin> partials(chunk_count(n));
    ArgMin result;
    with_schedule(backend.strategy, backend.team_size, width, nullptr, [&](auto& sched) {
        sched.parallel(KernelClass::Reduction, partials.size(),
                       [&](std::size_t c, std::size_t) { partials[c] = chunk_argmin(c, n, [&](std::size_t i) { return values[i]; }); });
        sched.single(KernelClass::Reduction, [&] { result = combine_argmin(partials); });
    });
    return result;
}

// ---------------------------------------------------------------------------
// Cooperative pose scoring: one pose at a time, atoms and pairs spread over
// the team. Consecutive rotation cycles are separated by a phase boundary,
// so every worker sees the fully rotated coordinates of the previous cycle.

template <class Sched>
void cooperative_pose_energy(Sched& sched, const Scorer& scorer, const Genotype& genotype, std::vector<Vec3>& coords,
                             std::vector<Vec3>& centroid_partials, std::vector<double>& energy_partials, EnergyBreakdown& out) {
    const Ligand& lig = scorer.ligand();
    const std::size_t natoms = lig.atoms.size();
    sched.parallel(KernelClass::PoseScore, natoms, [&](std::size_t a, std::size_t) { coords[a] = lig.atoms[a].position; });

    const auto angles = genotype.torsion_angles();
    for (std::size_t t = 0; t < lig.torsions.size(); ++t) {
        const Torsion& tor = lig.torsions[t];
        // Axis atoms are never in their own moved set, so reading them while
        // other workers rotate this cycle is race-free.
        const AxisRotation rot = torsion_rotation(tor, coords, angles[t]);
        sched.parallel(KernelClass::PoseScore, tor.moved.size(), [&](std::size_t m, std::size_t) {
            auto& p = coords[static_cast<std::size_t>(tor.moved[m])];
            p = rot.apply(p);
        });
    }

    const std::size_t nc_atoms = chunk_count(natoms);
    sched.parallel(KernelClass::PoseScore, nc_atoms,
                   [&](std::size_t c, std::size_t) { centroid_partials[c] = chunk_partial<Vec3>(c, natoms, [&](std::size_t i) { return coords[i]; }); });
    const Vec3 center = combine_partials<Vec3>(std::span<const Vec3>(centroid_partials.data(), nc_atoms)) * (1.0 / static_cast<double>(natoms));
    const AxisRotation rigid(center, orientation_axis(genotype.phi(), genotype.theta()), genotype.alpha());
    const Vec3 shift = genotype.translation();
    sched.parallel(KernelClass::PoseScore, natoms, [&](std::size_t a, std::size_t) { coords[a] = rigid.apply(coords[a]) + shift; });

    const std::size_t npairs = scorer.pair_count();
    const std::size_t nc_pairs = chunk_count(npairs);
    sched.parallel(KernelClass::PoseScore, nc_atoms + nc_pairs, [&](std::size_t c, std::size_t) {
        if (c < nc_atoms) {
            energy_partials[c] = chunk_partial<double>(c, natoms, [&](std::size_t a) { return scorer.atom_term(a, coords[a]); });
        } else {
            energy_partials[c] = chunk_partial<double>(c - nc_atoms, npairs, [&](std::size_t k) { return scorer.pair_term(k, coords); });
        }
    });
    sched.single(KernelClass::PoseScore, [&] {
        out.inter = combine_partials<double>(std::span<const double>(energy_partials.data(), nc_atoms));
        out.intra = combine_partials<double>(std::span<const double>(energy_partials.data() + nc_atoms, nc_pairs));
        out.total = out.inter + out.intra;
    });
}

/// Scores each genotype with the team cooperating inside every pose.
inline std::vector<EnergyBreakdown> evaluate_poses(const Scorer& scorer, std::span<const Genotype> genotypes, const BackendConfig& backend) {
    backend.validate();
    for (const auto& g : genotypes) check_genotype_dimension(scorer.ligand(), g);
    const std::size_t width = physical_width(backend.team_size, thread_budget(backend), 1);
    const std::size_t natoms = scorer.atom_count();
    std::vector<Vec3> coords(natoms);
    std::vector<Vec3> centroid_partials(chunk_count(natoms));
    std::vector<double> energy_partials(chunk_count(natoms) + chunk_count(scorer.pair_count()));
    std::vector<EnergyBreakdown> out(genotypes.size());
    with_schedule(backend.strategy, backend.team_size, width, nullptr, [&](auto& sched) {
        for (std::size_t b = 0; b < genotypes.size(); ++b)
            cooperative_pose_energy(sched, scorer, genotypes[b], coords, centroid_partials, energy_partials, out[b]);
    });
    return out;
}

// ---------------------------------------------------------------------------
// One GA run

namespace detail {

/// Per-run mutable state owned by the run's team.
struct RunState {
    Population current;
    Population next;
    GenerationPlan plan;
    std::vector<std::size_t> ls_slots;
    std::vector<std::uint64_t> eval_partials;
    std::vector<ArgMin> best_partials;
    std::vector<std::vector<Vec3>> scratch; // one per lane
    std::uint64_t total_evals = 0;
    Individual best;
    bool have_best = false;
    bool proceed = false;
};

template <class Sched>
void drive_run(Sched& sched, const DockingContext& ctx, std::uint32_t run, RunState& st) {
    const Scorer& scorer = ctx.scorer;
    const GAParams& ga = ctx.ga;
    const std::size_t pop = ga.pop_size;
    const std::size_t nchunks = chunk_count(pop);

    sched.parallel(KernelClass::PoseScore, pop, [&](std::size_t i, std::size_t lane) {
        st.current[i] = initialize_individual(scorer, ctx.seed, run, i, st.scratch[lane]);
    });

    for (;;) {
        // sum_evals and best-of-population over the team, fixed chunk order.
        sched.parallel(KernelClass::Reduction, nchunks, [&](std::size_t c, std::size_t) {
            st.eval_partials[c] = chunk_partial<std::uint64_t>(c, pop, [&](std::size_t i) { return st.current[i].eval_count; });
            st.best_partials[c] = chunk_argmin(c, pop, [&](std::size_t i) { return st.current[i].energy; });
        });
        sched.single(KernelClass::Reduction, [&] {
            st.total_evals += combine_partials<std::uint64_t>(st.eval_partials);
            const ArgMin best = combine_argmin(st.best_partials);
            if (!st.have_best || best.value < st.best.energy) {
                st.best = st.current[best.index];
                st.have_best = true;
            }
            st.proceed = should_continue(ga, st.total_evals, st.current.generation);
            if (st.proceed) st.plan = plan_generation(ga, ctx.sw, ga.max_evals - st.total_evals);
        });
        if (!st.proceed) break;

        sched.single(KernelClass::GeneticOps, [&] {
            st.next.generation = st.current.generation + 1;
            copy_elites(st.current, st.plan, st.next);
        });
        sched.parallel(KernelClass::GeneticOps, st.plan.pairs,
                       [&](std::size_t p, std::size_t) { breed_pair(st.current, p, st.plan, ga, ctx.seed, run, st.next); });
        sched.parallel(KernelClass::PoseScore, st.plan.offspring,
                       [&](std::size_t o, std::size_t lane) { evaluate_slot(scorer, st.next, st.plan.elites + o, st.scratch[lane]); });
        sched.single(KernelClass::GeneticOps, [&] { st.ls_slots = choose_local_search_slots(st.plan, ctx.seed, run, st.next.generation); });
        sched.parallel(KernelClass::LocalSearch, st.ls_slots.size(), [&](std::size_t k, std::size_t lane) {
            local_search_slot(scorer, ga, ctx.sw, st.plan.ls_eval_limit, ctx.seed, run, k, st.ls_slots[k], st.next, st.scratch[lane]);
        });
        sched.single(KernelClass::GeneticOps, [&] { std::swap(st.current, st.next); });
    }
}

} // namespace detail

/// Executes one full GA run with `width` OS threads backing the team.
inline RunResult launch_run(const DockingContext& ctx, std::uint32_t run_index, const BackendConfig& backend, std::size_t width) {
    ctx.ga.validate();
    ctx.sw.validate();
    backend.validate();
    detail::RunState st;
    const std::size_t pop = ctx.ga.pop_size;
    st.current.individuals.resize(pop);
    st.next.individuals.resize(pop);
    st.eval_partials.resize(chunk_count(pop));
    st.best_partials.resize(chunk_count(pop));
    st.scratch.resize(backend.team_size);

    RunResult res;
    res.run_index = run_index;
    with_schedule(backend.strategy, backend.team_size, width, &res.timings,
                  [&](auto& sched) { detail::drive_run(sched, ctx, run_index, st); });
    res.best = std::move(st.best);
    res.total_evals = st.total_evals;
    res.generations = st.current.generation;
    return res;
}

inline RunResult launch_run(const DockingContext& ctx, std::uint32_t run_index, const BackendConfig& backend) {
    return launch_run(ctx, run_index, backend, physical_width(backend.team_size, thread_budget(backend), 1));
}

inline DockingResult summarize_runs(const Scorer& scorer, std::vector<RunResult>& runs) {
    DockingResult out;
    std::size_t best = 0;
    KernelTimings totals;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        if (runs[r].best.energy < runs[best].best.energy) best = r;
        out.per_run.push_back({runs[r].run_index, runs[r].best.energy, runs[r].total_evals});
        totals += runs[r].timings;
    }
    out.best_energy = runs[best].best.energy;
    out.best_genotype = runs[best].best.genotype;
    out.best_coordinates = build_pose(scorer.ligand(), out.best_genotype);
    out.timings = {{"pose_score", totals.pose_score}, {"ga", totals.ga}, {"local_search", totals.local_search}, {"reduction", totals.reduction}};
    return out;
}

/// Runs 0..nruns-1, at most `max_parallel_runs` at once, and reports the
/// lowest-energy individual over all runs (ties to the lower run index).
inline DockingResult run_docking(const Ligand& ligand, const GridMaps& grids, const DockingConfig& config,
                                 const TypeTable& types = builtin_type_table()) {
    config.validate();
    const DockingContext ctx{Scorer(ligand, grids, types), config.ga, config.sw, config.seed};
    const std::size_t concurrent = std::min(config.backend.max_parallel_runs, config.nruns);
    const std::size_t width = physical_width(config.backend.team_size, thread_budget(config.backend), concurrent);

    std::vector<RunResult> runs(config.nruns);
    if (concurrent <= 1) {
        for (std::size_t r = 0; r < config.nruns; ++r) runs[r] = launch_run(ctx, static_cast<std::uint32_t>(r), config.backend, width);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < concurrent; ++w) {
            workers.emplace_back([&] {
                for (std::size_t r; (r = next.fetch_add(1)) < config.nruns;) {
                    try {
                        runs[r] = launch_run(ctx, static_cast<std::uint32_t>(r), config.backend, width);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : workers) t.join();
        if (error) std::rethrow_exception(error);
    }
    return summarize_runs(ctx.scorer, runs);
}

} // namespace dockette
