#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pose.hpp"
#include "reduce.hpp"
#include "rng.hpp"
#include "scoring.hpp"

namespace dockette {

struct GAParams {
    std::size_t pop_size = 150;
    double tournament_rate = 0.60;
    double crossover_rate = 0.80;
    double mutation_rate = 0.02;   // per gene
    double translation_step = 2.0; // Å, mutation half-width for translation genes
    double angle_step = 0.523;     // rad, mutation half-width for angle genes
    std::size_t elitism_count = 1;
    double ls_rate = 0.06;         // fraction of the population locally searched per generation
    std::uint64_t max_evals = 2'500'000;
    std::uint32_t max_generations = 27'000;

    void validate() const {
        auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (pop_size < 2) throw std::invalid_argument("pop_size must be at least 2");
        if (!prob(tournament_rate) || !prob(crossover_rate) || !prob(mutation_rate) || !prob(ls_rate))
            throw std::invalid_argument("GA probabilities must lie in [0, 1]");
        if (!(translation_step >= 0.0) || !(angle_step >= 0.0)) throw std::invalid_argument("mutation magnitudes must be non-negative");
        if (elitism_count > pop_size) throw std::invalid_argument("elitism_count exceeds pop_size");
    }

    double gene_scale(std::size_t gene) const noexcept { return Genotype::is_translation_gene(gene) ? translation_step : angle_step; }
};

struct SolisWetsParams {
    double rho_init = 1.0;
    double rho_min = 0.01;
    int cons_succ = 4;
    int cons_fail = 4;
    double expand = 2.0;
    double contract = 0.5;
    int max_iters = 300;

    void validate() const {
        if (!(rho_min > 0.0 && rho_min < rho_init)) throw std::invalid_argument("Solis-Wets needs 0 < rho_min < rho_init");
        if (!(expand > 1.0)) throw std::invalid_argument("Solis-Wets expand factor must exceed 1");
        if (!(contract > 0.0 && contract < 1.0)) throw std::invalid_argument("Solis-Wets contract factor must lie in (0, 1)");
        if (cons_succ < 1 || cons_fail < 1 || max_iters < 0) throw std::invalid_argument("Solis-Wets counters must be positive");
    }
};

struct Individual {
    Genotype genotype;
    double energy = std::numeric_limits<double>::infinity();
    std::uint64_t eval_count = 0; // energy evaluations spent on this slot in the current generation

    friend bool operator==(const Individual&, const Individual&) = default;
};

struct Population {
    std::vector<Individual> individuals;
    std::uint32_t generation = 0;

    std::size_t size() const noexcept { return individuals.size(); }
    Individual& operator[](std::size_t i) noexcept { return individuals[i]; }
    const Individual& operator[](std::size_t i) const noexcept { return individuals[i]; }

    friend bool operator==(const Population&, const Population&) = default;
};

/// Lower energy wins; equal energies go to the lower index.
inline bool fitter(const Population& pop, std::size_t a, std::size_t b) noexcept {
    return pop[a].energy < pop[b].energy || (pop[a].energy == pop[b].energy && a < b);
}

/// Fixed-order sum of per-slot evaluation counters.
inline std::uint64_t sum_evals(const Population& pop) {
    return fixed_order_sum<std::uint64_t>(pop.size(), [&](std::size_t i) { return pop[i].eval_count; });
}

inline ArgMin best_index(const Population& pop) {
    return fixed_order_argmin(pop.size(), [&](std::size_t i) { return pop[i].energy; });
}

// ---------------------------------------------------------------------------
// Initialization

/// Random genotype for slot `index` of a run: translation uniform in the
/// grid box, every angle gene uniform in [0, 2pi).
inline Genotype random_genotype(const GridMaps& grids, std::size_t torsion_count, Draws& draws) {
    Genotype g(torsion_count);
    const Vec3 lo = grids.box_min();
    const Vec3 hi = grids.box_max();
    g[0] = lo.x + draws.uniform() * (hi.x - lo.x);
    g[1] = lo.y + draws.uniform() * (hi.y - lo.y);
    g[2] = lo.z + draws.uniform() * (hi.z - lo.z);
    for (std::size_t i = Genotype::kTranslationGenes; i < g.size(); ++i) g[i] = draws.uniform() * kTwoPi;
    return g;
}

inline RngKey init_key(std::uint64_t seed, std::uint32_t run, std::size_t slot) {
    return {seed, run, 0, stream_unit(StreamTag::Init, static_cast<std::uint32_t>(slot)), 0};
}

inline Individual initialize_individual(const Scorer& scorer, std::uint64_t seed, std::uint32_t run, std::size_t slot,
                                        std::vector<Vec3>& scratch) {
    Draws draws(init_key(seed, run, slot));
    Individual ind;
    ind.genotype = random_genotype(scorer.grids(), scorer.ligand().torsion_count(), draws);
    ind.energy = scorer.energy(ind.genotype, scratch);
    ind.eval_count = 1;
    return ind;
}

inline Population initialize_population(const Scorer& scorer, const GAParams& ga, std::uint64_t seed, std::uint32_t run = 0) {
    ga.validate();
    Population pop;
    pop.individuals.reserve(ga.pop_size);
    std::vector<Vec3> scratch;
    for (std::size_t i = 0; i < ga.pop_size; ++i) pop.individuals.push_back(initialize_individual(scorer, seed, run, i, scratch));
    return pop;
}

// ---------------------------------------------------------------------------
// Variation operators

/// Binary tournament over two distinct slots. Returns the fitter one with
/// probability `tournament_rate`, otherwise the other.
inline std::size_t tournament_select(const Population& pop, double tournament_rate, Draws& draws) {
    const std::size_t n = pop.size();
    const std::size_t i = draws.below(n);
    std::size_t j = draws.below(n - 1);
    if (j >= i) ++j;
    const std::size_t better = fitter(pop, i, j) ? i : j;
    const std::size_t worse = better == i ? j : i;
    return draws.uniform() < tournament_rate ? better : worse;
}

/// Swaps genes [c1, c2) of the flattened gene vectors.
inline std::pair<Genotype, Genotype> crossover_at(const Genotype& a, const Genotype& b, std::size_t c1, std::size_t c2) {
    if (a.size() != b.size()) throw std::invalid_argument("crossover parents differ in dimension");
    if (c1 > c2 || c2 > a.size()) throw std::invalid_argument("crossover cut points out of order");
    Genotype ca = a;
    Genotype cb = b;
    for (std::size_t i = c1; i < c2; ++i) std::swap(ca[i], cb[i]);
    return {std::move(ca), std::move(cb)};
}

/// Two-point crossover applied with probability `crossover_rate`;
/// otherwise the children are copies of the parents.
inline std::pair<Genotype, Genotype> crossover(const Genotype& a, const Genotype& b, double crossover_rate, Draws& draws) {
    if (a.size() != b.size()) throw std::invalid_argument("crossover parents differ in dimension");
    if (!(draws.uniform() < crossover_rate)) return {a, b};
    std::size_t c1 = draws.below(a.size() + 1);
    std::size_t c2 = draws.below(a.size() + 1);
    if (c1 > c2) std::swap(c1, c2);
    return crossover_at(a, b, c1, c2);
}

/// Each gene moves by a uniform delta in [-step, +step) with probability
/// `mutation_rate`.
inline Genotype mutate(const Genotype& g, const GAParams& ga, Draws& draws) {
    Genotype out = g;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (draws.uniform() < ga.mutation_rate) out[i] += (2.0 * draws.uniform() - 1.0) * ga.gene_scale(i);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Solis-Wets local search

struct SolisWetsResult {
    std::vector<double> genes;
    double energy = 0.0;
    std::uint64_t evals = 0;
};

/// Adaptive random local search with a success-direction bias.
///
/// Each iteration draws a deviate d_i = rho * scale_i * (u1 + u2 - 1), tries
/// x + b + d and, failing that, x - b - d. Only strict improvements are
/// accepted, so the returned energy never exceeds `start_energy`. Stops after
/// `max_iters` iterations, once rho < rho_min, or when `eval_limit`
/// evaluations are spent.
template <class EnergyFn>
SolisWetsResult solis_wets(std::span<const double> start, double start_energy, EnergyFn&& energy_fn, std::span<const double> scales,
                           const SolisWetsParams& sw, Draws& draws,
                           std::uint64_t eval_limit = std::numeric_limits<std::uint64_t>::max()) {
    if (scales.size() != start.size()) throw std::invalid_argument("Solis-Wets scale vector length mismatch");
    const std::size_t n = start.size();
    SolisWetsResult res{std::vector<double>(start.begin(), start.end()), start_energy, 0};
    std::vector<double> bias(n, 0.0), dev(n), cand(n);
    double rho = sw.rho_init;
    int successes = 0;
    int failures = 0;

    for (int iter = 0; iter < sw.max_iters && rho >= sw.rho_min; ++iter) {
        if (res.evals >= eval_limit) break;
        for (std::size_t i = 0; i < n; ++i) {
            const double u1 = draws.uniform();
            const double u2 = draws.uniform();
            dev[i] = rho * scales[i] * (u1 + u2 - 1.0);
        }

        bool improved = false;
        for (std::size_t i = 0; i < n; ++i) cand[i] = res.genes[i] + bias[i] + dev[i];
        double e = energy_fn(std::span<const double>(cand));
        ++res.evals;
        if (e < res.energy) {
            improved = true;
            for (std::size_t i = 0; i < n; ++i) bias[i] = 0.4 * dev[i] + 0.2 * bias[i];
        } else if (res.evals < eval_limit) {
            for (std::size_t i = 0; i < n; ++i) cand[i] = res.genes[i] - bias[i] - dev[i];
            e = energy_fn(std::span<const double>(cand));
            ++res.evals;
            if (e < res.energy) {
                improved = true;
                for (std::size_t i = 0; i < n; ++i) bias[i] = bias[i] - 0.4 * dev[i];
            }
        }

        if (improved) {
            res.genes = cand;
            res.energy = e;
            ++successes;
            failures = 0;
        } else {
            ++failures;
            successes = 0;
        }

        if (successes >= sw.cons_succ) {
            rho *= sw.expand;
            successes = 0;
        } else if (failures >= sw.cons_fail) {
            rho *= sw.contract;
            failures = 0;
            std::fill(bias.begin(), bias.end(), 0.0);
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// One generation, decomposed into independent per-unit kernels. The serial
// `next_generation` below and the parallel engine drivers both compose
// exactly these kernels, which is what makes them bit-identical.

struct GenerationPlan {
    std::size_t elites = 0;
    std::size_t offspring = 0;
    std::size_t pairs = 0;
    std::size_t ls_count = 0;
    std::uint64_t ls_eval_limit = 0; // per locally searched individual
};

inline std::size_t local_search_count(const GAParams& ga) {
    // The epsilon keeps products like 0.06 * 150 = 9.000000000000002 at 9.
    return static_cast<std::size_t>(std::ceil(ga.ls_rate * static_cast<double>(ga.pop_size) - 1e-9));
}

/// `remaining` is the evaluation budget left for the generation; the plan
/// never spends more than that on local search.
inline GenerationPlan plan_generation(const GAParams& ga, const SolisWetsParams& sw,
                                      std::uint64_t remaining = std::numeric_limits<std::uint64_t>::max()) {
    GenerationPlan p;
    p.elites = std::min(ga.elitism_count, ga.pop_size);
    p.offspring = ga.pop_size - p.elites;
    p.pairs = (p.offspring + 1) / 2;
    p.ls_count = std::min(local_search_count(ga), p.offspring);
    if (p.ls_count > 0) {
        const std::uint64_t after_breeding = remaining > p.offspring ? remaining - p.offspring : 0;
        p.ls_eval_limit = std::min<std::uint64_t>(2 * static_cast<std::uint64_t>(sw.max_iters), after_breeding / p.ls_count);
    }
    return p;
}

/// A run stops when the budget is spent, the generation cap is reached, or
/// the next generation's offspring evaluations would overrun the budget.
inline bool should_continue(const GAParams& ga, std::uint64_t evals_so_far, std::uint32_t generation) {
    if (generation >= ga.max_generations || evals_so_far >= ga.max_evals) return false;
    const std::size_t offspring = ga.pop_size - std::min(ga.elitism_count, ga.pop_size);
    return ga.max_evals - evals_so_far >= offspring;
}

/// Slots ordered by fitness (energy, then index).
inline std::vector<std::size_t> fitness_order(const Population& pop) {
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitter(pop, a, b); });
    return order;
}

/// Copies the elites into slots [0, elites) of `next`.
inline void copy_elites(const Population& current, const GenerationPlan& plan, Population& next) {
    const auto order = fitness_order(current);
    for (std::size_t e = 0; e < plan.elites; ++e) {
        next[e] = current[order[e]];
        next[e].eval_count = 0;
    }
}

inline RngKey generation_key(std::uint64_t seed, std::uint32_t run, std::uint32_t generation, StreamTag tag, std::size_t index) {
    return {seed, run, generation, stream_unit(tag, static_cast<std::uint32_t>(index)), 0};
}

/// Select, cross over and mutate for offspring pair `pair`, writing the
/// genotypes into slots elites + 2*pair (+1). Energies are left stale.
inline void breed_pair(const Population& current, std::size_t pair, const GenerationPlan& plan, const GAParams& ga, std::uint64_t seed,
                       std::uint32_t run, Population& next) {
    Draws draws(generation_key(seed, run, next.generation, StreamTag::Breed, pair));
    const std::size_t a = tournament_select(current, ga.tournament_rate, draws);
    const std::size_t b = tournament_select(current, ga.tournament_rate, draws);
    auto [child_a, child_b] = crossover(current[a].genotype, current[b].genotype, ga.crossover_rate, draws);
    const std::size_t slot = plan.elites + 2 * pair;
    next[slot].genotype = mutate(child_a, ga, draws);
    if (slot + 1 < next.size()) next[slot + 1].genotype = mutate(child_b, ga, draws);
}

inline void evaluate_slot(const Scorer& scorer, Population& next, std::size_t slot, std::vector<Vec3>& scratch) {
    next[slot].energy = scorer.energy(next[slot].genotype, scratch);
    next[slot].eval_count = 1;
}

/// Offspring slots chosen for local search, without replacement.
inline std::vector<std::size_t> choose_local_search_slots(const GenerationPlan& plan, std::uint64_t seed, std::uint32_t run,
                                                          std::uint32_t generation) {
    std::vector<std::size_t> pool(plan.offspring);
    std::iota(pool.begin(), pool.end(), plan.elites);
    Draws draws(generation_key(seed, run, generation, StreamTag::LocalSearchSample, 0));
    for (std::size_t k = 0; k < plan.ls_count; ++k) {
        const std::size_t pick = k + draws.below(pool.size() - k);
        std::swap(pool[k], pool[pick]);
    }
    pool.resize(plan.ls_count);
    return pool;
}

/// Solis-Wets on slot `slot`, writing the improved genotype and energy back
/// (Lamarckian) and charging the evaluations to the slot.
inline void local_search_slot(const Scorer& scorer, const GAParams& ga, const SolisWetsParams& sw, std::uint64_t eval_limit,
                              std::uint64_t seed, std::uint32_t run, std::size_t sample_index, std::size_t slot, Population& next,
                              std::vector<Vec3>& scratch) {
    Individual& ind = next[slot];
    const std::size_t n = ind.genotype.size();
    std::vector<double> scales(n);
    for (std::size_t i = 0; i < n; ++i) scales[i] = ga.gene_scale(i);
    Genotype trial = ind.genotype;
    auto energy_fn = [&](std::span<const double> genes) {
        std::copy(genes.begin(), genes.end(), trial.genes().begin());
        return scorer.energy(trial, scratch);
    };
    Draws draws(generation_key(seed, run, next.generation, StreamTag::LocalSearch, sample_index));
    SolisWetsResult res = solis_wets(ind.genotype.genes(), ind.energy, energy_fn, scales, sw, draws, eval_limit);
    if (res.energy < ind.energy) {
        ind.genotype = Genotype::from_genes(std::move(res.genes));
        ind.energy = res.energy;
    }
    ind.eval_count += res.evals;
}

/// Serial reference generation step.
inline Population next_generation(const Population& current, const Scorer& scorer, const GAParams& ga, const SolisWetsParams& sw,
                                  std::uint64_t seed, std::uint32_t run = 0,
                                  std::uint64_t remaining = std::numeric_limits<std::uint64_t>::max()) {
    ga.validate();
    sw.validate();
    if (current.size() != ga.pop_size) throw std::invalid_argument("population size does not match pop_size");
    const GenerationPlan plan = plan_generation(ga, sw, remaining);
    Population next = current;
    next.generation = current.generation + 1;
    copy_elites(current, plan, next);
    for (std::size_t p = 0; p < plan.pairs; ++p) breed_pair(current, p, plan, ga, seed, run, next);
    std::vector<Vec3> scratch;
    for (std::size_t s = plan.elites; s < next.size(); ++s) evaluate_slot(scorer, next, s, scratch);
    const auto ls_slots = choose_local_search_slots(plan, seed, run, next.generation);
    for (std::size_t k = 0; k < ls_slots.size(); ++k)
        local_search_slot(scorer, ga, sw, plan.ls_eval_limit, seed, run, k, ls_slots[k], next, scratch);
    return next;
}

} // namespace dockette
