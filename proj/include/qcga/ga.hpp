#pragma once

/// @file ga.hpp
/// @brief Deterministic-crowding genetic algorithm over procedure genomes.
///
/// Each generation the population is shuffled and paired. Every pair produces two children
/// by crossover and per-bit mutation; each child is matched to the parent it most resembles
/// (minimum total Hamming distance over the two possible pairings) and replaces that parent
/// only if it is fitter, or equally fit with fewer operators.
///
/// All randomness comes from RandomStream substreams keyed by (seed, generation, pair), so
/// results do not depend on the thread count.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qcga/error_model.hpp"
#include "qcga/errors.hpp"
#include "qcga/genome.hpp"
#include "qcga/objective.hpp"
#include "qcga/parallel.hpp"
#include "qcga/rng.hpp"
#include "qcga/rules.hpp"
#include "qcga/simulator.hpp"

namespace qcga {

enum class CrossoverKind : std::uint8_t { SinglePoint, TwoPoint };

/// How simulation substreams are chosen for fitness evaluation.
enum class EvaluationSeeding : std::uint8_t {
    /// Common random numbers within a generation; a new substream each generation.
    PerGeneration,
    /// One substream for the whole search, so fitness is a pure function of the genome.
    Fixed,
    /// Substream keyed by genome content and generation.
    PerGenome,
};

struct MutationStep {
    int from_generation = 0;
    double p_mutation = 0.0;

    friend bool operator==(const MutationStep&, const MutationStep&) = default;
};

struct GaParams {
    int population = 600;
    double p_crossover = 1.0;
    std::vector<MutationStep> mutation_schedule{{0, 0.0}, {50, 0.0005}};
    int generations = 100;
    CrossoverKind crossover = CrossoverKind::SinglePoint;
    std::uint64_t seed = 1;
    /// Seed of the initial population; unset means `seed`. Fixing it while varying `seed`
    /// repeats a search from one population with different variation and simulation draws.
    std::optional<std::uint64_t> init_seed;
    EvaluationSeeding seeding = EvaluationSeeding::PerGeneration;
    unsigned threads = 1;
    bool record_replacements = false;
    /// Size of the deduplicated best-procedure list in the report.
    std::size_t report_best = 10;

    void validate() const {
        if (population < 2 || population % 2 != 0) throw InvalidArgument("ga.population must be even and >= 2");
        if (p_crossover < 0.0 || p_crossover > 1.0) throw InvalidArgument("ga.p_crossover must lie in [0,1]");
        if (generations < 0) throw InvalidArgument("ga.generations must be >= 0");
        for (std::size_t i = 0; i < mutation_schedule.size(); ++i) {
            const auto& step = mutation_schedule[i];
            if (step.p_mutation < 0.0 || step.p_mutation > 1.0)
                throw InvalidArgument("ga.mutation_schedule rates must lie in [0,1]");
            if (i > 0 && step.from_generation <= mutation_schedule[i - 1].from_generation)
                throw InvalidArgument("ga.mutation_schedule generations must be strictly increasing");
        }
    }

    /// Mutation rate for the step that produces generation `step + 1`.
    [[nodiscard]] double mutation_rate(int step) const {
        double rate = 0.0;
        for (const auto& entry : mutation_schedule)
            if (entry.from_generation <= step) rate = entry.p_mutation;
        return rate;
    }
};

struct Individual {
    Genome genome;
    double fitness = 0.0;
    PerformanceEstimate estimate;
    int operator_count = 0;
};

/// One child-versus-parent contest.
struct ReplacementEvent {
    int generation = 0;
    std::size_t pair = 0;
    double parent_fitness = 0.0;
    double child_fitness = 0.0;
    int parent_operators = 0;
    int child_operators = 0;
    bool replaced = false;
    std::size_t chosen_distance = 0;       // total Hamming distance of the chosen matching
    std::size_t alternative_distance = 0;  // total Hamming distance of the other matching
};

/// Child wins outright when strictly fitter; on equal fitness the simpler procedure wins.
inline bool child_replaces_parent(const Individual& child, const Individual& parent) {
    if (child.fitness < parent.fitness) return true;
    return child.fitness == parent.fitness && child.operator_count < parent.operator_count;
}

namespace detail {

inline std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace detail

/// Substream index used to evaluate `genome` at `generation`.
inline std::uint64_t evaluation_stream_id(const SimulationPlan& plan, EvaluationSeeding seeding,
                                          const Genome& genome, int generation) {
    switch (seeding) {
    case EvaluationSeeding::PerGeneration: return plan.stream_id + static_cast<std::uint64_t>(generation);
    case EvaluationSeeding::Fixed: return plan.stream_id;
    case EvaluationSeeding::PerGenome:
        return plan.stream_id +
               (detail::fnv1a(genome.bit_string() + "#" + std::to_string(generation)) % 1000000007ULL);
    }
    return plan.stream_id;
}

inline Individual evaluate_genome(const Genome& genome, const SimulationPlan& plan, const CriticalErrors& critical,
                                  const ObjectiveConfig& cfg) {
    const Procedure proc = decode(genome);
    Individual ind{genome, 0.0, estimate_performance(proc, plan, critical), proc.operator_count()};
    ind.fitness = fitness_f(ind.estimate, cfg);
    return ind;
}

/// Decodes and simulates every genome. Identical genomes within the call share one
/// evaluation, so they always receive identical fitness.
inline std::vector<Individual> evaluate_population(std::span<const Genome> genomes, const SimulationPlan& plan,
                                                   const CriticalErrors& critical, const ObjectiveConfig& cfg,
                                                   int generation,
                                                   EvaluationSeeding seeding = EvaluationSeeding::PerGeneration,
                                                   unsigned threads = 1) {
    std::unordered_map<std::string, std::size_t> first_index;
    std::vector<std::size_t> unique;
    std::vector<std::size_t> slot_of(genomes.size());
    for (std::size_t i = 0; i < genomes.size(); ++i) {
        if (i > 0 && !(genomes[i].layout() == genomes[0].layout()))
            throw InvalidArgument("evaluate_population: genomes must share one layout");
        auto [it, inserted] = first_index.try_emplace(genomes[i].bit_string(), unique.size());
        if (inserted) unique.push_back(i);
        slot_of[i] = it->second;
    }

    std::vector<Individual> evaluated(unique.size());
    detail::parallel_for(unique.size(), threads, [&](std::size_t u) {
        const Genome& g = genomes[unique[u]];
        SimulationPlan p = plan;
        p.stream_id = evaluation_stream_id(plan, seeding, g, generation);
        evaluated[u] = evaluate_genome(g, p, critical, cfg);
    });

    std::vector<Individual> out;
    out.reserve(genomes.size());
    for (std::size_t i = 0; i < genomes.size(); ++i) out.push_back(evaluated[slot_of[i]]);
    return out;
}

using ChildEvaluator = std::function<std::vector<Individual>(std::span<const Genome>)>;

struct GenerationOutcome {
    std::vector<Individual> population;
    std::vector<ReplacementEvent> events;
};

namespace detail {

inline std::pair<Genome, Genome> make_children(const Genome& a, const Genome& b, const GaParams& params,
                                               double p_mutation, RandomStream& rng) {
    Genome c1 = a;
    Genome c2 = b;
    const std::size_t len = a.size();
    if (len > 1 && rng.next_uniform() < params.p_crossover) {
        std::size_t lo = 1 + rng.next_below(len - 1);
        std::size_t hi = len;
        if (params.crossover == CrossoverKind::TwoPoint) {
            std::size_t other = 1 + rng.next_below(len - 1);
            if (other < lo) std::swap(lo, other);
            hi = other;
        }
        for (std::size_t i = lo; i < hi; ++i) {
            c1.set(i, b.bit(i));
            c2.set(i, a.bit(i));
        }
    }
    if (p_mutation > 0.0) {
        for (std::size_t i = 0; i < len; ++i)
            if (rng.next_uniform() < p_mutation) c1.flip(i);
        for (std::size_t i = 0; i < len; ++i)
            if (rng.next_uniform() < p_mutation) c2.flip(i);
    }
    return {std::move(c1), std::move(c2)};
}

} // namespace detail

/// One deterministic-crowding step producing generation `step + 1`. `generation_seed`
/// keys the shuffle (substream 0) and each pair's variation (substream pair + 1).
inline GenerationOutcome crowding_generation(std::vector<Individual> population, const GaParams& params, int step,
                                             std::uint64_t generation_seed, const McgConstants& constants,
                                             const ChildEvaluator& evaluate_children) {
    if (population.size() % 2 != 0) throw InvalidArgument("crowding_generation: population size must be even");

    RandomStream shuffle_rng(generation_seed, 0, constants);
    for (std::size_t i = population.size(); i > 1; --i) {
        const std::size_t j = shuffle_rng.next_below(i);
        std::swap(population[i - 1], population[j]);
    }

    const std::size_t pairs = population.size() / 2;
    const double p_mutation = params.mutation_rate(step);
    std::vector<Genome> children;
    children.reserve(population.size());
    for (std::size_t k = 0; k < pairs; ++k) {
        RandomStream rng(generation_seed, k + 1, constants);
        auto [c1, c2] = detail::make_children(population[2 * k].genome, population[2 * k + 1].genome, params,
                                              p_mutation, rng);
        children.push_back(std::move(c1));
        children.push_back(std::move(c2));
    }
    std::vector<Individual> evaluated = evaluate_children(children);

    GenerationOutcome out;
    for (std::size_t k = 0; k < pairs; ++k) {
        Individual& p1 = population[2 * k];
        Individual& p2 = population[2 * k + 1];
        Individual& c1 = evaluated[2 * k];
        Individual& c2 = evaluated[2 * k + 1];
        const std::size_t straight = hamming_distance(p1.genome, c1.genome) + hamming_distance(p2.genome, c2.genome);
        const std::size_t crossed = hamming_distance(p1.genome, c2.genome) + hamming_distance(p2.genome, c1.genome);
        const bool swap_children = crossed < straight;
        Individual& m1 = swap_children ? c2 : c1;
        Individual& m2 = swap_children ? c1 : c2;
        const std::size_t chosen = std::min(straight, crossed);
        const std::size_t alternative = std::max(straight, crossed);

        for (auto [parent, child] : {std::pair<Individual*, Individual*>{&p1, &m1}, {&p2, &m2}}) {
            const bool replace = child_replaces_parent(*child, *parent);
            if (params.record_replacements)
                out.events.push_back({step + 1, k, parent->fitness, child->fitness, parent->operator_count,
                                      child->operator_count, replace, chosen, alternative});
            if (replace) *parent = *child;
        }
    }
    out.population = std::move(population);
    return out;
}

struct GenerationRecord {
    int generation = 0;
    std::string notation;
    std::string genome_hex;
    int levels = 0;
    int per_level = 0;
    double fitness = 0.0;
    PerformanceEstimate estimate;
    std::size_t replacements = 0;
};

struct DesignedProcedure {
    std::string notation;
    std::string genome_hex;
    Procedure procedure;
    double fitness = 0.0;
    double f1 = 0.0;
    PerformanceEstimate estimate;
    int first_generation = 0;
};

struct DesignReport {
    GenomeLayout layout;
    SimulationPlan plan;
    AssayParams assay;
    CriticalErrors critical;
    ObjectiveConfig objective;
    GaParams params;
    std::vector<GenerationRecord> generations;
    std::vector<DesignedProcedure> best;
    std::vector<ReplacementEvent> replacements;
};

namespace detail {

inline const Individual& fittest(const std::vector<Individual>& population) {
    return *std::min_element(population.begin(), population.end(), [](const Individual& a, const Individual& b) {
        if (a.fitness != b.fitness) return a.fitness < b.fitness;
        return a.operator_count < b.operator_count;
    });
}

struct Archive {
    std::map<std::string, DesignedProcedure> entries;

    void add(const std::vector<Individual>& population, int generation) {
        for (const auto& ind : population) {
            const Procedure proc = decode(ind.genome);
            std::string notation = canonical_notation(proc);
            auto it = entries.find(notation);
            if (it == entries.end()) {
                entries.emplace(notation, DesignedProcedure{notation, ind.genome.hex(), proc, ind.fitness,
                                                            comparison_f1(ind.estimate), ind.estimate, generation});
            } else if (ind.fitness < it->second.fitness) {
                const int first = it->second.first_generation;
                it->second = {notation, ind.genome.hex(), proc, ind.fitness, comparison_f1(ind.estimate),
                              ind.estimate, first};
            }
        }
    }

    [[nodiscard]] std::vector<DesignedProcedure> top(std::size_t count) const {
        std::vector<DesignedProcedure> all;
        all.reserve(entries.size());
        for (const auto& [_, e] : entries) all.push_back(e);
        std::stable_sort(all.begin(), all.end(), [](const DesignedProcedure& a, const DesignedProcedure& b) {
            if (a.fitness != b.fitness) return a.fitness < b.fitness;
            return a.procedure.operator_count() < b.procedure.operator_count();
        });
        if (all.size() > count) all.resize(count);
        return all;
    }
};

inline GenerationRecord record_of(const std::vector<Individual>& population, int generation,
                                  std::size_t replacements) {
    const Individual& best = fittest(population);
    const Procedure proc = decode(best.genome);
    return {generation, canonical_notation(proc), best.genome.hex(), proc.levels.value_or(0),
            proc.per_level.value_or(0), best.fitness, best.estimate, replacements};
}

} // namespace detail

/// Optional hook receiving each generation's population (generation 0 is the initial one).
using GenerationObserver = std::function<void(int generation, const std::vector<Individual>& population)>;

/// Full search: random initial population, then `params.generations` crowding steps.
inline DesignReport run_design(const GenomeLayout& layout, const SimulationPlan& plan, const AssayParams& assay,
                               const ObjectiveConfig& cfg, const GaParams& params,
                               const GenerationObserver& observer = {}) {
    layout.validate();
    plan.validate();
    cfg.validate();
    params.validate();

    DesignReport report{layout, plan, assay, critical_errors(assay), cfg, params, {}, {}, {}};
    const std::size_t length = genome_length(layout);

    std::vector<Genome> initial;
    initial.reserve(static_cast<std::size_t>(params.population));
    RandomStream init_rng(params.init_seed.value_or(params.seed), 0, plan.constants);
    for (int i = 0; i < params.population; ++i) {
        std::vector<std::uint8_t> bits(length);
        for (auto& b : bits) b = init_rng.next_uniform() < 0.5 ? 0 : 1;
        initial.emplace_back(layout, std::move(bits));
    }

    std::unordered_map<std::string, Individual> fixed_cache;
    auto evaluate = [&](std::span<const Genome> genomes, int generation) {
        if (params.seeding != EvaluationSeeding::Fixed)
            return evaluate_population(genomes, plan, report.critical, cfg, generation, params.seeding, params.threads);
        std::vector<Genome> missing;
        for (const auto& g : genomes)
            if (!fixed_cache.contains(g.bit_string())) missing.push_back(g);
        auto fresh = evaluate_population(missing, plan, report.critical, cfg, generation, params.seeding,
                                         params.threads);
        for (auto& ind : fresh) fixed_cache.try_emplace(ind.genome.bit_string(), std::move(ind));
        std::vector<Individual> out;
        out.reserve(genomes.size());
        for (const auto& g : genomes) out.push_back(fixed_cache.at(g.bit_string()));
        return out;
    };

    std::vector<Individual> population = evaluate(initial, 0);
    detail::Archive archive;
    archive.add(population, 0);
    report.generations.push_back(detail::record_of(population, 0, 0));
    if (observer) observer(0, population);

    for (int step = 0; step < params.generations; ++step) {
        const int generation = step + 1;
        const std::uint64_t generation_seed = RandomStream(params.seed, static_cast<std::uint64_t>(generation),
                                                           plan.constants)
                                                  .next_raw();
        ChildEvaluator children = [&](std::span<const Genome> genomes) { return evaluate(genomes, generation); };
        GaParams step_params = params;
        step_params.record_replacements = true;
        auto outcome = crowding_generation(std::move(population), step_params, step, generation_seed, plan.constants,
                                           children);
        population = std::move(outcome.population);
        const auto replaced = static_cast<std::size_t>(
            std::count_if(outcome.events.begin(), outcome.events.end(), [](const auto& e) { return e.replaced; }));
        archive.add(population, generation);
        report.generations.push_back(detail::record_of(population, generation, replaced));
        if (params.record_replacements)
            report.replacements.insert(report.replacements.end(), outcome.events.begin(), outcome.events.end());
        if (observer) observer(generation, population);
    }

    report.best = archive.top(params.report_best);
    return report;
}

} // namespace qcga
