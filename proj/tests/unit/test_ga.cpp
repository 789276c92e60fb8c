#include <algorithm>
#include <vector>

#include <gtest/gtest.h>

#include "qcga/errors.hpp"
#include "qcga/ga.hpp"
#include "qcga/library.hpp"
#include "support.hpp"

using namespace qcga;

namespace {

const CriticalErrors kSodium{2.313, 3.495};

SimulationPlan small_plan() {
    SimulationPlan plan;
    plan.measurements_per_level = 200;
    return plan;
}

std::vector<Individual> random_population(int size, std::uint64_t seed, const SimulationPlan& plan) {
    RandomStream rng(seed, 0);
    std::vector<Genome> genomes;
    for (int i = 0; i < size; ++i) genomes.push_back(test_support::random_genome(rng, GenomeLayout{}));
    return evaluate_population(genomes, plan, kSodium, ObjectiveConfig{}, 0);
}

} // namespace

TEST(EvaluatePopulation, CopiesShareFitness) {
    RandomStream rng(1, 0);
    Genome g;
    do {
        g = test_support::random_genome(rng, GenomeLayout{});
    } while (decode(g).empty());
    const std::vector<Genome> copies(8, g);
    const auto pop = evaluate_population(copies, small_plan(), kSodium, ObjectiveConfig{}, 3);
    for (const auto& ind : pop) EXPECT_EQ(ind.fitness, pop[0].fitness);
}

TEST(EvaluatePopulation, AllZeroGenomesScoreEmptyProcedure) {
    const std::vector<Genome> zeros(4, Genome::zeros(GenomeLayout{}));
    for (const auto& ind : evaluate_population(zeros, small_plan(), kSodium, ObjectiveConfig{}, 0)) {
        EXPECT_NEAR(ind.fitness, 1.11803, 1e-5);
        EXPECT_EQ(ind.operator_count, 0);
    }
}

TEST(EvaluatePopulation, SingleValueGenomeNearReferenceRow) {
    Procedure p = parse_procedure("S(1,2.4)");
    p.levels = 2;
    p.per_level = 1;
    const std::vector<Genome> one{encode(p, GenomeLayout{})};
    const auto pop = evaluate_population(one, SimulationPlan{}, kSodium, ObjectiveConfig{}, 0);
    EXPECT_NEAR(pop[0].fitness, 0.0375, 0.02);
}

TEST(EvaluatePopulation, ThreadCountDoesNotMatter) {
    RandomStream rng(9, 0);
    std::vector<Genome> genomes;
    for (int i = 0; i < 24; ++i) genomes.push_back(test_support::random_genome(rng, GenomeLayout{}));
    const auto a = evaluate_population(genomes, small_plan(), kSodium, ObjectiveConfig{}, 2, EvaluationSeeding::PerGeneration, 1);
    const auto b = evaluate_population(genomes, small_plan(), kSodium, ObjectiveConfig{}, 2, EvaluationSeeding::PerGeneration, 4);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].fitness, b[i].fitness);
}

TEST(EvaluatePopulation, SeedingModes) {
    const SimulationPlan plan = small_plan();
    Genome g = encode(Procedure{{{RuleKind::Range, 2, 2.5}}, {}, 2, 1}, GenomeLayout{});
    EXPECT_EQ(evaluation_stream_id(plan, EvaluationSeeding::Fixed, g, 0),
              evaluation_stream_id(plan, EvaluationSeeding::Fixed, g, 7));
    EXPECT_NE(evaluation_stream_id(plan, EvaluationSeeding::PerGeneration, g, 0),
              evaluation_stream_id(plan, EvaluationSeeding::PerGeneration, g, 7));
    Genome h = g;
    h.flip(39);
    EXPECT_NE(evaluation_stream_id(plan, EvaluationSeeding::PerGenome, g, 1),
              evaluation_stream_id(plan, EvaluationSeeding::PerGenome, h, 1));
}

TEST(ChildReplacesParent, Tiebreaks) {
    Individual parent{Genome::zeros(GenomeLayout{}), 0.03, {}, 2};
    Individual child = parent;
    EXPECT_FALSE(child_replaces_parent(child, parent));  // clone: parent survives
    child.operator_count = 1;
    EXPECT_TRUE(child_replaces_parent(child, parent));   // equal fitness, fewer operators
    child.operator_count = 2;
    child.fitness = 0.029;
    EXPECT_TRUE(child_replaces_parent(child, parent));
    child.fitness = 0.031;
    child.operator_count = 0;
    EXPECT_FALSE(child_replaces_parent(child, parent));
}

TEST(CrowdingGeneration, ClonesLeavePopulationUnchanged) {
    const SimulationPlan plan = small_plan();
    auto pop = random_population(20, 5, plan);
    GaParams params;
    params.population = 20;
    params.p_crossover = 0.0;
    params.mutation_schedule = {{0, 0.0}};
    params.record_replacements = true;
    ChildEvaluator eval = [&](std::span<const Genome> g) {
        return evaluate_population(g, plan, kSodium, ObjectiveConfig{}, 0);
    };
    const auto out = crowding_generation(pop, params, 0, 12345, McgConstants{}, eval);
    auto key = [](const std::vector<Individual>& v) {
        std::vector<std::string> k;
        for (const auto& i : v) k.push_back(i.genome.bit_string());
        std::sort(k.begin(), k.end());
        return k;
    };
    EXPECT_EQ(key(out.population), key(pop));
    for (const auto& e : out.events) EXPECT_FALSE(e.replaced);
    for (const auto& e : out.events) EXPECT_EQ(e.chosen_distance, 0U);
}

TEST(CrowdingGeneration, ReplacementLegalityAndMatchingOptimality) {
    const SimulationPlan plan = small_plan();
    auto pop = random_population(40, 6, plan);
    GaParams params;
    params.population = 40;
    params.crossover = CrossoverKind::TwoPoint;
    params.mutation_schedule = {{0, 0.02}};
    params.record_replacements = true;
    ChildEvaluator eval = [&](std::span<const Genome> g) {
        return evaluate_population(g, plan, kSodium, ObjectiveConfig{}, 0);
    };
    std::size_t replaced = 0;
    for (int step = 0; step < 5; ++step) {
        auto out = crowding_generation(std::move(pop), params, step, 1000 + step, McgConstants{}, eval);
        for (const auto& e : out.events) {
            EXPECT_LE(e.chosen_distance, e.alternative_distance);
            if (e.replaced) {
                ++replaced;
                EXPECT_TRUE(e.child_fitness < e.parent_fitness ||
                            (e.child_fitness == e.parent_fitness && e.child_operators < e.parent_operators));
            } else {
                EXPECT_FALSE(e.child_fitness < e.parent_fitness ||
                             (e.child_fitness == e.parent_fitness && e.child_operators < e.parent_operators));
            }
        }
        pop = std::move(out.population);
    }
    EXPECT_GT(replaced, 0U);
}

TEST(CrowdingGeneration, RejectsOddPopulation) {
    auto pop = random_population(3, 1, small_plan());
    ChildEvaluator eval = [](std::span<const Genome>) { return std::vector<Individual>{}; };
    EXPECT_THROW(crowding_generation(pop, GaParams{}, 0, 1, McgConstants{}, eval), InvalidArgument);
}

TEST(MutationSchedule, StepLookup) {
    GaParams p;
    EXPECT_EQ(p.mutation_rate(0), 0.0);
    EXPECT_EQ(p.mutation_rate(49), 0.0);
    EXPECT_EQ(p.mutation_rate(50), 0.0005);
    EXPECT_EQ(p.mutation_rate(99), 0.0005);
    p.mutation_schedule = {{0, 0.1}, {0, 0.2}};
    EXPECT_THROW(p.validate(), InvalidArgument);
    p.mutation_schedule = {{0, 0.1}};
    p.population = 7;
    EXPECT_THROW(p.validate(), InvalidArgument);
}

class RunDesignTest : public ::testing::Test {
protected:
    static GaParams params() {
        GaParams p;
        p.population = 30;
        p.generations = 8;
        p.mutation_schedule = {{0, 0.0}, {4, 0.01}};
        p.seed = 3;
        p.record_replacements = true;
        return p;
    }
};

TEST_F(RunDesignTest, BestFitnessNeverIncreases) {
    const auto report = run_design(GenomeLayout{}, small_plan(), AssayParams{}, ObjectiveConfig{}, params());
    ASSERT_EQ(report.generations.size(), 9U);
    for (std::size_t i = 1; i < report.generations.size(); ++i)
        EXPECT_LE(report.generations[i].fitness, report.generations[i - 1].fitness);
    EXPECT_FALSE(report.best.empty());
    EXPECT_LE(report.best.size(), 10U);
    for (std::size_t i = 1; i < report.best.size(); ++i) EXPECT_LE(report.best[i - 1].fitness, report.best[i].fitness);
}

TEST_F(RunDesignTest, ReproducibleAndThreadIndependent) {
    auto p = params();
    const auto a = run_design(GenomeLayout{}, small_plan(), AssayParams{}, ObjectiveConfig{}, p);
    p.threads = 3;
    const auto b = run_design(GenomeLayout{}, small_plan(), AssayParams{}, ObjectiveConfig{}, p);
    ASSERT_EQ(a.generations.size(), b.generations.size());
    for (std::size_t i = 0; i < a.generations.size(); ++i) {
        EXPECT_EQ(a.generations[i].genome_hex, b.generations[i].genome_hex);
        EXPECT_EQ(a.generations[i].fitness, b.generations[i].fitness);
    }
    ASSERT_EQ(a.replacements.size(), b.replacements.size());
}

TEST_F(RunDesignTest, ZeroGenerationsReportsInitialPopulation) {
    auto p = params();
    p.generations = 0;
    const auto report = run_design(GenomeLayout{}, small_plan(), AssayParams{}, ObjectiveConfig{}, p);
    EXPECT_EQ(report.generations.size(), 1U);
    EXPECT_EQ(report.generations[0].generation, 0);
    EXPECT_TRUE(report.replacements.empty());
}

TEST_F(RunDesignTest, InitSeedPinsInitialPopulation) {
    auto p = params();
    p.generations = 0;
    p.init_seed = 99;
    std::vector<std::string> first;
    std::vector<std::string> second;
    run_design(GenomeLayout{}, small_plan(), AssayParams{}, ObjectiveConfig{}, p,
               [&](int, const std::vector<Individual>& pop) {
                   for (const auto& i : pop) first.push_back(i.genome.bit_string());
               });
    p.seed = 1234;
    run_design(GenomeLayout{}, small_plan(), AssayParams{}, ObjectiveConfig{}, p,
               [&](int, const std::vector<Individual>& pop) {
                   for (const auto& i : pop) second.push_back(i.genome.bit_string());
               });
    EXPECT_EQ(first, second);
}

TEST_F(RunDesignTest, FixedSeedingIsMonotoneAndDecodesEverywhere) {
    auto p = params();
    p.seeding = EvaluationSeeding::Fixed;
    double prev = 1e9;
    run_design(GenomeLayout{}, small_plan(), AssayParams{}, ObjectiveConfig{}, p,
               [&](int, const std::vector<Individual>& pop) {
                   double best = 1e9;
                   for (const auto& i : pop) {
                       EXPECT_NO_THROW(decode(i.genome).validate());
                       best = std::min(best, i.fitness);
                   }
                   EXPECT_LE(best, prev);
                   prev = best;
               });
}
