// Desk-scale genetic search (population 60, 15 generations) for the sodium assay.

#include <cstdio>

#include "qcga/ga.hpp"

int main() {
    qcga::GaParams params;
    params.population = 60;
    params.generations = 15;
    params.mutation_schedule = {{0, 0.0}, {8, 0.005}};
    params.seed = 7;

    const auto report =
        qcga::run_design(qcga::GenomeLayout{}, qcga::SimulationPlan{}, qcga::AssayParams{}, qcga::ObjectiveConfig{}, params);
    for (const auto& g : report.generations)
        std::printf("gen %2d  f %.5f  %s\n", g.generation, g.fitness, g.notation.c_str());
    std::printf("\nbest procedures:\n");
    for (const auto& b : report.best)
        std::printf("  f %.5f  f1 %.5f  %s (%d level%s)\n", b.fitness, b.f1, b.notation.c_str(),
                    b.procedure.levels.value_or(2), b.procedure.levels.value_or(2) == 1 ? "" : "s");
}
