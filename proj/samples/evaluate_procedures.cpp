// Estimates detection and false-rejection probabilities for a few procedures under the
// sodium assay (SD 0.67, bias 0.1, TEa 4.0, alpha 0.01).

#include <cstdio>

#include "qcga/error_model.hpp"
#include "qcga/library.hpp"
#include "qcga/objective.hpp"
#include "qcga/simulator.hpp"

int main() {
    const qcga::CriticalErrors critical = qcga::critical_errors(qcga::AssayParams{});
    std::printf("critical random error %.3f, systematic error %.3f\n", critical.k_re, critical.delta_se);

    const qcga::SimulationPlan plan;  // 2 levels x 1 per run, 1000 runs
    for (const char* text : {"1_2.4s", "1_2.5s/2_2.0s", "S(1,2.7) OR M(2,1.9)", "NONE"}) {
        const qcga::Procedure proc = qcga::parse_procedure(text);
        const auto est = qcga::estimate_performance(proc, plan, critical);
        std::printf("%-24s P_re %.4f  P_se %.4f  P_fr %.4f  f1 %.4f\n", qcga::canonical_notation(proc).c_str(),
                    est.p_re, est.p_se, est.p_fr, qcga::comparison_f1(est));
    }
}
