// Paired 21-replicate comparison of two library procedures and one designed procedure,
// ranked by mean f1 with sign tests against the top row.

#include <cstdio>
#include <vector>

#include "qcga/error_model.hpp"
#include "qcga/library.hpp"
#include "qcga/stats.hpp"

int main() {
    const auto critical = qcga::critical_errors(qcga::AssayParams{});
    std::vector<qcga::NamedProcedure> procs;
    for (const char* text : {"1_2.4s", "1_2.5s/2_2.0s", "S(1,2.7) OR M(2,1.9)"})
        procs.push_back({text, qcga::parse_procedure(text)});

    const auto result = qcga::compare_procedures(procs, qcga::SimulationPlan{}, critical);
    for (const auto& row : result.rows)
        std::printf("%-22s f1 %.4f +- %.4f  P_re %.4f  P_se %.4f  P_fr %.4f  sign-test p %.3g\n", row.name.c_str(),
                    row.f1_summary.mean, row.f1_summary.sd, row.p_re.mean, row.p_se.mean, row.p_fr.mean,
                    row.versus_reference.p_value);
}
