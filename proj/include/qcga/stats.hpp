#pragma once

/// @file stats.hpp
/// @brief Replicated paired comparison of procedures, summary statistics and the exact
/// two-sided sign test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qcga/error_model.hpp"
#include "qcga/errors.hpp"
#include "qcga/objective.hpp"
#include "qcga/parallel.hpp"
#include "qcga/rules.hpp"
#include "qcga/simulator.hpp"

namespace qcga {

struct Summary {
    double mean = 0.0;
    double sd = 0.0;
};

/// Arithmetic mean and sample SD (n-1 divisor). Needs at least two values.
inline Summary summarize(std::span<const double> values) {
    if (values.size() < 2) throw InvalidArgument("summarize: at least two values required for an SD");
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

struct SignTestResult {
    double p_value = 1.0;
    std::size_t below = 0;  // pairs with a < b
    std::size_t above = 0;  // pairs with a > b
    std::size_t ties = 0;
    bool ties_only = false;
};

/// P(X <= s) for X ~ Binomial(n, 1/2).
inline double binomial_half_cdf(std::size_t n, std::size_t s) {
    if (s >= n) return 1.0;
    if (n <= 62) {
        // Exact integer arithmetic; one rounding at the end.
        std::uint64_t c = 1;
        std::uint64_t total = 1;
        for (std::size_t k = 1; k <= s; ++k) {
            c = static_cast<std::uint64_t>(static_cast<detail::uint128>(c) * (n - k + 1) / k);
            total += c;
        }
        return std::ldexp(static_cast<double>(total), -static_cast<int>(n));
    }
    const double log_half_n = -static_cast<double>(n) * std::log(2.0);
    double total = 0.0;
    for (std::size_t k = 0; k <= s; ++k) {
        const double log_c = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                             std::lgamma(static_cast<double>(n - k) + 1.0);
        total += std::exp(log_c + log_half_n);
    }
    return std::min(1.0, total);
}

/// Exact two-sided sign test on paired samples. Ties are dropped; with s = #(a < b) over
/// the n remaining pairs, p = min(1, 2 min(P(X <= s), P(X >= s))), X ~ Bin(n, 1/2).
inline SignTestResult sign_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw InvalidArgument("sign_test: equal, non-zero lengths required");
    SignTestResult r;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i])
            ++r.below;
        else if (a[i] > b[i])
            ++r.above;
        else
            ++r.ties;
    }
    const std::size_t n = r.below + r.above;
    if (n == 0) {
        r.ties_only = true;
        r.p_value = 1.0;
        return r;
    }
    const double lower = binomial_half_cdf(n, r.below);
    // P(X >= s) = P(X <= n - s) by symmetry.
    const double upper = binomial_half_cdf(n, n - r.below);
    r.p_value = std::min(1.0, 2.0 * std::min(lower, upper));
    return r;
}

struct NamedProcedure {
    std::string name;
    Procedure procedure;
};

struct ProcedureComparison {
    std::string name;
    std::string notation;
    std::vector<PerformanceEstimate> replicates;
    std::vector<double> f1;
    Summary p_re;
    Summary p_se;
    Summary p_fr;
    Summary f1_summary;
    /// Sign test of this procedure's f1 against the reference (top-ranked) procedure.
    SignTestResult versus_reference;
};

struct ComparisonResult {
    std::vector<ProcedureComparison> rows;  // sorted by mean f1, ascending, stable
    int replicates = 0;
    std::uint64_t base_seed = 0;
    SimulationPlan plan;
    CriticalErrors critical;
};

/// Replicate r of every procedure runs on substream r of `base_seed`, so all procedures
/// see the same deviate series (paired design).
inline ComparisonResult compare_procedures(const std::vector<NamedProcedure>& procedures,
                                           const SimulationPlan& plan_template, const CriticalErrors& critical,
                                           int replicates = 21, std::uint64_t base_seed = 1, unsigned threads = 1) {
    if (replicates < 2) throw InvalidArgument("compare_procedures: at least two replicates required");
    plan_template.validate();
    for (const auto& p : procedures) p.procedure.validate();

    const std::size_t count = procedures.size();
    const auto reps = static_cast<std::size_t>(replicates);
    std::vector<PerformanceEstimate> grid(count * reps);
    detail::parallel_for(count * reps, threads, [&](std::size_t task) {
        const std::size_t proc = task / reps;
        const std::size_t rep = task % reps;
        SimulationPlan plan = plan_template;
        plan.seed = base_seed;
        plan.stream_id = rep;
        grid[task] = estimate_performance(procedures[proc].procedure, plan, critical);
    });

    ComparisonResult result;
    result.replicates = replicates;
    result.base_seed = base_seed;
    result.plan = plan_template;
    result.plan.seed = base_seed;
    result.critical = critical;
    for (std::size_t i = 0; i < count; ++i) {
        ProcedureComparison row;
        row.name = procedures[i].name;
        row.notation = canonical_notation(procedures[i].procedure);
        std::vector<double> re;
        std::vector<double> se;
        std::vector<double> fr;
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& est = grid[i * reps + r];
            row.replicates.push_back(est);
            row.f1.push_back(comparison_f1(est));
            re.push_back(est.p_re);
            se.push_back(est.p_se);
            fr.push_back(est.p_fr);
        }
        row.p_re = summarize(re);
        row.p_se = summarize(se);
        row.p_fr = summarize(fr);
        row.f1_summary = summarize(row.f1);
        result.rows.push_back(std::move(row));
    }
    std::stable_sort(result.rows.begin(), result.rows.end(),
                     [](const ProcedureComparison& a, const ProcedureComparison& b) {
                         return a.f1_summary.mean < b.f1_summary.mean;
                     });
    if (!result.rows.empty()) {
        const std::vector<double> reference = result.rows.front().f1;
        for (auto& row : result.rows) row.versus_reference = sign_test(reference, row.f1);
    }
    return result;
}

} // namespace qcga
