#pragma once

/// @file simulator.hpp
/// @brief Monte Carlo estimation of per-run rejection probabilities.
///
/// Runs are simulated back to back. Each run draws `levels x per_level` standardized
/// measurements in alternating-level order (L1 slot 1, L2 slot 1, L1 slot 2, ...) and
/// appends them to one pooled cross-run history. The procedure is evaluated after every
/// measurement; a run is rejected if any evaluation during it is true. The injected error
/// persists for the whole simulation. By default the history is cleared after each rejected
/// run (the error has been detected and the process restored); see HistoryPolicy.
///
/// All deviates of a run are drawn even after the run is rejected, so every procedure
/// evaluated on the same stream sees the identical series.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qcga/error_model.hpp"
#include "qcga/errors.hpp"
#include "qcga/rng.hpp"
#include "qcga/rules.hpp"

namespace qcga {

struct ErrorCondition {
    enum class Kind : std::uint8_t { InControl, RandomError, SystematicError };

    Kind kind = Kind::InControl;
    double magnitude = 0.0;  // k for RandomError, delta for SystematicError

    static ErrorCondition in_control() { return {Kind::InControl, 0.0}; }
    static ErrorCondition random_error(double k) { return {Kind::RandomError, k}; }
    static ErrorCondition systematic_error(double delta) { return {Kind::SystematicError, delta}; }

    [[nodiscard]] double apply(double z) const {
        switch (kind) {
        case Kind::InControl: return z;
        case Kind::RandomError: return magnitude * z;
        case Kind::SystematicError: return z + magnitude;
        }
        return z;
    }
};

/// What happens to the pooled cross-run history after a rejected run.
enum class HistoryPolicy : std::uint8_t {
    /// Cleared: rules spanning runs restart from an empty window.
    ResetOnRejection,
    /// Kept: rejection does not interrupt the measurement series.
    Persistent,
    /// Replaced by kMaxWindow-1 in-control values from a separate warm-up substream, as
    /// if the process had been restored and run in control before the error recurs. The
    /// simulation also starts from such a window.
    RestoreInControl,
};

/// Offset separating warm-up substreams from measurement substreams.
inline constexpr std::uint64_t kWarmupStreamOffset = 1'000'000'000;

/// Where the deviates come from and how many runs to simulate. The three conditions of
/// `estimate_performance` use substreams 3*stream_id + {0,1,2} of `seed`.
struct SimulationPlan {
    int measurements_per_level = 1000;
    int levels = 2;
    int per_level_per_run = 1;
    std::uint64_t seed = 1;
    std::uint64_t stream_id = 0;
    McgConstants constants{};
    HistoryPolicy history = HistoryPolicy::ResetOnRejection;

    void validate() const {
        if (measurements_per_level < 1) throw InvalidArgument("plan.measurements_per_level must be >= 1");
        if (levels < 1 || levels > kMaxLevels) throw InvalidArgument("plan.levels must be 1 or 2");
        if (per_level_per_run < 1 || per_level_per_run > kMaxPerLevel)
            throw InvalidArgument("plan.per_level_per_run must lie in [1,4]");
    }
};

struct PerformanceEstimate {
    double p_re = 0.0;
    double p_se = 0.0;
    double p_fr = 0.0;
    long runs_simulated = 0;

    friend bool operator==(const PerformanceEstimate&, const PerformanceEstimate&) = default;
};

/// Called after every evaluation with the run index, the history the procedure saw and
/// its verdict. Used for instrumentation in tests.
using EvaluationObserver = std::function<void(long run, std::span<const double> history, bool verdict)>;

/// Fraction of runs rejected under `condition`, drawing deviates from `stream`.
inline double simulate_condition(const ExprTree& expr, int levels, int per_level, int measurements_per_level,
                                 const ErrorCondition& condition, RandomStream& stream,
                                 HistoryPolicy policy = HistoryPolicy::ResetOnRejection,
                                 RandomStream* warmup = nullptr, const EvaluationObserver& observer = {}) {
    if (policy == HistoryPolicy::RestoreInControl && warmup == nullptr)
        throw InvalidArgument("simulate_condition: RestoreInControl needs a warm-up stream");
    if (levels < 1 || levels > kMaxLevels || per_level < 1 || per_level > kMaxPerLevel)
        throw InvalidArgument("simulate_condition: levels in [1,2] and per_level in [1,4] required");
    const long runs = measurements_per_level / per_level;
    if (runs < 1) throw InvalidArgument("simulate_condition: zero runs");

    const bool never_rejects = expr.empty();
    std::vector<double> history;
    history.reserve(256);
    auto restore = [&] {
        history.clear();
        for (int i = 0; i + 1 < kMaxWindow; ++i) history.push_back(warmup->next_normal());
    };
    if (policy == HistoryPolicy::RestoreInControl && !never_rejects) restore();
    long rejected = 0;
    for (long run = 0; run < runs; ++run) {
        bool reject = false;
        for (int slot = 0; slot < per_level; ++slot) {
            for (int level = 0; level < levels; ++level) {
                const double value = condition.apply(stream.next_normal());
                if (never_rejects) continue;
                if (reject && policy == HistoryPolicy::ResetOnRejection) continue;
                // Only the last kMaxWindow values are ever inspected.
                if (history.size() >= 256) history.erase(history.begin(), history.end() - (kMaxWindow - 1));
                history.push_back(value);
                if (reject) continue;
                const bool verdict = expr.evaluate(history);
                if (observer) observer(run, history, verdict);
                reject = verdict;
            }
        }
        if (reject) {
            ++rejected;
            if (policy == HistoryPolicy::ResetOnRejection) history.clear();
            if (policy == HistoryPolicy::RestoreInControl) restore();
        }
    }
    return static_cast<double>(rejected) / static_cast<double>(runs);
}

inline int effective_levels(const Procedure& procedure, const SimulationPlan& plan) {
    return procedure.levels.value_or(plan.levels);
}

inline int effective_per_level(const Procedure& procedure, const SimulationPlan& plan) {
    return procedure.per_level.value_or(plan.per_level_per_run);
}

/// Substream used for condition `index` (0 in-control, 1 random, 2 systematic).
inline RandomStream condition_stream(const SimulationPlan& plan, std::uint64_t index) {
    return RandomStream(plan.seed, 3 * plan.stream_id + index, plan.constants);
}

inline RandomStream warmup_stream(const SimulationPlan& plan, std::uint64_t index) {
    return RandomStream(plan.seed, kWarmupStreamOffset + 3 * plan.stream_id + index, plan.constants);
}

inline double simulate_condition(const Procedure& procedure, const SimulationPlan& plan,
                                 const ErrorCondition& condition, const EvaluationObserver& observer = {}) {
    plan.validate();
    procedure.validate();
    const auto index = static_cast<std::uint64_t>(condition.kind);
    auto stream = condition_stream(plan, index);
    auto warmup = warmup_stream(plan, index);
    return simulate_condition(build_expr(procedure), effective_levels(procedure, plan),
                              effective_per_level(procedure, plan), plan.measurements_per_level, condition, stream,
                              plan.history, &warmup, observer);
}

/// P_fr, P_re and P_se for `procedure`, each condition on its own substream.
inline PerformanceEstimate estimate_performance(const Procedure& procedure, const SimulationPlan& plan,
                                                const CriticalErrors& critical) {
    plan.validate();
    procedure.validate();
    const ExprTree expr = build_expr(procedure);
    const int levels = effective_levels(procedure, plan);
    const int per_level = effective_per_level(procedure, plan);

    auto run = [&](const ErrorCondition& condition) {
        const auto index = static_cast<std::uint64_t>(condition.kind);
        auto stream = condition_stream(plan, index);
        auto warmup = warmup_stream(plan, index);
        return simulate_condition(expr, levels, per_level, plan.measurements_per_level, condition, stream,
                                  plan.history, &warmup);
    };
    PerformanceEstimate est;
    est.p_fr = run(ErrorCondition::in_control());
    est.p_re = run(ErrorCondition::random_error(critical.k_re));
    est.p_se = run(ErrorCondition::systematic_error(critical.delta_se));
    est.runs_simulated = plan.measurements_per_level / per_level;
    return est;
}

} // namespace qcga
