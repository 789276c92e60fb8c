#pragma once

/// @file objective.hpp
/// @brief Design fitness f (minimized during evolution) and comparison score f1.

#include <cmath>

#include "qcga/errors.hpp"
#include "qcga/simulator.hpp"

namespace qcga {

struct ObjectiveConfig {
    double p_re_target = 0.5;
    double p_se_target = 1.0;
    double w_re = 1.0;
    double w_se = 1.0;
    double w_fr = 1.0;

    void validate() const {
        if (w_re < 0.0 || w_se < 0.0 || w_fr < 0.0) throw InvalidArgument("objective weights must be >= 0");
        if (p_re_target < 0.0 || p_re_target > 1.0 || p_se_target < 0.0 || p_se_target > 1.0)
            throw InvalidArgument("objective targets must lie in [0,1]");
    }
};

/// Weighted distance from the target detection probabilities and zero false rejection.
/// Overshooting a target is penalized like undershooting.
inline double fitness_f(const PerformanceEstimate& est, const ObjectiveConfig& cfg) {
    const double dre = est.p_re - cfg.p_re_target;
    const double dse = est.p_se - cfg.p_se_target;
    return std::sqrt(cfg.w_re * dre * dre + cfg.w_se * dse * dse + cfg.w_fr * est.p_fr * est.p_fr);
}

/// Comparison score: random-error detection above 0.5 is not penalized.
inline double comparison_f1(const PerformanceEstimate& est) {
    const double dre = est.p_re < 0.5 ? est.p_re - 0.5 : 0.0;
    const double dse = est.p_se - 1.0;
    return std::sqrt(dre * dre + dse * dse + est.p_fr * est.p_fr);
}

} // namespace qcga
