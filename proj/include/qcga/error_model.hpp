#pragma once

/// @file error_model.hpp
/// @brief Critical random and systematic errors from assay parameters, and a closed-form
/// detection probability for single-value rules used to check the simulator.

#include <cmath>

#include "qcga/errors.hpp"
#include "qcga/rng.hpp"

namespace qcga {

/// Assay description in analyte units. alpha bounds the clinical type I error.
struct AssayParams {
    double sd = 0.67;
    double bias = 0.1;
    double tea = 4.0;
    double alpha = 0.01;

    void validate() const {
        if (!(sd > 0.0)) throw InvalidArgument("assay.sd must be > 0");
        if (!(tea > std::fabs(bias))) throw InvalidArgument("assay.tea must exceed |assay.bias|");
        if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("assay.alpha must lie in (0,1)");
    }
};

/// delta_se: mean shift in SD units. k_re: SD inflation factor.
struct CriticalErrors {
    double k_re = 1.0;
    double delta_se = 0.0;
};

/// Probability that a result falls outside +-tea when the error distribution has
/// mean `bias + shift*sd` and SD `k*sd`.
inline double total_error_exceedance(const AssayParams& p, double shift, double k) {
    const double s = k * p.sd;
    const double mean = p.bias + shift * p.sd;
    return normal_cdf((-p.tea - mean) / s) + 1.0 - normal_cdf((p.tea - mean) / s);
}

namespace detail {

// Root of an increasing function on [lo, hi] by bisection to width `tol`.
template <class Fn>
double bisect_increasing(Fn&& f, double lo, double hi, double tol) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Mean shift (SD units) at which the two-sided exceedance of tea equals alpha.
inline double critical_systematic_error(const AssayParams& p) {
    p.validate();
    auto excess = [&](double shift) { return total_error_exceedance(p, shift, 1.0) - p.alpha; };
    const double lo = 0.0;
    const double hi = (p.tea - p.bias) / p.sd + 10.0;
    const double at_lo = excess(lo);
    if (std::fabs(at_lo) < 1e-12) return 0.0;
    if (at_lo > 0.0 || excess(hi) < 0.0)
        throw InfeasibleAssay("no critical systematic error in [0, (tea-bias)/sd + 10]");
    return detail::bisect_increasing(excess, lo, hi, 1e-12);
}

/// SD multiplier at which the two-sided exceedance of tea equals alpha.
inline double critical_random_error(const AssayParams& p) {
    p.validate();
    auto excess = [&](double k) { return total_error_exceedance(p, 0.0, k) - p.alpha; };
    const double at_one = excess(1.0);
    if (at_one > 1e-12)
        throw InfeasibleAssay("exceedance at k = 1 already exceeds alpha; no critical random error");
    if (at_one >= -1e-12) return 1.0;
    if (excess(100.0) < 0.0) throw InfeasibleAssay("no critical random error in [1, 100]");
    return detail::bisect_increasing(excess, 1.0, 100.0, 1e-12);
}

inline CriticalErrors critical_errors(const AssayParams& p) {
    return {critical_random_error(p), critical_systematic_error(p)};
}

/// Per-run rejection probability of S(1, limit) evaluated after every measurement, when
/// measurements are N(shift, sd_multiplier^2) and `meas_per_run` are taken per run.
inline double single_value_power_oracle(double limit, int meas_per_run, double shift, double sd_multiplier) {
    if (limit < 0.0 || meas_per_run < 1 || sd_multiplier < 1.0)
        throw InvalidArgument("single_value_power_oracle: limit >= 0, meas_per_run >= 1, sd_multiplier >= 1");
    if (limit == 0.0) return 1.0;
    const double p = normal_cdf((-limit - shift) / sd_multiplier) + 1.0 - normal_cdf((limit - shift) / sd_multiplier);
    return 1.0 - std::pow(1.0 - p, meas_per_run);
}

} // namespace qcga
