#pragma once

/// @file rng.hpp
/// @brief Portable multiplicative congruential generator with jump-ahead substreams,
/// plus the normal CDF and its inverse.
///
/// Every deviate is a pure function of (seed, stream_id, draw index), so simulations
/// are bit-reproducible across platforms and thread counts. Streams are single-owner
/// mutable state; hand one to each worker instead of sharing.

#include <cmath>
#include <cstdint>
#include <numbers>

#include "qcga/errors.hpp"

namespace qcga {

/// Generator constants. The modulus must be prime and below 2^32 so that products
/// fit in 64 bits and the state never reaches zero.
struct McgConstants {
    std::uint64_t modulus = 2147483647;  // 2^31 - 1
    std::uint64_t multiplier = 630360016;

    /// Draws between consecutive stream starting points.
    static constexpr std::uint64_t stream_jump = 100000;

    void validate() const {
        if (modulus < 3 || modulus >= (std::uint64_t{1} << 32))
            throw InvalidArgument("rng.modulus must lie in [3, 2^32)");
        for (std::uint64_t d = 2; d * d <= modulus; ++d)
            if (modulus % d == 0) throw InvalidArgument("rng.modulus must be prime");
        if (multiplier < 2 || multiplier >= modulus)
            throw InvalidArgument("rng.multiplier must lie in [2, modulus-1]");
    }

    friend bool operator==(const McgConstants&, const McgConstants&) = default;
};

namespace detail {

__extension__ using uint128 = unsigned __int128;

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<uint128>(a) * b) % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1U) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1U;
    }
    return result;
}

} // namespace detail

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Inverse standard normal CDF (Wichura AS241, PPND16). Relative accuracy about 1e-16
/// for p in (0,1). Returns -inf / +inf at the endpoints.
inline double inverse_normal_cdf(double p) {
    if (p <= 0.0) return -INFINITY;
    if (p >= 1.0) return INFINITY;

    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }

    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -x : x;
}

/// One substream of the multiplicative congruential generator.
///
/// Stream k starts at `multiplier^(k * stream_jump) * seed mod modulus`; stream 0
/// starts at the seed itself.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id, McgConstants constants = {})
        : constants_(constants), stream_id_(stream_id) {
        constants_.validate();
        if (seed < 1 || seed >= constants_.modulus)
            throw InvalidArgument("rng seed must lie in [1, modulus-1]");
        const std::uint64_t order = constants_.modulus - 1;
        const auto jumps = static_cast<std::uint64_t>(
            (static_cast<detail::uint128>(stream_id % order) * McgConstants::stream_jump) % order);
        state_ = detail::mulmod(detail::powmod(constants_.multiplier, jumps, constants_.modulus), seed,
                                constants_.modulus);
    }

    /// Uniform deviate strictly inside (0,1).
    double next_uniform() {
        state_ = detail::mulmod(constants_.multiplier, state_, constants_.modulus);
        return static_cast<double>(state_) / static_cast<double>(constants_.modulus);
    }

    /// Standard normal deviate; consumes exactly one uniform.
    double next_normal() { return inverse_normal_cdf(next_uniform()); }

    /// Integer uniformly drawn from [0, bound). bound must be positive.
    std::uint64_t next_below(std::uint64_t bound) {
        const auto v = static_cast<std::uint64_t>(next_uniform() * static_cast<double>(bound));
        return v < bound ? v : bound - 1;
    }

    /// Advances the stream and returns the raw state; usable as a derived seed.
    std::uint64_t next_raw() {
        state_ = detail::mulmod(constants_.multiplier, state_, constants_.modulus);
        return state_;
    }

    [[nodiscard]] std::uint64_t state() const noexcept { return state_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }
    [[nodiscard]] const McgConstants& constants() const noexcept { return constants_; }

private:
    McgConstants constants_;
    std::uint64_t stream_id_;
    std::uint64_t state_ = 1;
};

} // namespace qcga
