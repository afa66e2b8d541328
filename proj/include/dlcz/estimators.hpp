#pragma once

#include <cmath>
#include <cstdint>

#include "dlcz/errors.hpp"
#include "dlcz/trial_engine.hpp"

// Point estimates with confidence intervals computed from count tables.
namespace dlcz::stats {

// Two-sided 95% quantile of the normal distribution.
inline constexpr double z95 = 1.959964;

struct Interval {
    double center;
    double low;
    double high;
};

// Wilson score interval for k successes in n Bernoulli samples.  Stays
// inside [0, 1] by construction and is exact at the k = 0 and k = n edges.
inline Interval wilson_interval(uint64_t k, uint64_t n) {
    if (n == 0) throw DomainError("interval needs at least one sample");
    if (k > n) throw DomainError("successes exceed the sample count");
    const double nn = double(n);
    const double p = double(k) / nn;
    const double z2 = z95 * z95;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half =
        (z95 / denom) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    Interval ci{center, center - half, center + half};
    if (k == 0) ci.low = 0.0;
    if (k == n) ci.high = 1.0;
    ci.low = std::max(0.0, ci.low);
    ci.high = std::min(1.0, ci.high);
    return ci;
}

struct RetrievalEstimate {
    double value;
    double sigma;   // binomial standard error, not capped
    double ci_low;
    double ci_high;
    uint64_t heralds; // routed heralds entering the denominator
};

// Heralded retrieval efficiency: routed coincidences per routed herald,
// divided by the readout detection chain.  Unbiased when the readout has no
// noise sources; capped at unit efficiency.
inline RetrievalEstimate estimate_retrieval(const engine::CountsTable& t,
                                            double eta_as) {
    if (!(eta_as > 0.0) || eta_as > 1.0)
        throw DomainError("readout chain efficiency must lie in (0, 1]");
    uint64_t coinc = 0;
    uint64_t heralds = 0;
    for (const auto& mc : t.per_mode) {
        coinc += mc.n_coinc;
        heralds += mc.n_routed_heralds;
    }
    if (heralds == 0) throw NoStokesCounts("no routed heralds recorded");
    const auto ci = wilson_interval(coinc, heralds);
    const double p = double(coinc) / double(heralds);
    RetrievalEstimate est;
    est.value = std::min(1.0, p / eta_as);
    est.sigma = std::sqrt(p * (1.0 - p) / double(heralds)) / eta_as;
    est.ci_low = std::min(1.0, ci.low / eta_as);
    est.ci_high = std::min(1.0, ci.high / eta_as);
    est.heralds = heralds;
    return est;
}

struct G2Estimate {
    double value;
    double sigma; // first-order propagation, covariances neglected
};

// Normalized herald/readout cross correlation pooled over channels:
// ratio of the summed coincidence rates to the summed products of the
// unconditional singles rates.  Valid only for round-robin records, where
// routing is independent of the write outcome.
inline G2Estimate estimate_g2(const engine::CountsTable& t) {
    if (t.readout != engine::ReadoutMode::RoundRobin)
        throw ValidationError(
            "correlation needs routing independent of the write outcome");
    if (t.trials == 0) throw ZeroDenominator("no trials recorded");
    const double trials = double(t.trials);
    double num = 0.0, den = 0.0, var_num = 0.0, var_den = 0.0;
    uint64_t total_stokes = 0, total_routed = 0;
    for (const auto& mc : t.per_mode) {
        if (mc.n_routed_trials == 0) continue;
        total_routed += mc.n_routed_trials;
        total_stokes += mc.n_stokes;
        const double w = double(mc.n_routed_trials);
        const double x = double(mc.n_coinc);
        const double s = double(mc.n_stokes);
        const double a = double(mc.n_as_clicks_routed);
        const double ps = s / trials;
        const double pa = a / w;
        num += x / w;
        den += ps * pa;
        var_num += x * (1.0 - x / w) / (w * w);
        var_den += pa * pa * s * (1.0 - ps) / (trials * trials) +
                   ps * ps * a * (1.0 - pa) / (w * w);
    }
    if (total_routed == 0) throw ZeroDenominator("no routed readout windows");
    if (total_stokes == 0) throw NoStokesCounts("no herald clicks recorded");
    if (den == 0.0) throw ZeroDenominator("no readout clicks recorded");
    const double g2 = num / den;
    const double rel =
        std::sqrt(var_num / (num * num) + var_den / (den * den));
    return {g2, g2 * rel};
}

struct RateEstimate {
    double value;
    double ci_low;
    double ci_high;
};

namespace detail {

inline RateEstimate pooled_rate(const engine::CountsTable& t,
                                uint64_t engine::ModeCounts::* field) {
    if (t.trials == 0) throw ZeroDenominator("no trials recorded");
    uint64_t sum = 0;
    for (const auto& mc : t.per_mode) sum += mc.*field;
    const double value = double(sum) / double(t.trials);
    if (sum == 0) // rule-of-three upper bound keeps the interval informative
        return {0.0, 0.0, 3.0 / double(t.trials)};
    const double half = z95 * std::sqrt(double(sum)) / double(t.trials);
    return {value, std::max(0.0, value - half), value + half};
}

} // namespace detail

// Herald clicks per trial summed over all channels, with a normal-
// approximation interval.
inline RateEstimate estimate_ps_total(const engine::CountsTable& t) {
    return detail::pooled_rate(t, &engine::ModeCounts::n_stokes);
}

// Routed coincidences per trial summed over all channels.
inline RateEstimate estimate_pair_total(const engine::CountsTable& t) {
    return detail::pooled_rate(t, &engine::ModeCounts::n_coinc);
}

} // namespace dlcz::stats
