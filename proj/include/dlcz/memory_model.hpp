#pragma once

#include <cmath>

#include "dlcz/errors.hpp"
#include "dlcz/params.hpp"

// Closed-form single-channel photon statistics.  These expressions are the
// analytic oracles the Monte Carlo engine is checked against; keep them free
// of any sampling logic.
namespace dlcz::model {

// Retrieval efficiency after t microseconds of storage.
inline double retrieval_efficiency(double t_us, const DecayModel& d) {
    if (!(t_us >= 0.0))
        throw DomainError("storage time must be non-negative");
    if (!(d.tau0_us > 0.0))
        throw DomainError("decay time constant must be positive");
    const double u = t_us / d.tau0_us;
    return d.r0 * 0.5 * (std::exp(-u * u) + std::exp(-u));
}

// Factor by which the ring cavity enhances read-arm noise relative to the
// signal, 2F/pi.
inline double cavity_enhancement(double finesse) {
    if (!(finesse >= 1.0))
        throw DomainError("finesse must be at least 1");
    return 2.0 * finesse / M_PI;
}

// Read-side detection chain: cavity escape x path transmission x detector.
inline double detection_efficiency_as(double eta_esp, double eta_t,
                                      double eta_d) {
    for (double v : {eta_esp, eta_t, eta_d})
        if (!(v >= 0.0 && v <= 1.0))
            throw DomainError("detection efficiencies must lie in [0, 1]");
    return eta_esp * eta_t * eta_d;
}

// Probability of a herald (Stokes) click per write attempt on one channel.
inline double stokes_click_prob(const PhysicsParams& p) {
    return p.chi * p.eta_s;
}

namespace detail {

// Pre-detection event probability on the read arm: retrieved photon, plus
// spontaneous-emission leakage scaled by the cavity enhancement, plus the
// unconditional background.
inline double readout_event_prob(const PhysicsParams& p, double t_us) {
    const double r = retrieval_efficiency(t_us, p.decay);
    const double a = cavity_enhancement(p.finesse);
    const double pre = p.chi * r + p.chi * (1.0 - r) * p.xi_se * a + p.z_noise;
    if (pre > 1.0)
        throw ProbabilityOverflow(
            "read-arm event probability exceeds 1 for these parameters");
    return pre;
}

} // namespace detail

// Probability of an anti-Stokes click per readout on one channel,
// unconditioned on the write outcome.
inline double antistokes_click_prob(const PhysicsParams& p, double t_us) {
    const double eta = detection_efficiency_as(p.eta_esp, p.eta_t, p.eta_d);
    return eta * detail::readout_event_prob(p, t_us);
}

// Probability of a Stokes/anti-Stokes coincidence per trial: the correlated
// retrieval term plus the product of the uncorrelated singles.
inline double coincidence_prob(const PhysicsParams& p, double t_us) {
    const double r = retrieval_efficiency(t_us, p.decay);
    const double eta = detection_efficiency_as(p.eta_esp, p.eta_t, p.eta_d);
    const double correlated = p.chi * r * p.eta_s * eta;
    return correlated + stokes_click_prob(p) * antistokes_click_prob(p, t_us);
}

// Normalized second-order cross correlation between herald and readout,
//   g2(t) = 1 + R / (chi (R + (1-R) xi 2F/pi) + Z).
inline double analytic_g2(const PhysicsParams& p, double t_us) {
    const double r = retrieval_efficiency(t_us, p.decay);
    const double a = cavity_enhancement(p.finesse);
    const double denom =
        p.chi * (r + (1.0 - r) * p.xi_se * a) + p.z_noise;
    if (denom == 0.0)
        throw DegenerateDenominator(
            "correlation undefined: the readout channel is fully dark");
    return 1.0 + r / denom;
}

// The same correlation as it appears in print, with an extra factor of chi
// in the numerator.  (published_form - 1) / chi == analytic_g2 - 1 exactly;
// the published form never exceeds 2.
inline double analytic_g2_printed(const PhysicsParams& p, double t_us) {
    const double r = retrieval_efficiency(t_us, p.decay);
    const double a = cavity_enhancement(p.finesse);
    const double denom =
        p.chi * (r + (1.0 - r) * p.xi_se * a) + p.z_noise;
    if (denom == 0.0)
        throw DegenerateDenominator(
            "correlation undefined: the readout channel is fully dark");
    return 1.0 + p.chi * r / denom;
}

} // namespace dlcz::model
