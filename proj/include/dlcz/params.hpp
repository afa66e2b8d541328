#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dlcz/errors.hpp"

namespace dlcz::model {

// Storage decay: two equal-weight branches, Gaussian (atomic motion) and
// exponential (magnetic dephasing), sharing one time constant in microseconds.
struct DecayModel {
    double r0 = 0.70;      // retrieval efficiency at zero storage time
    double tau0_us = 600.0; // common 1/e time constant
};

// All per-channel physics inputs for one interface.  Detection efficiencies
// are grouped write-side (eta_s) and read-side (eta_esp, eta_t, eta_d).
struct PhysicsParams {
    double chi = 0.0179;   // per-channel excitation probability per write
    DecayModel decay{};
    double finesse = 16.0; // ring cavity finesse for the read arm
    double xi_se = 0.3;    // spontaneous-emission noise fraction
    double z_noise = 2e-3; // unconditional background per readout window
    double eta_esp = 0.60; // escape probability from the cavity
    double eta_t = 0.34;   // transmission of the read detection path
    double eta_d = 0.68;   // detector quantum efficiency, read side
    double eta_s = 0.14;   // total write-side detection efficiency
    int n_spatial = 6;     // spatial modes per polarization
};

namespace detail {

inline void require_unit_interval(std::vector<std::string>& problems,
                                  double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0))
        problems.push_back(std::string(name) + " must lie in [0, 1], got " +
                           std::to_string(value));
}

} // namespace detail

// Validates every field and reports all violations in one message.  The
// noise-budget check bounds the per-readout event probability over the whole
// retrieval range R in [0, R0], so a params set that passes here can never
// overflow a Bernoulli draw at any storage time.
inline void validate(const PhysicsParams& p) {
    std::vector<std::string> problems;
    detail::require_unit_interval(problems, p.chi, "chi");
    detail::require_unit_interval(problems, p.decay.r0, "R0");
    detail::require_unit_interval(problems, p.xi_se, "xi_se");
    detail::require_unit_interval(problems, p.z_noise, "Z");
    detail::require_unit_interval(problems, p.eta_esp, "eta_esp");
    detail::require_unit_interval(problems, p.eta_t, "eta_T");
    detail::require_unit_interval(problems, p.eta_d, "eta_D");
    detail::require_unit_interval(problems, p.eta_s, "eta_S");
    if (!(p.decay.tau0_us > 0.0))
        problems.push_back("tau0_us must be positive, got " +
                           std::to_string(p.decay.tau0_us));
    if (!(p.finesse >= 1.0))
        problems.push_back("finesse must be at least 1, got " +
                           std::to_string(p.finesse));
    if (p.n_spatial < 1)
        problems.push_back("n_spatial must be at least 1, got " +
                           std::to_string(p.n_spatial));
    if (problems.empty()) {
        const double a = 2.0 * p.finesse / M_PI;
        const double budget_low = p.chi * p.xi_se * a + p.z_noise;
        const double budget_high =
            p.chi * (p.decay.r0 + (1.0 - p.decay.r0) * p.xi_se * a) + p.z_noise;
        if (std::max(budget_low, budget_high) > 1.0)
            problems.push_back(
                "per-readout event budget chi*(R + (1-R)*xi_se*2F/pi) + Z "
                "exceeds 1 somewhere in R in [0, R0]");
    }
    if (!problems.empty()) {
        std::string msg = "invalid physics parameters:";
        for (const auto& s : problems) msg += "\n  - " + s;
        throw ValidationError(msg);
    }
}

} // namespace dlcz::model
