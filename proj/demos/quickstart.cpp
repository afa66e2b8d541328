#include <cstdio>

#include "dlcz/estimators.hpp"
#include "dlcz/memory_model.hpp"
#include "dlcz/trial_engine.hpp"

// Smallest useful loop: simulate a few storage times at default physics and
// compare the conditional retrieval estimate against the model curve.
int main() {
    dlcz::model::PhysicsParams params;
    params.xi_se = 0.0; // measure the clean decay curve
    params.z_noise = 0.0;
    const double eta_as = dlcz::model::detection_efficiency_as(
        params.eta_esp, params.eta_t, params.eta_d);

    std::printf("%8s %12s %12s %22s\n", "t_us", "R_model", "R_est",
                "95% interval");
    for (int k = 0; k < 5; ++k) {
        const double t = 200.0 * k;
        dlcz::engine::RunSpec spec;
        spec.params = params;
        spec.storage_time_us = t;
        spec.seed = 7;
        spec.trials = 400000;
        spec.trial_offset = uint64_t(k) * spec.trials;
        const auto counts = dlcz::engine::run_batch(spec);
        const auto est = dlcz::stats::estimate_retrieval(counts, eta_as);
        std::printf("%8.0f %12.4f %12.4f      [%6.4f, %6.4f]\n", t,
                    dlcz::model::retrieval_efficiency(t, params.decay),
                    est.value, est.ci_low, est.ci_high);
    }
    return 0;
}
