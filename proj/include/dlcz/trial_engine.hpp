#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <thread>
#include <vector>

#include "dlcz/errors.hpp"
#include "dlcz/memory_model.hpp"
#include "dlcz/params.hpp"
#include "dlcz/philox.hpp"

// Monte Carlo of the write/read cycle.  One trial is one write pulse across
// all channels followed by one readout of a single routed spatial mode.
// Channel c covers spatial mode c/2 with polarization H for even c, V for
// odd c, matching the launch order of the geometry module.
namespace dlcz::engine {

// How the output switch picks the spatial mode to read.
//  FeedForward: the heralded mode; ties broken uniformly, idle trials parked
//               round-robin.  Routing depends on the write outcome, so only
//               heralded-rate estimators may use these counts.
//  RoundRobin:  the global trial index modulo the array size, independent of
//               the write outcome; required for unconditioned statistics.
enum class ReadoutMode : uint8_t { FeedForward, RoundRobin };

struct ModeCounts {
    uint64_t n_stokes = 0;           // herald clicks, all trials
    uint64_t n_routed_trials = 0;    // readout windows on this channel
    uint64_t n_routed_heralds = 0;   // herald clicks in routed windows
    uint64_t n_as_clicks_routed = 0; // readout clicks in routed windows
    uint64_t n_coinc = 0;            // herald and readout click together

    friend bool operator==(const ModeCounts&, const ModeCounts&) = default;
};

struct CountsTable {
    uint64_t trials = 0;
    double storage_time_us = 0.0;
    ReadoutMode readout = ReadoutMode::FeedForward;
    std::array<ModeCounts, 12> per_mode{};

    // Accumulates another table of the same settings.  An empty table acts
    // as the identity on either side.
    void merge(const CountsTable& other) {
        if (other.trials == 0) return;
        if (trials == 0) {
            *this = other;
            return;
        }
        if (storage_time_us != other.storage_time_us ||
            readout != other.readout)
            throw ValidationError(
                "cannot merge counts taken at different run settings");
        trials += other.trials;
        for (size_t i = 0; i < per_mode.size(); ++i) {
            per_mode[i].n_stokes += other.per_mode[i].n_stokes;
            per_mode[i].n_routed_trials += other.per_mode[i].n_routed_trials;
            per_mode[i].n_routed_heralds += other.per_mode[i].n_routed_heralds;
            per_mode[i].n_as_clicks_routed +=
                other.per_mode[i].n_as_clicks_routed;
            per_mode[i].n_coinc += other.per_mode[i].n_coinc;
        }
    }

    friend bool operator==(const CountsTable&, const CountsTable&) = default;
};

// Per-channel departures from the shared parameters, for sensitivity
// studies.  A negative entry means "inherit the shared value".
struct ChannelOverrides {
    std::array<double, 12> chi;
    std::array<double, 12> eta_s;

    ChannelOverrides() {
        chi.fill(-1.0);
        eta_s.fill(-1.0);
    }
};

struct RunSpec {
    model::PhysicsParams params{};
    double storage_time_us = 0.0;
    ReadoutMode readout = ReadoutMode::FeedForward;
    uint64_t seed = 0;
    uint64_t trials = 0;
    uint64_t trial_offset = 0;     // global index of the first trial
    double eta_as_override = -1.0; // >= 0 replaces the read detection chain
    ChannelOverrides overrides{};
};

namespace detail {

inline uint64_t to_threshold(double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return uint64_t(1) << 32;
    return uint64_t(p * 4294967296.0);
}

// Draw coordinates, frozen for reproducibility:
//   block 0 lanes: 0 emission, 1 herald detection, 2 retrieval, 3 survival
//   block 1 lanes: 0 leakage event, 1 its survival, 2 background, 3 its
//                  survival (drawn only for routed channels that need it)
//   trial-scope block 0 lane 0: feed-forward tie break
inline CountsTable run_range(const RunSpec& spec, uint64_t begin,
                             uint64_t end) {
    const auto& p = spec.params;
    const int m = p.n_spatial;
    const int n_ch = 2 * m;

    const double r = model::retrieval_efficiency(spec.storage_time_us, p.decay);
    const double a = model::cavity_enhancement(p.finesse);
    const double eta_as =
        spec.eta_as_override >= 0.0
            ? spec.eta_as_override
            : model::detection_efficiency_as(p.eta_esp, p.eta_t, p.eta_d);

    std::array<uint64_t, 12> th_emit{};
    std::array<uint64_t, 12> th_herald{};
    std::array<uint64_t, 12> th_leak{};
    bool has_noise = to_threshold(p.z_noise) != 0;
    for (int c = 0; c < n_ch; ++c) {
        const double chi_c = spec.overrides.chi[c] >= 0.0
                                 ? spec.overrides.chi[c]
                                 : p.chi;
        const double eta_s_c = spec.overrides.eta_s[c] >= 0.0
                                   ? spec.overrides.eta_s[c]
                                   : p.eta_s;
        th_emit[c] = to_threshold(chi_c);
        th_herald[c] = to_threshold(eta_s_c);
        th_leak[c] = to_threshold(chi_c * (1.0 - r) * p.xi_se * a);
        has_noise = has_noise || th_leak[c] != 0;
    }
    const uint64_t th_retrieve = to_threshold(r);
    const uint64_t th_survive = to_threshold(eta_as);
    const uint64_t th_bg = to_threshold(p.z_noise);

    CountsTable t;
    t.storage_time_us = spec.storage_time_us;
    t.readout = spec.readout;

    const rng::CounterRng rng(spec.seed);
    std::array<std::array<uint32_t, 4>, 12> draw{};
    std::array<bool, 12> emitted{};
    std::array<bool, 12> stokes{};
    std::array<uint32_t, 6> heralded{};

    for (uint64_t i = begin; i < end; ++i) {
        const uint64_t trial = spec.trial_offset + i;

        int n_heralded = 0;
        for (int c = 0; c < n_ch; ++c) {
            draw[c] = rng.draw(trial, uint32_t(c), 0);
            emitted[c] = draw[c][0] < th_emit[c];
            stokes[c] = emitted[c] && draw[c][1] < th_herald[c];
            if (stokes[c]) ++t.per_mode[c].n_stokes;
        }
        for (int s = 0; s < m; ++s)
            if (stokes[2 * s] || stokes[2 * s + 1])
                heralded[n_heralded++] = uint32_t(s);

        uint32_t routed;
        if (spec.readout == ReadoutMode::RoundRobin || n_heralded == 0)
            routed = uint32_t(trial % uint64_t(m));
        else if (n_heralded == 1)
            routed = heralded[0];
        else
            routed = heralded[rng::pick_index(
                rng.draw(trial, rng::trial_scope_channel, 0)[0],
                uint32_t(n_heralded))];

        for (int c = 2 * int(routed); c <= 2 * int(routed) + 1; ++c) {
            ModeCounts& mc = t.per_mode[c];
            ++mc.n_routed_trials;
            if (stokes[c]) ++mc.n_routed_heralds;
            bool click = emitted[c] && draw[c][2] < th_retrieve &&
                         draw[c][3] < th_survive;
            if (!click && has_noise) {
                const auto w = rng.draw(trial, uint32_t(c), 1);
                click = (w[0] < th_leak[c] && w[1] < th_survive) ||
                        (w[2] < th_bg && w[3] < th_survive);
            }
            if (click) {
                ++mc.n_as_clicks_routed;
                if (stokes[c]) ++mc.n_coinc;
            }
        }
        ++t.trials;
    }
    return t;
}

inline void check_spec(const RunSpec& spec) {
    model::validate(spec.params);
    if (spec.params.n_spatial > 6)
        throw ValidationError("n_spatial exceeds the six-mode array");
    if (spec.eta_as_override > 1.0)
        throw ValidationError("eta_as_override must not exceed 1");
    const auto& p = spec.params;
    const double a = 2.0 * p.finesse / M_PI;
    for (int c = 0; c < 12; ++c) {
        const double chi_c = spec.overrides.chi[c];
        if (chi_c >= 0.0) {
            if (chi_c > 1.0)
                throw ValidationError("channel chi override outside [0, 1]");
            const double low = chi_c * p.xi_se * a + p.z_noise;
            const double high =
                chi_c * (p.decay.r0 + (1.0 - p.decay.r0) * p.xi_se * a) +
                p.z_noise;
            if (std::max(low, high) > 1.0)
                throw ValidationError(
                    "channel chi override breaks the readout event budget");
        }
        if (spec.overrides.eta_s[c] > 1.0)
            throw ValidationError("channel eta_S override outside [0, 1]");
    }
}

} // namespace detail

// Thread budget: SIM_THREADS if set, otherwise the hardware concurrency.
inline unsigned configured_threads() {
    if (const char* env = std::getenv("SIM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return unsigned(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

inline CountsTable run_batch_serial(const RunSpec& spec) {
    detail::check_spec(spec);
    return detail::run_range(spec, 0, spec.trials);
}

// Runs the batch in fixed-size chunks handed to a worker pool and merged in
// chunk order.  Every trial outcome is a pure function of (seed, global
// trial index), so the result is bit-identical for any thread count.
inline CountsTable run_batch(const RunSpec& spec) {
    detail::check_spec(spec);
    constexpr uint64_t chunk = 65536;
    const uint64_t n_chunks = (spec.trials + chunk - 1) / chunk;
    const unsigned threads =
        unsigned(std::min<uint64_t>(configured_threads(), n_chunks));
    if (threads <= 1) return detail::run_range(spec, 0, spec.trials);

    std::vector<CountsTable> parts(n_chunks);
    std::atomic<uint64_t> next{0};
    auto worker = [&] {
        for (uint64_t i = next.fetch_add(1); i < n_chunks;
             i = next.fetch_add(1)) {
            const uint64_t begin = i * chunk;
            const uint64_t end = std::min(begin + chunk, spec.trials);
            parts[i] = detail::run_range(spec, begin, end);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    CountsTable total;
    total.storage_time_us = spec.storage_time_us;
    total.readout = spec.readout;
    for (const auto& part : parts) total.merge(part);
    return total;
}

// One batch per storage time.  Point k covers global trials
// [offset + k*n, offset + (k+1)*n), so points are statistically independent
// and a one-point sweep equals a plain batch.
inline std::vector<CountsTable> schedule_sweep(const RunSpec& base,
                                               std::span<const double> times,
                                               uint64_t trials_per_point) {
    std::vector<CountsTable> out;
    out.reserve(times.size());
    for (size_t k = 0; k < times.size(); ++k) {
        RunSpec spec = base;
        spec.storage_time_us = times[k];
        spec.trials = trials_per_point;
        spec.trial_offset = base.trial_offset + k * trials_per_point;
        out.push_back(run_batch(spec));
    }
    return out;
}

} // namespace dlcz::engine
