#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dlcz/cavity.hpp"
#include "dlcz/config.hpp"
#include "dlcz/estimators.hpp"
#include "dlcz/fitting.hpp"
#include "dlcz/memory_model.hpp"
#include "dlcz/mode_array.hpp"
#include "dlcz/paraxial.hpp"
#include "dlcz/svg.hpp"
#include "dlcz/trial_engine.hpp"

// Scenario orchestration: runs one named experiment end to end and persists
// a reproducible bundle (results.csv, summary.json, figures, config echo,
// manifest with content hashes).  Every output carries the master seed and
// the configuration hash.
namespace dlcz::scenario {

struct Bundle {
    std::string scenario;
    uint64_t seed = 0;
    std::string hash_hex;
    std::string csv;     // full text including header and provenance line
    nlohmann::json summary;
    std::vector<std::pair<std::string, std::string>> figures; // name, svg
    std::string report;  // plain-text report, geometry check only
    nlohmann::json echo;
    std::string failure; // non-empty marks an aborted run
};

namespace detail {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string hex16(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(v));
    return buf;
}

inline std::string provenance(const Bundle& b) {
    return "seed=" + std::to_string(b.seed) + " config_hash=" + b.hash_hex;
}

// Width floor for fit weights: the estimator sigma when it is meaningful,
// otherwise the confidence interval rescaled to one standard error.
inline double fit_sigma(double sigma, double ci_low, double ci_high,
                        bool weighted) {
    if (!weighted) return 1.0;
    const double from_ci = (ci_high - ci_low) / (2.0 * stats::z95);
    return std::max({sigma, from_ci, 1e-9});
}

inline engine::RunSpec point_spec(const io::ExperimentConfig& cfg,
                                  const model::PhysicsParams& params,
                                  double t_us, size_t point_index) {
    engine::RunSpec spec;
    spec.params = params;
    spec.storage_time_us = t_us;
    spec.readout = cfg.readout;
    spec.seed = cfg.master_seed;
    spec.trials = cfg.trials_per_point;
    spec.trial_offset = point_index * cfg.trials_per_point;
    spec.overrides = cfg.overrides;
    return spec;
}

// Solves the per-herald read-out click probability for the effective
// detection efficiency that reproduces the requested coincidence
// probability per mode: 1 - (1 - R h)(1 - p h)(1 - Z h) = target.
inline double calibrate_eta_as(const model::PhysicsParams& ph,
                               double pair_prob_per_mode) {
    const double r = model::retrieval_efficiency(0.0, ph.decay);
    const double a = model::cavity_enhancement(ph.finesse);
    const double p = ph.chi * (1.0 - r) * ph.xi_se * a;
    const double z = ph.z_noise;
    const double herald_rate = ph.chi * ph.eta_s;
    if (!(herald_rate > 0.0))
        throw ValidationError(
            "pairProbPerMode calibration needs positive chi and eta_S");
    const double target = pair_prob_per_mode / herald_rate;
    const double ceiling = 1.0 - (1.0 - r) * (1.0 - p) * (1.0 - z);
    if (!(target < ceiling))
        throw ValidationError(
            "pairProbPerMode " + num(pair_prob_per_mode) +
            " is not achievable: it requires a per-herald click "
            "probability of " +
            num(target) + " but the read-out chain saturates at " +
            num(ceiling));
    double eta = target / (r + p + z);
    for (int i = 0; i < 50; ++i) {
        const double f = 1.0 - (1.0 - r * eta) * (1.0 - p * eta) *
                                   (1.0 - z * eta) -
                         target;
        const double df = r * (1.0 - p * eta) * (1.0 - z * eta) +
                          p * (1.0 - r * eta) * (1.0 - z * eta) +
                          z * (1.0 - r * eta) * (1.0 - p * eta);
        const double step = f / df;
        eta -= step;
        if (std::abs(step) < 1e-15) break;
    }
    if (!(eta > 0.0 && eta <= 1.0))
        throw ValidationError("pairProbPerMode " + num(pair_prob_per_mode) +
                              " calibrates outside the physical range");
    return eta;
}

inline void summary_common(Bundle& b) {
    b.summary["scenario"] = b.scenario;
    b.summary["seed"] = b.seed;
    b.summary["config_hash"] = b.hash_hex;
}

inline void run_retrieval(const io::ExperimentConfig& cfg, Bundle& b) {
    // The decay curve is measured on the clean signal: contamination terms
    // are switched off so the estimator target is the model R(t).
    model::PhysicsParams params = cfg.physics;
    params.xi_se = 0.0;
    params.z_noise = 0.0;
    const double eta_as = model::detection_efficiency_as(
        params.eta_esp, params.eta_t, params.eta_d);

    b.csv = "t_us,R_est,R_ci_low,R_ci_high,n_trials\n";
    std::vector<fit::DataPoint> pts;
    plot::Series data;
    data.label = "simulated";
    for (size_t k = 0; k < cfg.time_points_us.size(); ++k) {
        const double t = cfg.time_points_us[k];
        const auto counts =
            engine::run_batch(point_spec(cfg, params, t, k));
        double est = 0.0, lo = 0.0, hi = 1.0, sigma = 0.0;
        bool usable = false;
        try {
            const auto r = stats::estimate_retrieval(counts, eta_as);
            est = r.value;
            lo = r.ci_low;
            hi = r.ci_high;
            sigma = r.sigma;
            usable = true;
        } catch (const NoStokesCounts&) {
            // zero heralds at this point: report the vacuous interval
        }
        b.csv += num(t) + "," + num(est) + "," + num(lo) + "," + num(hi) +
                 "," + std::to_string(cfg.trials_per_point) + "\n";
        if (usable)
            pts.push_back(
                {t, est, fit_sigma(sigma, lo, hi, cfg.weighted_fit)});
        data.x.push_back(t);
        data.y.push_back(est);
        data.err_low.push_back(lo);
        data.err_high.push_back(hi);
    }
    b.csv += "# " + provenance(b) + "\n";

    summary_common(b);
    b.summary["eta_as"] = eta_as;
    plot::Figure fig;
    fig.title = "Retrieval efficiency vs storage time";
    fig.x_label = "storage time (us)";
    fig.y_label = "retrieval efficiency";
    fig.annotation = provenance(b);
    try {
        const auto f = fit::fit_decay(pts);
        b.summary["fit"] = {
            {"r0", f.r0},
            {"tau0_us", f.tau0_us},
            {"r0_sigma", f.r0_sigma},
            {"tau0_sigma", f.tau0_sigma},
            {"residual_norm", f.residual_norm},
            {"iterations", f.iterations},
            {"converged", f.converged},
        };
        plot::Series curve;
        curve.label = "fit";
        curve.line = true;
        curve.markers = false;
        curve.color = "#d62728";
        const double t_max =
            *std::max_element(cfg.time_points_us.begin(),
                              cfg.time_points_us.end());
        for (int i = 0; i <= 120; ++i) {
            const double t = t_max * i / 120.0;
            curve.x.push_back(t);
            curve.y.push_back(fit::decay_model(t, f.r0, f.tau0_us));
        }
        fig.series.push_back(std::move(curve));
    } catch (const std::exception& e) {
        b.summary["fit"] = {{"error", e.what()}};
    }
    fig.series.push_back(std::move(data));
    b.figures.emplace_back("retrieval_vs_time.svg", plot::render_svg(fig));
}

inline void run_g2(const io::ExperimentConfig& cfg, Bundle& b) {
    b.csv = "t_us,g2_est,g2_sigma,n_trials\n";
    std::vector<fit::DataPoint> pts;
    plot::Series data;
    data.label = "simulated";
    for (size_t k = 0; k < cfg.time_points_us.size(); ++k) {
        const double t = cfg.time_points_us[k];
        const auto counts =
            engine::run_batch(point_spec(cfg, cfg.physics, t, k));
        double est = NAN, sigma = NAN;
        try {
            const auto g = stats::estimate_g2(counts);
            est = g.value;
            sigma = g.sigma;
            pts.push_back(
                {t, est,
                 cfg.weighted_fit ? std::max(sigma, 1e-9) : 1.0});
        } catch (const Error&) {
            // point carries no estimate; row records the attempt
        }
        b.csv += num(t) + "," + num(est) + "," + num(sigma) + "," +
                 std::to_string(cfg.trials_per_point) + "\n";
        data.x.push_back(t);
        data.y.push_back(est);
        if (std::isfinite(est) && std::isfinite(sigma)) {
            data.err_low.push_back(est - sigma);
            data.err_high.push_back(est + sigma);
        } else {
            data.err_low.push_back(NAN);
            data.err_high.push_back(NAN);
        }
    }
    b.csv += "# " + provenance(b) + "\n";

    summary_common(b);
    const fit::G2FixedParams fixed{cfg.physics.chi, cfg.physics.decay.r0,
                                   cfg.physics.decay.tau0_us,
                                   cfg.physics.finesse,
                                   cfg.physics.z_noise};
    plot::Figure fig;
    fig.title = "Cross-correlation vs storage time";
    fig.x_label = "storage time (us)";
    fig.y_label = "g2";
    fig.annotation = provenance(b);
    try {
        const auto f = fit::fit_g2_curve(pts, fixed);
        b.summary["fit"] = {
            {"xi_se", f.xi_se},
            {"xi_sigma", f.xi_sigma},
            {"residual_norm", f.residual_norm},
            {"iterations", f.iterations},
            {"converged", f.converged},
            {"at_boundary", f.at_boundary},
        };
        plot::Series curve;
        curve.label = "fit";
        curve.line = true;
        curve.markers = false;
        curve.color = "#d62728";
        const double t_max =
            *std::max_element(cfg.time_points_us.begin(),
                              cfg.time_points_us.end());
        for (int i = 0; i <= 120; ++i) {
            const double t = t_max * i / 120.0;
            curve.x.push_back(t);
            curve.y.push_back(fit::g2_model(t, f.xi_se, fixed));
        }
        fig.series.push_back(std::move(curve));
    } catch (const std::exception& e) {
        b.summary["fit"] = {{"xi_se", nullptr},
                            {"residual_norm", nullptr},
                            {"error", e.what()}};
    }
    plot::Series bound;
    bound.label = "classical bound";
    bound.line = true;
    bound.markers = false;
    bound.color = "#7f7f7f";
    const double t_max = *std::max_element(cfg.time_points_us.begin(),
                                           cfg.time_points_us.end());
    bound.x = {0.0, t_max};
    bound.y = {2.0, 2.0};
    fig.series.push_back(std::move(bound));
    fig.series.push_back(std::move(data));
    b.figures.emplace_back("g2_vs_time.svg", plot::render_svg(fig));
}

inline void run_mode_sweep(const io::ExperimentConfig& cfg, Bundle& b) {
    b.csv =
        "n_modes,p_s_total,p_s_ci_low,p_s_ci_high,p_pair_total,"
        "p_pair_ci_low,p_pair_ci_high,n_trials\n";
    const double eta_eff =
        calibrate_eta_as(cfg.physics, cfg.pair_prob_per_mode);

    std::vector<fit::DataPoint> ps_pts, pair_pts;
    plot::Series ps_data, pair_data;
    ps_data.label = "simulated";
    pair_data.label = "simulated";
    for (size_t k = 0; k < cfg.mode_counts.size(); ++k) {
        const int n_modes = cfg.mode_counts[k];
        model::PhysicsParams params = cfg.physics;
        params.n_spatial = n_modes / 2;
        engine::RunSpec spec = point_spec(cfg, params, 0.0, k);
        spec.eta_as_override = eta_eff;
        const auto counts = engine::run_batch(spec);
        const auto ps = stats::estimate_ps_total(counts);
        const auto pair = stats::estimate_pair_total(counts);
        b.csv += std::to_string(n_modes) + "," + num(ps.value) + "," +
                 num(ps.ci_low) + "," + num(ps.ci_high) + "," +
                 num(pair.value) + "," + num(pair.ci_low) + "," +
                 num(pair.ci_high) + "," +
                 std::to_string(cfg.trials_per_point) + "\n";
        ps_pts.push_back({double(n_modes), ps.value,
                          fit_sigma(0.0, ps.ci_low, ps.ci_high,
                                    cfg.weighted_fit)});
        pair_pts.push_back({double(n_modes), pair.value,
                            fit_sigma(0.0, pair.ci_low, pair.ci_high,
                                      cfg.weighted_fit)});
        ps_data.x.push_back(n_modes);
        ps_data.y.push_back(ps.value);
        ps_data.err_low.push_back(ps.ci_low);
        ps_data.err_high.push_back(ps.ci_high);
        pair_data.x.push_back(n_modes);
        pair_data.y.push_back(pair.value);
        pair_data.err_low.push_back(pair.ci_low);
        pair_data.err_high.push_back(pair.ci_high);
    }
    b.csv += "# " + provenance(b) + "\n";

    summary_common(b);
    b.summary["calibration"] = {
        {"eta_as_effective", eta_eff},
        {"pair_prob_per_mode", cfg.pair_prob_per_mode},
    };
    const auto emit = [&](const char* key,
                          const std::vector<fit::DataPoint>& pts,
                          plot::Series data, const char* title,
                          const char* y_label, const char* file) {
        plot::Figure fig;
        fig.title = title;
        fig.x_label = "number of modes";
        fig.y_label = y_label;
        fig.annotation = provenance(b);
        try {
            const auto f = fit::fit_linear_origin(pts);
            b.summary[key] = {
                {"slope", f.slope},
                {"slope_sigma", f.slope_sigma},
                {"residual_norm", f.residual_norm},
            };
            plot::Series line;
            line.label = "fit";
            line.line = true;
            line.markers = false;
            line.color = "#d62728";
            line.x = {0.0, 12.5};
            line.y = {0.0, 12.5 * f.slope};
            fig.series.push_back(std::move(line));
        } catch (const std::exception& e) {
            b.summary[key] = {{"error", e.what()}};
        }
        fig.series.push_back(std::move(data));
        b.figures.emplace_back(file, plot::render_svg(fig));
    };
    emit("fit_ps", ps_pts, std::move(ps_data),
         "Total herald probability vs mode count", "P_S total",
         "mode_sweep_ps.svg");
    emit("fit_pairs", pair_pts, std::move(pair_data),
         "Total pair probability vs mode count", "pair probability total",
         "mode_sweep_pairs.svg");
}

inline void run_geometry_check(const io::ExperimentConfig& cfg, Bundle& b) {
    const auto& g = cfg.geometry;
    optics::validate(g);

    // closure of the label grid for every start arrangement
    const auto stations = optics::canonical_round_trip(g.focal_length);
    std::array<int, 6> perm{0, 1, 2, 3, 4, 5};
    bool identity = true;
    int arrangements = 0;
    do {
        optics::ModeArray a;
        for (int i = 0; i < 6; ++i)
            a.cell[size_t(i / 2)][size_t(i % 2)] =
                static_cast<optics::ModeLabel>(perm[size_t(i)]);
        ++arrangements;
        try {
            (void)optics::round_trip(a, stations);
        } catch (const NonReproducingCavity&) {
            identity = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    // unfolded single-loop trace for all twelve launch rays
    const auto loop = optics::unfolded_round_trip(g);
    const auto rays = optics::launch_rays(g);
    const auto report =
        optics::check_path_equality(loop, rays, g.paraxial_bound);

    b.csv = "mode_index,pol,path_length_m\n";
    for (size_t i = 0; i < report.per_mode_path.size(); ++i) {
        b.csv += std::to_string(i / 2) + "," +
                 (i % 2 == 0 ? "H" : "V") + "," +
                 num(report.per_mode_path[i]) + "\n";
    }
    b.csv += "# " + provenance(b) + "\n";

    summary_common(b);
    b.summary["roundTripIdentity"] = identity;
    b.summary["maxRelativeSpread"] = report.max_relative_spread;
    b.summary["perModePathLength"] = report.per_mode_path;

    std::string rep;
    rep += "mode arrangement closure over all " +
           std::to_string(arrangements) +
           " start arrangements: " + (identity ? "PASS" : "FAIL") + "\n";
    rep += "maximum relative path-length spread: " +
           num(report.max_relative_spread) + " (tolerance " +
           num(optics::path_degeneracy_tolerance) +
           "): " + (report.equal ? "PASS" : "FAIL") + "\n";
    rep += "per-mode optical path lengths (m):\n";
    for (size_t i = 0; i < report.per_mode_path.size(); ++i)
        rep += "  mode " + std::to_string(i / 2) +
               (i % 2 == 0 ? " H: " : " V: ") +
               num(report.per_mode_path[i]) + "\n";
    rep += "# " + provenance(b) + "\n";
    b.report = rep;

    plot::Figure fig;
    fig.title = "Collimated mode array";
    fig.x_label = "x (m)";
    fig.y_label = "y (m)";
    fig.annotation = provenance(b);
    plot::Series h_arm, v_arm;
    h_arm.label = "H arm";
    v_arm.label = "V arm";
    v_arm.color = "#d62728";
    for (size_t i = 0; i < rays.size(); ++i) {
        auto& s = (i % 2 == 0) ? h_arm : v_arm;
        s.x.push_back(rays[i].theta_x * g.focal_length);
        s.y.push_back(rays[i].theta_y * g.focal_length);
    }
    fig.series.push_back(std::move(h_arm));
    fig.series.push_back(std::move(v_arm));
    b.figures.emplace_back("mode_array.svg", plot::render_svg(fig));
}

} // namespace detail

// Persists a bundle into outputDir and returns the manifest, which lists
// every written file with its 64-bit FNV-1a content hash.
inline nlohmann::json write_results(const Bundle& b,
                                    const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    std::vector<std::pair<std::string, std::string>> files;
    if (!b.csv.empty()) files.emplace_back("results.csv", b.csv);
    if (!b.summary.is_null())
        files.emplace_back("summary.json", b.summary.dump(2) + "\n");
    for (const auto& fig : b.figures) files.push_back(fig);
    if (!b.report.empty()) files.emplace_back("report.txt", b.report);
    files.emplace_back("config_echo.json", b.echo.dump(2) + "\n");
    if (!b.failure.empty()) files.emplace_back("FAILED", b.failure + "\n");

    nlohmann::json manifest;
    manifest["scenario"] = b.scenario;
    manifest["seed"] = b.seed;
    manifest["config_hash"] = b.hash_hex;
    if (!b.failure.empty()) manifest["failed"] = true;
    nlohmann::json listed = nlohmann::json::object();
    for (const auto& [name, content] : files) {
        const fs::path path = fs::path(out_dir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + path.string());
        out << content;
        if (!out) throw IoError("write failed: " + path.string());
        listed[name] = detail::hex16(io::fnv1a64(content));
    }
    manifest["files"] = listed;
    {
        const fs::path path = fs::path(out_dir) / "manifest.json";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + path.string());
        out << manifest.dump(2) + "\n";
    }
    return manifest;
}

// Runs the configured scenario and writes its bundle.  On error the partial
// bundle is flushed with a FAILED marker before the error propagates.
inline nlohmann::json run_scenario(const io::ExperimentConfig& cfg) {
    io::validate_config(cfg);
    Bundle b;
    b.scenario = cfg.scenario;
    b.seed = cfg.master_seed;
    b.hash_hex = io::config_hash_hex(cfg);
    b.echo = io::echo_json(cfg);
    try {
        if (cfg.scenario == "retrieval-vs-time")
            detail::run_retrieval(cfg, b);
        else if (cfg.scenario == "g2-vs-time")
            detail::run_g2(cfg, b);
        else if (cfg.scenario == "mode-sweep")
            detail::run_mode_sweep(cfg, b);
        else if (cfg.scenario == "geometry-check")
            detail::run_geometry_check(cfg, b);
        else
            throw ValidationError("unknown scenario: " + cfg.scenario);
    } catch (const std::exception& e) {
        b.failure = e.what();
        try {
            write_results(b, cfg.output_dir);
        } catch (...) {
            // the original error wins
        }
        throw;
    }
    return write_results(b, cfg.output_dir);
}

} // namespace dlcz::scenario
