#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dlcz/cavity.hpp"
#include "dlcz/errors.hpp"
#include "dlcz/params.hpp"
#include "dlcz/trial_engine.hpp"

// JSON experiment configuration: strict parsing (unknown keys rejected, all
// violations reported together), full default resolution, canonical echo,
// and a stable content hash over the results-relevant settings.
namespace dlcz::io {

inline std::vector<double> default_time_grid() {
    return {0.0, 100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 700.0, 800.0};
}

struct ExperimentConfig {
    model::PhysicsParams physics{};
    optics::CavityGeometry geometry{};
    std::string scenario = "retrieval-vs-time";
    std::vector<double> time_points_us = default_time_grid();
    std::vector<int> mode_counts = {2, 4, 6, 8, 10, 12};
    uint64_t trials_per_point = 1000000;
    uint64_t master_seed = 0;
    engine::ReadoutMode readout = engine::ReadoutMode::FeedForward;
    bool readout_explicit = false; // readoutMode key present in the source
    std::string output_dir = "out";
    double pair_prob_per_mode = 3.3e-4; // coincidence target per channel
    bool weighted_fit = true;
    engine::ChannelOverrides overrides{};
};

namespace detail {

// Reads one JSON object, remembering which keys were touched so the rest
// can be reported as unknown.  Type mismatches become listed problems.
class Section {
  public:
    Section(const nlohmann::json& j, std::string prefix,
            std::vector<std::string>& problems)
        : j_(j), prefix_(std::move(prefix)), problems_(problems) {}

    bool has(const char* key) {
        known_.insert(key);
        return j_.contains(key);
    }

    void number(const char* key, double& out) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number()) {
            problems_.push_back(prefix_ + key + " must be a number");
            return;
        }
        out = v.get<double>();
    }

    void unsigned_int(const char* key, uint64_t& out) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!(v.is_number_unsigned() ||
              (v.is_number_integer() && v.get<int64_t>() >= 0))) {
            problems_.push_back(prefix_ + key +
                                " must be a non-negative integer");
            return;
        }
        out = v.get<uint64_t>();
    }

    void integer(const char* key, int& out) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) {
            problems_.push_back(prefix_ + key + " must be an integer");
            return;
        }
        out = v.get<int>();
    }

    void boolean(const char* key, bool& out) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) {
            problems_.push_back(prefix_ + key + " must be a boolean");
            return;
        }
        out = v.get<bool>();
    }

    void str(const char* key, std::string& out) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_string()) {
            problems_.push_back(prefix_ + key + " must be a string");
            return;
        }
        out = v.get<std::string>();
    }

    void number_list(const char* key, std::vector<double>& out) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_array()) {
            problems_.push_back(prefix_ + key +
                                " must be an array of numbers");
            return;
        }
        std::vector<double> values;
        for (const auto& e : v) {
            if (!e.is_number()) {
                problems_.push_back(prefix_ + key +
                                    " must be an array of numbers");
                return;
            }
            values.push_back(e.get<double>());
        }
        out = std::move(values);
    }

    void int_list(const char* key, std::vector<int>& out) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_array()) {
            problems_.push_back(prefix_ + key +
                                " must be an array of integers");
            return;
        }
        std::vector<int> values;
        for (const auto& e : v) {
            if (!e.is_number_integer()) {
                problems_.push_back(prefix_ + key +
                                    " must be an array of integers");
                return;
            }
            values.push_back(e.get<int>());
        }
        out = std::move(values);
    }

    const nlohmann::json* object(const char* key) {
        if (!has(key)) return nullptr;
        const auto& v = j_.at(key);
        if (!v.is_object()) {
            problems_.push_back(prefix_ + key + " must be an object");
            return nullptr;
        }
        return &v;
    }

    void finish() {
        for (const auto& item : j_.items())
            if (!known_.count(item.key()))
                problems_.push_back(prefix_ + item.key() +
                                    " is not a recognized key");
    }

  private:
    const nlohmann::json& j_;
    std::string prefix_;
    std::vector<std::string>& problems_;
    std::set<std::string> known_;
};

inline void parse_override_map(const nlohmann::json& map, const char* field,
                               std::array<double, 12>& out,
                               std::vector<std::string>& problems) {
    for (const auto& item : map.items()) {
        const std::string& k = item.key();
        int index = -1;
        const auto res =
            std::from_chars(k.data(), k.data() + k.size(), index);
        if (res.ec != std::errc{} || res.ptr != k.data() + k.size() ||
            index < 0 || index > 11) {
            problems.push_back("channelOverrides." + std::string(field) +
                               "[" + k + "] channel index must be 0..11");
            continue;
        }
        if (!item.value().is_number()) {
            problems.push_back("channelOverrides." + std::string(field) +
                               "[" + k + "] must be a number");
            continue;
        }
        const double v = item.value().get<double>();
        if (!(v >= 0.0 && v <= 1.0)) {
            problems.push_back("channelOverrides." + std::string(field) +
                               "[" + k + "] must lie in [0, 1]");
            continue;
        }
        out[size_t(index)] = v;
    }
}

inline const std::set<std::string>& scenario_names() {
    static const std::set<std::string> names{
        "retrieval-vs-time", "g2-vs-time", "mode-sweep", "geometry-check"};
    return names;
}

inline void collect_semantic_problems(const ExperimentConfig& c,
                                      std::vector<std::string>& problems) {
    try {
        model::validate(c.physics);
    } catch (const ValidationError& e) {
        problems.push_back(e.what());
    }
    if (c.physics.n_spatial > 6)
        problems.push_back("physics.m must not exceed 6");
    if (c.physics.chi * 2.0 * c.physics.n_spatial > 1.0)
        problems.push_back(
            "physics.chi * 2m must not exceed 1 (write budget across the "
            "array)");
    try {
        optics::validate(c.geometry);
    } catch (const ValidationError& e) {
        problems.push_back(e.what());
    }
    if (!scenario_names().count(c.scenario))
        problems.push_back(
            "scenario must be one of retrieval-vs-time, g2-vs-time, "
            "mode-sweep, geometry-check");
    if (c.trials_per_point < 1)
        problems.push_back("trialsPerPoint must be at least 1");
    if (c.time_points_us.empty())
        problems.push_back("timePoints must not be empty");
    for (double t : c.time_points_us)
        if (!(t >= 0.0) || !std::isfinite(t)) {
            problems.push_back(
                "timePoints entries must be finite and non-negative");
            break;
        }
    if (c.mode_counts.empty())
        problems.push_back("modeCounts must not be empty");
    for (int n : c.mode_counts)
        if (n < 2 || n > 12 || n % 2 != 0) {
            problems.push_back(
                "modeCounts entries must be even and between 2 and 12");
            break;
        }
    if (!(c.pair_prob_per_mode > 0.0 && c.pair_prob_per_mode < 1.0))
        problems.push_back("pairProbPerMode must lie in (0, 1)");
    if (c.scenario == "g2-vs-time" &&
        c.readout != engine::ReadoutMode::RoundRobin)
        problems.push_back(
            "scenario g2-vs-time requires readoutMode \"unconditioned\": "
            "the correlation needs unconditional readout statistics");
}

} // namespace detail

// Cross-field validation only; parsing problems are reported by
// parse_config.  Call after mutating a parsed config.
inline void validate_config(const ExperimentConfig& c) {
    std::vector<std::string> problems;
    detail::collect_semantic_problems(c, problems);
    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ValidationError(msg);
    }
}

// Changes the scenario, re-resolving the readout mode unless the source
// config pinned it explicitly.
inline void set_scenario(ExperimentConfig& c, const std::string& name) {
    c.scenario = name;
    if (!c.readout_explicit)
        c.readout = name == "g2-vs-time" ? engine::ReadoutMode::RoundRobin
                                         : engine::ReadoutMode::FeedForward;
}

inline ExperimentConfig parse_config(const nlohmann::json& root) {
    if (!root.is_object())
        throw ParseError("configuration root must be a JSON object");
    std::vector<std::string> problems;
    ExperimentConfig c;

    detail::Section top(root, "", problems);
    if (top.has("masterSeed"))
        top.unsigned_int("masterSeed", c.master_seed);
    else
        problems.push_back(
            "masterSeed is required: seeds are always explicit");
    top.str("scenario", c.scenario);
    top.number_list("timePoints", c.time_points_us);
    top.int_list("modeCounts", c.mode_counts);
    top.unsigned_int("trialsPerPoint", c.trials_per_point);
    top.str("outputDir", c.output_dir);
    top.number("pairProbPerMode", c.pair_prob_per_mode);
    top.boolean("weightedFit", c.weighted_fit);

    std::string readout_str;
    c.readout_explicit = top.has("readoutMode");
    if (c.readout_explicit) top.str("readoutMode", readout_str);

    if (const nlohmann::json* ph = top.object("physics")) {
        detail::Section s(*ph, "physics.", problems);
        s.number("chi", c.physics.chi);
        s.number("R0", c.physics.decay.r0);
        s.number("tau0_us", c.physics.decay.tau0_us);
        s.number("finesse", c.physics.finesse);
        s.number("xi_se", c.physics.xi_se);
        s.number("Z", c.physics.z_noise);
        s.number("eta_esp", c.physics.eta_esp);
        s.number("eta_T", c.physics.eta_t);
        s.number("eta_D", c.physics.eta_d);
        s.number("eta_S", c.physics.eta_s);
        s.integer("m", c.physics.n_spatial);
        s.finish();
    }
    if (const nlohmann::json* ge = top.object("geometry")) {
        detail::Section s(*ge, "geometry.", problems);
        s.number("focal_length_m", c.geometry.focal_length);
        s.number("array_pitch_m", c.geometry.array_pitch);
        s.number("bd_walkoff_m", c.geometry.bd_walkoff);
        s.number("drift_l2_l3_m", c.geometry.drift_l2_l3);
        s.number("drift_l4_l1_m", c.geometry.drift_l4_l1);
        s.number("paraxial_bound", c.geometry.paraxial_bound);
        s.number("spacing_error_m", c.geometry.spacing_error);
        s.number("theta_r_deg", c.geometry.theta_r_deg);
        s.finish();
    }
    if (const nlohmann::json* ov = top.object("channelOverrides")) {
        detail::Section s(*ov, "channelOverrides.", problems);
        if (const nlohmann::json* chi = s.object("chi"))
            detail::parse_override_map(*chi, "chi", c.overrides.chi,
                                       problems);
        if (const nlohmann::json* eta = s.object("eta_S"))
            detail::parse_override_map(*eta, "eta_S", c.overrides.eta_s,
                                       problems);
        s.finish();
    }
    top.finish();

    if (c.readout_explicit) {
        if (readout_str == "conditioned")
            c.readout = engine::ReadoutMode::FeedForward;
        else if (readout_str == "unconditioned")
            c.readout = engine::ReadoutMode::RoundRobin;
        else if (!readout_str.empty())
            problems.push_back(
                "readoutMode must be \"conditioned\" or \"unconditioned\"");
    } else {
        c.readout = c.scenario == "g2-vs-time"
                        ? engine::ReadoutMode::RoundRobin
                        : engine::ReadoutMode::FeedForward;
    }

    detail::collect_semantic_problems(c, problems);
    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ValidationError(msg);
    }
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open configuration file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("configuration is not valid JSON: ") +
                         e.what());
    }
    return parse_config(j);
}

// Canonical fully-resolved form; reparsing it reproduces the same config.
inline nlohmann::json echo_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["masterSeed"] = c.master_seed;
    j["scenario"] = c.scenario;
    j["timePoints"] = c.time_points_us;
    j["modeCounts"] = c.mode_counts;
    j["trialsPerPoint"] = c.trials_per_point;
    j["readoutMode"] = c.readout == engine::ReadoutMode::RoundRobin
                           ? "unconditioned"
                           : "conditioned";
    j["outputDir"] = c.output_dir;
    j["pairProbPerMode"] = c.pair_prob_per_mode;
    j["weightedFit"] = c.weighted_fit;
    j["physics"] = {
        {"chi", c.physics.chi},
        {"R0", c.physics.decay.r0},
        {"tau0_us", c.physics.decay.tau0_us},
        {"finesse", c.physics.finesse},
        {"xi_se", c.physics.xi_se},
        {"Z", c.physics.z_noise},
        {"eta_esp", c.physics.eta_esp},
        {"eta_T", c.physics.eta_t},
        {"eta_D", c.physics.eta_d},
        {"eta_S", c.physics.eta_s},
        {"m", c.physics.n_spatial},
    };
    j["geometry"] = {
        {"focal_length_m", c.geometry.focal_length},
        {"array_pitch_m", c.geometry.array_pitch},
        {"bd_walkoff_m", c.geometry.bd_walkoff},
        {"drift_l2_l3_m", c.geometry.drift_l2_l3},
        {"drift_l4_l1_m", c.geometry.drift_l4_l1},
        {"paraxial_bound", c.geometry.paraxial_bound},
        {"spacing_error_m", c.geometry.spacing_error},
        {"theta_r_deg", c.geometry.theta_r_deg},
    };
    nlohmann::json chi = nlohmann::json::object();
    nlohmann::json eta = nlohmann::json::object();
    for (int i = 0; i < 12; ++i) {
        if (c.overrides.chi[i] >= 0.0)
            chi[std::to_string(i)] = c.overrides.chi[i];
        if (c.overrides.eta_s[i] >= 0.0)
            eta[std::to_string(i)] = c.overrides.eta_s[i];
    }
    if (!chi.empty() || !eta.empty()) {
        nlohmann::json ov = nlohmann::json::object();
        if (!chi.empty()) ov["chi"] = chi;
        if (!eta.empty()) ov["eta_S"] = eta;
        j["channelOverrides"] = ov;
    }
    return j;
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

// Hash of the results-relevant settings: the seed and the output location
// are deliberately excluded so (seed, hash) identifies a reproducible run.
inline uint64_t config_hash(const ExperimentConfig& c) {
    nlohmann::json j = echo_json(c);
    j.erase("masterSeed");
    j.erase("outputDir");
    return fnv1a64(j.dump());
}

inline std::string config_hash_hex(const ExperimentConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(config_hash(c)));
    return buf;
}

} // namespace dlcz::io
