#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "dlcz/config.hpp"

using dlcz::ParseError;
using dlcz::ValidationError;
using nlohmann::json;
using namespace dlcz::io;

namespace {

json minimal() { return json{{"masterSeed", 7}}; }

std::string violation_text(const json& j) {
    try {
        parse_config(j);
    } catch (const ValidationError& e) {
        return e.what();
    }
    FAIL("expected ValidationError");
    return {};
}

} // namespace

TEST_CASE("a seed alone yields the fully defaulted experiment") {
    const ExperimentConfig c = parse_config(minimal());
    CHECK(c.master_seed == 7);
    CHECK(c.physics.chi == 0.0179);
    CHECK(c.physics.decay.r0 == 0.70);
    CHECK(c.physics.decay.tau0_us == 600.0);
    CHECK(c.physics.finesse == 16.0);
    CHECK(c.physics.xi_se == 0.3);
    CHECK(c.physics.z_noise == 2e-3);
    CHECK(c.physics.eta_esp == 0.60);
    CHECK(c.physics.eta_t == 0.34);
    CHECK(c.physics.eta_d == 0.68);
    CHECK(c.physics.eta_s == 0.14);
    CHECK(c.physics.n_spatial == 6);
    CHECK(c.scenario == "retrieval-vs-time");
    CHECK(c.readout == dlcz::engine::ReadoutMode::FeedForward);
    CHECK(c.trials_per_point == 1000000);
    REQUIRE(c.time_points_us.size() == 9);
    CHECK(c.time_points_us.front() == 0.0);
    CHECK(c.time_points_us.back() == 800.0);
    REQUIRE(c.mode_counts.size() == 6);
    CHECK(c.mode_counts.front() == 2);
    CHECK(c.mode_counts.back() == 12);
    CHECK(c.output_dir == "out");
    CHECK(c.pair_prob_per_mode == 3.3e-4);
    CHECK(c.weighted_fit);
    CHECK(c.geometry.focal_length == 0.15);
    CHECK(c.geometry.array_pitch == 2e-3);
}

TEST_CASE("the bundled defaults file loads with the published values") {
    const ExperimentConfig c =
        load_config(std::string(SOURCE_ROOT) + "/configs/paper-defaults.json");
    CHECK(c.physics.chi == 0.0179);
    CHECK(c.physics.decay.r0 == 0.70);
    CHECK(c.physics.decay.tau0_us == 600.0);
    CHECK(c.physics.finesse == 16.0);
    CHECK(c.physics.xi_se == 0.3);
    CHECK(c.physics.z_noise == 2e-3);
    CHECK(c.physics.eta_esp == 0.60);
    CHECK(c.physics.eta_t == 0.34);
    CHECK(c.physics.eta_d == 0.68);
    CHECK(c.physics.eta_s == 0.14);
    CHECK(c.physics.n_spatial == 6);
    CHECK(c.trials_per_point == 10000000);
}

TEST_CASE("unknown keys anywhere are all reported at once") {
    json j = minimal();
    j["bogus"] = 2;
    j["physics"] = {{"chii", 0.01}, {"chi", 0.0179}};
    const std::string msg = violation_text(j);
    CHECK(msg.find("bogus") != std::string::npos);
    CHECK(msg.find("chii") != std::string::npos);
}

TEST_CASE("a detector efficiency above one names the field and the bound") {
    json j = minimal();
    j["physics"] = {{"eta_D", 1.2}};
    const std::string msg = violation_text(j);
    CHECK(msg.find("eta_D") != std::string::npos);
    CHECK(msg.find("[0, 1]") != std::string::npos);
}

TEST_CASE("a seed is mandatory") {
    const std::string msg = violation_text(json::object());
    CHECK(msg.find("masterSeed") != std::string::npos);
}

TEST_CASE("an unparseable file raises a parse error with position") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "dlcz_empty_config.json")
            .string();
    std::ofstream(path).close();
    REQUIRE_THROWS_AS(load_config(path), ParseError);
    REQUIRE_THROWS_AS(load_config("no_such_file_anywhere.json"), ParseError);
}

TEST_CASE("echoing a parsed config and reparsing it is the identity") {
    json j = minimal();
    j["scenario"] = "g2-vs-time";
    j["trialsPerPoint"] = 12345;
    j["physics"] = {{"chi", 0.02}, {"m", 3}};
    j["channelOverrides"] = {{"chi", {{"0", 0.0}}}};
    const ExperimentConfig c1 = parse_config(j);
    const json e1 = echo_json(c1);
    const ExperimentConfig c2 = parse_config(e1);
    const json e2 = echo_json(c2);
    REQUIRE(e1 == e2);
    REQUIRE(config_hash(c1) == config_hash(c2));
}

TEST_CASE("the hash covers results-relevant settings only") {
    const ExperimentConfig base = parse_config(minimal());

    json seeded = minimal();
    seeded["masterSeed"] = 99;
    CHECK(config_hash(parse_config(seeded)) == config_hash(base));

    json moved = minimal();
    moved["outputDir"] = "elsewhere";
    CHECK(config_hash(parse_config(moved)) == config_hash(base));

    json changed = minimal();
    changed["trialsPerPoint"] = 2;
    CHECK(config_hash(parse_config(changed)) != config_hash(base));

    CHECK(config_hash_hex(base).size() == 16);
}

TEST_CASE("the readout default follows the scenario") {
    json j = minimal();
    j["scenario"] = "g2-vs-time";
    CHECK(parse_config(j).readout == dlcz::engine::ReadoutMode::RoundRobin);

    j["readoutMode"] = "unconditioned";
    CHECK(parse_config(j).readout == dlcz::engine::ReadoutMode::RoundRobin);

    j["readoutMode"] = "conditioned";
    const std::string msg = violation_text(j);
    CHECK(msg.find("unconditioned") != std::string::npos);
}

TEST_CASE("channel overrides are parsed sparsely and checked") {
    json j = minimal();
    j["channelOverrides"] = {{"chi", {{"0", 0.0}, {"4", 0.02}}},
                             {"eta_S", {{"7", 0.5}}}};
    const ExperimentConfig c = parse_config(j);
    CHECK(c.overrides.chi[0] == 0.0);
    CHECK(c.overrides.chi[4] == 0.02);
    CHECK(c.overrides.chi[1] == -1.0);
    CHECK(c.overrides.eta_s[7] == 0.5);

    json bad_index = minimal();
    bad_index["channelOverrides"] = {{"chi", {{"12", 0.01}}}};
    CHECK(violation_text(bad_index).find("12") != std::string::npos);

    json bad_value = minimal();
    bad_value["channelOverrides"] = {{"chi", {{"3", 1.5}}}};
    CHECK(violation_text(bad_value).find("chi") != std::string::npos);

    json bad_field = minimal();
    bad_field["channelOverrides"] = {{"eta_T", {{"3", 0.5}}}};
    CHECK(violation_text(bad_field).find("eta_T") != std::string::npos);
}

TEST_CASE("the write budget over the whole array is bounded") {
    json j = minimal();
    j["physics"] = {{"chi", 0.1}, {"m", 6}}; // chi * 2m = 1.2
    const std::string msg = violation_text(j);
    CHECK(msg.find("chi") != std::string::npos);
}

TEST_CASE("grids and counts must be usable") {
    json neg = minimal();
    neg["timePoints"] = {0.0, -5.0};
    CHECK(violation_text(neg).find("timePoints") != std::string::npos);

    json odd = minimal();
    odd["modeCounts"] = {2, 3};
    CHECK(violation_text(odd).find("modeCounts") != std::string::npos);

    json zero = minimal();
    zero["trialsPerPoint"] = 0;
    CHECK(violation_text(zero).find("trialsPerPoint") != std::string::npos);

    json scen = minimal();
    scen["scenario"] = "not-a-thing";
    CHECK(violation_text(scen).find("scenario") != std::string::npos);

    json wrong_type = minimal();
    wrong_type["trialsPerPoint"] = "many";
    CHECK(violation_text(wrong_type).find("trialsPerPoint") != std::string::npos);
}
