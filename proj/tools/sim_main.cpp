#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "dlcz/config.hpp"
#include "dlcz/errors.hpp"
#include "dlcz/fitting.hpp"
#include "dlcz/scenario.hpp"

namespace {

using nlohmann::json;

struct Csv {
    std::vector<std::string> header; // empty when the file starts with data
    std::vector<std::vector<double>> rows;
};

Csv read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw dlcz::ParseError("cannot open input file: " + path);
    Csv csv;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ss(line);
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (csv.header.empty() && csv.rows.empty()) {
            bool numeric = true;
            try {
                size_t used = 0;
                (void)std::stod(fields.at(0), &used);
                numeric = used == fields.at(0).size();
            } catch (...) {
                numeric = false;
            }
            if (!numeric) {
                csv.header = fields;
                continue;
            }
        }
        std::vector<double> row;
        for (const auto& f : fields) {
            try {
                row.push_back(std::stod(f));
            } catch (...) {
                throw dlcz::ParseError(path + ":" + std::to_string(line_no) +
                                       ": not a number: " + f);
            }
        }
        csv.rows.push_back(std::move(row));
    }
    if (csv.rows.empty())
        throw dlcz::ParseError(path + ": no data rows found");
    return csv;
}

std::string header_text(const Csv& csv) {
    std::string h;
    for (size_t i = 0; i < csv.header.size(); ++i)
        h += (i ? "," : "") + csv.header[i];
    return h;
}

// Column layout per known scenario schema; otherwise x,y[,sigma].
std::vector<dlcz::fit::DataPoint> to_points(const Csv& csv, size_t x_col,
                                            size_t y_col, int sigma_col,
                                            int ci_lo_col, int ci_hi_col) {
    std::vector<dlcz::fit::DataPoint> pts;
    for (const auto& row : csv.rows) {
        if (row.size() <= y_col) continue;
        double sigma = 1.0;
        if (sigma_col >= 0 && row.size() > size_t(sigma_col))
            sigma = row[size_t(sigma_col)];
        else if (ci_lo_col >= 0 && ci_hi_col >= 0 &&
                 row.size() > size_t(ci_hi_col))
            sigma = (row[size_t(ci_hi_col)] - row[size_t(ci_lo_col)]) /
                    (2.0 * dlcz::stats::z95);
        if (!std::isfinite(row[x_col]) || !std::isfinite(row[y_col]) ||
            !std::isfinite(sigma) || sigma <= 0.0)
            continue;
        pts.push_back({row[x_col], row[y_col], std::max(sigma, 1e-9)});
    }
    return pts;
}

json fit_decay_json(const std::vector<dlcz::fit::DataPoint>& pts) {
    const auto f = dlcz::fit::fit_decay(pts);
    return {{"model", "decay"},
            {"r0", f.r0},
            {"tau0_us", f.tau0_us},
            {"r0_sigma", f.r0_sigma},
            {"tau0_sigma", f.tau0_sigma},
            {"residual_norm", f.residual_norm},
            {"iterations", f.iterations},
            {"converged", f.converged}};
}

json fit_g2_json(const std::vector<dlcz::fit::DataPoint>& pts,
                 const dlcz::model::PhysicsParams& ph) {
    const dlcz::fit::G2FixedParams fixed{ph.chi, ph.decay.r0,
                                         ph.decay.tau0_us, ph.finesse,
                                         ph.z_noise};
    const auto f = dlcz::fit::fit_g2_curve(pts, fixed);
    return {{"model", "g2"},
            {"xi_se", f.xi_se},
            {"xi_sigma", f.xi_sigma},
            {"residual_norm", f.residual_norm},
            {"iterations", f.iterations},
            {"converged", f.converged},
            {"at_boundary", f.at_boundary},
            {"fixed",
             {{"chi", ph.chi},
              {"R0", ph.decay.r0},
              {"tau0_us", ph.decay.tau0_us},
              {"finesse", ph.finesse},
              {"Z", ph.z_noise}}}};
}

json fit_linear_json(const std::vector<dlcz::fit::DataPoint>& pts) {
    const auto f = dlcz::fit::fit_linear_origin(pts);
    return {{"model", "linear"},
            {"slope", f.slope},
            {"slope_sigma", f.slope_sigma},
            {"residual_norm", f.residual_norm}};
}

int run_fit(const std::string& input, const std::string& model,
            const std::string& config_path) {
    dlcz::model::PhysicsParams physics{}; // built-in defaults
    if (!config_path.empty())
        physics = dlcz::io::load_config(config_path).physics;

    const Csv csv = read_csv(input);
    const std::string header = header_text(csv);
    json result;
    if (model == "decay") {
        std::vector<dlcz::fit::DataPoint> pts;
        if (header == "t_us,R_est,R_ci_low,R_ci_high,n_trials")
            pts = to_points(csv, 0, 1, -1, 2, 3);
        else
            pts = to_points(csv, 0, 1, csv.rows.front().size() > 2 ? 2 : -1,
                            -1, -1);
        result = fit_decay_json(pts);
    } else if (model == "g2") {
        std::vector<dlcz::fit::DataPoint> pts;
        if (header == "t_us,g2_est,g2_sigma,n_trials")
            pts = to_points(csv, 0, 1, 2, -1, -1);
        else
            pts = to_points(csv, 0, 1, csv.rows.front().size() > 2 ? 2 : -1,
                            -1, -1);
        result = fit_g2_json(pts, physics);
    } else { // linear
        if (header ==
            "n_modes,p_s_total,p_s_ci_low,p_s_ci_high,p_pair_total,"
            "p_pair_ci_low,p_pair_ci_high,n_trials") {
            result = {{"model", "linear"},
                      {"fit_ps", fit_linear_json(to_points(csv, 0, 1, -1, 2, 3))},
                      {"fit_pairs",
                       fit_linear_json(to_points(csv, 0, 4, -1, 5, 6))}};
            result["fit_ps"].erase("model");
            result["fit_pairs"].erase("model");
        } else {
            result = fit_linear_json(to_points(
                csv, 0, 1, csv.rows.front().size() > 2 ? 2 : -1, -1, -1));
        }
    }
    std::cout << result.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiplexed spin-wave interface simulator"};
    app.require_subcommand(1);

    std::string config_path, scenario_name, out_dir;
    uint64_t seed = 0;
    uint64_t trials = 0;

    CLI::App* run = app.add_subcommand("run", "execute a configured scenario");
    run->add_option("--config", config_path, "JSON configuration file")
        ->required();
    CLI::Option* opt_scenario = run->add_option(
        "--scenario", scenario_name,
        "override the configured scenario (retrieval-vs-time, g2-vs-time, "
        "mode-sweep, geometry-check)");
    CLI::Option* opt_seed =
        run->add_option("--seed", seed, "override the master seed");
    CLI::Option* opt_trials =
        run->add_option("--trials", trials, "override trials per point");
    CLI::Option* opt_out =
        run->add_option("--out", out_dir, "override the output directory");

    CLI::App* geo = app.add_subcommand(
        "geometry-check", "verify the mode-array loop and path degeneracy");
    std::string geo_config;
    geo->add_option("--config", geo_config, "JSON configuration file")
        ->required();

    CLI::App* fit = app.add_subcommand("fit", "fit a model to a results CSV");
    std::string fit_input, fit_model, fit_config;
    fit->add_option("--input", fit_input, "CSV file to fit")->required();
    fit->add_option("--model", fit_model, "model to fit")
        ->required()
        ->check(CLI::IsMember({"decay", "g2", "linear"}));
    fit->add_option("--config", fit_config,
                    "configuration supplying fixed physics parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) {
            dlcz::io::ExperimentConfig cfg =
                dlcz::io::load_config(config_path);
            if (opt_scenario->count()) dlcz::io::set_scenario(cfg, scenario_name);
            if (opt_seed->count()) cfg.master_seed = seed;
            if (opt_trials->count()) cfg.trials_per_point = trials;
            if (opt_out->count()) cfg.output_dir = out_dir;
            const nlohmann::json manifest = dlcz::scenario::run_scenario(cfg);
            std::cout << manifest.dump(2) << "\n";
            return 0;
        }
        if (geo->parsed()) {
            dlcz::io::ExperimentConfig cfg = dlcz::io::load_config(geo_config);
            dlcz::io::set_scenario(cfg, "geometry-check");
            const nlohmann::json manifest = dlcz::scenario::run_scenario(cfg);
            std::cout << manifest.dump(2) << "\n";
            return 0;
        }
        return run_fit(fit_input, fit_model, fit_config);
    } catch (const dlcz::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dlcz::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
