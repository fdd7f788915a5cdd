#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "firmsim/config.hpp"
#include "firmsim/harness.hpp"
#include "firmsim/presets.hpp"

namespace {

firmsim::SelectionMode parse_select(const std::string& s) {
    if (s == "argmax") return firmsim::SelectionMode::ArgmaxImprove;
    if (s == "logit") return firmsim::SelectionMode::LogitSample;
    throw std::invalid_argument("--select must be 'argmax' or 'logit', got '" + s + "'");
}

firmsim::RasterChannel parse_channel(const std::string& s) {
    if (s == "old") return firmsim::RasterChannel::Old;
    if (s == "new") return firmsim::RasterChannel::New;
    if (s == "total") return firmsim::RasterChannel::Total;
    throw std::invalid_argument("--channel must be 'old', 'new' or 'total', got '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"firmsim: grid simulator of firm-division demography and location choice"};
    app.require_subcommand(1);

    // run ------------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "Run one scenario and write its result files");
    std::string config_path;
    int model_id = 0;
    std::int64_t seed = 0, steps = 0, snapshot_every = 0;
    std::string out_dir = "out";
    std::string select_mode;
    double lambda2_pct = 0.0, lambda3_pct = 0.0, phi = 0.0;
    auto* config_opt = run_cmd->add_option("--config", config_path, "JSON scenario config");
    auto* model_opt = run_cmd->add_option("--model", model_id, "model preset id (1..7)");
    config_opt->excludes(model_opt);
    model_opt->excludes(config_opt);
    auto* seed_opt = run_cmd->add_option("--seed", seed, "random seed");
    auto* steps_opt = run_cmd->add_option("--steps", steps, "number of time steps");
    run_cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
    run_cmd->add_option("--snapshot-every", snapshot_every, "census snapshot interval (0 = final only)");
    auto* select_opt = run_cmd->add_option("--select", select_mode, "destination choice: argmax | logit");
    auto* l2_opt = run_cmd->add_option("--lambda2", lambda2_pct, "existing-city move probability, percent");
    auto* l3_opt = run_cmd->add_option("--lambda3", lambda3_pct, "vacant-cell move probability, percent");
    auto* phi_opt = run_cmd->add_option("--phi", phi, "type-switch spin-off probability");

    // sweep ----------------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a lambda2 x lambda3 sweep with replicates");
    int sweep_model = 4;
    std::vector<double> sweep_l2, sweep_l3;
    int replicates = 4;
    std::int64_t sweep_seed = 0;
    std::string sweep_out = "sweep";
    sweep_cmd->add_option("--model", sweep_model, "base model preset id (1..7)")->capture_default_str();
    sweep_cmd->add_option("--lambda2", sweep_l2, "lambda2 values, percent")->delimiter(',')->required();
    sweep_cmd->add_option("--lambda3", sweep_l3, "lambda3 values, percent")->delimiter(',')->required();
    sweep_cmd->add_option("--replicates", replicates, "replicate runs per cell")->capture_default_str();
    sweep_cmd->add_option("--seed", sweep_seed, "base seed for replicate derivation");
    sweep_cmd->add_option("--out", sweep_out, "output directory")->capture_default_str();

    // presets --------------------------------------------------------------
    auto* presets_cmd = app.add_subcommand("presets", "Print the model presets as JSON");
    bool text_lambda = false;
    presets_cmd->add_flag("--text-lambda", text_lambda,
                          "print the alternative-lottery preset (0.9, 0.09, 0.01) instead");

    // render ---------------------------------------------------------------
    auto* render_cmd = app.add_subcommand("render", "Render a snapshot csv as a PGM raster");
    std::string snapshot_path, channel = "total", raster_out;
    render_cmd->add_option("--snapshot", snapshot_path, "snapshot csv (x,y,count_old,count_new)")->required();
    render_cmd->add_option("--channel", channel, "old | new | total")->capture_default_str();
    render_cmd->add_option("--out", raster_out, "output PGM path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*run_cmd) {
            firmsim::SimConfig cfg;
            if (*model_opt) {
                cfg = firmsim::preset(model_id).config;
            } else if (*config_opt) {
                cfg = firmsim::load_config_file(config_path);
            } else {
                std::cerr << "run: one of --model or --config is required\n";
                return 1;
            }
            if (*seed_opt) cfg.seed = seed;
            if (*steps_opt) cfg.steps = steps;
            if (*phi_opt) cfg.phi = phi;
            if (*select_opt) cfg.selection_mode = parse_select(select_mode);
            if (*l2_opt) cfg.lambda2 = lambda2_pct / 100.0;
            if (*l3_opt) cfg.lambda3 = lambda3_pct / 100.0;
            if (*l2_opt || *l3_opt) cfg.lambda1 = 1.0 - cfg.lambda2 - cfg.lambda3;
            firmsim::require_valid(cfg);
            firmsim::run_scenario(cfg, out_dir, snapshot_every);
            return 0;
        }

        if (*sweep_cmd) {
            firmsim::SweepSpec spec;
            spec.base = firmsim::preset(sweep_model).config;
            spec.lambda2_percent = sweep_l2;
            spec.lambda3_percent = sweep_l3;
            spec.replicates = replicates;
            spec.base_seed = sweep_seed;
            firmsim::run_sweep(spec, sweep_out);
            return 0;
        }

        if (*presets_cmd) {
            if (text_lambda) {
                std::cout << firmsim::config_to_json(firmsim::text_lambda_preset()) << '\n';
            } else {
                nlohmann::json all = nlohmann::json::array();
                for (int id = 1; id <= 7; ++id) {
                    const firmsim::ModelPreset p = firmsim::preset(id);
                    all.push_back({{"model", p.model_id},
                                   {"config", nlohmann::json::parse(firmsim::config_to_json(p.config))}});
                }
                std::cout << all.dump(2) << '\n';
            }
            return 0;
        }

        if (*render_cmd) {
            const firmsim::PopulationGrid grid = firmsim::read_snapshot_csv(snapshot_path);
            firmsim::render_raster(grid, raster_out, parse_channel(channel));
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
