#include <json.hpp>

#include <set>
#include <stdexcept>

#include "firmsim/config.hpp"

namespace firmsim {

namespace {

using nlohmann::json;

json type_params_to_json(const TypeParams& p) {
    return json{{"alpha_mp", p.alpha_mp}, {"alpha_ap", p.alpha_ap}, {"alpha_cp", p.alpha_cp},
                {"beta_mp", p.beta_mp},   {"beta_ap", p.beta_ap},   {"beta_cp", p.beta_cp},
                {"delta_max", p.delta_max}};
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key())) {
            throw std::invalid_argument("unknown key in " + where + ": \"" + it.key() + "\"");
        }
    }
    for (const auto& key : known) {
        if (!obj.contains(key)) {
            throw std::invalid_argument("missing key in " + where + ": \"" + key + "\"");
        }
    }
}

TypeParams type_params_from_json(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw std::invalid_argument(where + " must be an object");
    reject_unknown_keys(obj, {"alpha_mp", "alpha_ap", "alpha_cp", "beta_mp", "beta_ap", "beta_cp", "delta_max"},
                        where);
    TypeParams p;
    p.alpha_mp = obj.at("alpha_mp").get<double>();
    p.alpha_ap = obj.at("alpha_ap").get<double>();
    p.alpha_cp = obj.at("alpha_cp").get<double>();
    p.beta_mp = obj.at("beta_mp").get<double>();
    p.beta_ap = obj.at("beta_ap").get<double>();
    p.beta_cp = obj.at("beta_cp").get<double>();
    p.delta_max = obj.at("delta_max").get<std::int64_t>();
    return p;
}

SelectionMode selection_mode_from_string(const std::string& s) {
    if (s == "argmax_improve") return SelectionMode::ArgmaxImprove;
    if (s == "logit_sample") return SelectionMode::LogitSample;
    throw std::invalid_argument("selection_mode must be \"argmax_improve\" or \"logit_sample\", got \"" + s + "\"");
}

InitSizePolicy init_policy_from_string(const std::string& s) {
    if (s == "zero") return InitSizePolicy::Zero;
    if (s == "uniform_random") return InitSizePolicy::UniformRandom;
    throw std::invalid_argument("init_size_policy must be \"zero\" or \"uniform_random\", got \"" + s + "\"");
}

Topology topology_from_string(const std::string& s) {
    if (s == "planar") return Topology::Planar;
    throw std::invalid_argument("topology must be \"planar\", got \"" + s + "\"");
}

}  // namespace

std::string config_to_json(const SimConfig& cfg, int indent) {
    json doc{{"width", cfg.width},
             {"height", cfg.height},
             {"params_old", type_params_to_json(cfg.params_old)},
             {"params_new", type_params_to_json(cfg.params_new)},
             {"phi", cfg.phi},
             {"lambda1", cfg.lambda1},
             {"lambda2", cfg.lambda2},
             {"lambda3", cfg.lambda3},
             {"selection_mode", to_string(cfg.selection_mode)},
             {"init_size_policy", to_string(cfg.init_size_policy)},
             {"initial_divisions", cfg.initial_divisions},
             {"steps", cfg.steps},
             {"metric_distance", cfg.metric_distance},
             {"seed", cfg.seed},
             {"topology", to_string(cfg.topology)}};
    return doc.dump(indent);
}

SimConfig config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("config document must be a JSON object");

    reject_unknown_keys(doc,
                        {"width", "height", "params_old", "params_new", "phi", "lambda1", "lambda2", "lambda3",
                         "selection_mode", "init_size_policy", "initial_divisions", "steps", "metric_distance",
                         "seed", "topology"},
                        "config");

    SimConfig cfg;
    try {
        cfg.width = doc.at("width").get<int>();
        cfg.height = doc.at("height").get<int>();
        cfg.params_old = type_params_from_json(doc.at("params_old"), "params_old");
        cfg.params_new = type_params_from_json(doc.at("params_new"), "params_new");
        cfg.phi = doc.at("phi").get<double>();
        cfg.lambda1 = doc.at("lambda1").get<double>();
        cfg.lambda2 = doc.at("lambda2").get<double>();
        cfg.lambda3 = doc.at("lambda3").get<double>();
        cfg.selection_mode = selection_mode_from_string(doc.at("selection_mode").get<std::string>());
        cfg.init_size_policy = init_policy_from_string(doc.at("init_size_policy").get<std::string>());
        cfg.initial_divisions = doc.at("initial_divisions").get<std::int64_t>();
        cfg.steps = doc.at("steps").get<std::int64_t>();
        cfg.metric_distance = doc.at("metric_distance").get<double>();
        cfg.seed = doc.at("seed").get<std::int64_t>();
        cfg.topology = topology_from_string(doc.at("topology").get<std::string>());
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed config field: ") + e.what());
    }
    return cfg;
}

}  // namespace firmsim
