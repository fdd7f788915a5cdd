#include "firmsim/presets.hpp"

#include <stdexcept>
#include <string>

namespace firmsim {

ModelPreset preset(int model_id) {
    if (model_id < 1 || model_id > 7) {
        throw std::invalid_argument("UnknownModelId: model must be in 1..7, got " + std::to_string(model_id));
    }

    SimConfig cfg;
    cfg.width = 50;
    cfg.height = 50;
    cfg.initial_divisions = 2500;
    cfg.steps = 210;
    cfg.metric_distance = 10.0;
    cfg.phi = 0.05;
    cfg.lambda2 = 0.19;
    cfg.lambda3 = 0.003;
    cfg.lambda1 = 1.0 - cfg.lambda2 - cfg.lambda3;
    cfg.init_size_policy = InitSizePolicy::UniformRandom;
    cfg.seed = 0;

    cfg.params_old = TypeParams{0.5, 0.5, 0.5, 0.0, 0.0, 0.0, 50};
    cfg.params_new = TypeParams{0.4, 0.4, 0.4, 0.0, 0.0, 0.0, 10};

    // Spatial reach of the new industry's potentials.
    if (model_id == 5 || model_id == 7) cfg.params_new.alpha_mp = 0.2;
    if (model_id == 6 || model_id == 7) cfg.params_new.alpha_ap = 0.2;

    // Utility weights accumulate across models 2..4; models 5..7 keep model 4's.
    double beta_mp = 0.0, beta_ap = 0.0, beta_cp = 0.0;
    if (model_id >= 2) beta_mp = 1.0;
    if (model_id >= 3) beta_ap = 0.5;
    if (model_id >= 4) beta_cp = -1.0;
    for (TypeParams* p : {&cfg.params_old, &cfg.params_new}) {
        p->beta_mp = beta_mp;
        p->beta_ap = beta_ap;
        p->beta_cp = beta_cp;
    }

    // All presets sample destinations from the softmax. Strict-improvement
    // argmax freezes once the population reaches a single cell (no candidate
    // can beat the peak), which kills the spatial hierarchy these models are
    // meant to produce; sampling keeps the vacant-cell outflow alive.
    cfg.selection_mode = SelectionMode::LogitSample;

    return ModelPreset{model_id, cfg};
}

SimConfig text_lambda_preset() {
    SimConfig cfg = preset(4).config;
    cfg.lambda1 = 0.9;
    cfg.lambda2 = 0.09;
    cfg.lambda3 = 0.01;
    return cfg;
}

}  // namespace firmsim
