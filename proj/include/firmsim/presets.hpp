#pragma once

#include "firmsim/config.hpp"

namespace firmsim {

struct ModelPreset {
    int model_id = 0;
    SimConfig config;
};

/**
 * The seven standard model parameterizations on the 50x50 landscape:
 *   1  no spatial preferences (all betas zero; logit selection)
 *   2  market potential only
 *   3  market + agglomeration potential
 *   4  market + agglomeration + congestion (the base model)
 *   5  model 4 with wider market reach for the new industry
 *   6  model 4 with wider agglomeration reach for the new industry
 *   7  model 4 with both reaches widened
 * Throws std::invalid_argument("UnknownModelId...") outside 1..7.
 */
ModelPreset preset(int model_id);

// Model 4 with the alternative relocation lottery (0.9, 0.09, 0.01).
SimConfig text_lambda_preset();

}  // namespace firmsim
