#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace firmsim {

enum class DivisionType : std::uint8_t { Old = 0, New = 1 };

enum class SelectionMode : std::uint8_t { ArgmaxImprove, LogitSample };
enum class InitSizePolicy : std::uint8_t { Zero, UniformRandom };
enum class Topology : std::uint8_t { Planar };  // reserved for a future Torus

// Per-type behavioural parameters: distance-decay rates for the three
// potentials, their utility weights, and the maximum division size.
struct TypeParams {
    double alpha_mp = 0.5;   // decay of market potential
    double alpha_ap = 0.5;   // decay of agglomeration potential
    double alpha_cp = 0.5;   // decay of congestion potential
    double beta_mp = 1.0;
    double beta_ap = 0.5;
    double beta_cp = -1.0;
    std::int64_t delta_max = 50;  // split threshold: a division splits once size exceeds this

    friend bool operator==(const TypeParams&, const TypeParams&) = default;
};

struct SimConfig {
    int width = 50;
    int height = 50;
    TypeParams params_old{0.5, 0.5, 0.5, 1.0, 0.5, -1.0, 50};
    TypeParams params_new{0.4, 0.4, 0.4, 1.0, 0.5, -1.0, 10};
    double phi = 0.05;  // probability that an old division's spin-off at the size cap is new-type
    double lambda1 = 0.807;  // stay put
    double lambda2 = 0.19;   // evaluate a move to an occupied cell
    double lambda3 = 0.003;  // evaluate a move to a vacant cell
    SelectionMode selection_mode = SelectionMode::ArgmaxImprove;
    InitSizePolicy init_size_policy = InitSizePolicy::UniformRandom;
    std::int64_t initial_divisions = 2500;
    std::int64_t steps = 210;
    double metric_distance = 10.0;  // radius for the cluster index L
    std::int64_t seed = 0;
    Topology topology = Topology::Planar;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

enum class ConfigError {
    LambdaSumInvalid,
    LambdaOutOfRange,
    NonPositiveAlpha,
    DeltaTooSmall,
    DeltaTooLarge,
    TooManyInitialDivisions,
    NonPositiveInitialDivisions,
    PhiOutOfRange,
    InvalidGrid,
    NegativeSteps,
    NonPositiveMetricDistance,
};

struct ConfigIssue {
    ConfigError error;
    std::string message;
};

const char* config_error_name(ConfigError e);

// Returns the complete list of violated invariants; empty means the config is valid.
std::vector<ConfigIssue> validate_config(const SimConfig& cfg);

// Throws std::invalid_argument listing every violation.
void require_valid(const SimConfig& cfg);

// --- JSON config document -----------------------------------------------
// Schema: snake_case field names matching the structs above, enums as
// lower-snake strings. Every field is required; unknown keys are rejected.

std::string config_to_json(const SimConfig& cfg, int indent = 2);
SimConfig config_from_json(const std::string& text);  // throws std::invalid_argument

const char* to_string(SelectionMode m);
const char* to_string(InitSizePolicy p);
const char* to_string(Topology t);
const char* to_string(DivisionType t);

}  // namespace firmsim
