#include "firmsim/config.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace firmsim {

namespace {

// Size counters are stored as uint16 per division; the split threshold must
// leave room for delta_max + 1.
constexpr std::int64_t kMaxDelta = 65534;

void check_type_params(const TypeParams& p, const char* which, std::vector<ConfigIssue>& out) {
    auto alpha_issue = [&](const char* name, double v) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            out.push_back({ConfigError::NonPositiveAlpha,
                           std::string(which) + "." + name + " must be > 0, got " + std::to_string(v)});
        }
    };
    alpha_issue("alpha_mp", p.alpha_mp);
    alpha_issue("alpha_ap", p.alpha_ap);
    alpha_issue("alpha_cp", p.alpha_cp);
    if (p.delta_max < 1) {
        out.push_back({ConfigError::DeltaTooSmall,
                       std::string(which) + ".delta_max must be >= 1, got " + std::to_string(p.delta_max)});
    } else if (p.delta_max > kMaxDelta) {
        out.push_back({ConfigError::DeltaTooLarge,
                       std::string(which) + ".delta_max must be <= " + std::to_string(kMaxDelta)});
    }
}

}  // namespace

const char* config_error_name(ConfigError e) {
    switch (e) {
        case ConfigError::LambdaSumInvalid: return "LambdaSumInvalid";
        case ConfigError::LambdaOutOfRange: return "LambdaOutOfRange";
        case ConfigError::NonPositiveAlpha: return "NonPositiveAlpha";
        case ConfigError::DeltaTooSmall: return "DeltaTooSmall";
        case ConfigError::DeltaTooLarge: return "DeltaTooLarge";
        case ConfigError::TooManyInitialDivisions: return "TooManyInitialDivisions";
        case ConfigError::NonPositiveInitialDivisions: return "NonPositiveInitialDivisions";
        case ConfigError::PhiOutOfRange: return "PhiOutOfRange";
        case ConfigError::InvalidGrid: return "InvalidGrid";
        case ConfigError::NegativeSteps: return "NegativeSteps";
        case ConfigError::NonPositiveMetricDistance: return "NonPositiveMetricDistance";
    }
    return "UnknownError";
}

std::vector<ConfigIssue> validate_config(const SimConfig& cfg) {
    std::vector<ConfigIssue> issues;

    if (cfg.width < 1 || cfg.height < 1) {
        issues.push_back({ConfigError::InvalidGrid, "width and height must be >= 1"});
    }

    const double lsum = cfg.lambda1 + cfg.lambda2 + cfg.lambda3;
    if (std::abs(lsum - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "lambda1 + lambda2 + lambda3 must equal 1 (got " << lsum << ")";
        issues.push_back({ConfigError::LambdaSumInvalid, os.str()});
    }
    for (double l : {cfg.lambda1, cfg.lambda2, cfg.lambda3}) {
        if (!(l >= 0.0 && l <= 1.0)) {
            issues.push_back({ConfigError::LambdaOutOfRange, "each lambda must lie in [0, 1]"});
            break;
        }
    }

    if (!(cfg.phi >= 0.0 && cfg.phi <= 1.0)) {
        issues.push_back({ConfigError::PhiOutOfRange, "phi must lie in [0, 1]"});
    }

    check_type_params(cfg.params_old, "params_old", issues);
    check_type_params(cfg.params_new, "params_new", issues);

    if (cfg.initial_divisions < 1) {
        issues.push_back({ConfigError::NonPositiveInitialDivisions, "initial_divisions must be >= 1"});
    } else if (cfg.width >= 1 && cfg.height >= 1 &&
               cfg.initial_divisions > static_cast<std::int64_t>(cfg.width) * cfg.height) {
        issues.push_back({ConfigError::TooManyInitialDivisions,
                          "initial_divisions exceeds cell count under the one-per-cell initializer"});
    }

    // steps = 0 is allowed: it yields an empty run (initial state, no reports).
    if (cfg.steps < 0) {
        issues.push_back({ConfigError::NegativeSteps, "steps must be >= 0"});
    }

    if (!(cfg.metric_distance > 0.0)) {
        issues.push_back({ConfigError::NonPositiveMetricDistance, "metric_distance must be > 0"});
    }

    return issues;
}

void require_valid(const SimConfig& cfg) {
    const auto issues = validate_config(cfg);
    if (issues.empty()) return;
    std::ostringstream os;
    os << "invalid config:";
    for (const auto& issue : issues) {
        os << "\n  [" << config_error_name(issue.error) << "] " << issue.message;
    }
    throw std::invalid_argument(os.str());
}

const char* to_string(SelectionMode m) {
    return m == SelectionMode::ArgmaxImprove ? "argmax_improve" : "logit_sample";
}

const char* to_string(InitSizePolicy p) {
    return p == InitSizePolicy::Zero ? "zero" : "uniform_random";
}

const char* to_string(Topology) { return "planar"; }

const char* to_string(DivisionType t) { return t == DivisionType::Old ? "old" : "new"; }

}  // namespace firmsim
