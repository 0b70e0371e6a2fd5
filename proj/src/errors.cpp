#include "lqineq/errors.hpp"

namespace lqineq {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::bad_params: return "BadParams";
        case ErrorCode::non_integrable_density: return "NonIntegrableDensity";
        case ErrorCode::divergent_resistance: return "DivergentResistance";
        case ErrorCode::negative_input: return "NegativeInput";
        case ErrorCode::zero_mass: return "ZeroMass";
        case ErrorCode::degenerate_condenser: return "DegenerateCondenser";
        case ErrorCode::singular_weight: return "SingularWeight";
        case ErrorCode::out_of_range: return "OutOfRange";
        case ErrorCode::profile_unavailable: return "ProfileUnavailable";
        case ErrorCode::inversion_failure: return "InversionFailure";
        case ErrorCode::norm_divergent: return "NormDivergent";
        case ErrorCode::all_trials_degenerate: return "AllTrialsDegenerate";
        case ErrorCode::insufficient_tail: return "InsufficientTail";
        case ErrorCode::bad_grid: return "BadGrid";
        case ErrorCode::newton_diverged: return "NewtonDiverged";
        case ErrorCode::grid_mismatch: return "GridMismatch";
        case ErrorCode::missing_constant: return "MissingConstant";
        case ErrorCode::config: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace lqineq
