#pragma once

#include <stdexcept>
#include <string>

namespace lqineq {

enum class ErrorCode {
    bad_params,
    non_integrable_density,
    divergent_resistance,
    negative_input,
    zero_mass,
    degenerate_condenser,
    singular_weight,
    out_of_range,
    profile_unavailable,
    inversion_failure,
    norm_divergent,
    all_trials_degenerate,
    insufficient_tail,
    bad_grid,
    newton_diverged,
    grid_mismatch,
    missing_constant,
    config,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
    if (!ok) fail(code, what);
}

}  // namespace lqineq
