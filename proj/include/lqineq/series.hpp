#pragma once

#include <string>
#include <vector>

namespace lqineq {

// Partial sum of a positive integral over one dyadic window, kept as a log.
struct WindowSum {
    int level;        // window covers [2^level, 2^(level+1)) in the running variable
    double lo, hi;    // window bounds in the integration variable
    double log_sum;   // -inf for an empty window
    bool complete;    // the tables cover the whole window
};

struct SeriesVerdict {
    bool divergent = false;
    bool geometric = false;          // trailing sums shrink by a fixed ratio
    double decay_exponent = 0.0;     // fitted p in S_k ~ k^-p (power-law regime)
    double log_total = 0.0;          // log of the summed windows
    double log_tail_estimate = 0.0;  // log of the extrapolated remainder
    std::string diagnostic;
};

// Decides summability from the trailing windows: geometric decay or underflow is convergent,
// otherwise S_k ~ k^-p is fitted over levels >= 1 and p <= 1.1 is declared divergent.
SeriesVerdict classify_windows(const std::vector<WindowSum>& windows, bool bounded);

}  // namespace lqineq
