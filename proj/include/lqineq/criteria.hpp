#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lqineq/constants.hpp"
#include "lqineq/measure.hpp"
#include "lqineq/series.hpp"
#include "lqineq/tails.hpp"

namespace lqineq {

// ---------------------------------------------------------------- estimates

enum class ConstantName { C_P, C_LS, C_OP, beta_P, beta_LS };
const char* to_string(ConstantName n);

struct ConstantEstimate {
    ConstantName name;
    double q;
    std::optional<double> lower;
    std::optional<double> upper;
    std::string provenance_lower;
    std::string provenance_upper;
    std::vector<std::string> diagnostics;

    // throws BadParams when both sides exist and lower > upper
    void validate() const;
};

// combines two estimates of the same constant, keeping the tighter side of each
ConstantEstimate merge(const ConstantEstimate& a, const ConstantEstimate& b);

// ---------------------------------------------------------------- Hardy integrals

enum class HardyKind { poincare, lsi };
enum class Verdict { satisfied, inconclusive_divergent };
const char* to_string(HardyKind k);
const char* to_string(Verdict v);

struct SideIntegral {
    bool divergent = false;
    double log_value = 0.0;      // log of the integral including the tail estimate
    double quad_rel_error = 0.0; // |Kronrod - Gauss| relative to the total
    SeriesVerdict series;
    std::vector<WindowSum> windows;
};

struct HardyReport {
    HardyKind kind;
    double q;
    SideIntegral right;
    SideIntegral left;
    Verdict verdict;
};

HardyReport hardy_check_poincare(const TailProfile& tails, double q);
HardyReport hardy_check_lsi(const TailProfile& tails, double q);

// integral of exp(log_integrand(log_mu, log_tail, log_res)) over one side, with dyadic windows in |x - m|
SideIntegral side_integral(const TailProfile& tails, Side side,
                           const std::function<double(double, double, double, double)>& log_integrand);

// ---------------------------------------------------------------- rate functions

enum class RateKind { beta_WP, h_WLS, gamma };
const char* to_string(RateKind k);

struct RateFunction {
    RateKind kind;
    std::vector<double> s;          // increasing
    std::vector<double> log_raw;    // two-sided raw values
    std::vector<double> log_value;  // non-increasing envelope
    bool monotone = true;           // raw samples were already non-increasing
    double envelope_deviation = 0;  // max relative lift applied by the envelope
    double s_min_resolved = 0;      // smallest s the tail tables could invert
    double value(std::size_t i) const;
};

// s = 2^{-j/per_octave}, j = per_octave+1 .. per_octave*octaves, returned increasing
std::vector<double> dyadic_s_grid(int per_octave = 8, int octaves = 1000);

RateFunction weak_poincare_from_tails(const TailProfile& tails, const std::vector<double>& s_grid);
RateFunction weak_lsi_from_capacity(const TailProfile& tails, const std::vector<double>& s_grid);

// integral over (0, upper] of rate^p from the log-log interpolant, windows dyadic in 1/s
SideIntegral rate_power_integral(const RateFunction& rate, double p, double upper);

// ---------------------------------------------------------------- bounds

ConstantEstimate beta_P_upper(const TailProfile& tails, double q);
ConstantEstimate cp_upper(const TailProfile& tails, double q);
ConstantEstimate cp_upper_from_weak(const RateFunction& rate, double q);
ConstantEstimate cls_upper_from_weak(const RateFunction& rate, double q);

// defining sum of beta_P over the nested half-lines [a_k, inf) (right) or (-inf, a_k] (left);
// points ordered from the median outwards
double beta_P_sequence_value(const TailProfile& tails, Side side, const std::vector<double>& points, double q);

// ---------------------------------------------------------------- trial lower bounds

enum TrialFamily : unsigned {
    trial_ramp_right = 1u,
    trial_ramp_left = 2u,
    trial_tent = 4u,
    trial_plateau = 8u,
    trial_exponential = 16u,
    trial_all = 31u,
};

struct TrialSet {
    unsigned families = trial_all;
    int multistarts = 32;
    int max_sweeps = 40;
};

struct TrialResult {
    ConstantEstimate estimate;
    std::string best_family;
    std::vector<double> best_params;
    int evaluations = 0;
};

TrialResult cp_lower_trial(const Measure1D& mu, const Measure1D& nu, double q, const TrialSet& set,
                           std::uint64_t seed);
TrialResult cls_lower_trial(const Measure1D& mu, const Measure1D& nu, double q, const TrialSet& set,
                            std::uint64_t seed);
// the grid function a trial parameter vector describes
GridFunction trial_function(const Measure1D& mu, const std::string& family, const std::vector<double>& params);

// ---------------------------------------------------------------- Orlicz

struct OrliczEntry {
    double var_q;          // Var(f^q)
    double orlicz;         // integral of |f - mu(f)|^{2q}
    double energy;
    double poincare_quotient;
    double orlicz_quotient;
    bool holds;
};

struct OrliczReport {
    double q;
    std::vector<OrliczEntry> entries;
    double max_violation = 0;
    bool all_hold = true;
};

OrliczReport orlicz_check(const Measure1D& mu, const Measure1D& nu, double q, const std::vector<GridFunction>& f_set);

struct MomentReport {
    double exponent;
    bool divergent;
    double log_value;
    SideIntegral right;
    SideIntegral left;
};

// integral of f^exponent against mu over the full tail tables
MomentReport orlicz_moment(const TailProfile& tails, const std::function<double(double)>& log_f, double exponent);

}  // namespace lqineq
