#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lqineq/criteria.hpp"
#include "lqineq/measure.hpp"

namespace lqineq {

// Cell-centred finite volumes for du/dt = e^psi d/dx(e^-psi d/dx u^m) with no-flux ends.
struct WpmeProblem {
    std::function<double(double)> psi;
    double m;
    Interval domain;
    int n_cells;
    double dx;
    std::vector<double> x;       // cell centres
    std::vector<double> w;       // mu_psi cell masses, sum 1
    std::vector<double> a;       // interior face coefficients e^{-psi_f}/(Z dx), n_cells - 1 of them
    std::vector<double> u0;
};

WpmeProblem discretize(std::function<double(double)> psi, double m, Interval domain, int n_cells,
                       const std::function<double(double)>& u0);

// interval around x0 on which e^{-psi} >= 1e-16 max, found by walking out in steps of h
Interval truncated_domain(const std::function<double(double)>& psi, double x0, double h = 1e-2, double limit = 1e6);

struct NewtonStats {
    int iterations = 0;
    double residual = 0;
    int halvings = 0;
    int steps = 0;
};

struct WpmeState {
    double t = 0;
    std::vector<double> u;
    NewtonStats newton;
};

struct StepOptions {
    double theta = 1.0;  // 1 backward Euler, 1/2 Crank-Nicolson
    double tol = 1e-12;
    int max_iter = 50;
    int max_halvings = 20;
};

// advances by dt, halving the internal step when Newton fails or clips too much mass
WpmeState step_implicit(const WpmeProblem& pb, const WpmeState& s, double dt, const StepOptions& opt = {});

// discrete functionals against the cell weights
double wpme_mass(const WpmeProblem& pb, const std::vector<double>& u);
double wpme_variance(const WpmeProblem& pb, const std::vector<double>& u);
double wpme_entropy(const WpmeProblem& pb, const std::vector<double>& u);
// sum over faces of a_f (difference of u^{(m+1)/2})^2
double wpme_dissipation(const WpmeProblem& pb, const std::vector<double>& u);
// sum over faces of a_f (difference of u^m)^2
double wpme_energy_m(const WpmeProblem& pb, const std::vector<double>& u);

struct RunOptions {
    double T = 1.0;
    double dt = 1e-3;
    std::vector<double> sample_times;         // sorted in [0, T]; empty means every step
    std::optional<ConstantEstimate> C_P;      // q must be 2/(m+1)
    std::optional<ConstantEstimate> C_LS;     // q must be 1/m
    StepOptions step;
    bool keep_states = false;
};

struct DecayTrace {
    double m = 1;
    std::vector<double> times, mass, variance, entropy, dissipation;
    std::vector<double> envelope_var, envelope_ent;  // empty without the matching constant
    std::vector<double> energy_m;                    // integral of |d u^m|^2
    std::vector<double> energy_integral;             // (m+1) times the time integral of energy_m
    std::vector<double> moment;                      // integral of u^{m+1}
    std::optional<double> C_P, C_LS;
    std::vector<double> weights;
    std::vector<std::vector<double>> states;         // u at each sample when requested
    NewtonStats newton;
};

DecayTrace run(const WpmeProblem& pb, const RunOptions& opt);

double envelope_var(double var0, double m, double C_P, double t);
double envelope_ent(double ent0, double m, double C_LS, double t);

struct ContractionReport {
    double max_violation = 0;            // largest increase of the weighted positive part between samples
    std::vector<double> positive_part;   // sum w (u - uhat)_+ at each sample
};

// needs traces run with keep_states on identical grids and times
ContractionReport check_contraction(const DecayTrace& u, const DecayTrace& uhat);

// max over samples of |(m+1) int E dt + int u^{m+1}(t) - int u0^{m+1}|
double energy_identity_residual(const DecayTrace& trace);
// max over interior samples of |centred dVar/dt + 8m/(m+1)^2 D|
double dissipation_identity_residual(const DecayTrace& trace);

struct EnvelopeVerdict {
    bool pass = true;
    bool var_checked = false, ent_checked = false;
    double max_ratio_var = 0, max_ratio_ent = 0;  // largest trace/envelope ratio
    std::optional<double> reciprocal_cp;          // C_P estimate from the initial slope
    std::vector<std::string> diagnostics;
};

EnvelopeVerdict envelope_verdict(const DecayTrace& trace);

}  // namespace lqineq
