#pragma once

#include <functional>
#include <vector>

#include "lqineq/measure.hpp"

namespace lqineq {

// mu_h = e^h mu / Z_h for a bounded h
struct PerturbationSpec {
    std::function<double(double)> h;
    double osc_h;
    double Z_h;
};

// osc_h from the window nodes, Z_h by quadrature
PerturbationSpec make_perturbation(const Measure1D& mu, std::function<double(double)> h);
Measure1D perturbed_measure(const Measure1D& mu, const PerturbationSpec& spec);

// C exp(osc_h / q)
double perturb_constant(double C, double osc_h, double q);
// n^{1/q - 1} max_i C_i
double tensor_constant(const std::vector<double>& constants, double q);

struct ConcentrationEnvelope {
    double exponent;                 // 2q/(1-q)
    double kappa;                    // 2^{1/q} C_P
    double c;                        // kappa^q t0^{-2q}
    double t0;
    std::vector<double> a;           // a_n bounds mu(f >= 2^n t0)
    double fixed_point;              // c^{1/(1-q)}
    double fixed_point_iterated;     // b -> c b^q from b = 1/2
    double C;                        // smallest C with a_n <= C (2^n t0)^{-exponent} over the computed n
    std::vector<double> t;           // the requested grid
    std::vector<double> bound;       // step-constant envelope on t
};

ConcentrationEnvelope concentration_envelope(double C_P, double q, double t0, const std::vector<double>& t_grid);

// smallest t with mu(f >= t) <= 1/2, by bisection on the window range of f
double concentration_t0(const Measure1D& mu, const GridFunction& f);

// mu({f >= t}) for a grid function extended constantly beyond its nodes
double level_set_mass(const Measure1D& mu, const GridFunction& f, double t);

struct TailExponentFit {
    double slope;        // least-squares slope of log mu(f >= t) against log t
    bool saturated;      // the tail falls through (1e-10, 1e-2) within less than a decade of t
    double t_lo, t_hi;   // fitted window
    int points;
};

// f must be 1-Lipschitz on its nodes; throws InsufficientTail when the grid cannot resolve the window
TailExponentFit empirical_tail_exponent(const Measure1D& mu, const GridFunction& f, const std::vector<double>& t_grid);

}  // namespace lqineq
