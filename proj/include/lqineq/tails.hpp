#pragma once

#include <memory>
#include <vector>

#include "lqineq/measure.hpp"

namespace lqineq {

enum class Side { right, left };

const char* to_string(Side s);

// Quadrature points over one half-line past the median (GK15 per table cell),
// carrying the tail and resistance values every Hardy-type integral needs.
struct SideSamples {
    std::vector<double> x;
    std::vector<double> dist;      // |x - median|
    std::vector<double> wk;        // Kronrod weight times half-width
    std::vector<double> wg;        // embedded Gauss weight times half-width (0 off the Gauss nodes)
    std::vector<double> log_mu;    // log density of mu
    std::vector<double> log_tail;  // log R(x) on the right, log L(x) on the left
    std::vector<double> log_res;   // log r(x) on the right, log ell(x) on the left
    std::size_t size() const { return x.size(); }
};

// Median of mu with the tails R, L of mu and the resistances r, ell of nu.
// Immutable; copies share state.
class TailProfile {
public:
    TailProfile(Measure1D mu, Measure1D nu);

    const Measure1D& mu() const;
    const Measure1D& nu() const;
    double median() const;

    double log_R(double x) const;
    double log_L(double x) const;
    double R(double x) const;
    double L(double x) const;
    // log of the resistance integral from the median; -inf at the median, +inf when unbounded
    double log_r(double x) const;
    double log_ell(double x) const;
    double r(double x) const;
    double ell(double x) const;

    // mu-mass of the half-line past the median on the given side
    double side_mass(Side s) const;
    // point a past the median with R(a) = t (right) or L(a) = t (left), given log t
    double inverse_tail(Side s, double log_t) const;
    double log_tail(Side s, double x) const;
    double log_res(Side s, double x) const;
    // log of the integral of 1/rho_nu over [a,b], integrated cell by cell on the tables
    double log_resistance(double a, double b) const;

    const SideSamples& samples(Side s) const;

    struct Impl;

private:
    std::shared_ptr<Impl> p_;
};

}  // namespace lqineq
