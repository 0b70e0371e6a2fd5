#pragma once

#include <vector>

#include "lqineq/measure.hpp"
#include "lqineq/tails.hpp"

namespace lqineq {

// Non-negative capacity value or the +infinity marker.
class Capacity {
public:
    static Capacity finite(double v);
    static Capacity infinite() { return Capacity(true, 0.0); }

    bool is_infinite() const { return inf_; }
    double value() const;          // throws DegenerateCondenser on the marker
    double reciprocal() const { return inf_ ? 0.0 : 1.0 / v_; }
    Capacity operator+(const Capacity& o) const;
    bool operator==(const Capacity& o) const = default;

private:
    Capacity(bool inf, double v) : inf_(inf), v_(v) {}
    bool inf_;
    double v_;
};

struct Condenser {
    std::vector<Interval> inner;  // A
    Interval outer;               // B; infinite ends mean "up to the support edge"
};

// Cap((a,inf), (m,inf)) = 1/r(a) right of the median, 1/ell(a) left of it
Capacity cap_halfline(const TailProfile& tails, double a);
// A = [a1,a2] inside B = (b1,b2); an unbounded side of B contributes nothing
Capacity cap_interval(const TailProfile& tails, Interval A, Interval B);
// piecewise-linear minimizer of the nu-Dirichlet energy on n_grid graded cells
Capacity cap_variational(const Measure1D& nu, const Condenser& c, int n_grid);

struct CapacityProfile {
    Side side;
    std::vector<double> t;
    std::vector<Capacity> values;
};

// w(s) = s log(1 + e^2/s) and its inverse on (0, 1/2]
double w_transform(double s);
double w_inverse(double t);
double log_w_inverse(double log_t);

CapacityProfile phi_profile(const TailProfile& tails, Side side, const std::vector<double>& t_grid);
CapacityProfile psi_profile(const TailProfile& tails, Side side, const std::vector<double>& t_grid);

}  // namespace lqineq
