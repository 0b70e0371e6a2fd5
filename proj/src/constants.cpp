#include "lqineq/constants.hpp"

#include <cmath>

#include "lqineq/errors.hpp"

namespace lqineq {

namespace {

constexpr double rho_lo = 1e-6;
constexpr double rho_hi = 1 - 1e-6;

template <class F>
KappaResult golden_min(F&& f) {
    const double g = 0.5 * (std::sqrt(5.0) - 1);
    double a = rho_lo, b = rho_hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    double rho = 0.5 * (a + b);
    double v = f(rho);
    // the bracket may have collapsed onto an end of the clamp interval
    for (double e : {rho_lo, rho_hi})
        if (f(e) <= v) {
            v = f(e);
            rho = e;
        }
    bool edge = rho - rho_lo < 1e-9 || rho_hi - rho < 1e-9;
    return {v, rho, edge};
}

void check_q(double q) { require(q > 0 && q < 1, ErrorCode::bad_params, "q must lie in (0,1)"); }

}  // namespace

double kappa_P_objective(double q, double rho) {
    double num = std::pow(-std::expm1(2 * q * std::log(rho)), 1.0 / q);
    double den = rho * rho * (1 - rho) * (1 - rho);
    return std::pow(2.0, (1 - q) / q) * num / den;
}

KappaResult kappa_P(double q) {
    check_q(q);
    return golden_min([q](double r) { return kappa_P_objective(q, r); });
}

double kappa_LS_objective(double q, double rho, KappaLsForm form) {
    if (form == KappaLsForm::with_gradient) return kappa_P_objective(q, rho);
    double num = std::pow(-std::expm1(2 * q * std::log(rho)), 1.0 / q);
    return std::pow(2.0, (1 - q) / q) * num / (rho * rho);
}

KappaResult kappa_LS(double q, KappaLsForm form) {
    check_q(q);
    return golden_min([q, form](double r) { return kappa_LS_objective(q, r, form); });
}

double constant_K() { return 0.5 * (11 + 5 * std::sqrt(5.0)); }

double constant_c_ls() { return std::log(2.0) / (2 * std::log1p(2 * std::exp(2.0))); }

}  // namespace lqineq
