#pragma once

namespace lqineq {

struct KappaResult {
    double value;
    double rho;         // minimizer (clamped)
    bool at_boundary;   // infimum approached at a clamp end
};

// objective 2^{(1-q)/q} (1 - rho^{2q})^{1/q} / (rho^2 (1 - rho)^2)
double kappa_P_objective(double q, double rho);
KappaResult kappa_P(double q);

enum class KappaLsForm {
    published,      // 2^{(1-q)/q} (1 - rho^{2q})^{1/q} rho^{-2}
    with_gradient,  // keeps the (1-rho)^{-2} factor of the gradient estimate
};
double kappa_LS_objective(double q, double rho, KappaLsForm form = KappaLsForm::published);
KappaResult kappa_LS(double q, KappaLsForm form = KappaLsForm::published);

// (11 + 5 sqrt 5)/2
double constant_K();
// log 2 / (2 log(1 + 2 e^2))
double constant_c_ls();

}  // namespace lqineq
