#include <algorithm>
#include <cmath>

#include "lqineq/criteria.hpp"
#include "lqineq/errors.hpp"

namespace lqineq {

OrliczReport orlicz_check(const Measure1D& mu, const Measure1D& nu, double q, const std::vector<GridFunction>& f_set) {
    require(q >= 0.5 && q <= 1, ErrorCode::bad_params, "Orlicz check needs q in [1/2, 1]");
    OrliczReport rep{q, {}, 0.0, true};
    for (const GridFunction& f : f_set) {
        for (double v : f.values())
            if (v < 0 || std::isnan(v)) fail(ErrorCode::negative_input, "Orlicz check needs non-negative f");
        double m0 = integrate_composed(mu, f, [](double) { return 1.0; });
        double mean = integrate_composed(mu, f, [](double v) { return v; }) / m0;
        double mq = integrate_composed(mu, f, [q](double v) { return std::pow(v, q); }) / m0;
        double m2q = integrate_composed(mu, f, [q](double v) { return std::pow(v, 2 * q); }) / m0;
        double var = std::max(0.0, m2q - mq * mq);
        double orl = integrate_composed(mu, f, [&](double v) { return std::pow(std::fabs(v - mean), 2 * q); }) / m0;
        double e = dirichlet_energy(nu, f);
        OrliczEntry en{var, orl, e, 0.0, 0.0, var <= orl + 1e-8};
        if (e > 0) {
            en.poincare_quotient = std::pow(var, 1 / q) / e;
            en.orlicz_quotient = std::pow(orl, 1 / q) / e;
        }
        rep.max_violation = std::max(rep.max_violation, var - orl);
        rep.all_hold = rep.all_hold && en.holds;
        rep.entries.push_back(en);
    }
    return rep;
}

}  // namespace lqineq
