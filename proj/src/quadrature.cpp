#include "lqineq/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace lqineq::quad {

namespace {

Rule15 make_gk15() {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const auto& ka = gauss_kronrod<double, 15>::abscissa();
    const auto& kw = gauss_kronrod<double, 15>::weights();
    const auto& gw = gauss<double, 7>::weights();
    Rule15 r{};
    // boost stores the non-negative half, centre first; gauss nodes sit at even kronrod indices
    for (int k = 0; k < 8; ++k) {
        double g = (k % 2 == 0) ? gw[k / 2] : 0.0;
        r.x[7 + k] = ka[k];
        r.x[7 - k] = -ka[k];
        r.wk[7 + k] = r.wk[7 - k] = kw[k];
        r.wg[7 + k] = r.wg[7 - k] = g;
    }
    return r;
}

Rule7 make_gl7() {
    const auto& a = boost::math::quadrature::gauss<double, 7>::abscissa();
    const auto& w = boost::math::quadrature::gauss<double, 7>::weights();
    Rule7 r{};
    for (int k = 0; k < 4; ++k) {
        r.x[3 + k] = a[k];
        r.x[3 - k] = -a[k];
        r.w[3 + k] = r.w[3 - k] = w[k];
    }
    return r;
}

}  // namespace

const Rule15& gk15() {
    static const Rule15 rule = make_gk15();
    return rule;
}

const Rule7& gl7() {
    static const Rule7 rule = make_gl7();
    return rule;
}

}  // namespace lqineq::quad
