#include <cmath>
#include <numbers>

#include "common.hpp"
#include "lqineq/quadrature.hpp"

using namespace lqineq;

TEST_CASE("gk15 weights integrate constants and low-degree polynomials exactly") {
    const auto& r = quad::gk15();
    double sk = 0, sg = 0;
    for (int i = 0; i < 15; ++i) {
        sk += r.wk[i];
        sg += r.wg[i];
    }
    CHECK(sk == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(sg == doctest::Approx(2.0).epsilon(1e-15));
    for (int deg = 0; deg <= 22; deg += 2) {
        double s = 0;
        for (int i = 0; i < 15; ++i) s += r.wk[i] * std::pow(r.x[i], deg);
        CHECK_REL(s, 2.0 / (deg + 1), 1e-14);
    }
    const auto& g = quad::gl7();
    for (int deg = 0; deg <= 12; deg += 2) {
        double s = 0;
        for (int i = 0; i < 7; ++i) s += g.w[i] * std::pow(g.x[i], deg);
        CHECK_REL(s, 2.0 / (deg + 1), 1e-14);
    }
}

TEST_CASE("adaptive integration of smooth and peaked integrands") {
    auto e = quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK_REL(e.value, 2.0, 1e-13);
    auto p = quad::integrate([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0);
    CHECK_REL(p.value, 2.0 / 1e-2 * std::atan(1.0 / 1e-2), 1e-11);
    CHECK(quad::integrate([](double) { return 1.0; }, 1.0, 1.0).value == 0.0);
}

TEST_CASE("log-space integration keeps precision far below underflow") {
    // integral of e^{-x} over [1000, inf) truncated at 1100
    auto r = quad::log_integrate([](double x) { return -x; }, 1000.0, 1100.0);
    CHECK_REL(r.log_value, -1000.0 + std::log1p(-std::exp(-100.0)), 1e-14);
    auto z = quad::log_integrate([](double) { return quad::neg_inf; }, 0.0, 1.0);
    CHECK(z.log_value == quad::neg_inf);
}

TEST_CASE("log_add") {
    CHECK_REL(quad::log_add(std::log(2.0), std::log(3.0)), std::log(5.0), 1e-15);
    CHECK(quad::log_add(quad::neg_inf, 1.5) == 1.5);
    CHECK(quad::log_add(-1e300, 0.0) == 0.0);
}
