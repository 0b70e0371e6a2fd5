#include <cmath>

#include "common.hpp"
#include "goldens.hpp"
#include "lqineq/tails.hpp"

using namespace lqineq;

TEST_CASE("Lebesgue resistance is the distance to the median") {
    TailProfile t(Measure1D::uniform(-1, 1), Measure1D::lebesgue(-1, 1));
    CHECK(std::fabs(t.median()) < 1e-13);
    for (double x : {0.01, 0.3, 0.99}) {
        CHECK_REL(t.r(x), x, 1e-11);
        CHECK_REL(t.ell(-x), x, 1e-11);
        CHECK_REL(t.R(x), 0.5 * (1 - x), 1e-11);
    }
    CHECK(t.log_r(t.median()) == quad::neg_inf);
    CHECK_REL(t.side_mass(Side::right), 0.5, 1e-13);
}

TEST_CASE("gaussian resistance and tail at one") {
    auto g = Measure1D::gaussian();
    TailProfile t(g, g);
    CHECK_REL(t.r(1.0), goldens::gaussian_r1, 1e-9);
    CHECK_REL(t.R(1.0), goldens::gaussian_R1, 1e-10);
    CHECK_REL(t.ell(-1.0), goldens::gaussian_r1, 1e-9);
}

TEST_CASE("heavy tail resistance in closed form") {
    double a = 3;
    auto h = Measure1D::heavy_tail(a);
    TailProfile t(h, h);
    // 1/rho = (2/a)(1+x)^{1+a}, so r(x) = (2/a) ((1+x)^{2+a} - 1) / (2+a)
    for (double x : {0.5, 4.0, 100.0, 1e4}) {
        double r = 2 / a * (std::pow(1 + x, 2 + a) - 1) / (2 + a);
        CHECK_REL(t.r(x), r, 1e-9);
    }
    double lr = std::log(2 / a / (2 + a)) + std::log(std::pow(3.0, 2 + a) - std::pow(2.0, 2 + a));
    CHECK_REL(t.log_resistance(1.0, 2.0), lr, 1e-10);
    for (double lt : {-1.0, -10.0, -200.0}) CHECK_REL(t.log_R(t.inverse_tail(Side::right, lt)), lt, 1e-9);
}

TEST_CASE("tail samples are consistent with the pointwise tables") {
    auto g = Measure1D::gaussian();
    TailProfile t(g, g);
    const auto& S = t.samples(Side::right);
    REQUIRE(S.size() > 100);
    for (std::size_t i = 0; i < S.size(); i += S.size() / 17) {
        CHECK(S.dist[i] == doctest::Approx(S.x[i] - t.median()));
        CHECK_REL(S.log_tail[i], t.log_R(S.x[i]), 1e-9);
        if (S.dist[i] > 1e-3) CHECK_REL(S.log_res[i], t.log_r(S.x[i]), 1e-8);
    }
}
