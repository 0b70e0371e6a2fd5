#include <cmath>
#include <numbers>

#include "common.hpp"
#include "goldens.hpp"
#include "lqineq/measure.hpp"

using namespace lqineq;

TEST_CASE("normalizers") {
    CHECK_REL(Measure1D::gaussian().Z(), std::sqrt(2 * std::numbers::pi), 1e-12);
    CHECK_REL(Measure1D::gaussian(2.0).Z(), 2 * std::sqrt(2 * std::numbers::pi), 1e-12);
    CHECK_REL(Measure1D::exp_power(1.0).Z(), 2.0, 1e-12);
    // integral of (1+|x|)^{-1-a} is 2/a
    CHECK_REL(Measure1D::heavy_tail(3.0).Z(), 2.0 / 3.0, 1e-12);
    CHECK_REL(Measure1D::bertrand(2, 2).Z(), goldens::bertrand_2_2_Z, 1e-10);
    CHECK_REL(Measure1D::lebesgue(-1, 3).Z(), 4.0, 1e-14);
    CHECK(Measure1D::gaussian().truncation_mass() < 1e-12);
}

TEST_CASE("tails, medians and quantiles") {
    auto g = Measure1D::gaussian();
    CHECK(std::fabs(g.median()) < 1e-12);
    CHECK_REL(g.tail_right(1.0), goldens::gaussian_R1, 1e-10);
    CHECK_REL(g.tail_left(-1.0), goldens::gaussian_R1, 1e-10);
    // far tail through the tables: log R(x) ~ -x^2/2 - log(x sqrt(2 pi))
    double x = 30;
    CHECK(g.log_tail_right(x) == doctest::Approx(-x * x / 2 - std::log(x * std::sqrt(2 * std::numbers::pi)) +
                                                std::log1p(-1 / (x * x)))
                                     .epsilon(1e-6));
    auto h = Measure1D::heavy_tail(3.0);
    for (double a : {0.5, 10.0, 1e3, 1e5}) CHECK_REL(h.tail_right(a), 0.5 * std::pow(1 + a, -3.0), 1e-9);
    CHECK(std::fabs(h.median()) < 1e-12);
    auto e = Measure1D::custom([](double x) { return -x; }, {0, INFINITY}, true, 1.0);
    CHECK_REL(e.median(), std::log(2.0), 1e-10);
    for (double p : {1e-6, 0.1, 0.5, 0.9, 1 - 1e-6}) CHECK_REL(e.quantile(p), -std::log1p(-p), 1e-8);
    auto u = Measure1D::uniform(0, 1);
    CHECK_REL(u.mass(0.2, 0.7), 0.5, 1e-13);
    CHECK_REL(u.median(), 0.5, 1e-13);
    double lt = std::log(1e-40);
    CHECK_REL(h.log_tail_right(h.inverse_log_tail_right(lt)), lt, 1e-9);
}

TEST_CASE("functionals against closed forms") {
    auto u = Measure1D::uniform(0, 1);
    auto f = GridFunction::sample(u, [](double x) { return 1 + x * x; });
    CHECK_REL(variance_q(u, f, 0.5), goldens::uniform_variance_q_half, 1e-6);
    CHECK_REL(entropy_q(u, f, 0.5), goldens::uniform_entropy_q_half, 1e-6);
    auto id = GridFunction::sample(u, [](double x) { return x; });
    CHECK_REL(variance_q(u, id, 1.0), 1.0 / 12.0, 1e-12);
    auto c = GridFunction::sample(u, [](double) { return 3.0; });
    CHECK(variance_q(u, c, 0.5) < 1e-40);
    CHECK(entropy_q(u, c, 0.7) == doctest::Approx(0.0).epsilon(1e-30));

    auto leb = Measure1D::lebesgue(0, 1);
    CHECK_REL(dirichlet_energy(leb, id), 1.0, 1e-13);
    auto s = GridFunction::sample(u, [](double x) { return std::sin(2 * std::numbers::pi * x); });
    CHECK_REL(dirichlet_energy(leb, s), 2 * std::numbers::pi * std::numbers::pi, 1e-5);

    auto g = Measure1D::gaussian();
    auto gx = GridFunction::sample(g, [](double x) { return x + 10; });
    CHECK_REL(variance_q(g, gx, 1.0), 1.0, 1e-10);
    CHECK_REL(dirichlet_energy(g, gx), 1.0, 1e-10);
}

TEST_CASE("oscillation") {
    auto u = Measure1D::uniform(-1, 1);
    CHECK_REL(oscillation(u, GridFunction::sample(u, [](double x) { return x; })), 2.0, 1e-14);
    auto g = Measure1D::gaussian(1.0, TruncationSpec{6.0});
    CHECK(g.window().hi <= 6.0);
    CHECK(g.window().hi > 5.99);
    CHECK_REL(oscillation(g, GridFunction::sample(g, [](double x) { return x * x; })), 36.0, 1e-3);
    CHECK(oscillation(u, GridFunction::sample(u, [](double) { return 4.0; })) == 0.0);
}

TEST_CASE("entropy dominates variance of the square root") {
    // Ent(g^2) >= Var(g), so entropy_q >= variance_q for every q
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.1, 3.0);
    for (auto mu : {Measure1D::gaussian(), Measure1D::heavy_tail(6), Measure1D::uniform(0, 2)}) {
        for (int k = 0; k < 20; ++k) {
            double a = U(rng), b = U(rng), c = U(rng);
            auto f = GridFunction::sample(mu, [&](double x) { return a + b * std::fabs(std::sin(c * x)); });
            for (double q : {0.5, 0.75, 1.0}) CHECK(entropy_q(mu, f, q) >= variance_q(mu, f, q) * (1 - 1e-10));
        }
    }
}

TEST_CASE("measure errors") {
    CHECK_CODE(Measure1D::gaussian(0.0), ErrorCode::bad_params);
    CHECK_CODE(Measure1D::heavy_tail(-1.0), ErrorCode::bad_params);
    CHECK_CODE(Measure1D::uniform(1, 1), ErrorCode::bad_params);
    CHECK_CODE(Measure1D::custom([](double x) { return -std::log(std::hypot(1.0, x)); }, {-INFINITY, INFINITY}, true),
               ErrorCode::non_integrable_density);
    auto u = Measure1D::uniform(0, 1);
    CHECK_CODE(variance_q(u, GridFunction::sample(u, [](double x) { return x - 0.5; }), 0.5),
               ErrorCode::negative_input);
    CHECK_CODE(entropy_q(u, GridFunction::sample(u, [](double) { return 0.0; }), 0.5), ErrorCode::zero_mass);
    CHECK_CODE(variance_q(u, GridFunction::sample(u, [](double) { return 1.0; }), 1.5), ErrorCode::bad_params);
    CHECK(family_from_string("bertrand") == Family::bertrand);
    CHECK_CODE(family_from_string("cauchy"), ErrorCode::bad_params);
}
