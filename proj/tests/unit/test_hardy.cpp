#include <cmath>

#include "common.hpp"
#include "lqineq/criteria.hpp"

using namespace lqineq;

namespace {
Verdict poincare(const Measure1D& mu, double q) { return hardy_check_poincare(TailProfile(mu, mu), q).verdict; }
Verdict lsi(const Measure1D& mu, double q) { return hardy_check_lsi(TailProfile(mu, mu), q).verdict; }
}  // namespace

TEST_CASE("heavy tail thresholds") {
    // satisfied iff alpha > 2q/(1-q)
    CHECK(poincare(Measure1D::heavy_tail(3), 0.5) == Verdict::satisfied);
    CHECK(poincare(Measure1D::heavy_tail(2), 0.5) == Verdict::inconclusive_divergent);
    CHECK(poincare(Measure1D::heavy_tail(6), 2.0 / 3.0) == Verdict::satisfied);
    CHECK(poincare(Measure1D::heavy_tail(4), 2.0 / 3.0) == Verdict::inconclusive_divergent);
    CHECK(poincare(Measure1D::heavy_tail(1.5), 0.5) == Verdict::inconclusive_divergent);
}

TEST_CASE("light tails satisfy both criteria") {
    CHECK(poincare(Measure1D::gaussian(), 0.75) == Verdict::satisfied);
    CHECK(lsi(Measure1D::gaussian(), 0.75) == Verdict::satisfied);
    CHECK(lsi(Measure1D::exp_power(0.5), 0.5) == Verdict::satisfied);
    CHECK(poincare(Measure1D::uniform(0, 1), 0.9) == Verdict::satisfied);
    auto r = hardy_check_poincare(TailProfile(Measure1D::gaussian(), Measure1D::gaussian()), 0.5);
    CHECK(r.right.quad_rel_error < 1e-6);
    CHECK(std::isfinite(r.right.log_value));
}

TEST_CASE("log-corrected tails at the critical exponent") {
    auto b2 = Measure1D::bertrand(2, 2);
    CHECK(poincare(b2, 0.5) == Verdict::satisfied);
    CHECK(lsi(b2, 0.5) == Verdict::inconclusive_divergent);
    auto b35 = Measure1D::bertrand(2, 3.5);
    CHECK(poincare(b35, 0.5) == Verdict::satisfied);
    CHECK(lsi(b35, 0.5) == Verdict::satisfied);
    auto c = Measure1D::bertrand(4, 3.5);
    CHECK(poincare(c, 2.0 / 3.0) == Verdict::satisfied);
    CHECK(lsi(c, 2.0 / 3.0) == Verdict::satisfied);
    CHECK(lsi(Measure1D::bertrand(4, 2), 2.0 / 3.0) == Verdict::inconclusive_divergent);
}

TEST_CASE("a criterion passing at q passes at every smaller q") {
    std::vector<Measure1D> fams{Measure1D::heavy_tail(3),   Measure1D::heavy_tail(5), Measure1D::heavy_tail(9),
                                Measure1D::bertrand(2, 3.5), Measure1D::exp_power(0.5)};
    std::vector<double> qs{0.5, 0.6, 2.0 / 3.0, 0.75, 0.8};
    for (const auto& mu : fams) {
        TailProfile t(mu, mu);
        bool passed = false;
        for (std::size_t i = qs.size(); i-- > 0;) {
            bool ok = hardy_check_poincare(t, qs[i]).verdict == Verdict::satisfied;
            if (passed) CHECK(ok);
            passed = passed || ok;
        }
    }
}

TEST_CASE("moments of the endpoint function") {
    auto lf = [](double x) { return std::log(std::hypot(1.0, x)); };
    auto h2 = Measure1D::heavy_tail(2);
    auto m = orlicz_moment(TailProfile(h2, h2), lf, 2.0);
    CHECK(m.divergent);
    auto h3 = Measure1D::heavy_tail(3);
    auto m3 = orlicz_moment(TailProfile(h3, h3), lf, 2.0);
    CHECK_FALSE(m3.divergent);
    // E(1+x^2) under heavy_tail(3) = 1 + 3 * int_0^inf x^2 (1+x)^{-4} dx = 1 + 3 B(3,1)
    CHECK_REL(std::exp(m3.log_value), 2.0, 1e-6);
    CHECK_CODE(hardy_check_poincare(TailProfile(h3, h3), 1.0), ErrorCode::bad_params);
}
