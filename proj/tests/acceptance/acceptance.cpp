// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "lqineq/capacity.hpp"
#include "lqineq/constants.hpp"
#include "lqineq/criteria.hpp"
#include "lqineq/errors.hpp"
#include "lqineq/transforms.hpp"
#include "lqineq/wpme.hpp"

using namespace lqineq;

namespace {

// pinned tolerances and budgets
constexpr double kK = 11.0902, kKTol = 5e-4;
constexpr double kKappaTol = 1e-6;
constexpr double kCapRelTol = 1e-3;
constexpr int kCapGrid = 2000, kCondensers = 50;
constexpr double kSlopeTol = 0.05, kLogExpTol = 0.15;
constexpr double kHierarchySlack = 1e-8;
constexpr double kOuRateLo = 1.95, kOuRateHi = 2.15, kMassDrift = 1e-10;
constexpr double kEnvelopeSlack = 1e-6;
constexpr double kContraction = 1e-9, kRefineFactor = 3.0;
constexpr double kMachine = 4 * 2.220446049250313e-16;
constexpr double kConcentrationSlack = 0.1;

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs <= budget_s;
    bool ok = o.pass && in_time;
    if (!ok) ++failures;
    std::printf("%s criterion %2d: %s | %s | %.2f s (budget %.0f s%s)\n", ok ? "PASS" : "FAIL", id, title,
                o.detail.c_str(), secs, budget_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ------------------------------------------------------------------ 1
Outcome constants() {
    double K = constant_K();
    bool ok = std::fabs(K - kK) <= kKTol;
    double worst = 0;
    for (double q : {0.5, 0.6, 0.75}) {
        // independent grid scan with local refinement
        double lo = 1e-6, hi = 1 - 1e-6, best = INFINITY, arg = lo;
        for (int round = 0; round < 6; ++round) {
            for (int i = 0; i <= 4000; ++i) {
                double r = lo + (hi - lo) * i / 4000;
                double v = kappa_P_objective(q, r);
                if (v < best) best = v, arg = r;
            }
            double w = (hi - lo) / 2000;
            lo = std::max(1e-6, arg - w);
            hi = std::min(1 - 1e-6, arg + w);
        }
        double rel = std::fabs(kappa_P(q).value - best) / best;
        worst = std::max(worst, rel);
    }
    ok = ok && worst <= kKappaTol;
    return {ok, fmt("K = %.10f, worst kappa_P scan disagreement %.2e", K, worst)};
}

// ------------------------------------------------------------------ 2
Outcome capacity_oracle() {
    std::vector<Measure1D> fams{Measure1D::gaussian(),       Measure1D::exp_power(0.5), Measure1D::exp_power(1.0),
                                Measure1D::heavy_tail(3),    Measure1D::heavy_tail(6),  Measure1D::bertrand(2, 3.5),
                                Measure1D::uniform(-1, 2)};
    std::vector<TailProfile> tails;
    for (const auto& m : fams) tails.emplace_back(m, m);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0;
    int inf_sides = 0;
    for (int k = 0; k < kCondensers; ++k) {
        const auto& mu = fams[static_cast<std::size_t>(k) % fams.size()];
        const auto& t = tails[static_cast<std::size_t>(k) % fams.size()];
        std::vector<double> p(4);
        for (double& v : p) v = mu.quantile(0.02 + 0.96 * U(rng));
        std::sort(p.begin(), p.end());
        if (p[1] == p[0] || p[3] == p[2]) {
            --k;
            continue;
        }
        Interval B{p[0], p[3]};
        // every fifth condenser leaves one side of B open
        if (k % 5 == 4) {
            (k % 2 ? B.hi : B.lo) = k % 2 ? INFINITY : -INFINITY;
            ++inf_sides;
        }
        Interval A{p[1], p[2]};
        double closed = cap_interval(t, A, B).value();
        double var = cap_variational(mu, {{A}, B}, kCapGrid).value();
        worst = std::max(worst, std::fabs(var - closed) / closed);
    }
    return {worst <= kCapRelTol,
            fmt("%.0f condensers (%.0f half-open), worst relative gap %.2e", kCondensers, inf_sides, worst)};
}

// ------------------------------------------------------------------ 3
Outcome hardy_table() {
    struct Row {
        const char* name;
        Measure1D mu;
        double q;
        bool poincare, lsi;
    };
    std::vector<Row> rows{
        {"heavy_tail(3)", Measure1D::heavy_tail(3), 0.5, true, true},
        {"heavy_tail(2)", Measure1D::heavy_tail(2), 0.5, false, false},
        {"heavy_tail(6)", Measure1D::heavy_tail(6), 2.0 / 3.0, true, true},
        {"heavy_tail(4)", Measure1D::heavy_tail(4), 2.0 / 3.0, false, false},
        {"bertrand(2,2)", Measure1D::bertrand(2, 2), 0.5, true, false},
        {"bertrand(2,3.5)", Measure1D::bertrand(2, 3.5), 0.5, true, true},
        {"bertrand(4,2)", Measure1D::bertrand(4, 2), 2.0 / 3.0, true, false},
        {"bertrand(4,3.5)", Measure1D::bertrand(4, 3.5), 2.0 / 3.0, true, true},
    };
    int right = 0, total = 0;
    std::string wrong;
    for (const auto& r : rows) {
        TailProfile t(r.mu, r.mu);
        bool p = hardy_check_poincare(t, r.q).verdict == Verdict::satisfied;
        bool l = hardy_check_lsi(t, r.q).verdict == Verdict::satisfied;
        total += 2;
        right += (p == r.poincare) + (l == r.lsi);
        if (p != r.poincare || l != r.lsi) wrong += std::string(" ") + r.name;
    }
    return {right == total, fmt("%.0f/%.0f verdicts as expected", right, total) + (wrong.empty() ? "" : ", wrong:" + wrong)};
}

// ------------------------------------------------------------------ 4
Outcome rate_exponents() {
    auto h = Measure1D::heavy_tail(4);
    TailProfile th(h, h);
    auto b = weak_poincare_from_tails(th, dyadic_s_grid());
    std::vector<double> x, y;
    for (std::size_t i = 0; i < b.s.size(); ++i)
        if (b.s[i] <= 1e-20) {
            x.push_back(std::log(b.s[i]));
            y.push_back(b.log_value[i]);
        }
    double slope = ls_slope(x, y);
    auto e = Measure1D::exp_power(0.5);
    TailProfile te(e, e);
    auto w = weak_lsi_from_capacity(te, dyadic_s_grid());
    x.clear();
    y.clear();
    for (std::size_t i = 0; i < w.s.size(); ++i)
        if (w.s[i] <= 1e-10) {
            x.push_back(std::log(-std::log(w.s[i])));
            y.push_back(w.log_value[i]);
        }
    double lexp = ls_slope(x, y);
    bool ok = std::fabs(slope + 0.5) <= kSlopeTol * 0.5 && std::fabs(lexp - 3.0) <= kLogExpTol * 3.0;
    return {ok, fmt("beta_WP slope %.5f (target -0.5), h_WLS log exponent %.4f (target 3)", slope, lexp)};
}

// ------------------------------------------------------------------ 5
Outcome hierarchy() {
    std::vector<double> qs{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int violations = 0, checked = 0;
    double worst = -INFINITY;
    for (auto mu : {Measure1D::gaussian(), Measure1D::heavy_tail(6)}) {
        for (int k = 0; k < 100; ++k) {
            std::vector<double> kx, ky;
            for (int j = 0; j < 10; ++j) {
                kx.push_back(mu.quantile(0.01 + 0.98 * j / 9.0));
                ky.push_back(0.01 + 5 * U(rng));
            }
            auto f = GridFunction::sample(mu, [&](double xx) {
                if (xx <= kx.front()) return ky.front();
                if (xx >= kx.back()) return ky.back();
                std::size_t i = 0;
                while (xx > kx[i + 1]) ++i;
                double t = (xx - kx[i]) / (kx[i + 1] - kx[i]);
                return (1 - t) * ky[i] + t * ky[i + 1];
            });
            double prev = variance_q(mu, f, qs[0]);
            for (std::size_t i = 1; i < qs.size(); ++i) {
                double v = variance_q(mu, f, qs[i]);
                ++checked;
                worst = std::max(worst, prev - v);
                if (prev > v + kHierarchySlack) ++violations;
                prev = v;
            }
        }
    }
    return {violations == 0, fmt("%.0f comparisons, %.0f violations, largest decrease %.2e", checked, violations, worst)};
}

// ------------------------------------------------------------------ 6
Outcome sandwich() {
    int bad = 0;
    std::string detail;
    for (auto mu : {Measure1D::gaussian(), Measure1D::heavy_tail(6)}) {
        TailProfile t(mu, mu);
        double lo = *cp_lower_trial(mu, mu, 0.5, TrialSet{}, 42).estimate.lower;
        double up = *cp_upper(t, 0.5).upper;
        double weak = *cp_upper_from_weak(weak_poincare_from_tails(t, dyadic_s_grid()), 0.5).upper;
        double cap = std::pow(2.0, 1 / 0.5) * up;
        double seq = 0;
        std::vector<double> right{t.median()}, left{t.median()};
        for (int k = -3; k <= 6; ++k) {
            right.push_back(t.median() + std::ldexp(1.0, k));
            left.push_back(t.median() - std::ldexp(1.0, k));
            seq = std::max({seq, beta_P_sequence_value(t, Side::right, right, 0.5),
                            beta_P_sequence_value(t, Side::left, left, 0.5)});
        }
        bad += !(lo <= up) + !(lo <= weak) + !(seq <= cap);
        detail += fmt("[lower %.4g, upper %.4g, weak %.4g", lo, up, weak) + fmt(", sequence %.4g <= %.4g] ", seq, cap);
    }
    return {bad == 0, detail};
}

double fitted_rate(const DecayTrace& tr) {
    std::vector<double> y;
    for (double v : tr.variance) y.push_back(std::log(v));
    return -ls_slope(tr.times, y);
}

// ------------------------------------------------------------------ 7
Outcome ou_decay() {
    auto pb = discretize([](double x) { return 0.5 * x * x; }, 1, {-6, 6}, 401,
                         [](double x) { return 1 + 0.5 * std::tanh(x); });
    RunOptions ro;
    ro.T = 2;
    ro.dt = 1e-3;
    auto tr = run(pb, ro);
    double rate = fitted_rate(tr);
    double drift = 0;
    for (double m : tr.mass) drift = std::max(drift, std::fabs(m - tr.mass.front()) / tr.mass.front());
    return {rate >= kOuRateLo && rate <= kOuRateHi && drift <= kMassDrift,
            fmt("fitted rate %.5f, relative mass drift %.2e", rate, drift)};
}

// ------------------------------------------------------------------ 8
Outcome wpme_envelope() {
    auto u = Measure1D::uniform(0, 1);
    TailProfile t(u, u);
    const double m = 2;
    auto cp = cp_upper(t, 2 / (m + 1));
    auto cls = cls_upper_from_weak(weak_lsi_from_capacity(t, dyadic_s_grid()), 1 / m);
    auto pb = discretize([](double) { return 0.0; }, m, {0, 1}, 200,
                         [](double x) { return 1 + 0.9 * std::cos(std::numbers::pi * x); });
    RunOptions ro;
    ro.T = 10;
    ro.dt = 0.01;
    for (int k = 0; k < 200; ++k) ro.sample_times.push_back(ro.T * (k + 1) / 200.0);
    ro.sample_times.insert(ro.sample_times.begin(), 0.0);
    ro.C_P = cp;
    ro.C_LS = cls;
    auto tr = run(pb, ro);
    double rv = 0, re = 0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        rv = std::max(rv, tr.variance[i] / tr.envelope_var[i]);
        re = std::max(re, tr.entropy[i] / tr.envelope_ent[i]);
    }
    bool ok = tr.times.size() == 201 && rv <= 1 + kEnvelopeSlack && re <= 1 + kEnvelopeSlack;
    return {ok, fmt("C_P %.5g, C_LS %.5g, max Var/envelope %.9f", *cp.upper, *cls.upper, rv) +
                    fmt(", max Ent/envelope %.9f over %.0f samples", re, static_cast<double>(tr.times.size()))};
}

// ------------------------------------------------------------------ 9
Outcome structure() {
    // contraction over 20 random pairs on the heavy-tail potential, in parallel
    auto psi = [](double x) { return 5 * std::log1p(std::fabs(x)); };
    const int pairs = 20;
    std::vector<double> viol(pairs, 0), order(pairs, 0);
    std::vector<std::thread> pool;
    for (int k = 0; k < pairs; ++k)
        pool.emplace_back([&, k] {
            std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(k));
            std::uniform_real_distribution<double> U(0.0, 1.0);
            double a1 = U(rng), f1 = 0.2 + 2 * U(rng), a2 = U(rng), f2 = 0.2 + 2 * U(rng), lift = 0.05 + 0.5 * U(rng);
            auto u = [=](double x) { return 1 + 0.5 * a1 * std::sin(f1 * x); };
            auto v = [=](double x) { return 1 + 0.5 * a2 * std::sin(f2 * x + 1); };
            RunOptions ro;
            ro.T = 1;
            ro.dt = 0.01;
            ro.keep_states = true;
            auto tu = run(discretize(psi, 2, {-10, 10}, 200, u), ro);
            auto tv = run(discretize(psi, 2, {-10, 10}, 200, v), ro);
            viol[static_cast<std::size_t>(k)] = check_contraction(tu, tv).max_violation;
            // ordered pair: v + lift >= u pointwise at t = 0
            auto tw = run(discretize(psi, 2, {-10, 10}, 200, [=](double x) { return u(x) + lift; }), ro);
            auto c = check_contraction(tu, tw);
            order[static_cast<std::size_t>(k)] = *std::max_element(c.positive_part.begin(), c.positive_part.end());
        });
    for (auto& th : pool) th.join();
    double vmax = *std::max_element(viol.begin(), viol.end());
    double omax = *std::max_element(order.begin(), order.end());

    // identity residuals under simultaneous (dt, dx) halving
    std::vector<double> en, di;
    for (int level = 0; level < 3; ++level) {
        int n = 50 << level;
        auto pb = discretize([](double x) { return 0.5 * x * x; }, 2, {-4, 4}, n,
                             [](double x) { return 1 + 0.5 * std::tanh(x); });
        RunOptions ro;
        ro.T = 0.5;
        ro.dt = 0.01 / (1 << level);
        ro.step.theta = 0.5;
        auto tr = run(pb, ro);
        en.push_back(energy_identity_residual(tr));
        di.push_back(dissipation_identity_residual(tr));
    }
    double fe = std::min(en[0] / en[1], en[1] / en[2]);
    double fd = std::min(di[0] / di[1], di[1] / di[2]);
    bool ok = vmax <= kContraction && omax <= kContraction && fe >= kRefineFactor && fd >= kRefineFactor;
    return {ok, fmt("contraction violation %.2e, ordering violation %.2e", vmax, omax) +
                    fmt(", refinement factors energy %.2f dissipation %.2f", fe, fd)};
}

// ------------------------------------------------------------------ 10
Outcome endpoint() {
    auto lf = [](double x) { return std::log(std::hypot(1.0, x)); };
    const double q = 0.5, exponent = 2 * q / (1 - q);
    auto h2 = Measure1D::heavy_tail(2);
    auto m = orlicz_moment(TailProfile(h2, h2), lf, exponent);
    auto h3 = Measure1D::heavy_tail(3);
    auto c = orlicz_moment(TailProfile(h3, h3), lf, exponent);
    std::string why = m.right.divergent ? m.right.series.diagnostic : m.left.series.diagnostic;
    return {m.divergent && !c.divergent,
            std::string(m.divergent ? "heavy_tail(2) moment divergent (" + why + ")" : "heavy_tail(2) moment finite") +
                fmt(", heavy_tail(3) control %.6f", std::exp(c.log_value))};
}

// ------------------------------------------------------------------ 11
Outcome transforms() {
    bool exact = perturb_constant(1.0, std::log(2.0), 0.5) == 4.0 && perturb_constant(2.5, 0.0, 0.7) == 2.5 &&
                 tensor_constant({1.0, 3.0}, 0.5) == 6.0 && tensor_constant({7.0}, 0.4) == 7.0 &&
                 std::fabs(perturb_constant(1.0, 1.0, 1.0) - std::exp(1.0)) <= kMachine * std::exp(1.0) &&
                 std::fabs(tensor_constant({1.0, 2.0, 2.0}, 0.5) - 6.0) <= kMachine * 6.0;

    std::vector<double> tg;
    for (int k = 0; k <= 500; ++k) tg.push_back(std::pow(10.0, 0.02 * k));
    int passing = 0, consistent = 0;
    double worst_margin = INFINITY;
    for (double q : {0.5, 0.6, 2.0 / 3.0}) {
        double need = 2 * q / (1 - q);
        for (double a : {3.0, 5.0, 6.0, 8.0}) {
            auto mu = Measure1D::heavy_tail(a);
            TailProfile t(mu, mu);
            if (hardy_check_poincare(t, q).verdict != Verdict::satisfied) continue;
            ++passing;
            auto f = GridFunction::sample(mu, [](double x) { return 1 + std::fabs(x); });
            auto fit = empirical_tail_exponent(mu, f, tg);
            double margin = std::fabs(fit.slope) - (need - kConcentrationSlack);
            worst_margin = std::min(worst_margin, margin);
            consistent += margin >= 0;
        }
    }
    auto g = Measure1D::gaussian();
    auto gf = empirical_tail_exponent(g, GridFunction::sample(g, [](double x) { return 1 + std::fabs(x); }), tg);
    ++passing;
    consistent += gf.saturated || std::fabs(gf.slope) >= 2 - kConcentrationSlack;
    return {exact && consistent == passing,
            std::string(exact ? "closed forms exact" : "closed forms inexact") +
                fmt(", %.0f/%.0f passing families consistent, worst slope margin %.3f", consistent, passing,
                    worst_margin)};
}

}  // namespace

int main() {
    criterion(1, "constants", 1, constants);
    criterion(2, "capacity oracle equivalence", 30, capacity_oracle);
    criterion(3, "Hardy classification table", 60, hardy_table);
    criterion(4, "rate-function exponents", 60, rate_exponents);
    criterion(5, "hierarchy in q", 20, hierarchy);
    criterion(6, "sandwich ordering", 60, sandwich);
    criterion(7, "OU variance decay", 30, ou_decay);
    criterion(8, "WPME decay envelopes", 60, wpme_envelope);
    criterion(9, "contraction, comparison and identity refinement", 120, structure);
    criterion(10, "endpoint Orlicz moment", 10, endpoint);
    criterion(11, "perturbation, tensorization, concentration", 30, transforms);
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
