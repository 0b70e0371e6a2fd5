#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lqineq/criteria.hpp"
#include "lqineq/errors.hpp"

namespace lqineq {

using quad::neg_inf;

const char* to_string(ConstantName n) {
    switch (n) {
        case ConstantName::C_P: return "C_P";
        case ConstantName::C_LS: return "C_LS";
        case ConstantName::C_OP: return "C_OP";
        case ConstantName::beta_P: return "beta_P";
        case ConstantName::beta_LS: return "beta_LS";
    }
    return "unknown";
}

void ConstantEstimate::validate() const {
    require(q > 0 && q <= 1, ErrorCode::bad_params, "estimate q must lie in (0,1]");
    if (lower && upper && *lower > *upper) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: lower bound %.17g exceeds upper bound %.17g", to_string(name), *lower,
                      *upper);
        fail(ErrorCode::bad_params, buf);
    }
}

ConstantEstimate merge(const ConstantEstimate& a, const ConstantEstimate& b) {
    require(a.name == b.name && a.q == b.q, ErrorCode::bad_params, "merging estimates of different constants");
    ConstantEstimate out = a;
    if (b.lower && (!out.lower || *b.lower > *out.lower)) {
        out.lower = b.lower;
        out.provenance_lower = b.provenance_lower;
    }
    if (b.upper && (!out.upper || *b.upper < *out.upper)) {
        out.upper = b.upper;
        out.provenance_upper = b.provenance_upper;
    }
    out.diagnostics.insert(out.diagnostics.end(), b.diagnostics.begin(), b.diagnostics.end());
    out.validate();
    return out;
}

namespace {

std::string fmt(const char* f, double a, double b = 0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

void check_q_half(double q) { require(q >= 0.5 && q < 1, ErrorCode::bad_params, "q must lie in [1/2, 1)"); }

}  // namespace

ConstantEstimate beta_P_upper(const TailProfile& tails, double q) {
    check_q_half(q);
    ConstantEstimate est{ConstantName::beta_P, q, std::nullopt, std::nullopt, "", "", {}};
    HardyReport h = hardy_check_poincare(tails, q);
    double p = q / (1 - q);
    double best = neg_inf;
    bool divergent = false;
    for (const SideIntegral* si : {&h.right, &h.left}) {
        const char* name = si == &h.right ? "right" : "left";
        if (si->divergent) {
            divergent = true;
            est.diagnostics.push_back(std::string("profile norm diverges on the ") + name + " side: " +
                                      si->series.diagnostic);
            continue;
        }
        if (si->quad_rel_error > 0.01)
            fail(ErrorCode::profile_unavailable, fmt("relative quadrature error %.3g exceeds 1%%", si->quad_rel_error));
        best = std::max(best, (si->log_value - std::log1p(-q)) / p);
        est.diagnostics.push_back(std::string(name) + " side: " + si->series.diagnostic);
    }
    if (!divergent && std::isfinite(best)) {
        est.upper = std::exp(best);
        est.provenance_upper =
            "(1-q)^{-(1-q)/q} ||t/Phi(t)||_{L^{q/(1-q)}} per side, Phi over half-lines past the median, "
            "evaluated as the Hardy integral of (rR)^{q/(1-q)} d mu";
    }
    return est;
}

ConstantEstimate cp_upper(const TailProfile& tails, double q) {
    ConstantEstimate b = beta_P_upper(tails, q);
    ConstantEstimate est{ConstantName::C_P, q, std::nullopt, std::nullopt, "", "", b.diagnostics};
    if (!b.upper) return est;
    KappaResult k = kappa_P(q);
    est.upper = k.value * *b.upper;
    est.provenance_upper = "kappa_P(q) * beta_P upper bound; " + b.provenance_upper;
    if (k.at_boundary)
        est.diagnostics.push_back(fmt("kappa_P infimum at the clamp rho=%.9g (value %.12g)", k.rho, k.value));
    return est;
}

ConstantEstimate cp_upper_from_weak(const RateFunction& rate, double q) {
    check_q_half(q);
    require(rate.kind == RateKind::beta_WP, ErrorCode::bad_params, "cp_upper_from_weak needs a beta_WP rate");
    double p = q / (1 - q);
    SideIntegral I = rate_power_integral(rate, p, 0.125);
    if (I.divergent) fail(ErrorCode::norm_divergent, "rate norm diverges: " + I.series.diagnostic);
    ConstantEstimate est{ConstantName::C_P, q, std::nullopt, std::nullopt, "", "", {I.series.diagnostic}};
    double tail_frac = std::exp(I.series.log_tail_estimate - I.log_value);
    if (tail_frac > 0.01) est.diagnostics.push_back(fmt("unresolved tail is %.3g of the norm", tail_frac));
    KappaResult k = kappa_P(q);
    // ||beta(./4)||_{L^p(0,1/2)}^p = 4 * int_0^{1/8} beta^p
    double log_norm = (std::log(4.0) + I.log_value) / p;
    double log_c = std::log(k.value) + (std::log(4.0) - std::log1p(-q)) / p + log_norm;
    est.upper = std::exp(log_c);
    est.provenance_upper =
        "kappa_P (4/(1-q))^{(1-q)/q} ||beta_WP(./4)||_{L^{q/(1-q)}(0,1/2)}, read as a bound on C_P; "
        "beta_WP = K max(s r(R^{-1}(s)), s ell(L^{-1}(s)))";
    if (k.at_boundary) est.diagnostics.push_back(fmt("kappa_P infimum at the clamp rho=%.9g", k.rho));
    return est;
}

ConstantEstimate cls_upper_from_weak(const RateFunction& rate, double q) {
    check_q_half(q);
    require(rate.kind == RateKind::h_WLS, ErrorCode::bad_params, "cls_upper_from_weak needs an h_WLS rate");
    double p = q / (1 - q);
    double c = constant_c_ls();
    SideIntegral I = rate_power_integral(rate, p, 0.5 * c);
    if (I.divergent) fail(ErrorCode::norm_divergent, "rate norm diverges: " + I.series.diagnostic);
    ConstantEstimate est{ConstantName::C_LS, q, std::nullopt, std::nullopt, "", "", {I.series.diagnostic}};
    double tail_frac = std::exp(I.series.log_tail_estimate - I.log_value);
    if (tail_frac > 0.01) est.diagnostics.push_back(fmt("unresolved tail is %.3g of the norm", tail_frac));
    // int_0^{1/2} h(ct)^p dt = (1/c) int_0^{c/2} h^p
    KappaResult k = kappa_LS(q, KappaLsForm::with_gradient);
    double log_c = std::log(k.value) + (std::log(4.0) - std::log1p(-q) + I.log_value - std::log(c)) / p;
    est.upper = std::exp(log_c);
    est.provenance_upper =
        "kappa_LS (4/(1-q) int_0^{1/2} h_WLS(ct)^{q/(1-q)} dt)^{(1-q)/q} with c = log2/(2 log(1+2e^2)); "
        "kappa_LS keeps the (1-rho)^{-2} gradient factor";
    est.diagnostics.push_back(fmt("kappa_LS = %.12g at rho=%.9g", k.value, k.rho));
    return est;
}

double beta_P_sequence_value(const TailProfile& tails, Side side, const std::vector<double>& pts, double q) {
    require(q > 0 && q < 1, ErrorCode::bad_params, "q must lie in (0,1)");
    require(pts.size() >= 2, ErrorCode::bad_params, "sequence needs at least two sets");
    double m = tails.median();
    double sgn = side == Side::right ? 1.0 : -1.0;
    const auto& xs = tails.mu().nodes();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        // past the tables the tail is only known as a remainder bound
        require(pts[i] >= xs.front() && pts[i] <= xs.back(), ErrorCode::out_of_range,
                "sequence point lies beyond the tail tables");
        require(sgn * (pts[i] - m) >= 0, ErrorCode::bad_params, "sequence must lie past the median");
        if (i > 0) require(sgn * (pts[i] - pts[i - 1]) > 0, ErrorCode::bad_params, "sets must be strictly nested");
    }
    double p = q / (1 - q);
    double total = neg_inf;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double lmass = tails.log_tail(side, pts[i]);
        double lres = side == Side::right ? tails.log_resistance(pts[i - 1], pts[i])
                                          : tails.log_resistance(pts[i], pts[i - 1]);
        total = quad::log_add(total, lmass / (1 - q) + p * lres);
    }
    return std::exp(total / p);
}

}  // namespace lqineq
