#include <algorithm>
#include <cmath>

#include "lqineq/capacity.hpp"
#include "lqineq/criteria.hpp"
#include "lqineq/errors.hpp"

namespace lqineq {

using quad::log_add;
using quad::neg_inf;

const char* to_string(RateKind k) {
    switch (k) {
        case RateKind::beta_WP: return "beta_WP";
        case RateKind::h_WLS: return "h_WLS";
        case RateKind::gamma: return "gamma";
    }
    return "unknown";
}

double RateFunction::value(std::size_t i) const { return std::exp(log_value.at(i)); }

std::vector<double> dyadic_s_grid(int per_octave, int octaves) {
    require(per_octave >= 1 && octaves >= 2 && octaves <= 1020, ErrorCode::bad_params, "bad dyadic grid");
    std::vector<double> s;
    for (int j = per_octave * octaves; j > per_octave; --j) s.push_back(std::exp2(-static_cast<double>(j) / per_octave));
    return s;
}

namespace {

void check_grid(const std::vector<double>& s) {
    require(!s.empty(), ErrorCode::bad_params, "empty s grid");
    for (std::size_t i = 0; i < s.size(); ++i) {
        require(s[i] > 0 && s[i] < 0.5, ErrorCode::bad_params, "s grid must lie in (0, 1/2)");
        if (i > 0) require(s[i] > s[i - 1], ErrorCode::bad_params, "s grid must increase");
    }
}

// smallest log-tail the tables can invert on each side
double log_resolution(const TailProfile& t, Side side) {
    const Measure1D& mu = t.mu();
    double end = side == Side::right ? mu.log_right_nodes().back() : mu.log_left_nodes().front();
    return end - mu.log_Z();
}

// log of the two-sided max of res(tail^{-1}(e^{log_t})); false when the tables cannot resolve it
bool two_sided(const TailProfile& t, double log_t, double& out) {
    double best = neg_inf;
    for (Side side : {Side::right, Side::left}) {
        if (log_t <= log_resolution(t, side) + 1e-12) return false;
        double a = t.inverse_tail(side, log_t);
        best = std::max(best, t.log_res(side, a));
    }
    out = best;
    return true;
}

RateFunction finish(RateKind kind, std::vector<double> s, std::vector<double> raw) {
    require(!s.empty(), ErrorCode::inversion_failure, "tail tables cannot resolve any point of the s grid");
    RateFunction r{kind, std::move(s), std::move(raw), {}, true, 0.0, 0.0};
    std::size_t n = r.s.size();
    r.log_value = r.log_raw;
    for (std::size_t i = n - 1; i-- > 0;) r.log_value[i] = std::max(r.log_raw[i], r.log_value[i + 1]);
    for (std::size_t i = 0; i < n; ++i) {
        double lift = -std::expm1(r.log_raw[i] - r.log_value[i]);
        if (lift > 0) r.monotone = false;
        r.envelope_deviation = std::max(r.envelope_deviation, lift);
    }
    r.s_min_resolved = r.s.front();
    return r;
}

}  // namespace

RateFunction weak_poincare_from_tails(const TailProfile& tails, const std::vector<double>& s_grid) {
    check_grid(s_grid);
    double lk = std::log(constant_K());
    std::vector<double> s, raw;
    for (double si : s_grid) {
        double ls = std::log(si), v;
        if (!two_sided(tails, ls, v)) continue;
        s.push_back(si);
        raw.push_back(lk + ls + v);
    }
    return finish(RateKind::beta_WP, std::move(s), std::move(raw));
}

RateFunction weak_lsi_from_capacity(const TailProfile& tails, const std::vector<double>& s_grid) {
    check_grid(s_grid);
    std::vector<double> s, raw;
    for (double si : s_grid) {
        double ls = std::log(si), v;
        // h(s) = s / psi(2s): the half-line capacity at mu-mass w^{-1}(2s)
        double ltau = log_w_inverse(std::log(2.0) + ls);
        if (!two_sided(tails, ltau, v)) continue;
        s.push_back(si);
        raw.push_back(ls + v);
    }
    return finish(RateKind::h_WLS, std::move(s), std::move(raw));
}

SideIntegral rate_power_integral(const RateFunction& rate, double p, double upper) {
    require(p > 0 && upper > 0 && upper < 0.5, ErrorCode::bad_params, "bad rate integral request");
    const auto& s = rate.s;
    const auto& y = rate.log_value;
    require(s.size() >= 2 && s.back() >= upper, ErrorCode::bad_params, "rate samples must reach the upper limit");
    SideIntegral out;
    int k_first = static_cast<int>(std::floor(-std::log2(upper)));
    int k_last = static_cast<int>(std::floor(-std::log2(s.front())));
    std::vector<double> wsum(static_cast<std::size_t>(k_last - k_first + 1), neg_inf);

    // exact integral of exp(a + c (L - L0)) over L in [L0, L0 + D], in log form
    auto piece = [](double a, double c, double D) {
        double cd = c * D;
        if (std::fabs(cd) < 1e-12) return a + std::log(D);
        if (cd > 30) return a + cd + std::log1p(-std::exp(-cd)) - std::log(c);
        return a + std::log(std::expm1(cd) / c);
    };
    double lup = std::log(upper);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        double L0 = std::log(s[i]), L1 = std::log(s[i + 1]);
        if (L0 >= lup) break;
        double y0 = p * y[i], y1 = p * y[i + 1];
        double slope = (y1 - y0) / (L1 - L0);
        double hi = std::min(L1, lup);
        // integrand in L carries the ds = s dL factor
        double lv = piece(y0 + L0, slope + 1, hi - L0);
        double mid = std::exp(0.5 * (L0 + hi));
        int k = std::clamp(static_cast<int>(std::floor(-std::log2(mid))), k_first, k_last);
        std::size_t idx = static_cast<std::size_t>(k - k_first);
        wsum[idx] = log_add(wsum[idx], lv);
    }
    for (int k = k_first; k <= k_last; ++k) {
        double lo = std::ldexp(1.0, -k - 1), hi = std::ldexp(1.0, -k);
        bool complete = lo >= s.front() && hi <= upper;
        out.windows.push_back({k, lo, hi, wsum[static_cast<std::size_t>(k - k_first)], complete});
    }
    out.series = classify_windows(out.windows, false);
    out.divergent = out.series.divergent;
    out.log_value = out.divergent ? INFINITY : log_add(out.series.log_total, out.series.log_tail_estimate);
    return out;
}

}  // namespace lqineq
