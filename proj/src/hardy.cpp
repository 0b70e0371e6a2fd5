#include <algorithm>
#include <cmath>

#include "lqineq/criteria.hpp"
#include "lqineq/errors.hpp"

namespace lqineq {

using quad::log_add;
using quad::neg_inf;

const char* to_string(HardyKind k) { return k == HardyKind::poincare ? "poincare" : "lsi"; }
const char* to_string(Verdict v) { return v == Verdict::satisfied ? "satisfied" : "inconclusive-divergent"; }

namespace {
constexpr int k_min = -20;
}

SideIntegral side_integral(const TailProfile& tails, Side side,
                           const std::function<double(double, double, double, double)>& log_integrand) {
    SideIntegral out;
    const SideSamples& S = tails.samples(side);
    const Measure1D& mu = tails.mu();
    double m = tails.median();
    bool bounded = side == Side::right ? std::isfinite(mu.support().hi) : std::isfinite(mu.support().lo);
    double max_dist = side == Side::right ? mu.nodes().back() - m : m - mu.nodes().front();
    if (S.size() == 0 || !(max_dist > 0)) {
        out.log_value = neg_inf;
        out.series.log_total = neg_inf;
        out.series.log_tail_estimate = neg_inf;
        out.series.diagnostic = "empty side";
        return out;
    }
    int k_max = static_cast<int>(std::floor(std::log2(max_dist)));
    k_max = std::max(k_max, k_min);
    int nw = k_max - k_min + 2;
    std::vector<double> wsum(static_cast<std::size_t>(nw), neg_inf);

    std::vector<double> li(S.size());
    double top = neg_inf;
    bool nan = false;
    for (std::size_t i = 0; i < S.size(); ++i) {
        li[i] = log_integrand(S.x[i], S.log_mu[i], S.log_tail[i], S.log_res[i]);
        if (std::isnan(li[i])) nan = true;
        if (li[i] > top) top = li[i];
    }
    if (nan || top == INFINITY) {
        out.divergent = true;
        out.log_value = INFINITY;
        out.series.divergent = true;
        out.series.log_total = INFINITY;
        out.series.diagnostic = "integrand is infinite or undefined";
        return out;
    }
    double err = 0, tot = 0;
    for (std::size_t c = 0; c + 15 <= S.size(); c += 15) {
        double kc = 0, gc = 0;
        for (std::size_t j = c; j < c + 15; ++j) {
            double e = top == neg_inf ? 0.0 : std::exp(li[j] - top);
            kc += S.wk[j] * e;
            gc += S.wg[j] * e;
        }
        tot += kc;
        err += std::fabs(kc - gc);
    }
    out.quad_rel_error = tot > 0 ? err / tot : 0.0;

    for (std::size_t i = 0; i < S.size(); ++i) {
        if (li[i] == neg_inf || S.wk[i] == 0) continue;
        double d = S.dist[i];
        int level = d < std::ldexp(1.0, k_min) ? k_min - 1 : std::min(static_cast<int>(std::floor(std::log2(d))), k_max);
        std::size_t idx = static_cast<std::size_t>(level - (k_min - 1));
        wsum[idx] = log_add(wsum[idx], std::log(S.wk[i]) + li[i]);
    }
    double sgn = side == Side::right ? 1.0 : -1.0;
    for (int i = 0; i < nw; ++i) {
        int level = k_min - 1 + i;
        double lo = i == 0 ? 0.0 : std::ldexp(1.0, level);
        double hi = std::ldexp(1.0, level + 1);
        bool complete = hi <= max_dist;
        out.windows.push_back({level, m + sgn * lo, m + sgn * hi, wsum[static_cast<std::size_t>(i)], complete});
    }
    out.series = classify_windows(out.windows, bounded);
    out.divergent = out.series.divergent;
    out.log_value = out.divergent ? INFINITY : log_add(out.series.log_total, out.series.log_tail_estimate);
    return out;
}

namespace {

HardyReport hardy(const TailProfile& tails, double q, HardyKind kind) {
    require(q >= 0.5 && q < 1, ErrorCode::bad_params, "Hardy criteria need q in [1/2, 1)");
    double p = q / (1 - q);
    std::function<double(double, double, double, double)> f;
    if (kind == HardyKind::poincare)
        f = [p](double, double lmu, double lt, double lr) { return p * (lr + lt) + lmu; };
    else
        f = [p](double, double lmu, double lt, double lr) { return p * (lr + lt + std::log(-lt)) + lmu; };
    HardyReport r{kind, q, side_integral(tails, Side::right, f), side_integral(tails, Side::left, f),
                  Verdict::satisfied};
    if (r.right.divergent || r.left.divergent) r.verdict = Verdict::inconclusive_divergent;
    return r;
}

}  // namespace

HardyReport hardy_check_poincare(const TailProfile& tails, double q) { return hardy(tails, q, HardyKind::poincare); }
HardyReport hardy_check_lsi(const TailProfile& tails, double q) { return hardy(tails, q, HardyKind::lsi); }

MomentReport orlicz_moment(const TailProfile& tails, const std::function<double(double)>& log_f, double exponent) {
    auto f = [&](double x, double lmu, double, double) { return lmu + exponent * log_f(x); };
    MomentReport r{exponent, false, 0.0, side_integral(tails, Side::right, f), side_integral(tails, Side::left, f)};
    r.divergent = r.right.divergent || r.left.divergent;
    r.log_value = r.divergent ? INFINITY : log_add(r.right.log_value, r.left.log_value);
    return r;
}

}  // namespace lqineq
