#include "lqineq/series.hpp"

#include <cmath>
#include <cstdio>

#include "lqineq/quadrature.hpp"

namespace lqineq {

SeriesVerdict classify_windows(const std::vector<WindowSum>& windows, bool bounded) {
    SeriesVerdict v;
    double total = quad::neg_inf;
    for (const auto& w : windows) total = quad::log_add(total, w.log_sum);
    v.log_total = total;
    v.log_tail_estimate = quad::neg_inf;
    if (total == INFINITY || std::isnan(total)) {
        v.divergent = true;
        v.diagnostic = "integrand is infinite";
        return v;
    }
    if (bounded) {
        v.geometric = true;
        v.diagnostic = "bounded support";
        return v;
    }

    std::vector<const WindowSum*> far;
    for (const auto& w : windows)
        if (w.complete && w.level >= 1) far.push_back(&w);
    if (far.empty() || far.back()->log_sum == quad::neg_inf) {
        v.geometric = true;
        v.diagnostic = "far windows vanish";
        return v;
    }

    std::size_t n = far.size();
    std::size_t k8 = n >= 9 ? n - 9 : 0;
    double worst = 0;
    for (std::size_t i = k8; i + 1 < n; ++i) worst = std::max(worst, std::exp(far[i + 1]->log_sum - far[i]->log_sum));
    if (n >= 9 && worst <= 0.9) {
        v.geometric = true;
        v.log_tail_estimate = far.back()->log_sum + std::log(worst / (1 - worst));
        char buf[96];
        std::snprintf(buf, sizeof buf, "geometric decay, ratio <= %.4g", worst);
        v.diagnostic = buf;
        return v;
    }

    // power-law fit over the trailing half
    std::size_t start = n / 2;
    if (n - start < 8) start = n >= 8 ? n - 8 : 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = start; i < n; ++i) {
        if (!std::isfinite(far[i]->log_sum)) continue;
        double x = std::log(static_cast<double>(far[i]->level)), y = far[i]->log_sum;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 4) {
        v.divergent = true;
        v.diagnostic = "too few windows to certify decay";
        return v;
    }
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    v.decay_exponent = -slope;
    char buf[128];
    if (v.decay_exponent <= 1.1) {
        v.divergent = true;
        std::snprintf(buf, sizeof buf, "window sums decay like k^-%.4g (not summable)", v.decay_exponent);
    } else {
        double K = far.back()->level;
        v.log_tail_estimate = far.back()->log_sum + std::log(K / (v.decay_exponent - 1));
        std::snprintf(buf, sizeof buf, "window sums decay like k^-%.4g", v.decay_exponent);
    }
    v.diagnostic = buf;
    return v;
}

}  // namespace lqineq
