#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace lqineq {

struct QuadratureConfig {
    double abs_tol = 1e-14;
    double rel_tol = 1e-12;
    int max_subdivisions = 40;      // bisection depth of the adaptive rule
    double window_step = 0.01;      // sinh-grid step inside the truncation window
    double far_step = 0.05;         // sinh-grid step in the far tail tables
    double window_cutoff = 1e-16;   // window ends where density < cutoff * max
    double far_log_cutoff = -1e4;   // tail tables end where log(density/max) < this
    double max_log_extent = 700.0;  // ... or where log|x - center| exceeds this
    int finite_cells = 2000;        // cells across a bounded support
};

namespace quad {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// 15-point Gauss-Kronrod rule on [-1,1]; wg holds the embedded 7-point Gauss weights.
struct Rule15 {
    std::array<double, 15> x;
    std::array<double, 15> wk;
    std::array<double, 15> wg;
};
const Rule15& gk15();

// 7-point Gauss-Legendre rule on [-1,1] (the Gauss half of gk15).
struct Rule7 {
    std::array<double, 7> x;
    std::array<double, 7> w;
};
const Rule7& gl7();

inline double log_add(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    double hi = a > b ? a : b;
    return hi + std::log1p(std::exp(-std::fabs(a - b)));
}

struct LogEstimate {
    double log_value = neg_inf;
    double rel_error = 0.0;
};

// One GK15 panel of exp(logf) over [a,b], evaluated relative to the panel maximum.
template <class F>
LogEstimate log_panel(F&& logf, double a, double b) {
    const Rule15& r = gk15();
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    std::array<double, 15> g;
    double top = neg_inf;
    for (int i = 0; i < 15; ++i) {
        g[i] = logf(mid + half * r.x[i]);
        if (g[i] > top) top = g[i];
    }
    if (top == neg_inf || half <= 0) return {};
    if (!std::isfinite(top)) return {top, 0.0};
    double k = 0, gs = 0;
    for (int i = 0; i < 15; ++i) {
        double e = std::exp(g[i] - top);
        k += r.wk[i] * e;
        gs += r.wg[i] * e;
    }
    if (k <= 0) return {};
    return {top + std::log(k * half), std::fabs(k - gs) / k};
}

namespace detail {
template <class F>
double log_adapt(F& logf, double a, double b, LogEstimate whole, double rel_tol, int depth, double& err) {
    if (whole.rel_error <= rel_tol || depth <= 0 || !std::isfinite(whole.log_value)) {
        if (std::isfinite(whole.log_value)) err = std::max(err, whole.rel_error);
        return whole.log_value;
    }
    double m = 0.5 * (a + b);
    LogEstimate l = log_panel(logf, a, m), r = log_panel(logf, m, b);
    return log_add(log_adapt(logf, a, m, l, rel_tol, depth - 1, err),
                   log_adapt(logf, m, b, r, rel_tol, depth - 1, err));
}
}  // namespace detail

// log of the integral of exp(logf) over [a,b]; adaptive bisection on GK15 panels.
template <class F>
LogEstimate log_integrate(F&& logf, double a, double b, double rel_tol = 1e-12, int max_depth = 40) {
    if (!(b > a)) return {};
    double err = 0;
    LogEstimate whole = log_panel(logf, a, b);
    double v = detail::log_adapt(logf, a, b, whole, rel_tol, max_depth, err);
    return {v, err};
}

struct Estimate {
    double value = 0.0;
    double abs_error = 0.0;
};

namespace detail {
template <class F>
Estimate panel(F& f, double a, double b) {
    const Rule15& r = gk15();
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double k = 0, g = 0;
    for (int i = 0; i < 15; ++i) {
        double v = f(mid + half * r.x[i]);
        k += r.wk[i] * v;
        g += r.wg[i] * v;
    }
    return {k * half, std::fabs(k - g) * half};
}

template <class F>
Estimate adapt(F& f, double a, double b, Estimate whole, double abs_tol, double rel_tol, int depth) {
    if (whole.abs_error <= std::max(abs_tol, rel_tol * std::fabs(whole.value)) || depth <= 0) return whole;
    double m = 0.5 * (a + b);
    Estimate l = adapt(f, a, m, panel(f, a, m), 0.5 * abs_tol, rel_tol, depth - 1);
    Estimate r = adapt(f, m, b, panel(f, m, b), 0.5 * abs_tol, rel_tol, depth - 1);
    return {l.value + r.value, l.abs_error + r.abs_error};
}
}  // namespace detail

template <class F>
Estimate integrate(F&& f, double a, double b, double abs_tol = 1e-14, double rel_tol = 1e-12, int max_depth = 40) {
    if (!(b > a)) return {};
    return detail::adapt(f, a, b, detail::panel(f, a, b), abs_tol, rel_tol, max_depth);
}

}  // namespace quad
}  // namespace lqineq
