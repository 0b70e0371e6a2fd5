#include "lqineq/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "lqineq/errors.hpp"

namespace lqineq {

PerturbationSpec make_perturbation(const Measure1D& mu, std::function<double(double)> h) {
    require(static_cast<bool>(h), ErrorCode::bad_params, "perturbation needs a function");
    GridFunction g = GridFunction::sample(mu, h);
    for (double v : g.values()) require(std::isfinite(v), ErrorCode::bad_params, "perturbation must be bounded");
    const auto& qx = mu.window_rule_x();
    const auto& qw = mu.window_rule_w();
    double z = 0, m0 = 0;
    for (std::size_t k = 0; k < qx.size(); ++k) {
        z += qw[k] * std::exp(h(qx[k]));
        m0 += qw[k];
    }
    z /= m0;
    return {std::move(h), oscillation(mu, g), z};
}

Measure1D perturbed_measure(const Measure1D& mu, const PerturbationSpec& spec) {
    auto h = spec.h;
    Measure1D base = mu;
    return Measure1D::custom([base, h](double x) { return base.log_kernel(x) + h(x); }, mu.support(), true,
                             mu.center(), mu.scale(), {}, {}, mu.config());
}

double perturb_constant(double C, double osc_h, double q) {
    require(C > 0 && osc_h >= 0 && q > 0 && q <= 1, ErrorCode::bad_params, "perturb_constant needs C>0, osc>=0, q in (0,1]");
    return C * std::exp(osc_h / q);
}

double tensor_constant(const std::vector<double>& constants, double q) {
    require(!constants.empty(), ErrorCode::bad_params, "tensor_constant needs at least one factor");
    require(q > 0 && q <= 1, ErrorCode::bad_params, "q must lie in (0,1]");
    double mx = 0;
    for (double c : constants) {
        require(c > 0, ErrorCode::bad_params, "constants must be positive");
        mx = std::max(mx, c);
    }
    double n = static_cast<double>(constants.size());
    return std::pow(n, 1 / q - 1) * mx;
}

ConcentrationEnvelope concentration_envelope(double C_P, double q, double t0, const std::vector<double>& t_grid) {
    require(C_P > 0 && q > 0 && q < 1 && t0 > 0, ErrorCode::bad_params, "concentration needs C_P>0, q in (0,1), t0>0");
    ConcentrationEnvelope e;
    e.exponent = 2 * q / (1 - q);
    e.kappa = std::pow(2.0, 1 / q) * C_P;
    e.c = std::pow(e.kappa, q) * std::pow(t0, -2 * q);
    e.t0 = t0;
    e.fixed_point = std::pow(e.c, 1 / (1 - q));
    double b = 0.5;
    for (int it = 0; it < 10000; ++it) {
        double nb = e.c * std::pow(b, q);
        bool done = std::fabs(nb - b) <= 1e-15 * nb;
        b = nb;
        if (done) break;
    }
    e.fixed_point_iterated = b;

    double tmax = t0;
    for (double t : t_grid) {
        require(t >= t0, ErrorCode::bad_params, "t grid must start at t0");
        tmax = std::max(tmax, t);
    }
    int n_max = static_cast<int>(std::ceil(std::log2(tmax / t0))) + 1;
    e.a.push_back(0.5);
    for (int n = 0; n < n_max; ++n) e.a.push_back(std::min(1.0, e.c * std::pow(2.0, -2.0 * n * q) * std::pow(e.a.back(), q)));
    e.C = 0;
    for (std::size_t n = 0; n < e.a.size(); ++n)
        e.C = std::max(e.C, e.a[n] * std::pow(std::ldexp(t0, static_cast<int>(n)), e.exponent));
    e.t = t_grid;
    for (double t : t_grid) {
        auto n = static_cast<std::size_t>(std::floor(std::log2(t / t0)));
        e.bound.push_back(e.a[std::min(n, e.a.size() - 1)]);
    }
    return e;
}

namespace {
double mass_between(const Measure1D& mu, double a, double b) {
    if (a == -INFINITY && b == INFINITY) return 1.0;
    if (a == -INFINITY) return mu.tail_left(b);
    if (b == INFINITY) return mu.tail_right(a);
    return mu.mass(a, b);
}
}  // namespace

double level_set_mass(const Measure1D& mu, const GridFunction& f, double t) {
    const auto& x = f.nodes();
    const auto& v = f.values();
    double total = 0;
    double open = v.front() >= t ? -INFINITY : NAN;  // start of the current run
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        double a = v[i] - t, b = v[i + 1] - t;
        if (std::isnan(open) && b >= 0) open = a >= 0 ? x[i] : x[i] + (x[i + 1] - x[i]) * (-a) / (b - a);
        if (!std::isnan(open) && b < 0) {
            double end = x[i] + (x[i + 1] - x[i]) * a / (a - b);
            total += mass_between(mu, open, end);
            open = NAN;
        }
    }
    if (!std::isnan(open)) total += mass_between(mu, open, INFINITY);
    return total;
}

double concentration_t0(const Measure1D& mu, const GridFunction& f) {
    auto [lo_it, hi_it] = std::minmax_element(f.values().begin(), f.values().end());
    double lo = *lo_it, hi = *hi_it;
    if (level_set_mass(mu, f, hi) > 0.5) return hi;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::fabs(hi)); ++it) {
        double mid = 0.5 * (lo + hi);
        if (level_set_mass(mu, f, mid) <= 0.5) hi = mid; else lo = mid;
    }
    return hi;
}

TailExponentFit empirical_tail_exponent(const Measure1D& mu, const GridFunction& f, const std::vector<double>& t_grid) {
    const auto& x = f.nodes();
    const auto& v = f.values();
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        require(std::fabs(v[i + 1] - v[i]) <= (1 + 1e-9) * (x[i + 1] - x[i]), ErrorCode::bad_params,
                "f must be 1-Lipschitz");
    std::vector<double> lt, ly;
    bool passed_floor = false;
    for (double t : t_grid) {
        require(t > 0, ErrorCode::bad_params, "t grid must be positive");
        double m = level_set_mass(mu, f, t);
        if (m <= 1e-10) passed_floor = true;
        if (m > 1e-10 && m < 1e-2) {
            lt.push_back(std::log(t));
            ly.push_back(std::log(m));
        }
    }
    TailExponentFit r{0, false, 0, 0, static_cast<int>(lt.size())};
    if (lt.size() >= 2) {
        r.t_lo = std::exp(lt.front());
        r.t_hi = std::exp(lt.back());
    }
    bool decade = lt.size() >= 2 && r.t_hi >= 10 * r.t_lo;
    if (!decade) {
        if (!passed_floor || lt.size() < 2)
            fail(ErrorCode::insufficient_tail, "tail window (1e-10, 1e-2) spans less than one decade of t");
        r.saturated = true;
    }
    double n = static_cast<double>(lt.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        sx += lt[i];
        sy += ly[i];
        sxx += lt[i] * lt[i];
        sxy += lt[i] * ly[i];
    }
    r.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return r;
}

}  // namespace lqineq
