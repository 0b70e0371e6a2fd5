#include "lqineq/measure.hpp"

#include <algorithm>
#include <cmath>

#include "lqineq/errors.hpp"

namespace lqineq {

using quad::log_add;
using quad::neg_inf;

struct Measure1D::Data {
    Family family = Family::custom;
    std::vector<double> params;
    Interval support{-INFINITY, INFINITY};
    bool probability = true;
    double center = 0.0;
    double scale = 1.0;
    LogKernel lk_fn;
    TruncationSpec trunc;
    QuadratureConfig cfg;
    std::vector<double> kinks;

    std::vector<double> x, lk, lcell, lleft, lright;
    std::size_t w0 = 0, w1 = 0;
    double log_rem_left = neg_inf, log_rem_right = neg_inf;
    double logZ = 0.0, log_norm = 0.0, log_max = neg_inf;
    double median = 0.0, truncation_mass = 0.0;

    std::shared_ptr<const std::vector<double>> wnodes;
    std::vector<double> qx, qw, cmass;
};

const char* to_string(Family f) {
    switch (f) {
        case Family::gaussian: return "gaussian";
        case Family::exp_power: return "exp_power";
        case Family::heavy_tail: return "heavy_tail";
        case Family::bertrand: return "bertrand";
        case Family::uniform: return "uniform";
        case Family::lebesgue: return "lebesgue";
        case Family::custom: return "custom";
        case Family::custom_tabulated: return "custom_tabulated";
    }
    return "unknown";
}

Family family_from_string(const std::string& name) {
    for (Family f : {Family::gaussian, Family::exp_power, Family::heavy_tail, Family::bertrand, Family::uniform,
                     Family::lebesgue, Family::custom, Family::custom_tabulated})
        if (name == to_string(f)) return f;
    fail(ErrorCode::bad_params, "unknown family '" + name + "'");
}

namespace {

struct SideGrid {
    std::vector<double> window;  // increasing distance from the center
    std::vector<double> far;
    double log_rem = neg_inf;
};

SideGrid walk_side(const Measure1D::Data& d, int dir) {
    SideGrid g;
    const auto& cfg = d.cfg;
    double c = d.center, s = d.scale;
    double end = dir > 0 ? d.support.hi : d.support.lo;
    double dist = std::fabs(end - c);
    if (dist == 0.0) return g;

    if (std::isfinite(dist)) {
        std::size_t n = std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(dist / (s * cfg.window_step))));
        for (std::size_t k = 1; k <= n; ++k) g.window.push_back(k == n ? end : c + dir * dist * double(k) / double(n));
        return g;
    }

    double cut = d.log_max + std::log(cfg.window_cutoff);
    double prev = d.lk_fn(c);
    double xi = 0.0;
    for (int k = 1;; ++k) {
        xi = k * cfg.window_step;
        double off = s * std::sinh(xi);
        if (off >= d.trunc.bound) {
            g.window.push_back(c + dir * d.trunc.bound);
            xi = std::asinh(d.trunc.bound / s);
            break;
        }
        double v = d.lk_fn(c + dir * off);
        g.window.push_back(c + dir * off);
        if (v < cut && v <= prev) break;
        prev = v;
    }

    auto integrand = [&](double z, double v) { return v + std::log(s * std::cosh(z)); };
    double g_prev = integrand(xi, d.lk_fn(g.window.back()));
    double g_last = g_prev;
    bool reached_cutoff = false;
    for (int j = 1;; ++j) {
        double z = xi + j * cfg.far_step;
        double off = s * std::sinh(z);
        if (!std::isfinite(off) || std::log(off) > cfg.max_log_extent) break;
        double x = c + dir * off;
        double v = d.lk_fn(x);
        g.far.push_back(x);
        g_prev = g_last;
        g_last = integrand(z, v);
        if (v - d.log_max < cfg.far_log_cutoff) {
            reached_cutoff = true;
            break;
        }
    }
    if (g.far.empty()) return g;
    double lambda = (g_prev - g_last) / cfg.far_step;
    if (reached_cutoff) {
        g.log_rem = g_last - std::log(std::max(lambda, cfg.far_step));
    } else {
        if (!(lambda > 1e-6))
            fail(ErrorCode::non_integrable_density, "density tail does not decay in the far field");
        g.log_rem = g_last - std::log(lambda);
    }
    return g;
}

double softplus(double z) { return z > 30 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

Measure1D Measure1D::finish(std::shared_ptr<Data> dp) {
    Data& d = *dp;
    const auto& cfg = d.cfg;
    require(cfg.abs_tol > 0 && cfg.rel_tol > 0 && cfg.window_step > 0 && cfg.far_step > 0 && cfg.finite_cells >= 16,
            ErrorCode::bad_params, "quadrature configuration must be positive");
    require(d.scale > 0 && std::isfinite(d.scale), ErrorCode::bad_params, "scale must be positive");
    require(d.support.lo < d.support.hi, ErrorCode::bad_params, "empty support");
    require(d.trunc.bound > 0, ErrorCode::bad_params, "truncation bound must be positive");

    bool finite_support = std::isfinite(d.support.lo) && std::isfinite(d.support.hi);
    double c = d.center, s = d.scale;

    // max of the log-kernel, needed before the window cutoff can be applied
    double lmax = neg_inf;
    auto probe = [&](double x) {
        if (x >= d.support.lo && x <= d.support.hi) lmax = std::max(lmax, d.lk_fn(x));
    };
    probe(c);
    for (double k : d.kinks) probe(k);
    if (finite_support) {
        for (int i = 0; i <= cfg.finite_cells; ++i)
            probe(d.support.lo + (d.support.hi - d.support.lo) * i / cfg.finite_cells);
    } else {
        for (double xi = -30; xi <= 30; xi += 0.05) {
            double off = s * std::sinh(xi);
            if (std::fabs(off) <= d.trunc.bound) probe(c + off);
        }
    }
    require(std::isfinite(lmax), ErrorCode::bad_params, "density vanishes or is infinite on the probe grid");
    d.log_max = lmax;

    std::vector<double> x;
    double wlo, whi;
    if (finite_support) {
        int n = cfg.finite_cells;
        for (int i = 0; i <= n; ++i)
            x.push_back(i == n ? d.support.hi : d.support.lo + (d.support.hi - d.support.lo) * i / n);
        wlo = d.support.lo;
        whi = d.support.hi;
    } else {
        require(c >= d.support.lo && c <= d.support.hi, ErrorCode::bad_params, "center outside support");
        SideGrid left = walk_side(d, -1), right = walk_side(d, +1);
        for (auto it = left.far.rbegin(); it != left.far.rend(); ++it) x.push_back(*it);
        for (auto it = left.window.rbegin(); it != left.window.rend(); ++it) x.push_back(*it);
        x.push_back(c);
        x.insert(x.end(), right.window.begin(), right.window.end());
        x.insert(x.end(), right.far.begin(), right.far.end());
        wlo = left.window.empty() ? c : left.window.back();
        whi = right.window.empty() ? c : right.window.back();
        d.log_rem_left = left.log_rem;
        d.log_rem_right = right.log_rem;
    }
    for (double k : d.kinks)
        if (k > x.front() && k < x.back()) x.push_back(k);
    std::sort(x.begin(), x.end());
    std::vector<double> clean;
    for (double v : x)
        if (clean.empty() || v - clean.back() > 1e-12 * (1.0 + std::fabs(v))) clean.push_back(v);
    x.swap(clean);
    require(x.size() >= 3, ErrorCode::bad_params, "degenerate grid");

    std::size_t n = x.size();
    d.lk.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.lk[i] = d.lk_fn(x[i]);
    d.lcell.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double v = quad::log_integrate(d.lk_fn, x[i], x[i + 1], cfg.rel_tol, 30).log_value;
        if (std::isnan(v) || v == INFINITY)
            fail(ErrorCode::non_integrable_density, "density not integrable near x=" + std::to_string(x[i]));
        d.lcell[i] = v;
    }
    d.lleft.assign(n, neg_inf);
    d.lright.assign(n, neg_inf);
    d.lleft[0] = d.log_rem_left;
    for (std::size_t i = 0; i + 1 < n; ++i) d.lleft[i + 1] = log_add(d.lleft[i], d.lcell[i]);
    d.lright[n - 1] = d.log_rem_right;
    for (std::size_t i = n - 1; i-- > 0;) d.lright[i] = log_add(d.lright[i + 1], d.lcell[i]);
    d.logZ = log_add(d.lleft[n - 1], d.log_rem_right);
    if (!std::isfinite(d.logZ)) fail(ErrorCode::non_integrable_density, "normalization is not finite");
    d.log_norm = d.probability ? d.logZ : 0.0;

    d.w0 = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), wlo) - x.begin());
    d.w1 = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), whi) - x.begin());
    if (d.w1 >= n) d.w1 = n - 1;
    d.truncation_mass = std::exp(d.lleft[d.w0] - d.logZ) + std::exp(d.lright[d.w1] - d.logZ);

    auto wn = std::make_shared<std::vector<double>>(x.begin() + d.w0, x.begin() + d.w1 + 1);
    d.wnodes = wn;
    const auto& gl = quad::gl7();
    std::size_t nc = wn->size() - 1;
    d.qx.resize(7 * nc);
    d.qw.resize(7 * nc);
    d.cmass.assign(nc, 0.0);
    for (std::size_t i = 0; i < nc; ++i) {
        double a = (*wn)[i], b = (*wn)[i + 1], h = 0.5 * (b - a), m = 0.5 * (a + b);
        for (int j = 0; j < 7; ++j) {
            double xj = m + h * gl.x[j];
            double w = h * gl.w[j] * std::exp(d.lk_fn(xj) - d.log_norm);
            d.qx[7 * i + j] = xj;
            d.qw[7 * i + j] = w;
            d.cmass[i] += w;
        }
    }
    d.x = std::move(x);

    Measure1D out(dp);
    if (d.probability) dp->median = out.inverse_log_tail_left(std::log(0.5));
    return out;
}

// ---------------------------------------------------------------- factories

Measure1D Measure1D::build(Family family, const std::vector<double>& p, TruncationSpec trunc, QuadratureConfig cfg) {
    auto need = [&](std::size_t k) {
        require(p.size() == k, ErrorCode::bad_params,
                std::string(to_string(family)) + " expects " + std::to_string(k) + " parameter(s)");
    };
    switch (family) {
        case Family::gaussian: need(1); return gaussian(p[0], trunc, cfg);
        case Family::exp_power: need(1); return exp_power(p[0], trunc, cfg);
        case Family::heavy_tail: need(1); return heavy_tail(p[0], trunc, cfg);
        case Family::bertrand: need(2); return bertrand(p[0], p[1], trunc, cfg);
        case Family::uniform: need(2); return uniform(p[0], p[1], cfg);
        case Family::lebesgue: need(2); return lebesgue(p[0], p[1], cfg);
        default: fail(ErrorCode::bad_params, "family requires a custom constructor");
    }
}

Measure1D Measure1D::gaussian(double sigma, TruncationSpec trunc, QuadratureConfig cfg) {
    require(sigma > 0 && std::isfinite(sigma), ErrorCode::bad_params, "gaussian needs sigma > 0");
    auto d = std::make_shared<Data>();
    d->family = Family::gaussian;
    d->params = {sigma};
    d->scale = sigma;
    double inv = 1.0 / (2 * sigma * sigma);
    d->lk_fn = [inv](double x) { return -x * x * inv; };
    d->trunc = trunc;
    d->cfg = cfg;
    return finish(d);
}

Measure1D Measure1D::exp_power(double p, TruncationSpec trunc, QuadratureConfig cfg) {
    require(p > 0 && p <= 1, ErrorCode::bad_params, "exp_power needs p in (0,1]");
    auto d = std::make_shared<Data>();
    d->family = Family::exp_power;
    d->params = {p};
    d->lk_fn = [p](double x) { return -std::pow(std::fabs(x), p); };
    d->kinks = {0.0};
    d->trunc = trunc;
    d->cfg = cfg;
    return finish(d);
}

Measure1D Measure1D::heavy_tail(double alpha, TruncationSpec trunc, QuadratureConfig cfg) {
    require(alpha > 0 && std::isfinite(alpha), ErrorCode::bad_params, "heavy_tail needs alpha > 0");
    auto d = std::make_shared<Data>();
    d->family = Family::heavy_tail;
    d->params = {alpha};
    d->lk_fn = [alpha](double x) { return -(1 + alpha) * std::log1p(std::fabs(x)); };
    d->kinks = {0.0};
    d->trunc = trunc;
    d->cfg = cfg;
    return finish(d);
}

Measure1D Measure1D::bertrand(double alpha, double beta, TruncationSpec trunc, QuadratureConfig cfg) {
    require(alpha >= 0 && std::isfinite(alpha) && std::isfinite(beta) && beta >= 0, ErrorCode::bad_params,
            "bertrand needs alpha >= 0 and beta >= 0");
    auto d = std::make_shared<Data>();
    d->family = Family::bertrand;
    d->params = {alpha, beta};
    const double cap = std::exp(-1.0);
    const double plateau = -softplus(-(1 + alpha));
    d->lk_fn = [alpha, beta, cap, plateau](double x) {
        double ax = std::fabs(x);
        if (ax < cap) return plateau;
        double z = (1 + alpha) * std::log(ax);
        if (beta > 0) z += beta * std::log(std::fabs(std::log(ax)));
        return -softplus(z);
    };
    d->kinks = {-1.0, -cap, 0.0, cap, 1.0};
    d->trunc = trunc;
    d->cfg = cfg;
    return finish(d);
}

Measure1D Measure1D::uniform(double a, double b, QuadratureConfig cfg) {
    require(a < b && std::isfinite(a) && std::isfinite(b), ErrorCode::bad_params, "uniform needs a < b");
    auto d = std::make_shared<Data>();
    d->family = Family::uniform;
    d->params = {a, b};
    d->support = {a, b};
    d->center = 0.5 * (a + b);
    d->scale = 0.5 * (b - a);
    d->lk_fn = [a, b](double x) { return (x >= a && x <= b) ? 0.0 : neg_inf; };
    d->cfg = cfg;
    return finish(d);
}

Measure1D Measure1D::lebesgue(double a, double b, QuadratureConfig cfg) {
    require(a < b && std::isfinite(a) && std::isfinite(b), ErrorCode::bad_params, "lebesgue needs a < b");
    auto d = std::make_shared<Data>();
    d->family = Family::lebesgue;
    d->params = {a, b};
    d->support = {a, b};
    d->probability = false;
    d->center = 0.5 * (a + b);
    d->scale = 0.5 * (b - a);
    d->lk_fn = [a, b](double x) { return (x >= a && x <= b) ? 0.0 : neg_inf; };
    d->cfg = cfg;
    return finish(d);
}

Measure1D Measure1D::custom(LogKernel log_kernel, Interval support, bool probability, double center, double scale,
                            std::vector<double> kinks, TruncationSpec trunc, QuadratureConfig cfg) {
    require(static_cast<bool>(log_kernel), ErrorCode::bad_params, "custom measure needs a density");
    auto d = std::make_shared<Data>();
    d->family = Family::custom;
    d->support = support;
    d->probability = probability;
    d->center = center;
    d->scale = scale;
    d->lk_fn = [f = std::move(log_kernel), support](double x) {
        return (x >= support.lo && x <= support.hi) ? f(x) : neg_inf;
    };
    d->kinks = std::move(kinks);
    d->trunc = trunc;
    d->cfg = cfg;
    return finish(d);
}

Measure1D Measure1D::tabulated(std::vector<double> xs, std::vector<double> ds, bool probability,
                               QuadratureConfig cfg) {
    require(xs.size() == ds.size() && xs.size() >= 2, ErrorCode::bad_params, "table needs matching columns");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        require(std::isfinite(xs[i]) && std::isfinite(ds[i]) && ds[i] >= 0, ErrorCode::bad_params,
                "table entries must be finite with non-negative density");
        if (i > 0) require(xs[i] > xs[i - 1], ErrorCode::bad_params, "table abscissae must increase");
    }
    auto d = std::make_shared<Data>();
    d->family = Family::custom_tabulated;
    d->support = {xs.front(), xs.back()};
    d->probability = probability;
    d->center = 0.5 * (xs.front() + xs.back());
    d->scale = 0.5 * (xs.back() - xs.front());
    d->kinks = xs;
    d->lk_fn = [xs = std::move(xs), ds = std::move(ds)](double x) {
        if (x < xs.front() || x > xs.back()) return neg_inf;
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t i = it == xs.end() ? xs.size() - 2 : static_cast<std::size_t>(it - xs.begin()) - 1;
        double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
        double v = (1 - t) * ds[i] + t * ds[i + 1];
        return v > 0 ? std::log(v) : neg_inf;
    };
    d->cfg = cfg;
    return finish(d);
}

// ---------------------------------------------------------------- accessors

Family Measure1D::family() const { return d_->family; }
const std::vector<double>& Measure1D::params() const { return d_->params; }
bool Measure1D::is_probability() const { return d_->probability; }
Interval Measure1D::support() const { return d_->support; }
Interval Measure1D::window() const { return {d_->wnodes->front(), d_->wnodes->back()}; }
double Measure1D::center() const { return d_->center; }
double Measure1D::scale() const { return d_->scale; }
const QuadratureConfig& Measure1D::config() const { return d_->cfg; }
double Measure1D::Z() const { return std::exp(d_->logZ); }
double Measure1D::log_Z() const { return d_->logZ; }
double Measure1D::truncation_mass() const { return d_->truncation_mass; }
double Measure1D::log_kernel(double x) const { return d_->lk_fn(x); }
double Measure1D::log_density(double x) const { return d_->lk_fn(x) - d_->log_norm; }
double Measure1D::density(double x) const { return std::exp(log_density(x)); }
const std::vector<double>& Measure1D::nodes() const { return d_->x; }
const std::vector<double>& Measure1D::log_kernel_nodes() const { return d_->lk; }
const std::vector<double>& Measure1D::log_left_nodes() const { return d_->lleft; }
const std::vector<double>& Measure1D::log_right_nodes() const { return d_->lright; }
const std::shared_ptr<const std::vector<double>>& Measure1D::window_nodes() const { return d_->wnodes; }
const std::vector<double>& Measure1D::window_rule_x() const { return d_->qx; }
const std::vector<double>& Measure1D::window_rule_w() const { return d_->qw; }
const std::vector<double>& Measure1D::window_cell_mass() const { return d_->cmass; }
double Measure1D::median() const {
    require(d_->probability, ErrorCode::bad_params, "median needs a probability measure");
    return d_->median;
}

std::size_t Measure1D::cell_of(double x) const {
    const auto& xs = d_->x;
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    return std::min(i, xs.size() - 2);
}

std::vector<double> Measure1D::cell_masses(const std::vector<double>& nodes) const {
    if (&nodes == d_->wnodes.get()) return d_->cmass;
    const auto& gl = quad::gl7();
    std::vector<double> out(nodes.size() > 0 ? nodes.size() - 1 : 0, 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double a = nodes[i], b = nodes[i + 1], h = 0.5 * (b - a), m = 0.5 * (a + b);
        for (int j = 0; j < 7; ++j) out[i] += h * gl.w[j] * std::exp(d_->lk_fn(m + h * gl.x[j]) - d_->log_norm);
    }
    return out;
}

double Measure1D::log_partial(double a, double b) const {
    if (!(b > a)) return neg_inf;
    const auto& xs = d_->x;
    auto li = [&](double lo, double hi) {
        return quad::log_integrate(d_->lk_fn, lo, hi, d_->cfg.rel_tol, 30).log_value;
    };
    if (a < xs.front() || b > xs.back()) {
        // outside the tables: integrate directly
        return li(a, b);
    }
    std::size_t ia = cell_of(a), ib = cell_of(b);
    if (ia == ib) return li(a, b);
    double v = li(a, xs[ia + 1]);
    for (std::size_t i = ia + 1; i < ib; ++i) v = log_add(v, d_->lcell[i]);
    return log_add(v, li(xs[ib], b));
}

double Measure1D::log_tail_right(double x) const {
    const auto& xs = d_->x;
    if (x <= xs.front()) return d_->lright.front() - d_->logZ;
    if (x >= xs.back()) return d_->lright.back() - d_->logZ;
    std::size_t i = cell_of(x);
    double part = quad::log_integrate(d_->lk_fn, x, xs[i + 1], d_->cfg.rel_tol, 30).log_value;
    return log_add(d_->lright[i + 1], part) - d_->logZ;
}

double Measure1D::log_tail_left(double x) const {
    const auto& xs = d_->x;
    if (x <= xs.front()) return d_->lleft.front() - d_->logZ;
    if (x >= xs.back()) return d_->lleft.back() - d_->logZ;
    std::size_t i = cell_of(x);
    double part = quad::log_integrate(d_->lk_fn, xs[i], x, d_->cfg.rel_tol, 30).log_value;
    return log_add(d_->lleft[i], part) - d_->logZ;
}

double Measure1D::tail_right(double x) const { return std::exp(log_tail_right(x)); }
double Measure1D::tail_left(double x) const { return std::exp(log_tail_left(x)); }
double Measure1D::mass(double a, double b) const { return std::exp(log_partial(a, b) - d_->log_norm); }

namespace {

// safeguarded Newton on a monotone phi over [a,b]; sign(phi(a)) = -sign(phi(b))
template <class Phi, class Dphi>
double solve_bracketed(Phi&& phi, Dphi&& dphi, double a, double b, double x0, bool increasing) {
    double x = x0;
    for (int it = 0; it < 200; ++it) {
        double f = phi(x);
        if (f == 0.0) return x;
        bool below = increasing ? (f < 0) : (f > 0);
        if (below) a = x; else b = x;
        double df = dphi(x, f);
        double xn = (df != 0.0 && std::isfinite(df)) ? x - f / df : 0.5 * (a + b);
        if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
        if (std::fabs(xn - x) <= 2e-16 * std::max(std::fabs(x), 1e-300) || b - a <= 2e-16 * std::fabs(x)) return xn;
        x = xn;
    }
    return x;
}

}  // namespace

double Measure1D::inverse_log_tail_right(double log_t) const {
    const auto& xs = d_->x;
    const auto& lr = d_->lright;
    double T = log_t + d_->logZ;
    if (T >= lr.front()) return xs.front();
    if (T <= lr.back()) return xs.back();
    // last i with lr[i] >= T
    std::size_t lo = 0, hi = lr.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (lr[mid] >= T) lo = mid; else hi = mid;
    }
    std::size_t i = lo;
    double a = xs[i], b = xs[i + 1];
    auto phi = [&](double x) {
        return log_add(lr[i + 1], quad::log_integrate(d_->lk_fn, x, b, d_->cfg.rel_tol, 30).log_value) - T;
    };
    auto dphi = [&](double x, double f) { return -std::exp(d_->lk_fn(x) - (f + T)); };
    double x0 = std::isfinite(lr[i + 1]) ? a + (b - a) * (lr[i] - T) / (lr[i] - lr[i + 1]) : 0.5 * (a + b);
    if (!(x0 > a && x0 < b)) x0 = 0.5 * (a + b);
    return solve_bracketed(phi, dphi, a, b, x0, false);
}

double Measure1D::inverse_log_tail_left(double log_t) const {
    const auto& xs = d_->x;
    const auto& ll = d_->lleft;
    double T = log_t + d_->logZ;
    if (T <= ll.front()) return xs.front();
    if (T >= ll.back()) return xs.back();
    // last i with ll[i] <= T
    std::size_t lo = 0, hi = ll.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (ll[mid] <= T) lo = mid; else hi = mid;
    }
    std::size_t i = lo;
    double a = xs[i], b = xs[i + 1];
    auto phi = [&](double x) {
        return log_add(ll[i], quad::log_integrate(d_->lk_fn, a, x, d_->cfg.rel_tol, 30).log_value) - T;
    };
    auto dphi = [&](double x, double f) { return std::exp(d_->lk_fn(x) - (f + T)); };
    double x0 = std::isfinite(ll[i]) ? a + (b - a) * (T - ll[i]) / (ll[i + 1] - ll[i]) : 0.5 * (a + b);
    if (!(x0 > a && x0 < b)) x0 = 0.5 * (a + b);
    return solve_bracketed(phi, dphi, a, b, x0, true);
}

double Measure1D::quantile(double p) const {
    require(p > 0 && p < 1, ErrorCode::out_of_range, "quantile level must lie in (0,1)");
    return p <= 0.5 ? inverse_log_tail_left(std::log(p)) : inverse_log_tail_right(std::log1p(-p));
}

double Measure1D::to_grade(double x) const {
    const auto& sp = d_->support;
    if (std::isfinite(sp.lo) && std::isfinite(sp.hi)) return (x - sp.lo) / (sp.hi - sp.lo);
    return std::asinh((x - d_->center) / d_->scale);
}

double Measure1D::from_grade(double xi) const {
    const auto& sp = d_->support;
    if (std::isfinite(sp.lo) && std::isfinite(sp.hi)) return sp.lo + xi * (sp.hi - sp.lo);
    return d_->center + d_->scale * std::sinh(xi);
}

}  // namespace lqineq
