#include "lqineq/tails.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>

#include "lqineq/errors.hpp"

namespace lqineq {

using quad::log_add;
using quad::neg_inf;

const char* to_string(Side s) { return s == Side::right ? "right" : "left"; }

struct TailProfile::Impl {
    Impl(Measure1D a, Measure1D b) : mu(std::move(a)), nu(std::move(b)) {}
    Measure1D mu, nu;
    double m = 0;
    std::size_t j0 = 0;  // first node strictly right of m
    std::size_t k0 = 0;  // last node strictly left of m (valid when has_left)
    bool has_right = false, has_left = false;
    std::vector<double> lres_right, lres_left;  // log r / log ell at nodes
    mutable std::once_flag once_right, once_left;
    mutable SideSamples s_right, s_left;

    double inv_nu(double x) const { return -nu.log_density(x); }
    double li_inv(double a, double b) const {
        return quad::log_integrate([this](double z) { return inv_nu(z); }, a, b, mu.config().rel_tol, 30).log_value;
    }
    void build_samples(Side side) const;
};

namespace {

template <class F>
double log_piece(F&& f, double a, double b) {
    // far cells span many e-folds of the kernel; a fixed rule under-resolves them
    if (!(b > a)) return neg_inf;
    return quad::log_integrate(f, a, b, 1e-10, 30).log_value;
}

}  // namespace

TailProfile::TailProfile(Measure1D mu_in, Measure1D nu_in)
    : p_(std::make_shared<Impl>(std::move(mu_in), std::move(nu_in))) {
    const Measure1D& mu = p_->mu;
    const Measure1D& nu = p_->nu;
    require(mu.is_probability(), ErrorCode::bad_params, "mu must be a probability measure");
    Interval sm = mu.support(), sn = nu.support();
    auto tol = [](double v) { return std::isfinite(v) ? 1e-12 * (1 + std::fabs(v)) : 0.0; };
    require(sn.lo <= sm.lo + tol(sm.lo) && sn.hi >= sm.hi - tol(sm.hi), ErrorCode::bad_params,
            "nu must be positive on the support of mu");
    Impl& d = *p_;
    d.m = d.mu.median();
    const auto& x = d.mu.nodes();
    std::size_t n = x.size();

    for (std::size_t i = 0; i < n; ++i) {
        bool interior = x[i] > sm.lo && x[i] < sm.hi;
        if (interior && d.nu.log_kernel(x[i]) == neg_inf)
            fail(ErrorCode::divergent_resistance, "nu density vanishes at x=" + std::to_string(x[i]));
    }

    d.j0 = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), d.m) - x.begin());
    d.has_right = d.j0 < n;
    d.lres_right.assign(n, neg_inf);
    if (d.has_right) {
        d.lres_right[d.j0] = d.li_inv(d.m, x[d.j0]);
        for (std::size_t j = d.j0; j + 1 < n; ++j) d.lres_right[j + 1] = log_add(d.lres_right[j], d.li_inv(x[j], x[j + 1]));
    }
    auto lb = std::lower_bound(x.begin(), x.end(), d.m);
    d.has_left = lb != x.begin();
    d.lres_left.assign(n, neg_inf);
    if (d.has_left) {
        d.k0 = static_cast<std::size_t>(lb - x.begin()) - 1;
        d.lres_left[d.k0] = d.li_inv(x[d.k0], d.m);
        for (std::size_t k = d.k0; k-- > 0;) d.lres_left[k] = log_add(d.lres_left[k + 1], d.li_inv(x[k], x[k + 1]));
    }
    for (std::size_t i = 0; i < n; ++i)
        if (std::isnan(d.lres_right[i]) || std::isnan(d.lres_left[i]))
            fail(ErrorCode::divergent_resistance, "resistance integral is undefined");
}

const Measure1D& TailProfile::mu() const { return p_->mu; }
const Measure1D& TailProfile::nu() const { return p_->nu; }
double TailProfile::median() const { return p_->m; }

double TailProfile::log_R(double x) const { return p_->mu.log_tail_right(x); }
double TailProfile::log_L(double x) const { return p_->mu.log_tail_left(x); }
double TailProfile::R(double x) const { return std::exp(log_R(x)); }
double TailProfile::L(double x) const { return std::exp(log_L(x)); }

double TailProfile::log_r(double x) const {
    const Impl& d = *p_;
    if (x <= d.m) return neg_inf;
    const auto& xs = d.mu.nodes();
    if (!d.has_right || x <= xs[d.j0]) return d.li_inv(d.m, x);
    std::size_t i = d.mu.cell_of(x);
    if (x >= xs.back()) i = xs.size() - 1;
    return log_add(d.lres_right[i], d.li_inv(xs[i], x));
}

double TailProfile::log_ell(double x) const {
    const Impl& d = *p_;
    if (x >= d.m) return neg_inf;
    const auto& xs = d.mu.nodes();
    if (!d.has_left || x >= xs[d.k0]) return d.li_inv(x, d.m);
    std::size_t i = d.mu.cell_of(x) + 1;
    if (x <= xs.front()) i = 0;
    return log_add(d.lres_left[i], d.li_inv(x, xs[i]));
}

double TailProfile::r(double x) const { return std::exp(log_r(x)); }
double TailProfile::ell(double x) const { return std::exp(log_ell(x)); }

double TailProfile::side_mass(Side s) const {
    return s == Side::right ? std::exp(log_R(p_->m)) : std::exp(log_L(p_->m));
}

double TailProfile::inverse_tail(Side s, double log_t) const {
    return s == Side::right ? p_->mu.inverse_log_tail_right(log_t) : p_->mu.inverse_log_tail_left(log_t);
}

double TailProfile::log_tail(Side s, double x) const { return s == Side::right ? log_R(x) : log_L(x); }
double TailProfile::log_res(Side s, double x) const { return s == Side::right ? log_r(x) : log_ell(x); }

double TailProfile::log_resistance(double a, double b) const {
    const Impl& d = *p_;
    if (!(b > a)) return neg_inf;
    const auto& xs = d.mu.nodes();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), a) - xs.begin());
    std::size_t e = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), b) - xs.begin());
    double prev = a, v = neg_inf;
    for (; i < e; ++i) {
        v = log_add(v, d.li_inv(prev, xs[i]));
        prev = xs[i];
    }
    return log_add(v, d.li_inv(prev, b));
}

void TailProfile::Impl::build_samples(Side side) const {
    SideSamples& out = side == Side::right ? s_right : s_left;
    const auto& xs = mu.nodes();
    const auto& lk = mu.log_kernel_nodes();
    (void)lk;
    const auto& lr = mu.log_right_nodes();
    const auto& ll = mu.log_left_nodes();
    double logZ = mu.log_Z();
    const auto& gk = quad::gk15();
    auto mu_k = [this](double z) { return mu.log_kernel(z); };
    auto inv = [this](double z) { return inv_nu(z); };

    // cell [a,b]; res_anchor/tail_anchor are the values at the end nearer to / farther from m
    auto add_cell = [&](double a, double b, double res_near, double tail_far) {
        double h = 0.5 * (b - a), c = 0.5 * (a + b);
        for (int k = 0; k < 15; ++k) {
            double z = c + h * gk.x[k];
            double lt, lres;
            if (side == Side::right) {
                lres = log_add(res_near, log_piece(inv, a, z));
                lt = log_add(tail_far, log_piece(mu_k, z, b)) - logZ;
            } else {
                lres = log_add(res_near, log_piece(inv, z, b));
                lt = log_add(tail_far, log_piece(mu_k, a, z)) - logZ;
            }
            out.x.push_back(z);
            out.dist.push_back(std::fabs(z - m));
            out.wk.push_back(gk.wk[k] * h);
            out.wg.push_back(gk.wg[k] * h);
            out.log_mu.push_back(mu.log_density(z));
            out.log_tail.push_back(lt);
            out.log_res.push_back(lres);
        }
    };
    std::size_t n = xs.size();
    if (side == Side::right) {
        if (!has_right) return;
        add_cell(m, xs[j0], neg_inf, lr[j0]);
        for (std::size_t j = j0; j + 1 < n; ++j) add_cell(xs[j], xs[j + 1], lres_right[j], lr[j + 1]);
    } else {
        if (!has_left) return;
        add_cell(xs[k0], m, neg_inf, ll[k0]);
        for (std::size_t k = k0; k-- > 0;) add_cell(xs[k], xs[k + 1], lres_left[k + 1], ll[k]);
    }
}

const SideSamples& TailProfile::samples(Side s) const {
    const Impl& d = *p_;
    if (s == Side::right) {
        std::call_once(d.once_right, [&] { d.build_samples(Side::right); });
        return d.s_right;
    }
    std::call_once(d.once_left, [&] { d.build_samples(Side::left); });
    return d.s_left;
}

}  // namespace lqineq
