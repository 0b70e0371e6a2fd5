#include "lqineq/capacity.hpp"

#include <algorithm>
#include <cmath>

#include "lqineq/errors.hpp"

namespace lqineq {

Capacity Capacity::finite(double v) {
    require(v >= 0 && !std::isnan(v), ErrorCode::bad_params, "capacity must be non-negative");
    if (std::isinf(v)) return infinite();
    return Capacity(false, v);
}

double Capacity::value() const {
    if (inf_) fail(ErrorCode::degenerate_condenser, "capacity is the +infinity marker");
    return v_;
}

Capacity Capacity::operator+(const Capacity& o) const {
    if (inf_ || o.inf_) return infinite();
    return finite(v_ + o.v_);
}

Capacity cap_halfline(const TailProfile& tails, double a) {
    double m = tails.median();
    if (a == m) return Capacity::infinite();
    double lr = a > m ? tails.log_r(a) : tails.log_ell(a);
    if (lr == quad::neg_inf) return Capacity::infinite();
    return Capacity::finite(std::exp(-lr));
}

Capacity cap_interval(const TailProfile& tails, Interval A, Interval B) {
    require(A.lo <= A.hi && B.lo <= A.lo && A.hi <= B.hi, ErrorCode::bad_params, "condenser needs A inside B");
    if (A.lo == B.lo || A.hi == B.hi) return Capacity::infinite();
    Interval sp = tails.nu().support();
    Capacity c = Capacity::finite(0.0);
    if (std::isfinite(B.lo) && B.lo >= sp.lo) c = c + Capacity::finite(std::exp(-tails.log_resistance(B.lo, A.lo)));
    if (std::isfinite(B.hi) && B.hi <= sp.hi) c = c + Capacity::finite(std::exp(-tails.log_resistance(A.hi, B.hi)));
    return c;
}

Capacity cap_variational(const Measure1D& nu, const Condenser& cond, int n_grid) {
    require(n_grid >= 16, ErrorCode::bad_params, "n_grid must be at least 16");
    require(!cond.inner.empty(), ErrorCode::bad_params, "condenser needs an inner set");
    Interval sp = nu.support(), win = nu.window();
    Interval B = cond.outer;
    // f vanishes at a finite end of B inside the support; elsewhere the end is free
    bool free_lo = !(std::isfinite(B.lo) && B.lo >= sp.lo);
    bool free_hi = !(std::isfinite(B.hi) && B.hi <= sp.hi);
    double lo = free_lo ? win.lo : B.lo;
    double hi = free_hi ? win.hi : B.hi;
    require(lo < hi, ErrorCode::bad_params, "outer set is empty");

    std::vector<Interval> A;
    for (Interval a : cond.inner) {
        require(a.lo <= a.hi && a.lo >= B.lo && a.hi <= B.hi, ErrorCode::bad_params, "condenser needs A inside B");
        if ((!free_lo && a.lo <= B.lo) || (!free_hi && a.hi >= B.hi)) return Capacity::infinite();
        A.push_back({std::max(a.lo, lo), std::min(a.hi, hi)});
    }

    double g0 = nu.to_grade(lo), g1 = nu.to_grade(hi);
    std::vector<double> y;
    y.reserve(static_cast<std::size_t>(n_grid) + 2 * A.size() + 1);
    for (int i = 0; i <= n_grid; ++i) y.push_back(i == 0 ? lo : i == n_grid ? hi : nu.from_grade(g0 + (g1 - g0) * i / n_grid));
    for (Interval a : A) {
        y.push_back(a.lo);
        y.push_back(a.hi);
    }
    std::sort(y.begin(), y.end());
    y.erase(std::unique(y.begin(), y.end()), y.end());

    std::size_t n = y.size();
    std::vector<double> mass = nu.cell_masses(y);
    std::vector<double> c(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double h = y[i + 1] - y[i];
        c[i] = mass[i] / (h * h);
    }

    enum State { free_node, one, zero };
    std::vector<State> st(n, free_node);
    for (std::size_t i = 0; i < n; ++i)
        for (Interval a : A)
            if (y[i] >= a.lo && y[i] <= a.hi) st[i] = one;
    if (!free_lo && st[0] != one) st[0] = zero;
    if (!free_hi && st[n - 1] != one) st[n - 1] = zero;
    bool any_zero = std::find(st.begin(), st.end(), zero) != st.end();
    if (!any_zero) return Capacity::finite(0.0);

    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(st[i] == one && st[i + 1] == one) && !(c[i] > 0))
            fail(ErrorCode::singular_weight, "nu vanishes on a cell of B \\ A");

    // tridiagonal system; fixed nodes carry identity rows
    std::vector<double> sub(n, 0.0), dia(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (st[i] != free_node) {
            dia[i] = 1.0;
            rhs[i] = st[i] == one ? 1.0 : 0.0;
            continue;
        }
        if (i > 0) {
            dia[i] += c[i - 1];
            sub[i] = -c[i - 1];
        }
        if (i + 1 < n) {
            dia[i] += c[i];
            sup[i] = -c[i];
        }
    }
    for (std::size_t i = 1; i < n; ++i) {
        double w = sub[i] / dia[i - 1];
        dia[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> f(n);
    f[n - 1] = rhs[n - 1] / dia[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) f[i] = (rhs[i] - sup[i] * f[i + 1]) / dia[i];

    double e = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double d = f[i + 1] - f[i];
        e += c[i] * d * d;
    }
    return Capacity::finite(e);
}

double w_transform(double s) { return s * std::log1p(std::exp(2.0) / s); }

namespace {
double log_w_of_log(double y) {
    // log(s log(1 + e^2/s)) with s = e^y
    double z = 2.0 - y;
    double sp = z > 30 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    return y + std::log(sp);
}
}  // namespace

double log_w_inverse(double log_t) {
    double hi = std::log(0.5), lo = -1e4;
    require(log_t <= log_w_of_log(hi) + 1e-15, ErrorCode::out_of_range, "w inverse needs t <= w(1/2)");
    require(log_t >= log_w_of_log(lo), ErrorCode::out_of_range, "w inverse argument underflows");
    for (int it = 0; it < 128 && hi - lo > 1e-15 * std::max(1.0, std::fabs(lo)); ++it) {
        double mid = 0.5 * (lo + hi);
        if (log_w_of_log(mid) < log_t) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double w_inverse(double t) {
    require(t > 0, ErrorCode::out_of_range, "w inverse needs t > 0");
    return std::exp(log_w_inverse(std::log(t)));
}

CapacityProfile phi_profile(const TailProfile& tails, Side side, const std::vector<double>& t_grid) {
    CapacityProfile out{side, t_grid, {}};
    double total = tails.side_mass(side);
    for (double t : t_grid) {
        require(t > 0 && t <= total * (1 + 1e-12), ErrorCode::out_of_range, "t outside (0, mu(Omega)]");
        if (t >= total) {
            out.values.push_back(Capacity::infinite());
            continue;
        }
        double a = tails.inverse_tail(side, std::log(t));
        out.values.push_back(cap_halfline(tails, a));
    }
    return out;
}

CapacityProfile psi_profile(const TailProfile& tails, Side side, const std::vector<double>& t_grid) {
    CapacityProfile out{side, t_grid, {}};
    double total = tails.side_mass(side);
    double wmax = w_transform(std::min(total, 0.5));
    for (double t : t_grid) {
        require(t > 0 && t <= wmax * (1 + 1e-12), ErrorCode::out_of_range, "t outside (0, w(mu(Omega))]");
        double s = w_inverse(std::min(t, wmax));
        if (s >= total) {
            out.values.push_back(Capacity::infinite());
            continue;
        }
        double a = tails.inverse_tail(side, std::log(s));
        out.values.push_back(cap_halfline(tails, a));
    }
    return out;
}

}  // namespace lqineq
