#include <algorithm>
#include <cmath>

#include "lqineq/errors.hpp"
#include "lqineq/measure.hpp"

namespace lqineq {

GridFunction::GridFunction(std::shared_ptr<const std::vector<double>> nodes, std::vector<double> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
    require(nodes_ && nodes_->size() == values_.size() && values_.size() >= 2, ErrorCode::bad_grid,
            "grid function needs matching nodes and values");
}

double GridFunction::operator()(double x) const {
    const auto& n = *nodes_;
    if (x <= n.front()) return values_.front();
    if (x >= n.back()) return values_.back();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(n.begin(), n.end(), x) - n.begin()) - 1;
    double t = (x - n[i]) / (n[i + 1] - n[i]);
    return (1 - t) * values_[i] + t * values_[i + 1];
}

namespace {

// calls visit(weight, f(point)) for every quadrature point of the window rule
template <class V>
void for_each_point(const Measure1D& mu, const GridFunction& f, V&& visit) {
    const auto& qx = mu.window_rule_x();
    const auto& qw = mu.window_rule_w();
    if (f.nodes_ptr() == mu.window_nodes()) {
        const auto& gl = quad::gl7();
        const auto& v = f.values();
        std::size_t nc = v.size() - 1;
        for (std::size_t i = 0; i < nc; ++i)
            for (int j = 0; j < 7; ++j) {
                double lam = 0.5 * (1 + gl.x[j]);
                visit(qw[7 * i + j], (1 - lam) * v[i] + lam * v[i + 1]);
            }
        return;
    }
    for (std::size_t k = 0; k < qx.size(); ++k) visit(qw[k], f(qx[k]));
}

void check_nonnegative(const GridFunction& f) {
    for (double v : f.values())
        if (v < 0 || std::isnan(v)) fail(ErrorCode::negative_input, "grid function takes negative values");
}

}  // namespace

double integrate_composed(const Measure1D& mu, const GridFunction& f, const std::function<double(double)>& g) {
    double s = 0;
    for_each_point(mu, f, [&](double w, double v) { s += w * g(v); });
    return s;
}

double variance_q(const Measure1D& mu, const GridFunction& f, double q) {
    require(q > 0 && q <= 1, ErrorCode::bad_params, "q must lie in (0,1]");
    check_nonnegative(f);
    double m0 = 0, m1 = 0;
    for_each_point(mu, f, [&](double w, double v) {
        m0 += w;
        m1 += w * std::pow(v, q);
    });
    // the window carries all but the reported truncation mass; condition on it
    m1 /= m0;
    double var = 0;
    for_each_point(mu, f, [&](double w, double v) {
        double d = std::pow(v, q) - m1;
        var += w * d * d;
    });
    return std::pow(var / m0, 1.0 / q);
}

double entropy_q(const Measure1D& mu, const GridFunction& f, double q) {
    require(q > 0 && q <= 1, ErrorCode::bad_params, "q must lie in (0,1]");
    check_nonnegative(f);
    double m0 = 0, m1 = 0;
    for_each_point(mu, f, [&](double w, double v) {
        m0 += w;
        m1 += w * std::pow(v, 2 * q);
    });
    if (!(m1 > 0)) fail(ErrorCode::zero_mass, "integral of f^{2q} vanishes");
    double mean = m1 / m0;
    // g log(g/mean) - g + mean integrates to the entropy and is pointwise >= 0
    double ent = 0;
    for_each_point(mu, f, [&](double w, double v) {
        double r = std::pow(v, 2 * q) / mean - 1;
        double t;
        if (std::fabs(r) < 1e-2) {
            // (1+r) log(1+r) - r = sum_{k>=2} (-r)^k / (k(k-1))
            t = 0;
            double pk = r * r;
            for (int k = 2; k <= 10; ++k, pk *= -r) t += pk / (k * (k - 1));
        } else {
            t = r <= -1 ? 1.0 : (1 + r) * std::log1p(r) - r;
        }
        ent += w * mean * t;
    });
    return std::pow(std::max(0.0, ent / m0), 1.0 / q);
}

double dirichlet_energy(const Measure1D& nu, const GridFunction& f) {
    const auto& n = f.nodes();
    std::vector<double> mass = nu.cell_masses(n);
    const auto& v = f.values();
    double e = 0;
    for (std::size_t i = 0; i + 1 < n.size(); ++i) {
        double d = (v[i + 1] - v[i]) / (n[i + 1] - n[i]);
        if (d != 0) e += d * d * mass[i];
    }
    return e;
}

double oscillation(const Measure1D& mu, const GridFunction& f) {
    Interval w = mu.window();
    double lo = INFINITY, hi = -INFINITY;
    const auto& n = f.nodes();
    const auto& v = f.values();
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (n[i] < w.lo || n[i] > w.hi) continue;
        lo = std::min(lo, v[i]);
        hi = std::max(hi, v[i]);
    }
    return hi >= lo ? hi - lo : 0.0;
}

}  // namespace lqineq
