#include "lqineq/wpme.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lqineq/errors.hpp"

namespace lqineq {

WpmeProblem discretize(std::function<double(double)> psi, double m, Interval domain, int n_cells,
                       const std::function<double(double)>& u0) {
    require(n_cells >= 16, ErrorCode::bad_grid, "need at least 16 cells");
    require(std::isfinite(domain.lo) && std::isfinite(domain.hi) && domain.lo < domain.hi, ErrorCode::bad_grid,
            "domain must be a bounded interval");
    require(m >= 1, ErrorCode::bad_params, "m must be >= 1");
    WpmeProblem pb{std::move(psi), m, domain, n_cells, (domain.hi - domain.lo) / n_cells, {}, {}, {}, {}};
    auto n = static_cast<std::size_t>(n_cells);
    std::vector<double> pc(n), pf(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        pb.x.push_back(domain.lo + (static_cast<double>(i) + 0.5) * pb.dx);
        pc[i] = pb.psi(pb.x[i]);
        require(std::isfinite(pc[i]), ErrorCode::bad_params, "psi must be finite on the domain");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        pf[i] = pb.psi(domain.lo + static_cast<double>(i + 1) * pb.dx);
        require(std::isfinite(pf[i]), ErrorCode::bad_params, "psi must be finite on the domain");
    }
    double shift = *std::min_element(pc.begin(), pc.end());
    double Z = 0;
    for (double p : pc) Z += std::exp(shift - p) * pb.dx;
    for (double p : pc) pb.w.push_back(std::exp(shift - p) * pb.dx / Z);
    for (double p : pf) pb.a.push_back(std::exp(shift - p) / (Z * pb.dx));
    for (double xi : pb.x) {
        double v = u0(xi);
        require(v >= 0 && std::isfinite(v), ErrorCode::negative_input, "initial data must be finite and non-negative");
        pb.u0.push_back(v);
    }
    return pb;
}

Interval truncated_domain(const std::function<double(double)>& psi, double x0, double h, double limit) {
    require(h > 0, ErrorCode::bad_params, "step must be positive");
    double cut = std::log(1e16);
    // minimum of psi along the walk, then the first point beyond the cut on each side
    auto walk = [&](double dir) {
        double best = psi(x0), x = x0;
        while (std::fabs(x - x0) < limit) {
            x += dir * h;
            double p = psi(x);
            best = std::min(best, p);
            if (p - best > cut) return x;
        }
        fail(ErrorCode::non_integrable_density, "e^{-psi} does not decay within the walk limit");
    };
    return {walk(-1.0), walk(1.0)};
}

double wpme_mass(const WpmeProblem& pb, const std::vector<double>& u) {
    double s = 0;
    for (std::size_t i = 0; i < u.size(); ++i) s += pb.w[i] * u[i];
    return s;
}

double wpme_variance(const WpmeProblem& pb, const std::vector<double>& u) {
    double mu = wpme_mass(pb, u), s = 0;
    for (std::size_t i = 0; i < u.size(); ++i) s += pb.w[i] * (u[i] - mu) * (u[i] - mu);
    return s;
}

double wpme_entropy(const WpmeProblem& pb, const std::vector<double>& u) {
    double mu = wpme_mass(pb, u), s = 0;
    if (!(mu > 0)) return 0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] > 0) s += pb.w[i] * (u[i] * std::log(u[i] / mu) - u[i] + mu);
    return std::max(0.0, s);
}

namespace {

double face_sum(const WpmeProblem& pb, const std::vector<double>& u, double power) {
    double s = 0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        double d = std::pow(std::max(u[i + 1], 0.0), power) - std::pow(std::max(u[i], 0.0), power);
        s += pb.a[i] * d * d;
    }
    return s;
}

// (A v)_i = sum over faces of a_f (v_j - v_i)
void apply_A(const WpmeProblem& pb, const std::vector<double>& v, std::vector<double>& out) {
    std::size_t n = v.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double f = pb.a[i] * (v[i + 1] - v[i]);
        out[i] += f;
        out[i + 1] -= f;
    }
}

struct Attempt {
    bool ok;
    std::vector<double> u;
    int iterations;
    double residual;
    std::string why;
};

Attempt one_step(const WpmeProblem& pb, const std::vector<double>& u, double dt, const StepOptions& opt) {
    std::size_t n = u.size();
    double m = pb.m, th = opt.theta;
    auto phi = [m](double v) { return std::pow(std::max(v, 0.0), m); };
    std::vector<double> um(n), Aum(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) um[i] = phi(u[i]);
    apply_A(pb, um, Aum);
    // W u + dt (1 - theta) A u^m
    for (std::size_t i = 0; i < n; ++i) rhs[i] = pb.w[i] * u[i] + dt * (1 - th) * Aum[i];

    double scale = 1.0;
    for (double v : u) scale = std::max(scale, std::fabs(v));
    std::vector<double> v = u, vm(n), Av(n), F(n), dg(n), lo(n), up(n), dv(n);
    Attempt at{false, {}, 0, INFINITY, ""};
    for (int it = 0; it <= opt.max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) vm[i] = phi(v[i]);
        apply_A(pb, vm, Av);
        double res = 0;
        for (std::size_t i = 0; i < n; ++i) {
            F[i] = pb.w[i] * v[i] - dt * th * Av[i] - rhs[i];
            res = std::max(res, std::fabs(F[i]) / pb.w[i]);
        }
        at.residual = res;
        at.iterations = it;
        if (!std::isfinite(res)) {
            at.why = "non-finite Newton residual";
            return at;
        }
        if (res <= opt.tol * scale) break;
        if (it == opt.max_iter) {
            at.why = "Newton did not converge";
            return at;
        }
        // J = W - dt theta A diag(m max(v, eps)^{m-1})
        for (std::size_t i = 0; i < n; ++i) {
            dv[i] = m * std::pow(std::max(v[i], 1e-14), m - 1);
            dg[i] = pb.w[i];
            lo[i] = up[i] = 0;
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double c = dt * th * pb.a[i];
            dg[i] += c * dv[i];
            up[i] = -c * dv[i + 1];
            dg[i + 1] += c * dv[i + 1];
            lo[i + 1] = -c * dv[i];
        }
        // Thomas
        for (std::size_t i = 1; i < n; ++i) {
            double r = lo[i] / dg[i - 1];
            dg[i] -= r * up[i - 1];
            F[i] -= r * F[i - 1];
        }
        F[n - 1] /= dg[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) F[i] = (F[i] - up[i] * F[i + 1]) / dg[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= F[i];
    }
    double mass = wpme_mass(pb, u), clip = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (v[i] < 0) clip += pb.w[i] * -v[i];
    if (clip > 0) {
        if (clip >= 1e-12 * mass) {
            at.why = "positivity clip exceeds rounding";
            return at;
        }
        for (double& x : v) x = std::max(x, 0.0);
        double mv = wpme_mass(pb, v);
        if (mv > 0)
            for (double& x : v) x *= mass / mv;
    }
    at.ok = true;
    at.u = std::move(v);
    return at;
}

}  // namespace

WpmeState step_implicit(const WpmeProblem& pb, const WpmeState& s, double dt, const StepOptions& opt) {
    require(dt > 0, ErrorCode::bad_params, "dt must be positive");
    require(opt.theta >= 0.5 && opt.theta <= 1, ErrorCode::bad_params, "theta must lie in [1/2, 1]");
    require(s.u.size() == pb.w.size(), ErrorCode::grid_mismatch, "state does not match the grid");
    WpmeState out = s;
    out.newton = {};
    double remaining = dt, h = dt;
    int halvings = 0;
    while (remaining > 0) {
        double step = std::min(h, remaining);
        if (remaining - step < 1e-12 * dt) step = remaining;
        Attempt at = one_step(pb, out.u, step, opt);
        if (!at.ok) {
            if (++halvings > opt.max_halvings) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "%s after %d dt halvings (residual %.3g); reduce dt", at.why.c_str(),
                              opt.max_halvings, at.residual);
                fail(ErrorCode::newton_diverged, buf);
            }
            h = 0.5 * step;
            continue;
        }
        out.u = std::move(at.u);
        out.newton.iterations = std::max(out.newton.iterations, at.iterations);
        out.newton.residual = std::max(out.newton.residual, at.residual);
        ++out.newton.steps;
        remaining -= step;
    }
    out.newton.halvings = halvings;
    out.t = s.t + dt;
    return out;
}

double wpme_dissipation(const WpmeProblem& pb, const std::vector<double>& u) { return face_sum(pb, u, 0.5 * (pb.m + 1)); }
double wpme_energy_m(const WpmeProblem& pb, const std::vector<double>& u) { return face_sum(pb, u, pb.m); }

double envelope_var(double var0, double m, double C_P, double t) {
    if (var0 <= 0) return 0;
    if (m == 1) return var0 * std::exp(-2 * t / C_P);
    double k = 4 * m * (m - 1) / ((m + 1) * (m + 1));
    return std::pow(std::pow(var0, -(m - 1) / 2) + k * t / C_P, -2 / (m - 1));
}

double envelope_ent(double ent0, double m, double C_LS, double t) {
    if (ent0 <= 0) return 0;
    if (m == 1) return ent0 * std::exp(-4 * t / C_LS);
    return std::pow(std::pow(ent0, 1 - m) + 4 * (m - 1) / m * t / C_LS, -1 / (m - 1));
}

namespace {

double checked_constant(const std::optional<ConstantEstimate>& c, double q_expected, const char* what) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s must be an L^q constant with q = %.12g", what, q_expected);
    require(std::fabs(c->q - q_expected) <= 1e-12, ErrorCode::bad_params, buf);
    std::snprintf(buf, sizeof buf, "%s estimate carries no upper bound", what);
    if (!c->upper) fail(ErrorCode::missing_constant, buf);
    return *c->upper;
}

}  // namespace

DecayTrace run(const WpmeProblem& pb, const RunOptions& opt) {
    require(opt.T > 0 && opt.dt > 0, ErrorCode::bad_params, "T and dt must be positive");
    for (std::size_t i = 0; i < opt.sample_times.size(); ++i) {
        require(opt.sample_times[i] >= 0 && opt.sample_times[i] <= opt.T * (1 + 1e-12), ErrorCode::bad_params,
                "sample times must lie in [0, T]");
        if (i > 0) require(opt.sample_times[i] > opt.sample_times[i - 1], ErrorCode::bad_params, "sample times must increase");
    }
    DecayTrace tr;
    tr.m = pb.m;
    tr.weights = pb.w;
    if (opt.C_P) tr.C_P = checked_constant(opt.C_P, 2 / (pb.m + 1), "C_P");
    if (opt.C_LS) tr.C_LS = checked_constant(opt.C_LS, 1 / pb.m, "C_LS");

    WpmeState s{0.0, pb.u0, {}};
    double var0 = wpme_variance(pb, s.u), ent0 = wpme_entropy(pb, s.u);
    double cum = 0, e_prev = wpme_energy_m(pb, s.u);
    auto record = [&](const WpmeState& st, double e_now) {
        tr.times.push_back(st.t);
        tr.mass.push_back(wpme_mass(pb, st.u));
        tr.variance.push_back(wpme_variance(pb, st.u));
        tr.entropy.push_back(wpme_entropy(pb, st.u));
        tr.dissipation.push_back(wpme_dissipation(pb, st.u));
        tr.energy_m.push_back(e_now);
        tr.energy_integral.push_back(cum);
        double mom = 0;
        for (std::size_t i = 0; i < st.u.size(); ++i) mom += pb.w[i] * std::pow(st.u[i], pb.m + 1);
        tr.moment.push_back(mom);
        if (tr.C_P) tr.envelope_var.push_back(envelope_var(var0, pb.m, *tr.C_P, st.t));
        if (tr.C_LS) tr.envelope_ent.push_back(envelope_ent(ent0, pb.m, *tr.C_LS, st.t));
        if (opt.keep_states) tr.states.push_back(st.u);
    };

    bool every = opt.sample_times.empty();
    std::size_t next = 0;
    if (every || opt.sample_times.front() == 0) {
        record(s, e_prev);
        if (!every) next = 1;
    }
    auto nsteps = static_cast<long>(std::ceil(opt.T / opt.dt - 1e-9));
    for (long k = 0; k < nsteps; ++k) {
        double t_end = std::min(opt.T, static_cast<double>(k + 1) * opt.dt);
        // land exactly on sample times inside this step
        while (!every && next < opt.sample_times.size() && opt.sample_times[next] < t_end - 1e-12 * opt.dt) {
            double ts = opt.sample_times[next];
            if (ts > s.t) {
                WpmeState ns = step_implicit(pb, s, ts - s.t, opt.step);
                double e = wpme_energy_m(pb, ns.u);
                cum += 0.5 * (pb.m + 1) * (e + e_prev) * (ns.t - s.t);
                e_prev = e;
                tr.newton.iterations = std::max(tr.newton.iterations, ns.newton.iterations);
                tr.newton.halvings += ns.newton.halvings;
                s = std::move(ns);
                s.t = ts;
            }
            record(s, e_prev);
            ++next;
        }
        WpmeState ns = step_implicit(pb, s, t_end - s.t, opt.step);
        double e = wpme_energy_m(pb, ns.u);
        cum += 0.5 * (pb.m + 1) * (e + e_prev) * (ns.t - s.t);
        e_prev = e;
        tr.newton.iterations = std::max(tr.newton.iterations, ns.newton.iterations);
        tr.newton.residual = std::max(tr.newton.residual, ns.newton.residual);
        tr.newton.halvings += ns.newton.halvings;
        tr.newton.steps += ns.newton.steps;
        s = std::move(ns);
        s.t = t_end;
        if (every) {
            record(s, e);
        } else if (next < opt.sample_times.size() && std::fabs(opt.sample_times[next] - t_end) <= 1e-12 * opt.dt + 1e-15) {
            record(s, e);
            ++next;
        }
    }
    return tr;
}

ContractionReport check_contraction(const DecayTrace& u, const DecayTrace& v) {
    require(u.times == v.times && u.weights == v.weights, ErrorCode::grid_mismatch,
            "trajectories need identical grids and sample times");
    require(u.states.size() == u.times.size() && v.states.size() == v.times.size(), ErrorCode::grid_mismatch,
            "trajectories were run without keep_states");
    ContractionReport r;
    for (std::size_t k = 0; k < u.times.size(); ++k) {
        double s = 0;
        for (std::size_t i = 0; i < u.weights.size(); ++i) s += u.weights[i] * std::max(u.states[k][i] - v.states[k][i], 0.0);
        if (k > 0) r.max_violation = std::max(r.max_violation, s - r.positive_part.back());
        r.positive_part.push_back(s);
    }
    return r;
}

double energy_identity_residual(const DecayTrace& tr) {
    if (tr.times.empty()) return 0;
    double r = 0;
    for (std::size_t k = 0; k < tr.times.size(); ++k)
        r = std::max(r, std::fabs(tr.energy_integral[k] + tr.moment[k] - tr.moment.front()));
    // the first sample must be t = 0 for moment.front() to be the initial moment
    require(tr.times.front() == 0, ErrorCode::bad_params, "energy identity needs the t = 0 sample");
    return r;
}

double dissipation_identity_residual(const DecayTrace& tr) {
    double k = 8 * tr.m / ((tr.m + 1) * (tr.m + 1)), r = 0;
    for (std::size_t i = 1; i + 1 < tr.times.size(); ++i) {
        double d = (tr.variance[i + 1] - tr.variance[i - 1]) / (tr.times[i + 1] - tr.times[i - 1]);
        r = std::max(r, std::fabs(d + k * tr.dissipation[i]));
    }
    return r;
}

EnvelopeVerdict envelope_verdict(const DecayTrace& tr) {
    if (!tr.C_P && !tr.C_LS) fail(ErrorCode::missing_constant, "envelope verdict needs C_P or C_LS");
    EnvelopeVerdict v;
    auto check = [&](const std::vector<double>& val, const std::vector<double>& env, double& ratio) {
        bool ok = true;
        for (std::size_t i = 0; i < val.size(); ++i) {
            if (val[i] > env[i] * (1 + 1e-6)) ok = false;
            if (env[i] > 0) ratio = std::max(ratio, val[i] / env[i]);
            else if (val[i] > 0) ratio = INFINITY;
        }
        return ok;
    };
    if (tr.C_P) {
        v.var_checked = true;
        if (!check(tr.variance, tr.envelope_var, v.max_ratio_var)) {
            v.pass = false;
            v.diagnostics.push_back("variance exceeds its envelope");
        }
        if (tr.times.size() >= 2 && tr.times.front() == 0) {
            double slope = -(tr.variance[1] - tr.variance[0]) / (tr.times[1] - tr.times[0]);
            double km = 8 * tr.m / ((tr.m + 1) * (tr.m + 1));
            if (slope > 0) {
                v.reciprocal_cp = km * std::pow(tr.variance[0], 0.5 * (tr.m + 1)) / slope;
                char buf[160];
                std::snprintf(buf, sizeof buf, "initial slope gives C_P >= %.6g (diagnostic, not certified)", *v.reciprocal_cp);
                v.diagnostics.push_back(buf);
            }
        }
    }
    if (tr.C_LS) {
        v.ent_checked = true;
        if (!check(tr.entropy, tr.envelope_ent, v.max_ratio_ent)) {
            v.pass = false;
            v.diagnostics.push_back("entropy exceeds its envelope");
        }
    }
    return v;
}

}  // namespace lqineq
