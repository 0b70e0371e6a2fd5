#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>

#include "lqineq/criteria.hpp"
#include "lqineq/errors.hpp"

namespace lqineq {

namespace {

struct FamilyInfo {
    TrialFamily bit;
    const char* name;
    int dim;
};

constexpr FamilyInfo kFamilies[] = {
    {trial_ramp_right, "ramp_right", 3}, {trial_ramp_left, "ramp_left", 3}, {trial_tent, "tent", 4},
    {trial_plateau, "plateau", 4},       {trial_exponential, "exponential", 2},
};

const FamilyInfo& info(const std::string& name) {
    for (const auto& f : kFamilies)
        if (name == f.name) return f;
    fail(ErrorCode::bad_params, "unknown trial family '" + name + "'");
}

double unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

struct Shape {
    double lo, hi, med, scale;  // window and interquartile length
    double pos(const Measure1D& mu, double u) const { return mu.quantile(0.001 + 0.998 * u); }
    double width(double u) const { return scale * std::pow(10.0, -2.0 + 3.0 * u); }
    static double theta(double u) { return 0.55 + 3.45 * u; }
    static double base(double u) { return u < 0.05 ? 0.0 : std::pow(10.0, -4.0 + 5.0 * (u - 0.05) / 0.95); }
};

Shape shape_of(const Measure1D& mu) {
    Interval w = mu.window();
    double iqr = mu.quantile(0.75) - mu.quantile(0.25);
    if (!(iqr > 0)) iqr = w.hi - w.lo;
    return {w.lo, w.hi, mu.median(), iqr};
}

std::vector<double> values_of(const Measure1D& mu, const Shape& sh, const FamilyInfo& fam, const std::vector<double>& u) {
    require(static_cast<int>(u.size()) == fam.dim, ErrorCode::bad_params, "wrong number of trial parameters");
    const auto& x = *mu.window_nodes();
    std::vector<double> v(x.size());
    switch (fam.bit) {
        case trial_ramp_right:
        case trial_ramp_left: {
            double a = sh.pos(mu, u[0]), th = Shape::theta(u[1]), b = Shape::base(u[2]);
            double sg = fam.bit == trial_ramp_right ? 1.0 : -1.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                double d = sg * (x[i] - a);
                v[i] = (d > 0 ? std::pow(d / sh.scale, th) : 0.0) + b;
            }
            break;
        }
        case trial_tent: {
            double c = sh.pos(mu, u[0]), w = sh.width(u[1]), th = Shape::theta(u[2]), b = Shape::base(u[3]);
            for (std::size_t i = 0; i < x.size(); ++i) {
                double d = 1 - std::fabs(x[i] - c) / w;
                v[i] = (d > 0 ? std::pow(d, th) : 0.0) + b;
            }
            break;
        }
        case trial_plateau: {
            double c = sh.pos(mu, u[0]), w = sh.width(u[1]), w2 = sh.width(u[2]), b = Shape::base(u[3]);
            for (std::size_t i = 0; i < x.size(); ++i)
                v[i] = std::clamp((w + w2 - std::fabs(x[i] - c)) / w2, 0.0, 1.0) + b;
            break;
        }
        case trial_exponential: {
            double lam = (-6.0 + 12.0 * u[0]) / sh.scale, b = Shape::base(u[1]);
            double top = 0.5 * lam * ((lam > 0 ? sh.hi : sh.lo) - sh.med);
            for (std::size_t i = 0; i < x.size(); ++i) v[i] = std::exp(0.5 * lam * (x[i] - sh.med) - top) + b;
            break;
        }
        default: fail(ErrorCode::bad_params, "unknown trial family");
    }
    return v;
}

enum class Functional { variance, entropy };

struct Evaluator {
    const Measure1D& mu;
    std::vector<double> nu_mass;  // nu mass of each window cell of mu
    Shape sh;
    double q;
    Functional kind;

    // quotient, or -1 for a degenerate trial
    double operator()(std::vector<double> v) const {
        const auto& x = *mu.window_nodes();
        double e = 0;
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            double d = (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
            if (d != 0) e += d * d * nu_mass[i];
        }
        if (!(e > 0) || !std::isfinite(e)) return -1;
        GridFunction f(mu.window_nodes(), std::move(v));
        double num = kind == Functional::variance ? variance_q(mu, f, q) : entropy_q(mu, f, q);
        double r = num / e;
        return std::isfinite(r) ? r : -1;
    }
};

struct StartResult {
    double value = -1;
    std::vector<double> params;
    int evaluations = 0;
};

StartResult ascend(const Evaluator& ev, const FamilyInfo& fam, std::vector<double> u, int max_sweeps) {
    StartResult r;
    auto eval = [&](const std::vector<double>& p) {
        ++r.evaluations;
        return ev(values_of(ev.mu, ev.sh, fam, p));
    };
    double best = eval(u);
    double delta = 0.125;
    for (int sweep = 0; sweep < max_sweeps && delta >= 1.0 / 1024; ++sweep) {
        bool moved = false;
        for (int k = 0; k < fam.dim; ++k)
            for (double sg : {1.0, -1.0}) {
                std::vector<double> t = u;
                t[static_cast<std::size_t>(k)] = std::clamp(u[static_cast<std::size_t>(k)] + sg * delta, 0.0, 1.0);
                if (t == u) continue;
                double v = eval(t);
                if (v > best) {
                    best = v;
                    u = t;
                    moved = true;
                    break;
                }
            }
        if (!moved) delta *= 0.5;
    }
    r.value = best;
    r.params = u;
    return r;
}

TrialResult run(const Measure1D& mu, const Measure1D& nu, double q, const TrialSet& set, std::uint64_t seed,
                Functional kind) {
    require(q > 0 && q <= 1, ErrorCode::bad_params, "q must lie in (0,1]");
    require(set.multistarts >= 0 && set.max_sweeps >= 0, ErrorCode::bad_params, "bad trial settings");
    std::vector<const FamilyInfo*> fams;
    for (const auto& f : kFamilies)
        if (set.families & f.bit) fams.push_back(&f);
    require(!fams.empty(), ErrorCode::bad_params, "empty trial family set");

    Evaluator ev{mu, nu.cell_masses(*mu.window_nodes()), shape_of(mu), q, kind};
    TrialResult out{{kind == Functional::variance ? ConstantName::C_P : ConstantName::C_LS, q, std::nullopt,
                     std::nullopt, "", "", {}},
                    "", {}, 0};

    // canonical linear trials first
    const auto& x = *mu.window_nodes();
    double best = -1;
    for (int side = 0; side < 2; ++side) {
        std::vector<double> v(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) v[i] = side == 0 ? x[i] - ev.sh.lo : ev.sh.hi - x[i];
        ++out.evaluations;
        double r = ev(std::move(v));
        if (r > best) {
            best = r;
            out.best_family = side == 0 ? "linear_up" : "linear_down";
            out.best_params.clear();
        }
    }

    std::mt19937_64 gen(seed);
    std::vector<std::vector<double>> starts(static_cast<std::size_t>(set.multistarts));
    for (int s = 0; s < set.multistarts; ++s) {
        const FamilyInfo& f = *fams[static_cast<std::size_t>(s) % fams.size()];
        for (int k = 0; k < f.dim; ++k) starts[static_cast<std::size_t>(s)].push_back(unit(gen));
    }
    std::vector<StartResult> res(starts.size());
    unsigned hw = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::size_t nthreads = std::min<std::size_t>(hw, starts.size());
    auto work = [&](std::size_t t) {
        for (std::size_t s = t; s < starts.size(); s += nthreads)
            res[s] = ascend(ev, *fams[s % fams.size()], starts[s], set.max_sweeps);
    };
    if (nthreads <= 1) {
        if (!starts.empty()) work(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
    }
    for (std::size_t s = 0; s < res.size(); ++s) {
        out.evaluations += res[s].evaluations;
        if (res[s].value > best) {
            best = res[s].value;
            out.best_family = fams[s % fams.size()]->name;
            out.best_params = res[s].params;
        }
    }
    if (!(best > 0)) fail(ErrorCode::all_trials_degenerate, "every trial function has zero energy or zero spread");
    out.estimate.lower = best;
    out.estimate.provenance_lower =
        std::string(kind == Functional::variance ? "[Var(f^q)]^{1/q}" : "[Ent(f^{2q})]^{1/q}") +
        " / Dirichlet energy, maximized over piecewise-linear trial functions (best: " + out.best_family + ")";
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d quotient evaluations", out.evaluations);
    out.estimate.diagnostics.push_back(buf);
    return out;
}

}  // namespace

TrialResult cp_lower_trial(const Measure1D& mu, const Measure1D& nu, double q, const TrialSet& set,
                           std::uint64_t seed) {
    return run(mu, nu, q, set, seed, Functional::variance);
}

TrialResult cls_lower_trial(const Measure1D& mu, const Measure1D& nu, double q, const TrialSet& set,
                            std::uint64_t seed) {
    return run(mu, nu, q, set, seed, Functional::entropy);
}

GridFunction trial_function(const Measure1D& mu, const std::string& family, const std::vector<double>& params) {
    for (double u : params) require(u >= 0 && u <= 1, ErrorCode::bad_params, "trial parameters lie in [0,1]");
    return GridFunction(mu.window_nodes(), values_of(mu, shape_of(mu), info(family), params));
}

}  // namespace lqineq
