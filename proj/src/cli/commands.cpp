#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "lqineq/capacity.hpp"
#include "lqineq/cli.hpp"
#include "lqineq/errors.hpp"
#include "lqineq/wpme.hpp"

namespace fs = std::filesystem;

namespace lqineq::cli {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LQINEQ_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 1024L));
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

json header(const json& cfg) {
    return {{"tool", "lqineq"}, {"version", kVersion}, {"command", cfg["command"]}, {"config_hash", config_hash(cfg)}};
}

std::string csv_preamble(const json& cfg) {
    return std::string("# lqineq ") + kVersion + " " + cfg["command"].get<std::string>() + " config " + config_hash(cfg) + "\n";
}

std::uint64_t seed_of(const json& cfg) { return cfg.value("seed", std::uint64_t{42}); }

void prepare_out(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) fail(ErrorCode::config, "cannot create output directory '" + dir + "'");
}

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

json kappa_json(double q) {
    KappaResult kp = kappa_P(q), kl = kappa_LS(q, KappaLsForm::published), kg = kappa_LS(q, KappaLsForm::with_gradient);
    auto one = [](const KappaResult& k) { return json{{"value", k.value}, {"rho", k.rho}, {"at_boundary", k.at_boundary}}; };
    return {{"q", q}, {"kappa_P", one(kp)}, {"kappa_LS_published", one(kl)}, {"kappa_LS_with_gradient", one(kg)}};
}

// keeps the better side of each bound; an ordering violation becomes a diagnostic instead of a throw
ConstantEstimate combine(ConstantEstimate a, const ConstantEstimate& b) {
    try {
        return merge(a, b);
    } catch (const Error& e) {
        a.diagnostics.push_back(std::string("bounds out of order: ") + e.what());
        return a;
    }
}

struct Measures {
    Measure1D mu, nu;
};

Measures measures_from(const json& cfg) {
    QuadratureConfig qc = tolerances_from(cfg);
    Measure1D mu = measure_from(cfg["measure"], qc);
    Measure1D nu = cfg.contains("reference") ? measure_from(cfg["reference"], qc) : mu;
    return {mu, nu};
}

// ---------------------------------------------------------------- analyze

int cmd_analyze(const json& cfg, const Options& o) {
    auto [mu, nu] = measures_from(cfg);
    if (!mu.is_probability()) fail(ErrorCode::config, "analyze needs a probability measure");
    prepare_out(o.out_dir);
    TailProfile tp(mu, nu);
    json rates_cfg = cfg.value("rates", json::object());
    auto grid = dyadic_s_grid(rates_cfg.value("per_octave", 8), rates_cfg.value("octaves", 1000));
    TrialSet ts = trials_from(cfg);
    std::uint64_t seed = seed_of(cfg);

    json diagnostics = json::array();
    std::optional<RateFunction> bwp, hwls;
    try {
        bwp = weak_poincare_from_tails(tp, grid);
    } catch (const Error& e) {
        diagnostics.push_back(std::string("beta_WP: ") + e.what());
    }
    try {
        hwls = weak_lsi_from_capacity(tp, grid);
    } catch (const Error& e) {
        diagnostics.push_back(std::string("h_WLS: ") + e.what());
    }

    bool any_divergence = false, any_finite = false;
    json results = json::array(), kappas = json::array();
    for (double q : cfg["q"].get<std::vector<double>>()) {
        kappas.push_back(kappa_json(q));
        json r{{"q", q}};
        json div = json::array();
        HardyReport hp = hardy_check_poincare(tp, q), hl = hardy_check_lsi(tp, q);
        r["hardy"] = {{"poincare", to_json(hp)}, {"lsi", to_json(hl)}};
        if (hp.verdict != Verdict::satisfied) div.push_back("Hardy integral for the Poincare inequality diverges");
        if (hl.verdict != Verdict::satisfied) div.push_back("Hardy integral for the log-Sobolev inequality diverges");

        json est = json::object();
        ConstantEstimate cp{ConstantName::C_P, q, std::nullopt, std::nullopt, "", "", {}};
        ConstantEstimate cls{ConstantName::C_LS, q, std::nullopt, std::nullopt, "", "", {}};
        try {
            ConstantEstimate b = beta_P_upper(tp, q);
            est["beta_P_upper"] = to_json(b);
            ConstantEstimate c = cp_upper(tp, q);
            est["cp_upper"] = to_json(c);
            if (!c.upper) div.push_back("cp_upper: profile norm diverges");
            cp = combine(cp, c);
        } catch (const Error& e) {
            est["cp_upper"] = {{"error", e.what()}};
        }
        if (bwp) {
            try {
                ConstantEstimate c = cp_upper_from_weak(*bwp, q);
                est["cp_upper_from_weak"] = to_json(c);
                cp = combine(cp, c);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::norm_divergent) throw;
                est["cp_upper_from_weak"] = {{"divergent", true}, {"diagnostic", e.what()}};
                div.push_back("cp_upper_from_weak: rate norm diverges");
            }
        }
        if (hwls) {
            try {
                ConstantEstimate c = cls_upper_from_weak(*hwls, q);
                est["cls_upper_from_weak"] = to_json(c);
                cls = combine(cls, c);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::norm_divergent) throw;
                est["cls_upper_from_weak"] = {{"divergent", true}, {"diagnostic", e.what()}};
                div.push_back("cls_upper_from_weak: rate norm diverges");
            }
        }
        json trials = json::object();
        for (int kind = 0; kind < 2; ++kind) {
            try {
                TrialResult t = kind == 0 ? cp_lower_trial(mu, nu, q, ts, seed) : cls_lower_trial(mu, nu, q, ts, seed);
                est[kind == 0 ? "cp_lower_trial" : "cls_lower_trial"] = to_json(t.estimate);
                trials[kind == 0 ? "cp" : "cls"] = {
                    {"best_family", t.best_family}, {"best_params", t.best_params}, {"evaluations", t.evaluations}};
                if (kind == 0) cp = combine(cp, t.estimate);
                else cls = combine(cls, t.estimate);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::all_trials_degenerate) throw;
                est[kind == 0 ? "cp_lower_trial" : "cls_lower_trial"] = {{"error", e.what()}};
            }
        }
        est["C_P"] = to_json(cp);
        est["C_LS"] = to_json(cls);
        r["estimates"] = est;
        r["trials"] = trials;
        r["divergences"] = div;
        any_divergence = any_divergence || !div.empty();
        any_finite = any_finite || cp.upper.has_value();
        results.push_back(r);
    }

    json rep = header(cfg);
    rep["measure"] = measure_json(mu);
    rep["reference"] = measure_json(nu);
    rep["seed"] = seed;
    rep["constants"] = {{"K", constant_K()}, {"c_ls", constant_c_ls()}, {"kappa", kappas}};
    rep["rates"] = {{"beta_WP", bwp ? to_json(*bwp) : json(nullptr)}, {"h_WLS", hwls ? to_json(*hwls) : json(nullptr)}};
    rep["results"] = results;
    rep["diagnostics"] = diagnostics;
    rep["divergence_only"] = !any_finite;
    write_file_atomic(path_in(o.out_dir, "constants.json"), dump(rep));

    std::ostringstream csv;
    csv << csv_preamble(cfg) << "s,beta_WP,beta_WP_raw,h_WLS,h_WLS_raw\n";
    std::size_t ib = 0, ih = 0;
    for (double s : grid) {
        csv << num(s);
        for (const auto* rf : {&bwp, &hwls}) {
            std::size_t& i = rf == &bwp ? ib : ih;
            if (*rf && i < (*rf)->s.size() && (*rf)->s[i] == s) {
                csv << ',' << num((*rf)->value(i)) << ',' << num(std::exp((*rf)->log_raw[i]));
                ++i;
            } else {
                csv << ",,";
            }
        }
        csv << '\n';
    }
    write_file_atomic(path_in(o.out_dir, "rates.csv"), csv.str());

    if (!any_finite || (o.strict && any_divergence)) return exit_divergent;
    return exit_ok;
}

// ---------------------------------------------------------------- hardy

int cmd_hardy(const json& cfg, const Options& o) {
    auto [mu, nu] = measures_from(cfg);
    if (!mu.is_probability()) fail(ErrorCode::config, "hardy needs a probability measure");
    prepare_out(o.out_dir);
    TailProfile tp(mu, nu);
    json reports = json::array();
    bool any_div = false, any_pass = false;
    for (double q : cfg["q"].get<std::vector<double>>()) {
        HardyReport hp = hardy_check_poincare(tp, q), hl = hardy_check_lsi(tp, q);
        for (const auto* h : {&hp, &hl}) {
            bool ok = h->verdict == Verdict::satisfied;
            any_div = any_div || !ok;
            any_pass = any_pass || ok;
        }
        reports.push_back({{"q", q}, {"poincare", to_json(hp)}, {"lsi", to_json(hl)}});
    }
    json rep = header(cfg);
    rep["measure"] = measure_json(mu);
    rep["reference"] = measure_json(nu);
    rep["median"] = tp.median();
    rep["reports"] = reports;
    write_file_atomic(path_in(o.out_dir, "hardy.json"), dump(rep));
    if (!any_pass || (o.strict && any_div)) return exit_divergent;
    return exit_ok;
}

// ---------------------------------------------------------------- capacity

json capacity_json(const Capacity& c) {
    if (c.is_infinite()) return {{"infinite", true}, {"value", nullptr}};
    return {{"infinite", false}, {"value", c.value()}};
}

int cmd_capacity(const json& cfg, const Options& o) {
    auto [mu, nu] = measures_from(cfg);
    const json& cj = cfg["condenser"];
    auto end = [](const json& v, double inf) { return v.is_null() ? inf : v.get<double>(); };
    Condenser cond;
    cond.outer = {end(cj["outer"][0], -INFINITY), end(cj["outer"][1], INFINITY)};
    for (const auto& a : cj["inner"]) cond.inner.push_back({a[0].get<double>(), a[1].get<double>()});
    if (!(cond.outer.lo < cond.outer.hi)) fail(ErrorCode::config, "outer set is empty");
    for (const auto& a : cond.inner)
        if (!(a.lo <= a.hi && a.lo >= cond.outer.lo && a.hi <= cond.outer.hi))
            fail(ErrorCode::config, "every inner interval must lie inside the outer set");
    int n_grid = cfg.value("n_grid", 2000);
    prepare_out(o.out_dir);

    json rep = header(cfg);
    rep["measure"] = measure_json(mu);
    rep["reference"] = measure_json(nu);
    rep["n_grid"] = n_grid;
    rep["variational"] = capacity_json(cap_variational(nu, cond, n_grid));
    std::optional<TailProfile> tp;
    if (mu.is_probability()) tp.emplace(mu, nu);
    if (tp && cond.inner.size() == 1)
        rep["closed_form"] = capacity_json(cap_interval(*tp, cond.inner[0], cond.outer));
    else
        rep["closed_form"] = nullptr;

    if (cfg.contains("profile_t")) {
        if (!tp) fail(ErrorCode::config, "capacity profiles need a probability measure");
        static const char* kNames[4] = {"phi_right", "phi_left", "psi_right", "psi_left"};
        std::ostringstream csv, one[4];
        csv << csv_preamble(cfg) << "t,phi_right,phi_left,psi_right,psi_left\n";
        for (auto& c : one) c << csv_preamble(cfg) << "t,value\n";
        for (double t : cfg["profile_t"].get<std::vector<double>>()) {
            csv << num(t);
            int col = 0;
            for (int kind = 0; kind < 2; ++kind)
                for (Side s : {Side::right, Side::left}) {
                    std::string cell;
                    try {
                        CapacityProfile p = kind == 0 ? phi_profile(*tp, s, {t}) : psi_profile(*tp, s, {t});
                        const Capacity& c = p.values.front();
                        cell = c.is_infinite() ? std::string("inf") : num(c.value());
                    } catch (const Error& e) {
                        if (e.code() != ErrorCode::out_of_range) throw;
                    }
                    csv << ',' << cell;
                    // the two-column files skip t outside the profile's range
                    if (!cell.empty()) one[col] << num(t) << ',' << cell << '\n';
                    ++col;
                }
            csv << '\n';
        }
        write_file_atomic(path_in(o.out_dir, "profiles.csv"), csv.str());
        for (int k = 0; k < 4; ++k) write_file_atomic(path_in(o.out_dir, std::string(kNames[k]) + ".csv"), one[k].str());
    }
    write_file_atomic(path_in(o.out_dir, "capacity.json"), dump(rep));
    return exit_ok;
}

// ---------------------------------------------------------------- simulate

std::function<double(double)> potential_from(const json& p) {
    std::string type = p["type"].get<std::string>();
    double s = p.value("scale", 1.0);
    if (type == "zero") return [](double) { return 0.0; };
    if (type == "quadratic") return [s](double x) { return 0.5 * (x / s) * (x / s); };
    if (type == "heavy_tail") {
        if (!p.contains("alpha")) fail(ErrorCode::config, "heavy_tail potential needs alpha");
        double a = p["alpha"].get<double>();
        return [a, s](double x) { return (1 + a) * std::log1p(std::fabs(x) / s); };
    }
    if (!p.contains("p")) fail(ErrorCode::config, "exp_power potential needs p");
    double e = p["p"].get<double>();
    return [e, s](double x) { return std::pow(std::fabs(x) / s, e); };
}

std::function<double(double)> initial_from(const json& j) {
    std::string type = j["type"].get<std::string>();
    double a = j.value("a", 1.0), b = j.value("b", 0.5), c = j.value("center", 0.0), w = j.value("width", 1.0);
    if (type == "constant") return [a](double) { return a; };
    if (type == "tanh") return [a, b, c, w](double x) { return a + b * std::tanh((x - c) / w); };
    if (type == "bump") return [a, b, c, w](double x) { return a + b * std::exp(-((x - c) / w) * ((x - c) / w)); };
    return [a, b, c](double x) { return x > c ? a + b : a; };
}

ConstantEstimate constant_for(const json& v, const std::string& which, double m, const Measure1D& mu_psi) {
    double q = which == "C_P" ? 2 / (m + 1) : 1 / m;
    ConstantName name = which == "C_P" ? ConstantName::C_P : ConstantName::C_LS;
    if (v.is_number()) {
        if (!(v.get<double>() > 0)) fail(ErrorCode::config, which + " must be positive");
        return {name, q, std::nullopt, v.get<double>(), "", "given in the config", {}};
    }
    std::string s = v.get<std::string>();
    if (!(q >= 0.5 && q < 1))
        fail(ErrorCode::config, which + " '" + s + "' needs the coupled q in [1/2, 1); adjust m");
    TailProfile tp(mu_psi, mu_psi);
    ConstantEstimate e;
    if (which == "C_P" && s == "cp_upper") e = cp_upper(tp, q);
    else if (which == "C_P" && s == "cp_upper_from_weak") e = cp_upper_from_weak(weak_poincare_from_tails(tp, dyadic_s_grid()), q);
    else if (which == "C_LS" && s == "cls_upper") e = cls_upper_from_weak(weak_lsi_from_capacity(tp, dyadic_s_grid()), q);
    else fail(ErrorCode::config, "unknown constant source '" + s + "' for " + which);
    if (!e.upper) fail(ErrorCode::missing_constant, which + " has no finite upper bound for this potential");
    return e;
}

std::vector<double> random_initial(const WpmeProblem& pb, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.0, 2 * M_PI);
    double c[4], ph[4];
    for (int j = 0; j < 4; ++j) {
        c[j] = U(gen);
        ph[j] = P(gen);
    }
    std::vector<double> u;
    for (double x : pb.x) {
        double y = (x - pb.domain.lo) / (pb.domain.hi - pb.domain.lo), s = 0;
        for (int j = 0; j < 4; ++j) s += c[j] * std::sin((j + 1) * M_PI * y + ph[j]);
        u.push_back(1 + 0.2 * s);
    }
    return u;
}

int cmd_simulate(const json& cfg, const Options& o) {
    const json& sv = cfg["solver"];
    double m = sv["m"].get<double>();
    Interval dom{sv["domain"][0].get<double>(), sv["domain"][1].get<double>()};
    if (!(dom.lo < dom.hi)) fail(ErrorCode::config, "domain must be increasing");
    auto psi = potential_from(sv["potential"]);
    WpmeProblem pb = discretize(psi, m, dom, sv["n_cells"].get<int>(), initial_from(sv["initial"]));

    RunOptions ro;
    ro.T = sv["T"].get<double>();
    ro.dt = sv["dt"].get<double>();
    ro.step.theta = sv.value("theta", 1.0);
    ro.step.max_halvings = sv.value("max_halvings", 20);
    int ns = sv.value("samples", 200);
    for (int k = 0; k <= ns; ++k) ro.sample_times.push_back(ro.T * k / ns);
    ro.sample_times.back() = ro.T;

    if (sv.contains("constants")) {
        std::optional<Measure1D> mu_psi;
        auto get_mu = [&]() -> const Measure1D& {
            if (!mu_psi) {
                if (sv["potential"]["type"] == "zero") mu_psi = Measure1D::uniform(dom.lo, dom.hi);
                else
                    mu_psi = Measure1D::custom([psi](double x) { return -psi(x); }, dom, true, 0.5 * (dom.lo + dom.hi),
                                               0.25 * (dom.hi - dom.lo));
            }
            return *mu_psi;
        };
        for (const char* which : {"C_P", "C_LS"}) {
            const json& v = sv["constants"].value(which, json(nullptr));
            if (v.is_null()) continue;
            ConstantEstimate e = constant_for(v, which, m, v.is_number() ? Measure1D::uniform(0, 1) : get_mu());
            (std::string(which) == "C_P" ? ro.C_P : ro.C_LS) = e;
        }
    }
    prepare_out(o.out_dir);
    json rep = header(cfg);
    rep["problem"] = {{"m", m}, {"n_cells", pb.n_cells}, {"domain", {dom.lo, dom.hi}}, {"dt", ro.dt}, {"T", ro.T},
                      {"theta", ro.step.theta}};
    DecayTrace tr;
    try {
        tr = run(pb, ro);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::newton_diverged) throw;
        rep["pass"] = false;
        rep["error"] = e.what();
        write_file_atomic(path_in(o.out_dir, "verdict.json"), dump(rep));
        return exit_solver;
    }

    double drift = 0;
    for (double ms : tr.mass) drift = std::max(drift, std::fabs(ms - tr.mass.front()) / tr.mass.front());
    // least-squares rate of log Var
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t k = 0; k < tr.times.size(); ++k)
        if (tr.variance[k] > 1e-300) {
            double x = tr.times[k], y = std::log(tr.variance[k]);
            sx += x, sy += y, sxx += x * x, sxy += x * y, ++cnt;
        }
    json fitted = cnt >= 2 ? json(-(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx)) : json(nullptr);
    bool pass = drift <= 1e-10;
    rep["mass_drift"] = drift;
    rep["fitted_variance_rate"] = fitted;
    rep["energy_identity_residual"] = energy_identity_residual(tr);
    rep["dissipation_identity_residual"] = dissipation_identity_residual(tr);
    rep["newton"] = {{"max_iterations", tr.newton.iterations}, {"max_residual", tr.newton.residual},
                     {"halvings", tr.newton.halvings}, {"steps", tr.newton.steps}};
    if (tr.C_P || tr.C_LS) {
        EnvelopeVerdict ev = envelope_verdict(tr);
        rep["envelope"] = {{"pass", ev.pass},
                           {"variance_checked", ev.var_checked},
                           {"entropy_checked", ev.ent_checked},
                           {"max_ratio_variance", ev.max_ratio_var},
                           {"max_ratio_entropy", ev.max_ratio_ent},
                           {"reciprocal_C_P", ev.reciprocal_cp ? json(*ev.reciprocal_cp) : json(nullptr)},
                           {"C_P", tr.C_P ? json(*tr.C_P) : json(nullptr)},
                           {"C_LS", tr.C_LS ? json(*tr.C_LS) : json(nullptr)},
                           {"diagnostics", ev.diagnostics}};
        pass = pass && ev.pass;
    } else {
        rep["envelope"] = nullptr;
    }

    int pairs = sv.value("contraction_pairs", 0);
    if (pairs > 0) {
        std::mt19937_64 gen(seed_of(cfg));
        std::vector<std::vector<double>> init;
        for (int p = 0; p < 2 * pairs; ++p) init.push_back(random_initial(pb, gen));
        struct PairResult {
            double violation = 0, order_violation = 0;
            std::string error;
        };
        std::vector<PairResult> res(static_cast<std::size_t>(pairs));
        RunOptions pr = ro;
        pr.C_P.reset();
        pr.C_LS.reset();
        pr.keep_states = true;
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int p; (p = next++) < pairs;) {
                try {
                    auto up = static_cast<std::size_t>(p);
                    WpmeProblem a = pb, b = pb, c = pb;
                    a.u0 = init[2 * up];
                    b.u0 = init[2 * up + 1];
                    c.u0 = a.u0;
                    for (std::size_t i = 0; i < c.u0.size(); ++i) c.u0[i] += 0.5 * std::fabs(b.u0[i] - 1);
                    DecayTrace ta = run(a, pr), tb = run(b, pr), tc = run(c, pr);
                    res[up].violation = std::max(check_contraction(ta, tb).max_violation, check_contraction(tb, ta).max_violation);
                    for (std::size_t k = 0; k < ta.states.size(); ++k)
                        for (std::size_t i = 0; i < ta.states[k].size(); ++i)
                            res[up].order_violation = std::max(res[up].order_violation, ta.states[k][i] - tc.states[k][i]);
                } catch (const Error& e) {
                    res[static_cast<std::size_t>(p)].error = e.what();
                }
            }
        };
        {
            std::vector<std::jthread> pool;
            int nt = std::min(resolve_threads(o.threads), pairs);
            for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        }
        double mv = 0, ov = 0;
        for (const auto& r : res) {
            if (!r.error.empty()) fail(ErrorCode::newton_diverged, r.error);
            mv = std::max(mv, r.violation);
            ov = std::max(ov, r.order_violation);
        }
        bool cpass = mv <= 1e-9 && ov <= 1e-12;
        rep["contraction"] = {{"pairs", pairs}, {"max_violation", mv}, {"order_violation", ov}, {"pass", cpass}};
        pass = pass && cpass;
    } else {
        rep["contraction"] = nullptr;
    }
    rep["pass"] = pass;

    std::ostringstream csv;
    csv << csv_preamble(cfg) << "t,mass,variance,entropy,dissipation,envelope_var,envelope_ent\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        csv << num(tr.times[k]) << ',' << num(tr.mass[k]) << ',' << num(tr.variance[k]) << ',' << num(tr.entropy[k]) << ','
            << num(tr.dissipation[k]) << ',' << (tr.envelope_var.empty() ? "" : num(tr.envelope_var[k])) << ','
            << (tr.envelope_ent.empty() ? "" : num(tr.envelope_ent[k])) << '\n';
    }
    write_file_atomic(path_in(o.out_dir, "trace.csv"), csv.str());
    write_file_atomic(path_in(o.out_dir, "verdict.json"), dump(rep));
    return exit_ok;
}

// ---------------------------------------------------------------- sweep

const char* kSweepColumns =
    "cell,family,params,q,m,hardy_poincare,hardy_lsi,threshold_rule,beta_P_upper,cp_upper,cp_upper_from_weak,"
    "cp_lower_trial,cls_upper_from_weak,wpme_q,wpme_cp_upper,error";

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string sweep_row(const json& cfg, std::size_t idx, const std::string& family, const std::vector<double>& params,
                      double q, double m) {
    std::ostringstream row;
    std::string ps;
    for (std::size_t i = 0; i < params.size(); ++i) ps += (i ? ";" : "") + num(params[i]);
    row << idx << ',' << family << ',' << ps << ',' << num(q) << ',' << num(m) << ',';
    std::string rule;
    if (family == "heavy_tail" && params.size() == 1) rule = params[0] > 2 * q / (1 - q) + 1e-9 ? "satisfied" : "divergent";
    double wq = 2 / (m + 1);
    try {
        Measure1D mu = measure_from({{"family", family}, {"params", params}}, tolerances_from(cfg));
        TailProfile tp(mu, mu);
        HardyReport hp = hardy_check_poincare(tp, q), hl = hardy_check_lsi(tp, q);
        std::optional<double> bp, cp, cpw, low, clw, wcp;
        bp = beta_P_upper(tp, q).upper;
        cp = cp_upper(tp, q).upper;
        auto grid = dyadic_s_grid();
        try {
            cpw = cp_upper_from_weak(weak_poincare_from_tails(tp, grid), q).upper;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::norm_divergent) throw;
        }
        try {
            clw = cls_upper_from_weak(weak_lsi_from_capacity(tp, grid), q).upper;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::norm_divergent) throw;
        }
        if (cfg["sweep"].value("lower_bounds", false))
            low = cp_lower_trial(mu, mu, q, trials_from(cfg), seed_of(cfg)).estimate.lower;
        if (wq >= 0.5 && wq < 1) wcp = cp_upper(tp, wq).upper;
        row << to_string(hp.verdict) << ',' << to_string(hl.verdict) << ',' << rule << ',' << opt_num(bp) << ','
            << opt_num(cp) << ',' << opt_num(cpw) << ',' << opt_num(low) << ',' << opt_num(clw) << ',' << num(wq) << ','
            << opt_num(wcp) << ',';
    } catch (const Error& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        row << ",," << rule << ",,,,,," << num(wq) << ",," << msg;
    }
    row << '\n';
    return row.str();
}

int cmd_sweep(const json& cfg, const Options& o) {
    const json& sw = cfg["sweep"];
    std::string family = sw["family"].get<std::string>();
    auto params = sw["params"].get<std::vector<std::vector<double>>>();
    auto qs = sw["q"].get<std::vector<double>>();
    auto ms = sw.value("m", std::vector<double>{1.0});
    struct Cell {
        std::size_t idx;
        std::vector<double> p;
        double q, m;
    };
    std::vector<Cell> cells;
    for (const auto& p : params)
        for (double q : qs)
            for (double m : ms) cells.push_back({cells.size(), p, q, m});
    prepare_out(o.out_dir);
    fs::path cell_dir = fs::path(o.out_dir) / ("cells_" + config_hash(cfg));
    fs::create_directories(cell_dir);
    auto cell_path = [&](std::size_t i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "cell_%06zu.csv", i);
        return (cell_dir / buf).string();
    };

    std::atomic<std::size_t> next{0};
    std::atomic<int> computed{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < cells.size();) {
            if (fs::exists(cell_path(i))) continue;
            const Cell& c = cells[i];
            write_file_atomic(cell_path(i), sweep_row(cfg, c.idx, family, c.p, c.q, c.m));
            ++computed;
        }
    };
    {
        std::vector<std::jthread> pool;
        std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(o.threads)), std::max<std::size_t>(cells.size(), 1));
        for (std::size_t t = 0; t < nt; ++t) pool.emplace_back(worker);
    }

    std::ostringstream csv;
    csv << csv_preamble(cfg) << kSweepColumns << '\n';
    bool any_div = false;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        std::ifstream in(cell_path(i), std::ios::binary);
        std::string line;
        std::getline(in, line);
        if (line.find("inconclusive-divergent") != std::string::npos) any_div = true;
        csv << line << '\n';
    }
    write_file_atomic(path_in(o.out_dir, "sweep.csv"), csv.str());
    json rep = header(cfg);
    rep["cells"] = cells.size();
    rep["columns"] = kSweepColumns;
    write_file_atomic(path_in(o.out_dir, "sweep.json"), dump(rep));
    std::cerr << "sweep: " << cells.size() << " cells, " << computed.load() << " computed, "
              << cells.size() - static_cast<std::size_t>(computed.load()) << " reused\n";
    if (o.strict && any_div) return exit_divergent;
    return exit_ok;
}

}  // namespace

int run(const Options& opt) {
    try {
        json cfg = load_config(opt.config_path, opt.command);
        if (opt.seed) cfg["seed"] = *opt.seed;
        if (opt.command == "analyze") return cmd_analyze(cfg, opt);
        if (opt.command == "hardy") return cmd_hardy(cfg, opt);
        if (opt.command == "capacity") return cmd_capacity(cfg, opt);
        if (opt.command == "simulate") return cmd_simulate(cfg, opt);
        if (opt.command == "sweep") return cmd_sweep(cfg, opt);
        fail(ErrorCode::config, "unknown command '" + opt.command + "'");
    } catch (const Error& e) {
        std::cerr << "lqineq: " << e.what() << '\n';
        switch (e.code()) {
            case ErrorCode::config:
            case ErrorCode::bad_params: return exit_config;
            case ErrorCode::norm_divergent: return exit_divergent;
            default: return exit_solver;
        }
    } catch (const std::exception& e) {
        std::cerr << "lqineq: " << e.what() << '\n';
        return exit_solver;
    }
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Numerical toolkit for L^q Poincare and log-Sobolev inequalities in one dimension"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Options opt;
    std::uint64_t seed = 0;
    const std::pair<const char*, const char*> cmds[] = {
        {"analyze", "constants, Hardy checks and rate functions for one measure"},
        {"simulate", "weighted porous medium run with decay verdicts"},
        {"sweep", "Cartesian sweep over family parameters, q and m"},
        {"capacity", "condenser capacity and isocapacitary profiles"},
        {"hardy", "Hardy-integral criteria only"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, desc] : cmds) {
        CLI::App* s = app.add_subcommand(name, desc);
        s->add_option("--config", opt.config_path, "JSON config file")->required();
        s->add_option("--out", opt.out_dir, "output directory");
        s->add_option("--seed", seed, "override the config seed");
        s->add_option("--threads", opt.threads, "worker threads (falls back to LQINEQ_THREADS)")->check(CLI::PositiveNumber);
        s->add_flag("--strict", opt.strict, "exit 3 on any divergence");
        subs.push_back(s);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }
    for (CLI::App* s : subs)
        if (s->parsed()) {
            opt.command = s->get_name();
            if (s->count("--seed")) opt.seed = seed;
        }
    return run(opt);
}

}  // namespace lqineq::cli
